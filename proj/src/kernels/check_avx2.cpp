// Copyright 2026 The freqalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built with -mavx2 only; never called unless the CPU reports AVX2.

#include <immintrin.h>

#include "freqalloc/kernels.hpp"

namespace freqalloc::kernels {

namespace {

// Per-lane 0/1 increments for a 4-bit movemask, as four 32-bit ints.
inline __m128i mask_to_ones(__m256d m) {
  __m128i lo = _mm256_castsi256_si128(_mm256_castpd_si256(m));
  __m128i hi = _mm256_extracti128_si256(_mm256_castpd_si256(m), 1);
  // 64-bit all-ones lanes -> pick the low dword of each.
  __m128i packed = _mm_castps_si128(
      _mm_shuffle_ps(_mm_castsi128_ps(lo), _mm_castsi128_ps(hi), _MM_SHUFFLE(2, 0, 2, 0)));
  return _mm_srli_epi32(packed, 31);
}

}  // namespace

void count_violations_avx2(const CheckRows& rows, const double* freq, std::size_t lanes,
                           std::uint32_t* counts) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  const std::size_t n = rows.size();
  for (std::size_t r = 0; r < n; ++r) {
    const double* f0 = freq + rows.q0[r] * lanes;
    const double* f1 = freq + rows.q1[r] * lanes;
    const double* f2 = freq + rows.q2[r] * lanes;
    const __m256d c0 = _mm256_set1_pd(rows.c0[r]);
    const __m256d c1 = _mm256_set1_pd(rows.c1[r]);
    const __m256d c2 = _mm256_set1_pd(rows.c2[r]);
    const __m256d k = _mm256_set1_pd(rows.constant[r]);
    const __m256d bound = _mm256_set1_pd(rows.bound[r]);
    const bool is_abs = rows.kind[r] == CheckRows::Abs;
    for (std::size_t l = 0; l < lanes; l += 4) {
      __m256d v = _mm256_add_pd(k, _mm256_mul_pd(c0, _mm256_loadu_pd(f0 + l)));
      v = _mm256_add_pd(v, _mm256_mul_pd(c1, _mm256_loadu_pd(f1 + l)));
      v = _mm256_add_pd(v, _mm256_mul_pd(c2, _mm256_loadu_pd(f2 + l)));
      if (is_abs) v = _mm256_andnot_pd(sign, v);
      const __m256d bad = _mm256_cmp_pd(v, bound, _CMP_LT_OQ);
      __m128i acc = _mm_loadu_si128(reinterpret_cast<const __m128i*>(counts + l));
      acc = _mm_add_epi32(acc, mask_to_ones(bad));
      _mm_storeu_si128(reinterpret_cast<__m128i*>(counts + l), acc);
    }
  }
}

}  // namespace freqalloc::kernels
