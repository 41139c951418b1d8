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

#include "freqalloc/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace freqalloc::kernels {

// Two lanes per vector, two vectors per step. vmulq/vaddq only: no vfmaq,
// which would round differently from the scalar kernel.
void count_violations_neon(const CheckRows& rows, const double* freq, std::size_t lanes,
                           std::uint32_t* counts) {
  const std::size_t n = rows.size();
  for (std::size_t r = 0; r < n; ++r) {
    const double* f0 = freq + rows.q0[r] * lanes;
    const double* f1 = freq + rows.q1[r] * lanes;
    const double* f2 = freq + rows.q2[r] * lanes;
    const float64x2_t c0 = vdupq_n_f64(rows.c0[r]);
    const float64x2_t c1 = vdupq_n_f64(rows.c1[r]);
    const float64x2_t c2 = vdupq_n_f64(rows.c2[r]);
    const float64x2_t k = vdupq_n_f64(rows.constant[r]);
    const float64x2_t bound = vdupq_n_f64(rows.bound[r]);
    const bool is_abs = rows.kind[r] == CheckRows::Abs;
    for (std::size_t l = 0; l < lanes; l += 2) {
      float64x2_t v = vaddq_f64(k, vmulq_f64(c0, vld1q_f64(f0 + l)));
      v = vaddq_f64(v, vmulq_f64(c1, vld1q_f64(f1 + l)));
      v = vaddq_f64(v, vmulq_f64(c2, vld1q_f64(f2 + l)));
      if (is_abs) v = vabsq_f64(v);
      const uint64x2_t bad = vshrq_n_u64(vcltq_f64(v, bound), 63);
      counts[l] += static_cast<std::uint32_t>(vgetq_lane_u64(bad, 0));
      counts[l + 1] += static_cast<std::uint32_t>(vgetq_lane_u64(bad, 1));
    }
  }
}

}  // namespace freqalloc::kernels
#endif
