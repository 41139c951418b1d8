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

#include <cmath>

#include "freqalloc/kernels.hpp"

namespace freqalloc::kernels {

void count_violations_scalar(const CheckRows& rows, const double* freq, std::size_t lanes,
                             std::uint32_t* counts) {
  const std::size_t n = rows.size();
  for (std::size_t r = 0; r < n; ++r) {
    const double* f0 = freq + rows.q0[r] * lanes;
    const double* f1 = freq + rows.q1[r] * lanes;
    const double* f2 = freq + rows.q2[r] * lanes;
    const double c0 = rows.c0[r], c1 = rows.c1[r], c2 = rows.c2[r];
    const double k = rows.constant[r], bound = rows.bound[r];
    if (rows.kind[r] == CheckRows::Abs) {
      for (std::size_t l = 0; l < lanes; ++l) {
        double v = k + c0 * f0[l];
        v = v + c1 * f1[l];
        v = v + c2 * f2[l];
        counts[l] += std::fabs(v) < bound ? 1u : 0u;
      }
    } else {
      for (std::size_t l = 0; l < lanes; ++l) {
        double v = k + c0 * f0[l];
        v = v + c1 * f1[l];
        v = v + c2 * f2[l];
        counts[l] += v < bound ? 1u : 0u;
      }
    }
  }
}

}  // namespace freqalloc::kernels
