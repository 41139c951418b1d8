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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace freqalloc::kernels {

/// Constraint rows in structure-of-arrays form. Row r evaluates
///   v = ((constant + c0*f[q0]) + c1*f[q1]) + c2*f[q2]
/// in exactly that order and is violated when |v| < bound (kind Abs) or
/// v < bound (kind NonNeg). Unused terms carry coefficient 0.
struct CheckRows {
  enum Kind : std::uint8_t { Abs = 0, NonNeg = 1 };

  std::vector<std::uint32_t> q0, q1, q2;
  std::vector<double> c0, c1, c2;
  std::vector<double> constant;
  std::vector<double> bound;
  std::vector<std::uint8_t> kind;

  std::size_t size() const { return bound.size(); }
  void push(const std::uint32_t (&q)[3], const double (&c)[3], double k, double b, Kind kd) {
    q0.push_back(q[0]);
    q1.push_back(q[1]);
    q2.push_back(q[2]);
    c0.push_back(c[0]);
    c1.push_back(c[1]);
    c2.push_back(c[2]);
    constant.push_back(k);
    bound.push_back(b);
    kind.push_back(kd);
  }
};

/// Adds, for each lane l < lanes, the number of violated rows to counts[l].
/// `freq` holds lane-major blocks: freq[q * lanes + l]. lanes % 4 == 0.
using CountFn = void (*)(const CheckRows& rows, const double* freq, std::size_t lanes,
                         std::uint32_t* counts);

void count_violations_scalar(const CheckRows& rows, const double* freq, std::size_t lanes,
                             std::uint32_t* counts);
#if defined(FREQALLOC_HAVE_AVX2)
void count_violations_avx2(const CheckRows& rows, const double* freq, std::size_t lanes,
                           std::uint32_t* counts);
#endif
#if defined(FREQALLOC_HAVE_NEON)
void count_violations_neon(const CheckRows& rows, const double* freq, std::size_t lanes,
                           std::uint32_t* counts);
#endif

enum class Isa : std::uint8_t { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);
/// Compiled in and supported by the running CPU.
bool isa_available(Isa isa);
/// Best available ISA; FREQALLOC_FORCE_SCALAR=1 in the environment pins Scalar.
Isa best_isa();
/// Kernel for `isa`, or nullptr when unavailable.
CountFn kernel_for(Isa isa);

}  // namespace freqalloc::kernels
