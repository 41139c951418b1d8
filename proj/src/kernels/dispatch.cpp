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

#include <cstdlib>
#include <string_view>

#include "freqalloc/kernels.hpp"

namespace freqalloc::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "scalar";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(FREQALLOC_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(FREQALLOC_HAVE_NEON) && defined(__aarch64__)
      return true;  // baseline on AArch64
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() {
  static const Isa chosen = [] {
    const char* force = std::getenv("FREQALLOC_FORCE_SCALAR");
    if (force != nullptr && std::string_view(force) == "1") return Isa::Scalar;
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
  }();
  return chosen;
}

CountFn kernel_for(Isa isa) {
  if (!isa_available(isa)) return nullptr;
  switch (isa) {
    case Isa::Scalar:
      return &count_violations_scalar;
#if defined(FREQALLOC_HAVE_AVX2)
    case Isa::Avx2:
      return &count_violations_avx2;
#endif
#if defined(FREQALLOC_HAVE_NEON) && defined(__aarch64__)
    case Isa::Neon:
      return &count_violations_neon;
#endif
    default:
      return nullptr;
  }
}

}  // namespace freqalloc::kernels
