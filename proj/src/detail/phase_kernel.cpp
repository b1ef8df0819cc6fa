// Copyright 2026 The fastgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Built with vector math enabled; cos and sin sit in separate loops so the
// compiler maps each onto the SIMD variants instead of scalar sincos.

#include "phase_kernel.hpp"

#include <cmath>

namespace fastgate::detail {

__attribute__((target_clones("avx2,fma", "default")))
void apply_phase(double* psi, const double* phase, double* scratch, std::size_t n) {
  double* c = scratch;
  double* s = scratch + n;
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) c[i] = std::cos(phase[i]);
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(phase[i]);
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) {
    const double re = psi[2 * i];
    const double im = psi[2 * i + 1];
    psi[2 * i] = re * c[i] + im * s[i];
    psi[2 * i + 1] = im * c[i] - re * s[i];
  }
}

}  // namespace fastgate::detail
