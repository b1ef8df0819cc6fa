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

#pragma once

#include <cstddef>

namespace fastgate::detail {

/// psi[i] *= exp(-i phase[i]) for interleaved complex psi. `scratch` holds
/// 2n doubles.
void apply_phase(double* psi, const double* phase, double* scratch, std::size_t n);

}  // namespace fastgate::detail
