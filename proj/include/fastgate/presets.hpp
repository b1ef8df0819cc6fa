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

#include "fastgate/config.hpp"

namespace fastgate {

// Published gate parameter sets. omega_peak is recalibrated so the
// Lamb-Dicke entangling phase is exactly pi/2; phi_half holds the published
// analysis phase, which the solvers optimize over by default.

/// 1.59 us five-segment gate (f_c = 1.9243 MHz, nu = 2.6301 MHz).
GateConfig high_fidelity_gate();

/// 483 ns seven-segment gate (f_c = 1.8615 MHz, nu = 6.3802 MHz).
GateConfig fastest_gate();

/// Constant-amplitude pulse of total length `gate_time`.
GateConfig rectangular_gate(double gate_time, double f_c, double nu);

}  // namespace fastgate
