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

#include <cmath>
#include <string>

#include "fastgate/config.hpp"
#include "fastgate/optimizer.hpp"

namespace fastgate::testing {

inline bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// 20 us constant pulse looping once around the COM mode: f_c t_g = 40,
/// nu = 1.02565 f_c, 500 ns ramps.
inline GateConfig adiabatic_reference() {
  GateConfig g;
  g.trap.f_c = 2.0e6;
  g.pulse.symmetric = false;
  g.pulse.edge_time = 500e-9;
  g.pulse.segments = {{19.5e-6, 1.0}};
  g.pulse.nu = 2.0513e6;
  g.pulse.omega_peak = kTwoPi * 0.2e6;
  const ValidatedConfig v = validate(g);
  g.pulse = calibrate_phase(v.pulse(), v);
  return g;
}

inline GateConfig with_phi0(GateConfig g, int n) {
  g.sim.phi0_grid_size = n;
  return g;
}

}  // namespace fastgate::testing
