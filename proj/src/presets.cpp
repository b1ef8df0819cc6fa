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

#include "fastgate/presets.hpp"

#include "fastgate/optimizer.hpp"

namespace fastgate {

namespace {

GateConfig calibrated(GateConfig c) {
  c.pulse.omega_peak = kTwoPi * 1e6;
  c.pulse = calibrate_phase(c.pulse, validate(c));
  return c;
}

GateConfig make_high_fidelity() {
  GateConfig c;
  c.trap.f_c = 1.9243e6;
  c.pulse.segments = {{82.1e-9, 0.445}, {299.9e-9, 0.838}, {819.5e-9, 1.0}};
  c.pulse.nu = 2.6301e6;
  c.pulse.phi_half = 91.4 * kPi / 180.0;
  return calibrated(c);
}

GateConfig make_fastest() {
  GateConfig c;
  c.trap.f_c = 1.8615e6;
  c.pulse.segments = {{71.4e-9, 0.284}, {64.5e-9, 0.617}, {46.7e-9, 0.862}, {112.3e-9, 1.0}};
  c.pulse.nu = 6.3802e6;
  c.pulse.phi_half = 21.4 * kPi / 180.0;
  return calibrated(c);
}

}  // namespace

GateConfig high_fidelity_gate() {
  static const GateConfig c = make_high_fidelity();
  return c;
}

GateConfig fastest_gate() {
  static const GateConfig c = make_fastest();
  return c;
}

GateConfig rectangular_gate(double gate_time, double f_c, double nu) {
  GateConfig c;
  c.trap.f_c = f_c;
  c.pulse.segments = {{gate_time - c.pulse.edge_time, 1.0}};
  c.pulse.nu = nu;
  return calibrated(c);
}

}  // namespace fastgate
