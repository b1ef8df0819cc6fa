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

#include "fastgate/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fastgate {

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::DownDown: return "dd";
    case Branch::DownUp: return "du";
    case Branch::UpDown: return "ud";
    case Branch::UpUp: return "uu";
  }
  return "?";
}

std::vector<Segment> PulseShape::expanded() const {
  std::vector<Segment> out(segments);
  if (symmetric && !segments.empty()) {
    for (auto it = segments.rbegin() + 1; it != segments.rend(); ++it) out.push_back(*it);
  }
  return out;
}

double PulseShape::gate_time() const {
  double total = edge_time;
  for (const auto& s : expanded()) total += s.duration;
  return total;
}

bool SimOptions::operator==(const SimOptions& o) const {
  return phi0_grid_size == o.phi0_grid_size && phi0_offset == o.phi0_offset &&
         grid_points == o.grid_points && grid_extent == o.grid_extent &&
         time_step == o.time_step && initial == o.initial && rng_seed == o.rng_seed &&
         parallelism == o.parallelism && optimize_phi_half == o.optimize_phi_half &&
         static_cast<bool>(phase_perturbation) == static_cast<bool>(o.phase_perturbation);
}

DriveGeometry DriveGeometry::from_trap(const TrapSpec& trap) {
  DriveGeometry g;
  const double r = 1.0 / std::sqrt(2.0);
  g.b = {{{r, r}, {r, -r}}};
  // Reduce before scaling so a half-integer spacing gives exactly pi.
  g.theta = {0.0, kTwoPi * std::fmod(trap.spacing_periods, 1.0)};
  return g;
}

std::vector<LinearPiece> envelope_pieces(const PulseShape& pulse) {
  const auto segs = pulse.expanded();
  const double h = 0.5 * pulse.edge_time;
  std::vector<LinearPiece> pieces;
  auto push = [&](double t0, double t1, double v0, double v1) {
    if (t1 > t0) pieces.push_back({t0, t1, v0, v1});
  };
  double boundary = h;
  double prev = 0.0;
  for (std::size_t i = 0; i <= segs.size(); ++i) {
    const double level = i < segs.size() ? segs[i].amplitude : 0.0;
    push(boundary - h, boundary + h, prev, level);
    if (i < segs.size()) {
      push(boundary + h, boundary + segs[i].duration - h, level, level);
      boundary += segs[i].duration;
    }
    prev = level;
  }
  return pieces;
}

double envelope_at(const std::vector<LinearPiece>& pieces, double t) {
  if (pieces.empty()) return 0.0;
  auto it = std::upper_bound(pieces.begin(), pieces.end(), t,
                             [](double x, const LinearPiece& p) { return x < p.t1; });
  if (it == pieces.end()) it = std::prev(pieces.end());
  const double f = (t - it->t0) / (it->t1 - it->t0);
  return it->v0 + (it->v1 - it->v0) * std::clamp(f, 0.0, 1.0);
}

double envelope(const PulseShape& pulse, double t) {
  const double tg = pulse.gate_time();
  if (!(t >= 0.0 && t <= tg)) throw std::out_of_range("envelope: t outside [0, t_g]");
  return envelope_at(envelope_pieces(pulse), t);
}

double pulse_area(const PulseShape& pulse) {
  double sum = 0.0;
  for (const auto& s : pulse.expanded()) sum += s.amplitude * s.duration;
  return pulse.omega_peak * sum;
}

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

ValidatedConfig validate(const GateConfig& config) {
  const auto& trap = config.trap;
  require(std::isfinite(trap.f_c) && trap.f_c > 0, "trap.f_c", "must be positive");
  require(trap.eta_c > 0 && trap.eta_c < 1, "trap.eta_c", "must lie in (0, 1)");
  require(trap.nbar_c >= 0, "trap.nbar_c", "must be non-negative");
  require(trap.nbar_s >= 0, "trap.nbar_s", "must be non-negative");
  require(std::isfinite(trap.spacing_periods) && trap.spacing_periods > 0 &&
              std::abs(std::fmod(trap.spacing_periods, 1.0) - 0.5) < 1e-9,
          "trap.spacing_periods", "must be a half-integer (k + 1/2)");

  const auto& pulse = config.pulse;
  require(!pulse.segments.empty(), "pulse.segments", "no segments");
  double max_amp = 0.0;
  double min_duration = std::numeric_limits<double>::infinity();
  for (const auto& s : pulse.segments) {
    require(std::isfinite(s.duration) && s.duration > 0, "pulse.segments.duration",
            "must be positive");
    require(s.amplitude >= 0 && s.amplitude <= 1, "pulse.segments.amplitude",
            "must lie in [0, 1]");
    max_amp = std::max(max_amp, s.amplitude);
    min_duration = std::min(min_duration, s.duration);
  }
  require(max_amp == 0.0 || std::abs(max_amp - 1.0) < 1e-12, "pulse.segments.amplitude",
          "largest amplitude must equal 1 (omega_peak carries the scale)");
  require(pulse.edge_time >= 0, "pulse.edge_time", "must be non-negative");
  require(pulse.edge_time <= min_duration, "pulse.edge_time",
          "exceeds the shortest segment duration");
  require(std::isfinite(pulse.omega_peak) && pulse.omega_peak >= 0, "pulse.omega_peak",
          "must be non-negative");
  require(std::isfinite(pulse.nu) && pulse.nu > 0, "pulse.nu", "must be positive");
  require(std::isfinite(pulse.phi_half), "pulse.phi_half", "must be finite");

  require(config.coupling.lambda_down != config.coupling.lambda_up, "coupling",
          "lambda_down equals lambda_up: no differential force");

  const auto& sim = config.sim;
  require(sim.phi0_grid_size >= 2, "sim.phi0_grid_size", "must be at least 2");
  require(!sim.grid_points || (is_power_of_two(*sim.grid_points) && *sim.grid_points >= 4),
          "sim.grid_points", "must be a power of two");
  require(!sim.grid_extent || *sim.grid_extent > 0, "sim.grid_extent", "must be positive");
  require(!sim.time_step || *sim.time_step > 0, "sim.time_step", "must be positive");
  require(sim.parallelism >= 1, "sim.parallelism", "must be at least 1");
  require(sim.initial.samples >= 1, "sim.initial_state.samples", "must be at least 1");

  ValidatedConfig v;
  v.raw_ = config;
  v.geometry_ = DriveGeometry::from_trap(trap);
  v.f_s_ = trap.f_s();
  v.eta_s_ = trap.eta_s();
  v.segments_ = pulse.expanded();
  v.gate_time_ = pulse.gate_time();
  v.pieces_ = envelope_pieces(pulse);
  return v;
}

std::vector<double> ValidatedConfig::phi0_grid() const {
  const int n = raw_.sim.phi0_grid_size;
  std::vector<double> grid(n);
  for (int k = 0; k < n; ++k) grid[k] = raw_.sim.phi0_offset + kTwoPi * k / n;
  return grid;
}

ValidatedConfig ValidatedConfig::with(const std::function<void(GateConfig&)>& edit) const {
  GateConfig copy = raw_;
  edit(copy);
  return validate(copy);
}

ValidatedConfig ValidatedConfig::with_omega(double omega_peak) const {
  return with([&](GateConfig& c) { c.pulse.omega_peak = omega_peak; });
}

}  // namespace fastgate
