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

#include "fastgate/error_curve.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fastgate/full_solver.hpp"
#include "fastgate/ld_solver.hpp"
#include "fastgate/optimizer.hpp"
#include "fastgate/parallel.hpp"

namespace fastgate {

const char* regime_name(DriveRegime regime) {
  return regime == DriveRegime::BetweenModes ? "between_modes" : "above_stretch";
}

GateConfig rectangular_from(const GateConfig& base, double gate_time, double nu) {
  GateConfig g = base;
  g.pulse.symmetric = false;
  g.pulse.segments = {{gate_time - g.pulse.edge_time, 1.0}};
  g.pulse.nu = nu;
  if (!(g.pulse.omega_peak > 0)) g.pulse.omega_peak = kTwoPi * 1e6;
  return g;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Probe {
  double nu = 0.0;
  double ld_error = kInf;
  PulseShape pulse;
};

Probe probe(const GateConfig& base, double gate_time, double nu) {
  Probe p;
  p.nu = nu;
  try {
    const ValidatedConfig raw = validate(rectangular_from(base, gate_time, nu));
    p.pulse = calibrate_phase(raw.pulse(), raw);
    const ValidatedConfig cfg = raw.with([&](GateConfig& g) { g.pulse = p.pulse; });
    const LDGateResult r = ld_gate_error(cfg);
    p.ld_error = r.bell_error;
    p.pulse.phi_half = r.phi_half;
  } catch (const std::exception&) {
    p.ld_error = kInf;
  }
  return p;
}

struct BrentContext {
  const GateConfig* base;
  double gate_time;
};

double brent_objective(double nu, void* params) {
  const auto* c = static_cast<BrentContext*>(params);
  const double e = probe(*c->base, c->gate_time, nu).ld_error;
  return std::isfinite(e) ? e : 1.0;
}

Probe refine(const GateConfig& base, double gate_time, const Probe& lo, const Probe& mid,
             const Probe& hi) {
  BrentContext ctx{&base, gate_time};
  gsl_function fn{brent_objective, &ctx};
  gsl_min_fminimizer* s = gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent);
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  Probe best = mid;
  if (gsl_min_fminimizer_set_with_values(s, &fn, mid.nu, mid.ld_error, lo.nu, lo.ld_error, hi.nu,
                                         hi.ld_error) == GSL_SUCCESS) {
    for (int it = 0; it < 60; ++it) {
      if (gsl_min_fminimizer_iterate(s) != GSL_SUCCESS) break;
      const double a = gsl_min_fminimizer_x_lower(s), b = gsl_min_fminimizer_x_upper(s);
      if (gsl_min_test_interval(a, b, 0.0, 1e-9) == GSL_SUCCESS) break;
    }
    const Probe p = probe(base, gate_time, gsl_min_fminimizer_x_minimum(s));
    if (p.ld_error < best.ld_error) best = p;
  }
  gsl_set_error_handler(old);
  gsl_min_fminimizer_free(s);
  return best;
}

// Lamb-Dicke scan over one regime followed by Brent refinement of the
// deepest local minima, best first.
std::vector<Probe> scan_regime(const GateConfig& base, double gate_time, double nu_lo,
                               double nu_hi, const CurveOptions& options) {
  const int n = std::max(options.nu_points, 3);
  std::vector<Probe> grid;
  grid.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double nu = nu_lo + (nu_hi - nu_lo) * (i + 1.0) / (n + 1.0);
    grid.push_back(probe(base, gate_time, nu));
  }
  std::vector<std::size_t> minima;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i)
    if (std::isfinite(grid[i].ld_error) && grid[i].ld_error < grid[i - 1].ld_error &&
        grid[i].ld_error < grid[i + 1].ld_error)
      minima.push_back(i);
  std::sort(minima.begin(), minima.end(),
            [&](std::size_t a, std::size_t b) { return grid[a].ld_error < grid[b].ld_error; });
  if (minima.size() > static_cast<std::size_t>(std::max(options.minima, 1)))
    minima.resize(std::max(options.minima, 1));

  std::vector<Probe> out;
  for (std::size_t i : minima) out.push_back(refine(base, gate_time, grid[i - 1], grid[i], grid[i + 1]));
  if (out.empty()) {
    const auto it = std::min_element(grid.begin(), grid.end(), [](const Probe& a, const Probe& b) {
      return a.ld_error < b.ld_error;
    });
    if (std::isfinite(it->ld_error)) out.push_back(*it);
  }
  std::sort(out.begin(), out.end(),
            [](const Probe& a, const Probe& b) { return a.ld_error < b.ld_error; });
  return out;
}

double full_error_of(const GateConfig& base, double gate_time, const PulseShape& pulse) {
  GateConfig g = rectangular_from(base, gate_time, pulse.nu);
  g.pulse = pulse;
  return full_gate_error(validate(g)).bell_error;
}

struct PolishContext {
  const GateConfig* base;
  double gate_time;
  const PulseShape* pulse;
};

double polish_objective(double scale, void* params) {
  const auto* c = static_cast<PolishContext*>(params);
  PulseShape p = *c->pulse;
  p.omega_peak *= scale;
  try {
    return full_error_of(*c->base, c->gate_time, p);
  } catch (const std::exception&) {
    return 1.0;
  }
}

// Brent search over an omega rescaling in [0.95, 1.05] with a fixed budget
// of full-solver evaluations.
void polish_omega(const GateConfig& base, double gate_time, PulseShape& pulse, double& error,
                  int budget) {
  PolishContext ctx{&base, gate_time, &pulse};
  gsl_function fn{polish_objective, &ctx};
  const double lo = polish_objective(0.95, &ctx), hi = polish_objective(1.05, &ctx);
  budget -= 2;
  if (!(error < lo && error < hi) || budget <= 0) {
    const double best = std::min({error, lo, hi});
    if (best < error) {
      pulse.omega_peak *= lo <= hi ? 0.95 : 1.05;
      error = best;
    }
    return;
  }
  gsl_min_fminimizer* s = gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent);
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  if (gsl_min_fminimizer_set_with_values(s, &fn, 1.0, error, 0.95, lo, 1.05, hi) == GSL_SUCCESS) {
    for (int it = 0; it < budget; ++it)
      if (gsl_min_fminimizer_iterate(s) != GSL_SUCCESS) break;
    if (gsl_min_fminimizer_f_minimum(s) < error) {
      pulse.omega_peak *= gsl_min_fminimizer_x_minimum(s);
      error = gsl_min_fminimizer_f_minimum(s);
    }
  }
  gsl_set_error_handler(old);
  gsl_min_fminimizer_free(s);
}

}  // namespace

CurvePoint rectangular_optimum(const GateConfig& base, double gate_time,
                               const CurveOptions& options) {
  CurvePoint point;
  point.gate_time = gate_time;
  point.error = point.ld_error = std::numeric_limits<double>::quiet_NaN();
  try {
    if (!(gate_time > base.pulse.edge_time)) throw ConfigError("gate_time", "shorter than the edge");
    const double f_c = base.trap.f_c;
    const double f_s = std::sqrt(3.0) * f_c;
    if (!(options.nu_max_ratio * f_c > f_s)) throw ConfigError("nu_max_ratio", "below the stretch mode");

    struct Pick {
      Probe probe;
      DriveRegime regime;
      double error;
    };
    std::vector<Pick> picks;
    for (DriveRegime regime : {DriveRegime::BetweenModes, DriveRegime::AboveStretch}) {
      const bool between = regime == DriveRegime::BetweenModes;
      auto found = scan_regime(base, gate_time, between ? f_c : f_s,
                               between ? f_s : options.nu_max_ratio * f_c, options);
      if (found.size() > static_cast<std::size_t>(std::max(options.full_candidates, 1)))
        found.resize(std::max(options.full_candidates, 1));
      for (auto& p : found) picks.push_back({p, regime, p.ld_error});
    }
    if (picks.empty()) throw NumericalError("no rectangular pulse reaches the target phase");

    std::string last_failure;
    if (options.full_solver) {
      for (auto& pick : picks) {
        try {
          pick.error = full_error_of(base, gate_time, pick.probe.pulse);
          if (options.omega_polish > 0)
            polish_omega(base, gate_time, pick.probe.pulse, pick.error, options.omega_polish);
        } catch (const std::exception& e) {
          pick.error = kInf;
          last_failure = e.what();
        }
      }
    }
    const auto best = std::min_element(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) {
      return a.error != b.error ? a.error < b.error : a.probe.ld_error < b.probe.ld_error;
    });
    if (!std::isfinite(best->error)) throw NumericalError(last_failure);
    point.error = best->error;
    point.ld_error = best->probe.ld_error;
    point.nu = best->probe.pulse.nu;
    point.omega_peak = best->probe.pulse.omega_peak;
    point.regime = best->regime;
  } catch (const std::exception& e) {
    point.failure = e.what();
    if (point.failure.empty()) point.failure = "evaluation failed";
  }
  return point;
}

std::vector<CurvePoint> error_vs_time_curve(const GateConfig& base,
                                            const std::vector<double>& gate_times,
                                            const CurveOptions& options, int parallel) {
  std::vector<CurvePoint> out(gate_times.size());
  parallel_for(gate_times.size(), parallel, [&](std::size_t i) {
    out[i] = rectangular_optimum(base, gate_times[i], options);
  });
  return out;
}

CurvePoint evaluate_solution(const GateConfig& config, bool full_solver) {
  CurvePoint point;
  point.gate_time = config.pulse.gate_time();
  point.nu = config.pulse.nu;
  point.omega_peak = config.pulse.omega_peak;
  point.error = point.ld_error = std::numeric_limits<double>::quiet_NaN();
  const double f_s = std::sqrt(3.0) * config.trap.f_c;
  point.regime = config.pulse.nu > f_s ? DriveRegime::AboveStretch : DriveRegime::BetweenModes;
  try {
    const ValidatedConfig cfg = validate(config);
    point.ld_error = ld_gate_error(cfg).bell_error;
    point.error = full_solver ? full_gate_error(cfg).bell_error : point.ld_error;
  } catch (const std::exception& e) {
    point.failure = e.what();
  }
  return point;
}

}  // namespace fastgate
