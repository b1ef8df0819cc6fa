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

#include "fastgate/optimizer.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>

#include "fastgate/full_solver.hpp"
#include "fastgate/io.hpp"
#include "fastgate/ld_solver.hpp"
#include "fastgate/parallel.hpp"

namespace fastgate {

namespace {

// Drive strength at which "no differential drive" is decided.
constexpr double kReferenceOmega = kTwoPi * 1e6;
constexpr double kTargetPhase = kPi / 2;

}  // namespace

void check(const SearchSpace& s) {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, what);
  };
  require(s.segments >= 1 && s.segments % 2 == 1, "search.segments", "must be odd");
  require(s.gate_time > 0, "search.gate_time", "must be positive");
  require(!s.gate_time_max || *s.gate_time_max >= s.gate_time, "search.gate_time_max",
          "must not be below gate_time");
  require(s.min_duration >= s.base.pulse.edge_time, "search.min_duration",
          "must be at least the edge time");
  require(s.gate_time - s.base.pulse.edge_time - s.segments * s.min_duration > 0,
          "search.gate_time", "too short for the segment count and minimum duration");
  require(s.min_amplitude >= 0 && s.min_amplitude < 1, "search.min_amplitude",
          "must lie in [0, 1)");
  require(s.nu_min > 0 && s.nu_max >= s.nu_min, "search.nu_min", "needs 0 < nu_min <= nu_max");
  require(s.epsilon_t > 0, "search.epsilon_t", "must be positive");
  require(s.area_weight >= 0, "search.area_weight", "must be non-negative");
  require(s.area_ref > 0, "search.area_ref", "must be positive");
  require(s.max_evaluations > 0, "search.max_evaluations", "must be positive");
  require(s.restarts >= 0, "search.restarts", "must be non-negative");
  require(s.tolerance > 0, "search.tolerance", "must be positive");
  require(s.local_count >= 0, "search.local_count", "must be non-negative");
  require(s.refine_count >= 0, "search.refine_count", "must be non-negative");
  require(s.full_budget >= 0, "search.full_budget", "must be non-negative");
}

std::pair<std::vector<double>, std::vector<double>> bounds(const SearchSpace& space) {
  std::vector<double> lo, hi;
  const int h = space.free_segments();
  for (int i = 0; i < h; ++i) {
    lo.push_back(0.0);
    hi.push_back(1.0);
  }
  if (space.family == SearchSpace::Family::Stepped) {
    for (int i = 0; i < h; ++i) {
      lo.push_back(space.min_amplitude);
      hi.push_back(1.0);
    }
  }
  lo.push_back(space.nu_min);
  hi.push_back(space.nu_max);
  if (space.free_gate_time()) {
    lo.push_back(space.gate_time);
    hi.push_back(*space.gate_time_max);
  }
  return {lo, hi};
}

PulseShape decode(const SearchSpace& space, const std::vector<double>& params) {
  const int h = space.free_segments();
  const bool stepped = space.family == SearchSpace::Family::Stepped;
  const double tg = space.free_gate_time() ? params.back() : space.gate_time;
  const double edge = space.base.pulse.edge_time;
  const double spare = tg - edge - space.segments * space.min_duration;

  std::vector<double> u(params.begin(), params.begin() + h);
  double mirrored = 0.0;
  for (int i = 0; i < h; ++i) mirrored += (i + 1 < h ? 2.0 : 1.0) * u[i];
  if (!(mirrored > 0)) {
    std::fill(u.begin(), u.end(), 1.0);
    mirrored = 2.0 * h - 1.0;
  }

  std::vector<double> amp(h);
  if (stepped) {
    for (int i = 0; i < h; ++i) amp[i] = params[h + i];
    const double peak = *std::max_element(amp.begin(), amp.end());
    for (auto& a : amp) a = peak > 0 ? a / peak : 1.0;
  } else {
    for (int i = 0; i < h; ++i) amp[i] = i % 2 == 0 ? 1.0 : 0.0;
  }

  PulseShape p = space.base.pulse;
  p.symmetric = true;
  p.segments.clear();
  for (int i = 0; i < h; ++i)
    p.segments.push_back({space.min_duration + spare * u[i] / mirrored, amp[i]});
  p.nu = params[stepped ? 2 * h : h];
  if (!(p.omega_peak > 0)) p.omega_peak = kReferenceOmega;
  return p;
}

std::vector<double> encode(const SearchSpace& space, const PulseShape& pulse) {
  const int h = space.free_segments();
  if (!pulse.symmetric || static_cast<int>(pulse.segments.size()) != h)
    throw ConfigError("pulse.segments", "does not match the search space segment count");
  std::vector<double> x;
  double peak = 0.0;
  for (const auto& s : pulse.segments) peak = std::max(peak, s.duration - space.min_duration);
  for (const auto& s : pulse.segments)
    x.push_back(peak > 0 ? std::max(0.0, s.duration - space.min_duration) / peak : 1.0);
  if (space.family == SearchSpace::Family::Stepped)
    for (const auto& s : pulse.segments) x.push_back(s.amplitude);
  x.push_back(pulse.nu);
  if (space.free_gate_time()) x.push_back(pulse.gate_time());
  return x;
}

ValidatedConfig candidate_config(const SearchSpace& space, const PulseShape& pulse) {
  GateConfig c = space.base;
  c.pulse = pulse;
  return validate(c);
}

PulseShape calibrate_phase(const PulseShape& pulse, const ValidatedConfig& config) {
  const ValidatedConfig ref = config.with([&](GateConfig& g) {
    g.pulse = pulse;
    g.pulse.omega_peak = kReferenceOmega;
  });
  const double phase_ref = std::abs(entangling_phase(ref));
  if (!(phase_ref >= 1e-12)) throw NumericalError("no differential drive");

  PulseShape out = pulse;
  out.omega_peak = kReferenceOmega * std::sqrt(kTargetPhase / phase_ref);
  const double phase = std::abs(entangling_phase(config.with([&](GateConfig& g) { g.pulse = out; })));
  // Phi is quadratic in omega: d|Phi|/d omega = 2 |Phi| / omega.
  out.omega_peak -= (phase - kTargetPhase) * out.omega_peak / (2.0 * phase);
  return out;
}

Candidate evaluate_ld(const SearchSpace& space, const std::vector<double>& params) {
  Candidate c;
  c.params = params;
  c.pulse = decode(space, params);
  try {
    const ValidatedConfig raw = candidate_config(space, c.pulse);
    c.pulse = calibrate_phase(c.pulse, raw);
    const ValidatedConfig cfg = raw.with([&](GateConfig& g) { g.pulse = c.pulse; });
    const LDGateResult r = ld_gate_error(cfg);
    c.ld_error = r.bell_error;
    c.entangling_phase = r.entangling_phase;
    c.pulse.phi_half = r.phi_half;
    GateConfig evaluated = cfg.raw();
    evaluated.pulse = c.pulse;
    c.hash = config_hash(evaluated);
  } catch (const NumericalError&) {
    c.ld_error = 1.0;
    c.converged = false;
  }
  c.area = pulse_area(c.pulse);
  c.evaluations = 1;
  return c;
}

std::vector<Candidate> seed_candidates(const SearchSpace& space, int count,
                                       std::uint64_t rng_seed) {
  check(space);
  if (count <= 0) return {};
  const auto [lo, hi] = bounds(space);
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> draws(count);
  for (auto& x : draws) {
    x.resize(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) x[k] = lo[k] + unit(rng) * (hi[k] - lo[k]);
  }
  std::vector<Candidate> out(count);
  parallel_for(draws.size(), space.base.sim.parallelism,
               [&](std::size_t i) { out[i] = evaluate_ld(space, draws[i]); });
  return out;
}

namespace {

double objective_of(const SearchSpace& space, const Candidate& c) {
  return c.ld_error + space.area_weight * c.area / space.area_ref;
}

// Nelder-Mead runs in unit-cube coordinates so the simplex size tolerance
// is relative to each parameter's range.
struct UnitProblem {
  const SearchSpace* space;
  std::vector<double> lo, hi;
  Candidate best;
  double best_value = INFINITY;
  int evaluations = 0;

  std::vector<double> to_params(const gsl_vector* z, double* outside) const {
    std::vector<double> x(lo.size());
    double d2 = 0.0;
    for (std::size_t k = 0; k < lo.size(); ++k) {
      double v = gsl_vector_get(z, k);
      const double c = std::clamp(v, 0.0, 1.0);
      d2 += (v - c) * (v - c);
      x[k] = lo[k] + c * (hi[k] - lo[k]);
    }
    if (outside) *outside = d2;
    return x;
  }

  static double call(const gsl_vector* z, void* self) {
    auto* p = static_cast<UnitProblem*>(self);
    // Past the budget every vertex looks worse than the best point, so the
    // simplex cannot move and no further model evaluations are spent.
    if (p->evaluations >= p->space->max_evaluations) return p->best_value + 1.0;
    double outside = 0.0;
    const auto x = p->to_params(z, &outside);
    Candidate c = evaluate_ld(*p->space, x);
    ++p->evaluations;
    const double v = objective_of(*p->space, c);
    if (v < p->best_value) {
      p->best_value = v;
      p->best = std::move(c);
    }
    return v + outside;
  }
};

}  // namespace

Candidate local_optimize(const SearchSpace& space, const Candidate& start) {
  check(space);
  UnitProblem prob{&space, {}, {}, start, INFINITY, 0};
  std::tie(prob.lo, prob.hi) = bounds(space);
  const std::size_t n = prob.lo.size();
  if (start.params.size() != n)
    throw std::invalid_argument("local_optimize: parameter count does not match the space");

  Candidate first = evaluate_ld(space, start.params);
  prob.best_value = objective_of(space, first);
  prob.best = first;
  prob.evaluations = 1;

  gsl_vector* z = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  gsl_multimin_function fn{&UnitProblem::call, n, &prob};
  gsl_multimin_fminimizer* nm = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);

  bool converged = false;
  double initial_step = 0.1;
  for (int round = 0; round <= space.restarts && prob.evaluations < space.max_evaluations; ++round) {
    const double before = prob.best_value;
    for (std::size_t k = 0; k < n; ++k) {
      const double range = prob.hi[k] - prob.lo[k];
      const double u = range > 0 ? (prob.best.params[k] - prob.lo[k]) / range : 0.0;
      gsl_vector_set(z, k, u);
      gsl_vector_set(step, k, initial_step);
    }
    gsl_multimin_fminimizer_set(nm, &fn, z, step);
    converged = false;
    while (prob.evaluations < space.max_evaluations) {
      if (gsl_multimin_fminimizer_iterate(nm) != GSL_SUCCESS) break;
      if (gsl_multimin_fminimizer_size(nm) < space.tolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) break;
    if (round > 0 && !(prob.best_value < before - 1e-15)) break;
    initial_step *= 0.5;
  }

  gsl_multimin_fminimizer_free(nm);
  gsl_vector_free(step);
  gsl_vector_free(z);

  Candidate out = prob.best;
  out.converged = converged;
  out.evaluations = prob.evaluations;
  return out;
}

namespace {

struct FullScore {
  Candidate candidate;
  bool ok = false;
};

FullScore score_full(const SearchSpace& space, const std::vector<double>& params) {
  FullScore s{evaluate_ld(space, params), false};
  if (!s.candidate.converged && s.candidate.ld_error >= 1.0) return s;
  try {
    const FullGateResult r = full_gate_error(candidate_config(space, s.candidate.pulse));
    s.candidate.full_error = r.bell_error;
    s.ok = true;
  } catch (const NumericalError&) {
    s.candidate.full_error = 1.0;
  }
  return s;
}

}  // namespace

RefineReport refine_full(const SearchSpace& space, std::vector<Candidate> candidates) {
  check(space);
  RefineReport report;
  if (candidates.empty()) return report;

  std::vector<FullScore> scored(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scored[i] = score_full(space, candidates[i].params);
    scored[i].candidate.evaluations = candidates[i].evaluations;
    scored[i].candidate.converged = candidates[i].converged;
  }
  report.evaluations = static_cast<int>(candidates.size());
  for (auto& s : scored) report.candidates.push_back(s.candidate);

  std::vector<std::size_t> order(report.candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.candidates[a].error() < report.candidates[b].error();
  });

  const auto [lo, hi] = bounds(space);
  const std::size_t n = lo.size();
  // nu first, then every shape coordinate; omega_peak follows calibration.
  std::vector<std::size_t> coords;
  const std::size_t nu_index = space.family == SearchSpace::Family::Stepped
                                   ? 2 * static_cast<std::size_t>(space.free_segments())
                                   : static_cast<std::size_t>(space.free_segments());
  coords.push_back(nu_index);
  for (std::size_t k = 0; k < n; ++k)
    if (k != nu_index) coords.push_back(k);

  const std::size_t top = std::min<std::size_t>(space.refine_count, order.size());
  for (std::size_t r = 0; r < top; ++r) {
    Candidate& best = report.candidates[order[r]];
    std::vector<double> step(n);
    for (std::size_t k = 0; k < n; ++k) step[k] = (k == nu_index ? 0.01 : 0.05) * (hi[k] - lo[k]);
    int used = 0;
    bool moved = true;
    while (used < space.full_budget && moved) {
      moved = false;
      for (std::size_t k : coords) {
        if (step[k] < 1e-4 * (hi[k] - lo[k])) continue;
        bool improved = false;
        for (double sign : {1.0, -1.0}) {
          if (used >= space.full_budget) break;
          std::vector<double> x = best.params;
          x[k] = std::clamp(x[k] + sign * step[k], lo[k], hi[k]);
          if (x[k] == best.params[k]) continue;
          FullScore s = score_full(space, x);
          ++used;
          if (s.ok && s.candidate.error() < best.error()) {
            s.candidate.evaluations = best.evaluations;
            best = s.candidate;
            improved = true;
            break;
          }
        }
        if (improved) moved = true;
        else step[k] *= 0.5;
        if (step[k] >= 1e-4 * (hi[k] - lo[k])) moved = true;
      }
    }
    report.evaluations += used;
    if (used >= space.full_budget && space.full_budget > 0) report.budget_exhausted = true;
  }
  return report;
}

double sensitivity(const ValidatedConfig& config, const SensitivityOptions& opt) {
  if (opt.draws <= 0 || (opt.sigma_t == 0.0 && opt.sigma_a == 0.0)) return 0.0;
  const LDGateResult nominal = ld_gate_error(config);
  const double phi_half = nominal.phi_half;
  const double chi = nominal.bell_phase;
  const double base_error = 1.0 - bell_fidelity_fixed(nominal.coherence, phi_half, chi);

  std::mt19937_64 rng(opt.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto segments = config.pulse().expanded();
  const double edge = config.pulse().edge_time;
  double sum = 0.0;
  for (int d = 0; d < opt.draws; ++d) {
    PulseShape p = config.pulse();
    p.symmetric = false;
    p.segments = segments;
    double peak = 0.0;
    for (auto& s : p.segments) {
      s.duration = std::max(edge, s.duration + opt.sigma_t * normal(rng));
      s.amplitude = std::max(0.0, s.amplitude * (1.0 + opt.sigma_a * normal(rng)));
      peak = std::max(peak, s.amplitude);
    }
    if (peak > 0) {
      for (auto& s : p.segments) s.amplitude /= peak;
      p.omega_peak *= peak;
    }
    const ValidatedConfig perturbed = config.with([&](GateConfig& g) {
      g.pulse = p;
      g.sim.optimize_phi_half = false;
    });
    const LDGateResult r = ld_gate_error(perturbed);
    sum += (1.0 - bell_fidelity_fixed(r.coherence, phi_half, chi)) - base_error;
  }
  return sum / opt.draws;
}

std::vector<Candidate> pareto_select(const std::vector<Candidate>& candidates) {
  auto key = [](const Candidate& c) {
    return std::array<double, 3>{c.error(), c.area, c.sensitivity.value_or(0.0)};
  };
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto a = key(candidates[i]);
    bool dominated = false;
    for (std::size_t j = 0; j < candidates.size() && !dominated; ++j) {
      if (i == j) continue;
      const auto b = key(candidates[j]);
      const bool no_worse = b[0] <= a[0] && b[1] <= a[1] && b[2] <= a[2];
      const bool better = b[0] < a[0] || b[1] < a[1] || b[2] < a[2];
      dominated = no_worse && better;
    }
    if (!dominated) out.push_back(candidates[i]);
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return std::make_tuple(a.error(), a.area, a.hash) < std::make_tuple(b.error(), b.area, b.hash);
  });
  // Exact duplicates (same configuration) collapse to one entry.
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Candidate& a, const Candidate& b) {
                          return !a.hash.empty() && a.hash == b.hash;
                        }),
            out.end());
  return out;
}

PipelineReport run_pipeline(const SearchSpace& space, int seeds, std::uint64_t rng_seed,
                            const SensitivityOptions& sensitivity_options) {
  check(space);
  PipelineReport report;
  report.seeds = seed_candidates(space, seeds, rng_seed);

  std::vector<std::size_t> order(report.seeds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return objective_of(space, report.seeds[a]) < objective_of(space, report.seeds[b]);
  });
  if (space.local_count > 0 && order.size() > static_cast<std::size_t>(space.local_count))
    order.resize(space.local_count);

  report.optimized.resize(order.size());
  parallel_for(order.size(), space.base.sim.parallelism, [&](std::size_t i) {
    report.optimized[i] = local_optimize(space, report.seeds[order[i]]);
  });

  for (const auto& c : report.optimized)
    if (c.ld_error < space.epsilon_t) report.screened.push_back(c);
  std::stable_sort(report.screened.begin(), report.screened.end(),
                   [&](const Candidate& a, const Candidate& b) {
                     return std::make_tuple(objective_of(space, a), a.hash) <
                            std::make_tuple(objective_of(space, b), b.hash);
                   });
  report.screened.erase(std::unique(report.screened.begin(), report.screened.end(),
                                    [](const Candidate& a, const Candidate& b) {
                                      return a.hash == b.hash;
                                    }),
                        report.screened.end());
  if (report.screened.empty()) return report;

  // The full solver sees only the most promising screened candidates.
  std::vector<Candidate> handoff = report.screened;
  const std::size_t keep = std::max<std::size_t>(1, 2 * static_cast<std::size_t>(space.refine_count));
  if (handoff.size() > keep) handoff.resize(keep);

  RefineReport refined = refine_full(space, std::move(handoff));
  report.budget_exhausted = refined.budget_exhausted;
  for (auto& c : refined.candidates)
    c.sensitivity = sensitivity(candidate_config(space, c.pulse), sensitivity_options);
  report.solutions = pareto_select(refined.candidates);
  return report;
}

}  // namespace fastgate
