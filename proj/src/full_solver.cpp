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

#include "fastgate/full_solver.hpp"


#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <tuple>

#include "fastgate/ld_solver.hpp"
#include "fastgate/parallel.hpp"
#include "detail/fft_buffer.hpp"
#include "detail/phase_kernel.hpp"

namespace fastgate {

using detail::FftBuffer;

std::vector<double> MotionalGrid::q_c() const {
  std::vector<double> q(n_c);
  for (int i = 0; i < n_c; ++i) q[i] = (i - n_c / 2) * dq_c();
  return q;
}

std::vector<double> MotionalGrid::q_s() const {
  std::vector<double> q(n_s);
  for (int i = 0; i < n_s; ++i) q[i] = (i - n_s / 2) * dq_s();
  return q;
}

namespace {

std::vector<double> fft_momenta(int n, double dq) {
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) {
    const int k = i < (n + 1) / 2 ? i : i - n;
    p[i] = kTwoPi * k / (n * dq);
  }
  return p;
}

}  // namespace

std::vector<double> MotionalGrid::p_c() const { return fft_momenta(n_c, dq_c()); }
std::vector<double> MotionalGrid::p_s() const { return fft_momenta(n_s, dq_s()); }

double BranchWave::norm() const {
  double s = 0.0;
  for (const auto& v : psi) s += std::norm(v);
  return std::sqrt(s);
}

BranchWave coherent_wave(const MotionalGrid& grid, cplx alpha_c, cplx alpha_s) {
  BranchWave w;
  w.grid = grid;
  w.psi.resize(grid.size());
  const auto qc = grid.q_c();
  const auto qs = grid.q_s();
  // a = (q + i p)/sqrt2  =>  <q> = sqrt2 Re(alpha), <p> = sqrt2 Im(alpha).
  auto axis = [](const std::vector<double>& q, cplx alpha) {
    const double q0 = std::sqrt(2.0) * alpha.real();
    const double p0 = std::sqrt(2.0) * alpha.imag();
    std::vector<cplx> f(q.size());
    for (std::size_t i = 0; i < q.size(); ++i)
      f[i] = std::polar(std::exp(-0.5 * (q[i] - q0) * (q[i] - q0)), p0 * q[i]);
    return f;
  };
  const auto fc = axis(qc, alpha_c);
  const auto fs = axis(qs, alpha_s);
  double norm = 0.0;
  for (int i = 0; i < grid.n_c; ++i)
    for (int j = 0; j < grid.n_s; ++j) {
      const cplx v = fc[i] * fs[j];
      w.psi[static_cast<std::size_t>(i) * grid.n_s + j] = v;
      norm += std::norm(v);
    }
  const double scale = 1.0 / std::sqrt(norm);
  for (auto& v : w.psi) v *= scale;
  return w;
}

namespace {

// Phase advance of ion j per unit q_m: sqrt2 eta_m sign_jm.
std::array<std::array<double, 2>, 2> wave_numbers(const ValidatedConfig& config) {
  std::array<std::array<double, 2>, 2> k{};
  for (int j = 0; j < 2; ++j)
    for (Mode m : kModes)
      k[j][static_cast<int>(m)] =
          std::sqrt(2.0) * config.eta(m) * config.geometry().sign(j, m);
  return k;
}

// A(q) = sum_j lambda_j cos(theta_j + k_j.q), B(q) = sum_j lambda_j sin(...),
// so that V = Omega(t) (A cos c + B sin c) with c = 2 pi nu t + phi0.
struct PotentialFields {
  std::vector<double> a;
  std::vector<double> b;
  double a0 = 0.0;
  double b0 = 0.0;
};

PotentialFields potential_fields(const ValidatedConfig& config, const MotionalGrid& grid,
                                 Branch branch) {
  const auto k = wave_numbers(config);
  const auto qc = grid.q_c();
  const auto qs = grid.q_s();
  const auto& theta = config.geometry().theta;
  std::array<double, 2> lam{};
  for (int j = 0; j < 2; ++j) lam[j] = config.coupling()(spin_of(branch, j));
  PotentialFields f;
  f.a.resize(grid.size());
  f.b.resize(grid.size());
  for (int i = 0; i < grid.n_c; ++i)
    for (int s = 0; s < grid.n_s; ++s) {
      double a = 0.0, b = 0.0;
      for (int j = 0; j < 2; ++j) {
        const double x = theta[j] + k[j][0] * qc[i] + k[j][1] * qs[s];
        a += lam[j] * std::cos(x);
        b += lam[j] * std::sin(x);
      }
      const std::size_t idx = static_cast<std::size_t>(i) * grid.n_s + s;
      f.a[idx] = a;
      f.b[idx] = b;
    }
  for (int j = 0; j < 2; ++j) {
    f.a0 += lam[j] * std::cos(theta[j]);
    f.b0 += lam[j] * std::sin(theta[j]);
  }
  return f;
}

double beat_phase(const ValidatedConfig& config, double t, double phi0) {
  double c = kTwoPi * config.pulse().nu * t + phi0;
  if (config.sim().phase_perturbation) c += config.sim().phase_perturbation(t);
  return c;
}

std::size_t next_pow2(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x) n <<= 1;
  return n;
}

// Largest Omega-normalized amplitude of the non-uniform potential within
// `radius` ground-state widths of the origin on each axis.
double max_nonuniform_amplitude(const ValidatedConfig& config, const MotionalGrid& grid,
                                std::array<double, 2> radius) {
  const auto qc = grid.q_c();
  const auto qs = grid.q_s();
  double peak = 0.0;
  for (Branch br : kBranches) {
    const auto f = potential_fields(config, grid, br);
    for (int i = 0; i < grid.n_c; ++i) {
      if (std::abs(qc[i]) > radius[0]) continue;
      for (int s = 0; s < grid.n_s; ++s) {
        if (std::abs(qs[s]) > radius[1]) continue;
        const std::size_t idx = static_cast<std::size_t>(i) * grid.n_s + s;
        peak = std::max(peak, std::hypot(f.a[idx] - f.a0, f.b[idx] - f.b0));
      }
    }
  }
  return peak;
}

std::array<double, 2> ld_excursion(const ValidatedConfig& config) {
  const LDPropagator prop(config);
  std::array<double, 2> peak{};
  constexpr int kSamples = 200;
  const double tg = config.gate_time();
  for (double phi0 : config.phi0_grid()) {
    for (Branch b : kBranches) {
      LDState s;
      for (int i = 1; i <= kSamples; ++i) {
        s = prop.advance(b, phi0, s, tg * i / kSamples);
        peak[0] = std::max(peak[0], std::abs(s.alpha[0]));
        peak[1] = std::max(peak[1], std::abs(s.alpha[1]));
      }
    }
  }
  return peak;
}

std::array<double, 2> initial_spread(const ValidatedConfig& config) {
  const auto& init = config.sim().initial;
  switch (init.kind) {
    case InitialState::Kind::Coherent:
      return {std::abs(init.alpha_c), std::abs(init.alpha_s)};
    case InitialState::Kind::Thermal:
      return {3.0 * std::sqrt(config.nbar(Mode::Com)), 3.0 * std::sqrt(config.nbar(Mode::Stretch))};
    case InitialState::Kind::Ground:
      break;
  }
  return {0.0, 0.0};
}

// Radius, per axis, inside which the wavepacket lives during the gate.
std::array<double, 2> working_radius(const ValidatedConfig& config) {
  const auto ex = ld_excursion(config);
  const auto sp = initial_spread(config);
  return {std::sqrt(2.0) * (ex[0] + sp[0]) + 6.0, std::sqrt(2.0) * (ex[1] + sp[1]) + 6.0};
}

constexpr double kDefaultPhaseStep = 0.02;
constexpr double kAuditPhaseStep = 0.1;

struct Step {
  double t_mid;
  double dt;
};

std::vector<Step> step_schedule(const ValidatedConfig& config, double dt_target) {
  std::vector<Step> steps;
  for (const auto& p : config.pieces()) {
    const double len = p.t1 - p.t0;
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / dt_target - 1e-9)));
    const double dt = len / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) steps.push_back({p.t0 + (k + 0.5) * dt, dt});
  }
  return steps;
}


}  // namespace

std::vector<double> build_potential(const ValidatedConfig& config, const MotionalGrid& grid,
                                    Branch branch, double t, double phi0) {
  const auto f = potential_fields(config, grid, branch);
  const double omega = config.pulse().omega_peak * envelope_at(config.pieces(), t);
  const double c = beat_phase(config, t, phi0);
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = omega * (f.a[i] * std::cos(c) + f.b[i] * std::sin(c));
  return v;
}

MotionalGrid plan_grid(const ValidatedConfig& config) {
  const auto& sim = config.sim();
  MotionalGrid grid;
  if (sim.grid_points && sim.grid_extent) {
    grid.n_c = grid.n_s = *sim.grid_points;
    grid.extent_c = grid.extent_s = *sim.grid_extent;
    return grid;
  }
  const auto ex = ld_excursion(config);
  const auto sp = initial_spread(config);
  std::array<double, 2> extent{};
  std::array<int, 2> points{};
  for (int m = 0; m < 2; ++m) {
    extent[m] = sim.grid_extent ? *sim.grid_extent : 8.0 + 1.25 * std::sqrt(2.0) * (ex[m] + sp[m]);
    // Momentum range pi N / (2 X) must cover the same phase-space radius.
    points[m] = sim.grid_points
                    ? *sim.grid_points
                    : static_cast<int>(std::max<std::size_t>(32, next_pow2(2.0 * extent[m] * extent[m] / kPi)));
  }
  grid.n_c = points[0];
  grid.n_s = points[1];
  grid.extent_c = extent[0];
  grid.extent_s = extent[1];
  return grid;
}

double plan_time_step(const ValidatedConfig& config, const MotionalGrid& grid) {
  const double harmonic_rate = kTwoPi * config.f_s();
  const auto radius = working_radius(config);
  const double potential_rate =
      config.pulse().omega_peak * max_nonuniform_amplitude(config, grid, radius);
  const double rate = std::max(harmonic_rate, potential_rate);
  if (config.sim().time_step) {
    const double dt = *config.sim().time_step;
    if (harmonic_rate * dt > kAuditPhaseStep || potential_rate * dt > kAuditPhaseStep) {
      std::ostringstream msg;
      msg << "step-size audit failed: time step " << dt << " s gives harmonic phase "
          << harmonic_rate * dt << " rad and potential phase " << potential_rate * dt
          << " rad per step (limit " << kAuditPhaseStep << ")";
      throw NumericalError(msg.str());
    }
    return dt;
  }
  return kDefaultPhaseStep / rate;
}

void FullDiagnostics::merge(const FullDiagnostics& o) {
  max_displacement = std::max(max_displacement, o.max_displacement);
  squeezing = std::max(squeezing, o.squeezing);
  boundary_leakage = std::max(boundary_leakage, o.boundary_leakage);
  norm_drift = std::max(norm_drift, o.norm_drift);
  steps = std::max(steps, o.steps);
  time_step = std::max(time_step, o.time_step);
}

namespace {

// Covariance-ellipse aspect ratio of one mode's quadratures.
double squeezing_ratio(const BranchWave& w, FftBuffer& fft) {
  const auto& g = w.grid;
  const auto qc = g.q_c();
  const auto qs = g.q_s();
  const auto pc = g.p_c();
  const auto ps = g.p_s();
  const double inv_n = 1.0 / static_cast<double>(g.size());
  double worst = 1.0;
  for (int m = 0; m < 2; ++m) {
    auto q_of = [&](std::size_t idx) {
      return m == 0 ? qc[idx / g.n_s] : qs[idx % g.n_s];
    };
    auto p_of = [&](std::size_t idx) {
      return m == 0 ? pc[idx / g.n_s] : ps[idx % g.n_s];
    };
    double mq = 0, mq2 = 0;
    for (std::size_t i = 0; i < w.psi.size(); ++i) {
      const double pr = std::norm(w.psi[i]);
      mq += pr * q_of(i);
      mq2 += pr * q_of(i) * q_of(i);
    }
    std::copy(w.psi.begin(), w.psi.end(), fft.data());
    fft.forward();
    double mp = 0, mp2 = 0;
    for (std::size_t i = 0; i < fft.size(); ++i) {
      const double pr = std::norm(fft.data()[i]) * inv_n;
      mp += pr * p_of(i);
      mp2 += pr * p_of(i) * p_of(i);
      fft.data()[i] *= p_of(i) * inv_n;
    }
    fft.backward();
    double qp = 0;
    for (std::size_t i = 0; i < w.psi.size(); ++i)
      qp += std::real(std::conj(w.psi[i]) * q_of(i) * fft.data()[i]);
    const double vq = mq2 - mq * mq;
    const double vp = mp2 - mp * mp;
    const double c = qp - mq * mp;
    const double mean = 0.5 * (vq + vp);
    const double dev = std::sqrt(0.25 * (vq - vp) * (vq - vp) + c * c);
    if (mean - dev > 0) worst = std::max(worst, (mean + dev) / (mean - dev));
  }
  return worst;
}

}  // namespace

BranchWave propagate_full(const ValidatedConfig& config, Branch branch, double phi0,
                          const BranchWave& initial, const PropagationOptions& options,
                          FullDiagnostics* diagnostics) {
  const MotionalGrid& grid = initial.grid;
  const std::size_t n = grid.size();
  if (initial.psi.size() != n) throw std::invalid_argument("propagate_full: wave/grid size mismatch");

  const auto fields = potential_fields(config, grid, branch);
  std::vector<double> da(n), db(n), qc2(n), qs2(n);
  const auto qc = grid.q_c();
  const auto qs = grid.q_s();
  const auto pc = grid.p_c();
  const auto ps = grid.p_s();
  for (std::size_t i = 0; i < n; ++i) {
    da[i] = fields.a[i] - fields.a0;
    db[i] = fields.b[i] - fields.b0;
    const double x = qc[i / grid.n_s];
    const double y = qs[i % grid.n_s];
    qc2[i] = x * x;
    qs2[i] = y * y;
  }
  std::vector<bool> q_band(n), p_band(n);
  const double pmax_c = kPi / grid.dq_c();
  const double pmax_s = kPi / grid.dq_s();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ic = i / grid.n_s, is = i % grid.n_s;
    q_band[i] = std::abs(qc[ic]) > 0.9 * grid.extent_c || std::abs(qs[is]) > 0.9 * grid.extent_s;
    p_band[i] = std::abs(pc[ic]) > 0.9 * pmax_c || std::abs(ps[is]) > 0.9 * pmax_s;
  }

  const double wc = kTwoPi * config.mode_frequency(Mode::Com);
  const double ws = kTwoPi * config.mode_frequency(Mode::Stretch);
  const double omega_peak = config.pulse().omega_peak;
  const double dt_target = options.time_step > 0 ? options.time_step : plan_time_step(config, grid);
  const auto steps = step_schedule(config, dt_target);

  // Kinetic shear exp(-i sin(w dt) p^2 / 2) per distinct dt, with the
  // inverse-FFT normalization folded in.
  std::map<double, std::vector<cplx>> kinetic;
  auto kinetic_for = [&](double dt) -> const std::vector<cplx>& {
    auto it = kinetic.find(dt);
    if (it != kinetic.end()) return it->second;
    std::vector<cplx> k(n);
    const double sc = std::sin(wc * dt), ss = std::sin(ws * dt);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double p1 = pc[i / grid.n_s], p2 = ps[i % grid.n_s];
      k[i] = std::polar(inv_n, -0.5 * (sc * p1 * p1 + ss * p2 * p2));
    }
    return kinetic.emplace(dt, std::move(k)).first->second;
  };

  // Half-step diagonal exponent: tan(w dt/2) q^2 / 2 + dt V(t) / 2.
  struct Half {
    double kc, ks, ka, kb;
  };
  auto half_for = [&](const Step& s) {
    const double omega = omega_peak * envelope_at(config.pieces(), s.t_mid);
    const double c = beat_phase(config, s.t_mid, phi0);
    return Half{0.5 * std::tan(0.5 * wc * s.dt), 0.5 * std::tan(0.5 * ws * s.dt),
                0.5 * s.dt * omega * std::cos(c), 0.5 * s.dt * omega * std::sin(c)};
  };
  std::vector<double> phase(n), scratch(2 * n);
  auto apply_diag = [&](cplx* psi, const Half& h) {
    for (std::size_t i = 0; i < n; ++i)
      phase[i] = h.kc * qc2[i] + h.ks * qs2[i] + h.ka * da[i] + h.kb * db[i];
    detail::apply_phase(reinterpret_cast<double*>(psi), phase.data(), scratch.data(), n);
  };


  FftBuffer fft(grid);
  cplx* psi = fft.data();
  std::copy(initial.psi.begin(), initial.psi.end(), psi);

  BranchWave out;
  out.branch = branch;
  out.phi0 = phi0;
  out.grid = grid;
  FullDiagnostics diag;
  diag.steps = steps.size();
  diag.time_step = steps.empty() ? 0.0 : std::max_element(steps.begin(), steps.end(), [](auto& a, auto& b) { return a.dt < b.dt; })->dt;

  auto audit_position = [&](double t) {
    double band = 0, total = 0, mc = 0, ms = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double pr = std::norm(psi[i]);
      total += pr;
      if (q_band[i]) band += pr;
      mc += pr * qc[i / grid.n_s];
      ms += pr * qs[i % grid.n_s];
    }
    diag.boundary_leakage = std::max(diag.boundary_leakage, band);
    diag.norm_drift = std::max(diag.norm_drift, std::abs(std::sqrt(total) - 1.0));
    out.norm_history.push_back(std::sqrt(total));
    if (band > options.leakage_limit) {
      std::ostringstream msg;
      msg << "grid too small: boundary leakage " << band << " at t = " << t
          << " s (grid " << grid.n_c << "x" << grid.n_s << ", extent " << grid.extent_c << ", "
          << grid.extent_s << ")";
      throw NumericalError(msg.str());
    }
    return std::array<double, 2>{mc, ms};
  };
  std::array<double, 2> mean_q{}, mean_p{};

  std::size_t next_snapshot = 0;
  std::vector<double> snaps = options.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  auto emit_snapshots = [&](double t_now) {
    while (options.on_snapshot && next_snapshot < snaps.size() && snaps[next_snapshot] <= t_now + 1e-15) {
      BranchWave snap;
      snap.branch = branch;
      snap.phi0 = phi0;
      snap.t = t_now;
      snap.grid = grid;
      snap.psi.assign(psi, psi + n);  // diagonal phases pending; |psi|^2 is exact
      options.on_snapshot(snap);
      ++next_snapshot;
    }
  };
  emit_snapshots(0.0);

  Half pending{0, 0, 0, 0};
  double t_now = 0.0;
  const int audit = std::max(1, options.audit_interval);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const Half h = half_for(steps[k]);
    apply_diag(psi, Half{pending.kc + h.kc, pending.ks + h.ks, pending.ka + h.ka, pending.kb + h.kb});
    pending = h;
    fft.forward();
    const bool audit_now = (k % audit == 0) || k + 1 == steps.size();
    if (audit_now) {
      double band = 0, total = 0, mc = 0, ms = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double pr = std::norm(psi[i]);
        total += pr;
        if (p_band[i]) band += pr;
        mc += pr * pc[i / grid.n_s];
        ms += pr * ps[i % grid.n_s];
      }
      band /= total;
      mean_p = {mc / total, ms / total};
      diag.boundary_leakage = std::max(diag.boundary_leakage, band);
      if (band > options.leakage_limit) {
        std::ostringstream msg;
        msg << "grid too small: momentum-space leakage " << band << " at t = " << steps[k].t_mid
            << " s (grid " << grid.n_c << "x" << grid.n_s << ")";
        throw NumericalError(msg.str());
      }
    }
    const auto& kin = kinetic_for(steps[k].dt);
    for (std::size_t i = 0; i < n; ++i) psi[i] *= kin[i];
    fft.backward();
    t_now = steps[k].t_mid + 0.5 * steps[k].dt;
    if (audit_now) {
      mean_q = audit_position(t_now);
      for (int m = 0; m < 2; ++m)
        diag.max_displacement =
            std::max(diag.max_displacement, std::hypot(mean_q[m], mean_p[m]) / std::sqrt(2.0));
    }
    emit_snapshots(t_now);
  }
  apply_diag(psi, pending);

  // Spatially uniform part of the light shift, exact.
  const double light_shift = LDPropagator(config).final_state(branch, phi0).light_shift;
  const cplx uniform = std::polar(1.0, light_shift);
  out.t = config.gate_time();
  out.psi.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.psi[i] = psi[i] * uniform;
  diag.squeezing = squeezing_ratio(out, fft);
  if (diagnostics) *diagnostics = diag;
  return out;
}

FullGateResult full_gate_error(const ValidatedConfig& config, bool keep_states) {
  const MotionalGrid grid = plan_grid(config);
  PropagationOptions options;
  options.time_step = plan_time_step(config, grid);  // audits before any work

  const auto phi0 = config.phi0_grid();
  const std::size_t n_phi = phi0.size();
  const auto& init = config.sim().initial;

  std::vector<std::array<cplx, 2>> samples;
  switch (init.kind) {
    case InitialState::Kind::Ground:
      samples.push_back({0.0, 0.0});
      break;
    case InitialState::Kind::Coherent:
      samples.push_back({init.alpha_c, init.alpha_s});
      break;
    case InitialState::Kind::Thermal: {
      std::mt19937_64 rng(config.sim().rng_seed);
      std::normal_distribution<double> unit(0.0, 1.0);
      const double sc = std::sqrt(0.5 * config.nbar(Mode::Com));
      const double ss = std::sqrt(0.5 * config.nbar(Mode::Stretch));
      for (int i = 0; i < init.samples; ++i) {
        const double a = unit(rng), b = unit(rng), c = unit(rng), d = unit(rng);
        samples.push_back({cplx(sc * a, sc * b), cplx(ss * c, ss * d)});
      }
      break;
    }
  }

  // Flipping the sign of both couplings equals shifting phi0 by pi, so with
  // an even grid such branches reuse each other's propagation.
  struct Job {
    std::array<double, 2> lambda;
    std::size_t phi_index;
    std::size_t sample;
    bool operator<(const Job& o) const {
      return std::tie(lambda, phi_index, sample) < std::tie(o.lambda, o.phi_index, o.sample);
    }
  };
  const bool can_fold = n_phi % 2 == 0 && config.sim().phi0_offset == 0.0;
  auto job_for = [&](Branch b, std::size_t k, std::size_t sample) {
    std::array<double, 2> lam = {config.coupling()(spin_of(b, 0)), config.coupling()(spin_of(b, 1))};
    if (can_fold && (lam[0] < 0 || (lam[0] == 0 && lam[1] < 0))) {
      lam = {-lam[0], -lam[1]};
      k = (k + n_phi / 2) % n_phi;
    }
    return Job{lam, k, sample};
  };
  std::map<Job, std::size_t> index;
  std::vector<Job> jobs;
  std::vector<Branch> job_branch;
  for (std::size_t s = 0; s < samples.size(); ++s)
    for (std::size_t k = 0; k < n_phi; ++k)
      for (Branch b : kBranches) {
        const Job j = job_for(b, k, s);
        if (index.emplace(j, jobs.size()).second) {
          jobs.push_back(j);
          job_branch.push_back(b);
        }
      }

  std::vector<BranchWave> waves(jobs.size());
  std::vector<FullDiagnostics> diags(jobs.size());
  parallel_for(jobs.size(), config.sim().parallelism, [&](std::size_t i) {
    const Job& j = jobs[i];
    const BranchWave start = coherent_wave(grid, samples[j.sample][0], samples[j.sample][1]);
    // The folded branch gives the same potential as job_branch at the original phi0.
    Branch rep = job_branch[i];
    double phi = phi0[j.phi_index];
    const std::array<double, 2> lam = {config.coupling()(spin_of(rep, 0)), config.coupling()(spin_of(rep, 1))};
    if (lam != j.lambda) {
      for (Branch b : kBranches) {
        if (config.coupling()(spin_of(b, 0)) == j.lambda[0] && config.coupling()(spin_of(b, 1)) == j.lambda[1]) {
          rep = b;
          break;
        }
      }
    }
    waves[i] = propagate_full(config, rep, phi, start, options, &diags[i]);
  });

  FullGateResult result;
  result.grid = grid;
  const double weight = 1.0 / static_cast<double>(n_phi * samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s)
    for (std::size_t k = 0; k < n_phi; ++k) {
      std::array<const BranchWave*, 4> w{};
      for (Branch b : kBranches) w[static_cast<int>(b)] = &waves[index.at(job_for(b, k, s))];
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          cplx ov{};
          const auto& x = w[a]->psi;
          const auto& y = w[b]->psi;
          for (std::size_t i = 0; i < x.size(); ++i) ov += std::conj(y[i]) * x[i];
          result.coherence[a][b] += weight * ov;
        }
    }
  for (const auto& d : diags) result.diagnostics.merge(d);

  const BellFidelity bell = config.sim().optimize_phi_half
                                ? optimize_bell_fidelity(result.coherence)
                                : bell_fidelity(result.coherence, config.pulse().phi_half);
  result.bell_error = std::clamp(bell.error(), 0.0, 1.0);
  result.phi_half = bell.phi_half;
  result.bell_phase = bell.bell_phase;
  if (keep_states) result.final_states = std::move(waves);
  return result;
}

void write_density_snapshot(const std::filesystem::path& path, const BranchWave& wave) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  auto put_u64 = [&](std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  };
  auto put_f64 = [&](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(bits);
  };
  put_u64(static_cast<std::uint64_t>(wave.grid.n_c));
  put_u64(static_cast<std::uint64_t>(wave.grid.n_s));
  put_f64(wave.grid.extent_c);
  put_f64(wave.grid.extent_s);
  put_f64(wave.t);
  for (const auto& v : wave.psi) put_f64(std::norm(v));
}

}  // namespace fastgate
