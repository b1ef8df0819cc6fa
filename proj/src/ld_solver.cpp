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

#include "fastgate/ld_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fastgate {

ModeDrive::ModeDrive(const ValidatedConfig& config, Branch branch, Mode mode)
    : config_(&config) {
  const auto& geo = config.geometry();
  for (int j = 0; j < 2; ++j) {
    lambda_b_[j] = config.coupling()(spin_of(branch, j)) * geo.b[j][static_cast<int>(mode)];
    weight_ += lambda_b_[j] * std::polar(1.0, geo.theta[j]);
  }
}

double ModeDrive::operator()(double t, double phi0) const {
  const auto& pulse = config_->pulse();
  double arg = kTwoPi * pulse.nu * t + phi0;
  if (config_->sim().phase_perturbation) arg += config_->sim().phase_perturbation(t);
  const double omega = pulse.omega_peak * envelope_at(config_->pieces(), t);
  const auto& theta = config_->geometry().theta;
  return omega * (lambda_b_[0] * std::sin(theta[0] - arg) + lambda_b_[1] * std::sin(theta[1] - arg));
}

ModeDrive drive_terms(const ValidatedConfig& config, Branch branch, Mode mode) {
  return ModeDrive(config, branch, mode);
}

namespace {

// Basis order: (com, -nu), (com, +nu), (stretch, -nu), (stretch, +nu), light shift.
std::vector<Frequency> ld_frequencies(const ValidatedConfig& config) {
  const double w = kTwoPi * config.pulse().nu;
  const double wc = kTwoPi * config.mode_frequency(Mode::Com);
  const double ws = kTwoPi * config.mode_frequency(Mode::Stretch);
  return {{wc - w, -1}, {wc + w, +1}, {ws - w, -1}, {ws + w, +1}, {-w, -1}};
}

constexpr std::size_t kLightShift = 4;

}  // namespace

LDPropagator::LDPropagator(const ValidatedConfig& config)
    : config_(&config),
      integrator_(config.pieces(), config.pulse().omega_peak, ld_frequencies(config), 4,
                  config.sim().phase_perturbation),
      whole_(integrator_.integrate(0.0, config.gate_time())) {}

LDPropagator::Coefficients LDPropagator::coefficients(Branch branch, double phi0) const {
  // sin(A) = (e^{iA} - e^{-iA}) / 2i with A_j = theta_j - nu t - phi0; the
  // mode drive is alpha_m = i eta_m int F_m e^{i w_m t} dt where
  // F_m = Omega sum_j lambda_j sign_jm sin(A_j).
  const auto& geo = config_->geometry();
  Coefficients c{};
  const cplx two_i{0.0, 2.0};
  for (Mode m : kModes) {
    cplx minus{}, plus{};
    for (int j = 0; j < 2; ++j) {
      const double lam = config_->coupling()(spin_of(branch, j)) * geo.sign(j, m);
      minus += lam * std::polar(1.0, geo.theta[j] - phi0);
      plus -= lam * std::polar(1.0, -(geo.theta[j] - phi0));
    }
    const cplx scale = cplx{0.0, config_->eta(m)} / two_i;
    c.alpha[static_cast<int>(m)] = {scale * minus, scale * plus};
  }
  for (int j = 0; j < 2; ++j) {
    c.light_shift += config_->coupling()(spin_of(branch, j)) * std::polar(1.0, geo.theta[j] - phi0);
  }
  return c;
}

LDState LDPropagator::apply(const Coefficients& c, const LDState& start,
                            const IntervalIntegrals& ints, double t1) const {
  LDState out = start;
  out.t = t1;
  for (int m = 0; m < 2; ++m) {
    const std::size_t k0 = 2 * m;
    const auto& d = c.alpha[m];
    const cplx delta = d[0] * ints.increments[k0] + d[1] * ints.increments[k0 + 1];
    double dgeo = std::imag(std::conj(start.alpha[m]) * delta);
    cplx inner{};
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t b = 0; b < 2; ++b)
        inner += std::conj(d[a]) * d[b] * ints.cross_at(k0 + a, k0 + b);
    dgeo += inner.imag();
    out.alpha[m] = start.alpha[m] + delta;
    out.geo[m] = start.geo[m] + dgeo;
  }
  out.light_shift = start.light_shift - std::real(c.light_shift * ints.increments[kLightShift]);
  return out;
}

LDState LDPropagator::advance(Branch branch, double phi0, const LDState& start, double t1) const {
  return apply(coefficients(branch, phi0), start, integrator_.integrate(start.t, t1), t1);
}

LDState LDPropagator::final_state(Branch branch, double phi0) const {
  return apply(coefficients(branch, phi0), LDState{}, whole_, config_->gate_time());
}

LDTrajectory propagate_ld(const ValidatedConfig& config, Branch branch, double phi0,
                          int samples) {
  const LDPropagator prop(config);
  LDTrajectory traj;
  traj.branch = branch;
  traj.phi0 = phi0;
  LDState state;
  if (samples > 1) {
    const double tg = config.gate_time();
    traj.t.push_back(0.0);
    traj.alpha_c.push_back(0.0);
    traj.alpha_s.push_back(0.0);
    for (int i = 1; i < samples; ++i) {
      const double t = (i + 1 == samples) ? tg : tg * i / (samples - 1);
      state = prop.advance(branch, phi0, state, t);
      traj.t.push_back(t);
      traj.alpha_c.push_back(state.alpha[0]);
      traj.alpha_s.push_back(state.alpha[1]);
    }
  } else {
    state = prop.final_state(branch, phi0);
  }
  traj.geo_c = state.geo[0];
  traj.geo_s = state.geo[1];
  traj.light_shift = state.light_shift;
  traj.residual_c = state.alpha[0];
  traj.residual_s = state.alpha[1];
  return traj;
}

cplx displaced_overlap(cplx alpha, cplx beta, const InitialState& initial, double nbar,
                       cplx initial_alpha) {
  // <0| D(beta)^dag D(alpha) |0> = e^{i Im(beta^* alpha)} e^{-|alpha - beta|^2 / 2}
  const cplx delta = alpha - beta;
  const double cross = std::imag(std::conj(beta) * alpha);
  switch (initial.kind) {
    case InitialState::Kind::Ground:
      return std::polar(std::exp(-0.5 * std::norm(delta)), cross);
    case InitialState::Kind::Thermal:
      return std::polar(std::exp(-(nbar + 0.5) * std::norm(delta)), cross);
    case InitialState::Kind::Coherent:
      return std::polar(std::exp(-0.5 * std::norm(delta)),
                        cross + 2.0 * std::imag(delta * std::conj(initial_alpha)));
  }
  return 0.0;
}

LDGateResult ld_gate_error(const ValidatedConfig& config, int samples) {
  const LDPropagator prop(config);
  LDGateResult result;
  result.phi0 = config.phi0_grid();
  const auto& init = config.sim().initial;
  const std::array<cplx, 2> init_alpha = {init.alpha_c, init.alpha_s};

  double min_phase = std::numeric_limits<double>::infinity();
  double max_phase = -min_phase;
  double phase_sum = 0.0;
  const double weight = 1.0 / static_cast<double>(result.phi0.size());

  for (double phi0 : result.phi0) {
    std::array<LDTrajectory, 4> trajs;
    for (Branch b : kBranches) {
      auto& tr = trajs[static_cast<int>(b)];
      if (samples > 1) {
        tr = propagate_ld(config, b, phi0, samples);
      } else {
        const LDState s = prop.final_state(b, phi0);
        tr.branch = b;
        tr.phi0 = phi0;
        tr.geo_c = s.geo[0];
        tr.geo_s = s.geo[1];
        tr.light_shift = s.light_shift;
        tr.residual_c = s.alpha[0];
        tr.residual_s = s.alpha[1];
      }
      result.closure_defect = std::max(
          {result.closure_defect, std::abs(tr.residual_c), std::abs(tr.residual_s)});
      for (std::size_t i = 0; i < tr.alpha_c.size(); ++i) {
        result.max_displacement =
            std::max({result.max_displacement, std::abs(tr.alpha_c[i]), std::abs(tr.alpha_s[i])});
      }
    }
    for (int s = 0; s < 4; ++s) {
      for (int t = 0; t < 4; ++t) {
        const auto& a = trajs[s];
        const auto& b = trajs[t];
        cplx g = std::polar(1.0, a.phase() - b.phase());
        g *= displaced_overlap(a.residual_c, b.residual_c, init, config.nbar(Mode::Com),
                               init_alpha[0]);
        g *= displaced_overlap(a.residual_s, b.residual_s, init, config.nbar(Mode::Stretch),
                               init_alpha[1]);
        result.coherence[s][t] += weight * g;
      }
    }
    const double ent = 0.5 * (trajs[1].phase() + trajs[2].phase() - trajs[0].phase() -
                              trajs[3].phase());
    result.entangling_phases.push_back(ent);
    min_phase = std::min(min_phase, ent);
    max_phase = std::max(max_phase, ent);
    phase_sum += ent;
    if (samples > 1) result.trajectories.push_back(std::move(trajs));
  }
  result.entangling_phase = phase_sum * weight;
  result.phase_spread = max_phase - min_phase;

  const BellFidelity bell = config.sim().optimize_phi_half
                                ? optimize_bell_fidelity(result.coherence)
                                : bell_fidelity(result.coherence, config.pulse().phi_half);
  result.bell_error = std::clamp(bell.error(), 0.0, 1.0);
  result.phi_half = bell.phi_half;
  result.bell_phase = bell.bell_phase;
  return result;
}

double entangling_phase(const ValidatedConfig& config) {
  const LDPropagator prop(config);
  double sum = 0.0;
  const auto grid = config.phi0_grid();
  for (double phi0 : grid) {
    std::array<double, 4> ph{};
    for (Branch b : kBranches) ph[static_cast<int>(b)] = prop.final_state(b, phi0).phase();
    sum += 0.5 * (ph[1] + ph[2] - ph[0] - ph[3]);
  }
  return sum / static_cast<double>(grid.size());
}

}  // namespace fastgate
