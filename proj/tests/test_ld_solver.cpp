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


#include <doctest.h>

#include <array>
#include <cmath>

#include "fastgate/config.hpp"
#include "fastgate/ld_solver.hpp"
#include "fastgate/optimizer.hpp"
#include "fastgate/presets.hpp"
#include "support.hpp"

using namespace fastgate;
using fastgate::testing::adiabatic_reference;

namespace {

// Brute-force integration of the Lamb-Dicke equations of motion
//   d alpha_m / dt = i eta_m F_m(t) exp(i 2 pi f_m t)
//   F_m = Omega(t) sum_j lambda_j s_jm sin(theta_j - 2 pi nu t - phi0)
// together with the geometric phases Im(alpha_m^* d alpha_m) and the
// motion-independent light shift.
struct OdeState {
  std::array<cplx, 2> alpha{};
  std::array<double, 2> geo{};
  double light_shift = 0.0;
};

class Rk4Oracle {
 public:
  Rk4Oracle(const ValidatedConfig& v, Branch branch, double phi0) : v_(v), phi0_(phi0) {
    for (int j = 0; j < 2; ++j) lambda_[j] = v.coupling()(spin_of(branch, j));
  }

  OdeState run(double max_step) const {
    OdeState y;
    for (const LinearPiece& p : v_.pieces()) {
      const int n = std::max(1, static_cast<int>(std::ceil((p.t1 - p.t0) / max_step)));
      const double h = (p.t1 - p.t0) / n;
      for (int k = 0; k < n; ++k) step(y, p, p.t0 + k * h, h);
    }
    return y;
  }

 private:
  double omega(const LinearPiece& p, double t) const {
    return v_.pulse().omega_peak * (p.v0 + p.slope() * (t - p.t0));
  }

  OdeState rate(const OdeState& y, const LinearPiece& p, double t) const {
    OdeState d;
    const double om = omega(p, t);
    const double x = kTwoPi * v_.pulse().nu * t + phi0_;
    for (Mode m : kModes) {
      const int mi = static_cast<int>(m);
      double force = 0.0;
      for (int j = 0; j < 2; ++j)
        force += lambda_[j] * v_.geometry().sign(j, m) * std::sin(v_.geometry().theta[j] - x);
      force *= om;
      const double w = kTwoPi * v_.mode_frequency(m) * t;
      d.alpha[mi] = cplx(0.0, v_.eta(m)) * force * cplx(std::cos(w), std::sin(w));
      d.geo[mi] = std::imag(std::conj(y.alpha[mi]) * d.alpha[mi]);
    }
    double ls = 0.0;
    for (int j = 0; j < 2; ++j) ls += lambda_[j] * std::cos(v_.geometry().theta[j] - x);
    d.light_shift = -om * ls;
    return d;
  }

  static OdeState axpy(const OdeState& y, const OdeState& d, double h) {
    OdeState r = y;
    for (int m = 0; m < 2; ++m) {
      r.alpha[m] += h * d.alpha[m];
      r.geo[m] += h * d.geo[m];
    }
    r.light_shift += h * d.light_shift;
    return r;
  }

  void step(OdeState& y, const LinearPiece& p, double t, double h) const {
    const OdeState k1 = rate(y, p, t);
    const OdeState k2 = rate(axpy(y, k1, h / 2), p, t + h / 2);
    const OdeState k3 = rate(axpy(y, k2, h / 2), p, t + h / 2);
    const OdeState k4 = rate(axpy(y, k3, h), p, t + h);
    for (int m = 0; m < 2; ++m) {
      y.alpha[m] += h / 6 * (k1.alpha[m] + 2.0 * k2.alpha[m] + 2.0 * k3.alpha[m] + k4.alpha[m]);
      y.geo[m] += h / 6 * (k1.geo[m] + 2 * k2.geo[m] + 2 * k3.geo[m] + k4.geo[m]);
    }
    y.light_shift +=
        h / 6 * (k1.light_shift + 2 * k2.light_shift + 2 * k3.light_shift + k4.light_shift);
  }

  const ValidatedConfig& v_;
  double phi0_;
  std::array<double, 2> lambda_{};
};

GateConfig constant_pulse(double f_c, double duration, double nu, double edge, double omega) {
  GateConfig g;
  g.trap.f_c = f_c;
  g.pulse.symmetric = false;
  g.pulse.edge_time = edge;
  g.pulse.segments = {{duration, 1.0}};
  g.pulse.nu = nu;
  g.pulse.omega_peak = omega;
  return g;
}

double max_abs(const std::vector<cplx>& xs) {
  double m = 0.0;
  for (cplx x : xs) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_SUITE("ld-solver") {

TEST_CASE("zero amplitude leaves the motion at rest") {
  GateConfig g = high_fidelity_gate();
  g.pulse.omega_peak = 0.0;
  const ValidatedConfig v = validate(g);
  for (Branch b : kBranches) {
    const LDTrajectory tr = propagate_ld(v, b, 0.3, 11);
    CHECK(max_abs(tr.alpha_c) == 0.0);
    CHECK(max_abs(tr.alpha_s) == 0.0);
    CHECK(tr.phase() == 0.0);
  }
  CHECK(entangling_phase(v) == 0.0);
  CHECK(ld_gate_error(v).bell_error == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("five-segment gate reaches a quarter-turn phase with small error") {
  const ValidatedConfig v = validate(high_fidelity_gate());
  CHECK(std::abs(std::abs(entangling_phase(v)) - kPi / 2) < 1e-6);
  const LDGateResult r = ld_gate_error(v);
  CHECK(r.bell_error < 1e-3);
  CHECK(r.bell_error >= 0.0);
  CHECK(r.closure_defect >= 0.0);
}

TEST_CASE("slow constant pulse closes and keeps the phase flat in phi0") {
  const ValidatedConfig v = validate(adiabatic_reference());
  const LDGateResult r = ld_gate_error(v);
  CHECK(r.bell_error < 1e-4);
  CHECK(r.phase_spread < 1e-4);
}

TEST_CASE("near-resonant loop closes after one detuning period") {
  const double f_c = 2e6, delta = 0.03 * f_c;
  const ValidatedConfig v =
      validate(constant_pulse(f_c, 1 / delta, f_c + delta, 500e-9, kTwoPi * 0.1e6));
  for (double phi0 : {0.0, 1.3}) {
    const LDTrajectory tr = propagate_ld(v, Branch::DownUp, phi0, 2001);
    CHECK(std::abs(tr.alpha_c.back()) < 1e-3 * max_abs(tr.alpha_c));
  }
}

TEST_CASE("rotating-wave circle: radius, closure time and enclosed area") {
  const double f_c = 2e6, delta = 0.01 * f_c, omega = kTwoPi * 50e3;
  const ValidatedConfig v = validate(constant_pulse(f_c, 1 / delta, f_c + delta, 0.0, omega));
  const double eta = v.trap().eta_c;
  // |alpha| = 2 eta Omega |sin(pi delta t)| / (2 pi delta); phase -2 pi (eta Omega / 2 pi delta)^2.
  const double radius = eta * omega / (kTwoPi * delta);
  const LDTrajectory tr = propagate_ld(v, Branch::DownUp, 0.4, 4001);
  CHECK(max_abs(tr.alpha_c) == doctest::Approx(2 * radius).epsilon(0.01));
  CHECK(std::abs(tr.alpha_c.back()) < 0.01 * radius);
  CHECK(tr.geo_c == doctest::Approx(-kTwoPi * radius * radius).epsilon(0.01));
  CHECK(std::abs(tr.geo_s) < 1e-12);
}

TEST_CASE("closed-form propagation matches fine-step integration") {
  for (const GateConfig& g : {high_fidelity_gate(), fastest_gate()}) {
    const ValidatedConfig v = validate(g);
    for (double phi0 : {0.0, 2.1}) {
      for (Branch b : kBranches) {
        const LDTrajectory tr = propagate_ld(v, b, phi0);
        const OdeState ref = Rk4Oracle(v, b, phi0).run(10e-12);
        const cplx got_alpha[2] = {tr.residual_c, tr.residual_s};
        const double got_geo[2] = {tr.geo_c, tr.geo_s};
        const double scale = std::max(
            {std::abs(ref.alpha[0]), std::abs(ref.alpha[1]), max_abs(propagate_ld(v, b, phi0, 401).alpha_c),
             max_abs(propagate_ld(v, b, phi0, 401).alpha_s), 1e-300});
        for (int m = 0; m < 2; ++m) {
          CHECK(std::abs(got_alpha[m] - ref.alpha[m]) < 1e-8 * scale);
          CHECK(std::abs(got_geo[m] - ref.geo[m]) < 1e-8 * std::max(std::abs(ref.geo[m]), 1.0));
        }
        CHECK(std::abs(tr.light_shift - ref.light_shift) <
              1e-8 * std::max(std::abs(ref.light_shift), 1.0));
      }
    }
  }
}

TEST_CASE("shifting the phi0 grid leaves the averaged error unchanged") {
  for (const GateConfig& g : {high_fidelity_gate(), adiabatic_reference()}) {
    GateConfig shifted = g;
    shifted.sim.phi0_offset = 0.731;
    CHECK(std::abs(ld_gate_error(validate(g)).bell_error -
                   ld_gate_error(validate(shifted)).bell_error) < 1e-10);
  }
}

TEST_CASE("half-turn in phi0 negates the displacement and keeps the loop phases") {
  const ValidatedConfig v = validate(high_fidelity_gate());
  for (Branch b : kBranches) {
    const LDTrajectory a = propagate_ld(v, b, 0.4);
    const LDTrajectory c = propagate_ld(v, b, 0.4 + kPi);
    CHECK(std::abs(a.residual_c + c.residual_c) < 1e-12);
    CHECK(std::abs(a.residual_s + c.residual_s) < 1e-12);
    CHECK(a.geo_c == doctest::Approx(c.geo_c).epsilon(1e-10));
    CHECK(a.geo_s == doctest::Approx(c.geo_s).epsilon(1e-10));
  }
}

TEST_CASE("splitting the propagation in time is exact") {
  const ValidatedConfig v = validate(high_fidelity_gate());
  const LDPropagator prop(v);
  for (double t1 : {0.1e-6, 0.55e-6, 1.2e-6}) {
    for (Branch b : {Branch::DownUp, Branch::DownDown}) {
      const LDState whole = prop.final_state(b, 0.9);
      const LDState mid = prop.advance(b, 0.9, LDState{}, t1);
      const LDState end = prop.advance(b, 0.9, mid, v.gate_time());
      for (int m = 0; m < 2; ++m) {
        CHECK(std::abs(end.alpha[m] - whole.alpha[m]) < 1e-10 * std::max(std::abs(whole.alpha[m]), 1.0));
        CHECK(std::abs(end.geo[m] - whole.geo[m]) < 1e-10);
      }
      CHECK(std::abs(end.light_shift - whole.light_shift) < 1e-10);
    }
  }
}

TEST_CASE("displacement is linear and phase quadratic in the drive") {
  GateConfig g = adiabatic_reference();
  const double base = g.pulse.omega_peak;
  const ValidatedConfig v1 = validate(g);
  const double phase1 = entangling_phase(v1);
  g.pulse.omega_peak = 2 * base;
  CHECK(entangling_phase(validate(g)) / phase1 == doctest::Approx(4.0).epsilon(0.01));

  g.pulse.omega_peak = 0.1 * base;
  const ValidatedConfig weak = validate(g);
  g.pulse.omega_peak = base;
  const ValidatedConfig strong = validate(g);
  for (Branch b : {Branch::DownUp, Branch::DownDown}) {
    const LDTrajectory a = propagate_ld(weak, b, 0.2);
    const LDTrajectory c = propagate_ld(strong, b, 0.2);
    CHECK(std::abs(c.residual_c - 10.0 * a.residual_c) <= 1e-9 * std::abs(c.residual_c) + 1e-15);
    CHECK(std::abs(c.residual_s - 10.0 * a.residual_s) <= 1e-9 * std::abs(c.residual_s) + 1e-15);
    CHECK(c.geometric_phase() == doctest::Approx(100.0 * a.geometric_phase()).epsilon(1e-9));
  }
}

TEST_CASE("closed loops at a quarter turn give a perfect Bell state") {
  for (double chi : {0.0, 0.4, -2.2}) {
    // dd, du, ud, uu: quarter-turn interaction plus a common single-ion phase
    const CoherenceMatrix g = ideal_coherence({chi, kPi / 2, kPi / 2, -chi});
    CHECK(optimize_bell_fidelity(g).error() < 1e-10);
  }
}

TEST_CASE("residual error is second order in the loop defects") {
  const double f_c = 2e6, delta = 0.03 * f_c, nu = f_c + delta;
  GateConfig g = constant_pulse(f_c, 1 / delta, nu, 2 / (f_c + nu), kTwoPi * 0.1e6);
  const ValidatedConfig raw = validate(g);
  g.pulse = calibrate_phase(raw.pulse(), raw);
  const LDGateResult r = ld_gate_error(validate(g));
  const double defect = r.closure_defect * r.closure_defect + r.phase_spread * r.phase_spread;
  CHECK(r.bell_error < 4.0 * defect);
}

TEST_CASE("small-argument moments agree with their closed forms") {
  for (double length : {1e-9, 3e-7}) {
    for (double x : {0.49, 0.51, 0.1, -0.3}) {
      const double w = x / length;
      const cplx z{0.0, w};
      const cplx m0 = (std::polar(1.0, x) - 1.0) / z;
      const cplx m1 = (length * std::polar(1.0, x) - m0) / z;
      CHECK(std::abs(exp_moment0(w, length) - m0) < 1e-12 * std::abs(m0));
      CHECK(std::abs(exp_moment1(w, length) - m1) < 1e-12 * std::abs(m1));
    }
    CHECK(exp_moment1(0.0, length).real() == doctest::Approx(length * length / 2));
  }
}

}  // TEST_SUITE
