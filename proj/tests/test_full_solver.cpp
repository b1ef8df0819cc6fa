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

#include <cmath>
#include <random>

#include "detail/fft_buffer.hpp"
#include "fastgate/full_solver.hpp"
#include "fastgate/ld_solver.hpp"
#include "fastgate/optimizer.hpp"
#include "fastgate/presets.hpp"
#include "support.hpp"

using namespace fastgate;
using fastgate::testing::with_phi0;

namespace {

cplx overlap(const BranchWave& a, const BranchWave& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.psi.size(); ++i) s += std::conj(a.psi[i]) * b.psi[i];
  return s;
}

double full_error(const GateConfig& g) { return full_gate_error(validate(g)).bell_error; }

GateConfig recalibrated(GateConfig g) {
  const ValidatedConfig v = validate(g);
  g.pulse = calibrate_phase(v.pulse(), v);
  return g;
}

}  // namespace

TEST_SUITE("full-solver") {

TEST_CASE("forward then backward transform restores the data") {
  MotionalGrid grid;
  grid.n_c = 32;
  grid.n_s = 64;
  detail::FftBuffer fft(grid);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  std::vector<cplx> ref(fft.size());
  for (std::size_t i = 0; i < ref.size(); ++i) fft.data()[i] = ref[i] = {nd(rng), nd(rng)};
  fft.forward();
  fft.backward();
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    worst = std::max(worst, std::abs(fft.data()[i] / static_cast<double>(fft.size()) - ref[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("potential at the origin is the motion-free light shift") {
  const ValidatedConfig v = validate(high_fidelity_gate());
  MotionalGrid grid;
  grid.n_c = grid.n_s = 4;
  grid.extent_c = grid.extent_s = 2e-4;  // q in {-2, -1, 0, 1} x 1e-4
  const double dq = grid.dq_c();
  for (Branch b : kBranches) {
    for (double t : {0.2e-6, 0.9e-6}) {
      const double phi0 = 0.77;
      const auto pot = build_potential(v, grid, b, t, phi0);
      auto at = [&](int i, int j) { return pot[static_cast<std::size_t>(i) * grid.n_s + j]; };
      const double om = v.pulse().omega_peak * envelope(v.pulse(), t);
      const double x = kTwoPi * v.pulse().nu * t + phi0;
      double v0 = 0.0;
      for (int j = 0; j < 2; ++j)
        v0 += v.coupling()(spin_of(b, j)) * std::cos(v.geometry().theta[j] - x);
      v0 *= om;
      CHECK(std::abs(at(2, 2) - v0) <= 1e-12 * om);
      // dV/dq_m = -2 eta_m g_m with g_m the Lamb-Dicke force per mode.
      const double grad_c = (at(3, 2) - at(1, 2)) / (2 * dq);
      const double grad_s = (at(2, 3) - at(2, 1)) / (2 * dq);
      const double ref_c = -2 * v.eta(Mode::Com) * drive_terms(v, b, Mode::Com)(t, phi0);
      const double ref_s = -2 * v.eta(Mode::Stretch) * drive_terms(v, b, Mode::Stretch)(t, phi0);
      const double scale = 2 * v.eta(Mode::Com) * std::sqrt(2.0) * om;
      CHECK(std::abs(grad_c - ref_c) < 1e-8 * scale);
      CHECK(std::abs(grad_s - ref_s) < 1e-8 * scale);
    }
  }
}

TEST_CASE("norm is conserved by the split-operator steps") {
  const ValidatedConfig v = validate(high_fidelity_gate());
  const MotionalGrid grid = plan_grid(v);
  FullDiagnostics diag;
  PropagationOptions opts;
  opts.audit_interval = 1;
  const BranchWave out =
      propagate_full(v, Branch::DownUp, 0.3, coherent_wave(grid, {}, {}), opts, &diag);
  MESSAGE("steps ", diag.steps, " drift ", diag.norm_drift);
  REQUIRE(diag.steps > 1000);
  CHECK(diag.norm_drift * 1e4 / static_cast<double>(diag.steps) < 1e-9);
  CHECK(std::abs(out.norm() - 1.0) < 1e-9);
}

TEST_CASE("zero drive leaves the two-qubit state unentangled") {
  GateConfig g = with_phi0(high_fidelity_gate(), 4);
  g.pulse.omega_peak = 0.0;
  CHECK(full_error(g) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("mirrored spin branches move identically") {
  const ValidatedConfig v = validate(high_fidelity_gate());
  const MotionalGrid grid = plan_grid(v);
  const BranchWave start = coherent_wave(grid, {}, {});
  const BranchWave a = propagate_full(v, Branch::DownUp, 0.4, start);
  const BranchWave b = propagate_full(v, Branch::UpDown, 0.4 + kPi, start);
  CHECK(std::abs(overlap(a, b) - 1.0) < 1e-9);
}

TEST_CASE("halving the time step") {
  GateConfig g = with_phi0(high_fidelity_gate(), 4);
  const ValidatedConfig v = validate(g);
  const double dt = plan_time_step(v, plan_grid(v));
  const double coarse = full_error(g);
  g.sim.time_step = dt / 2;
  const double fine = full_error(g);
  MESSAGE("dt ", dt, " coarse ", coarse, " fine ", fine);
  CHECK(std::abs(coarse - fine) < 1e-6);
}

TEST_CASE("doubling grid points and extent") {
  GateConfig g = with_phi0(high_fidelity_gate(), 4);
  const MotionalGrid grid = plan_grid(validate(g));
  const double base = full_error(g);
  g.sim.grid_points = 2 * grid.n_c;
  g.sim.grid_extent = 2 * grid.extent_c;
  const double wide = full_error(g);
  MESSAGE("grid ", grid.n_c, "x", grid.n_s, " extent ", grid.extent_c, " base ", base,
          " wide ", wide);
  CHECK(std::abs(base - wide) < 1e-6);
}

TEST_CASE("phi0 grid of 8 against 16") {
  const double e8 = full_error(with_phi0(high_fidelity_gate(), 8));
  const double e16 = full_error(with_phi0(high_fidelity_gate(), 16));
  MESSAGE("8: ", e8, " 16: ", e16);
  CHECK(std::abs(e8 - e16) < 1e-5);
}

TEST_CASE("small Lamb-Dicke parameter reproduces the Lamb-Dicke error") {
  GateConfig g = with_phi0(high_fidelity_gate(), 4);
  g.trap.eta_c = 0.02;
  g = recalibrated(g);
  const ValidatedConfig v = validate(g);
  const double ld = ld_gate_error(v).bell_error;
  const double full = full_gate_error(v).bell_error;
  MESSAGE("ld ", ld, " full ", full);
  CHECK(std::abs(full - ld) < 1e-5);
}

TEST_CASE("an undersized grid is reported") {
  GateConfig g = with_phi0(high_fidelity_gate(), 2);
  g.sim.grid_points = 16;
  g.sim.grid_extent = 3.0;
  CHECK_THROWS_AS(full_error(g), NumericalError);
}

}  // TEST_SUITE
