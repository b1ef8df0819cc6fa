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

#include <array>
#include <vector>

#include "fastgate/config.hpp"
#include "fastgate/ramsey.hpp"
#include "fastgate/spectral.hpp"

namespace fastgate {

/// Force amplitude on one normal mode for one spin branch:
///   g_m(t, phi0) = Omega(t) sum_j lambda_{s_j} b_{j,m} sin(theta_j - 2 pi nu t - phi0)
class ModeDrive {
 public:
  ModeDrive(const ValidatedConfig& config, Branch branch, Mode mode);

  double operator()(double t, double phi0) const;

  /// |sum_j lambda_{s_j} b_{j,m} e^{i theta_j}|: peak of g_m per unit Omega.
  double coefficient() const { return std::abs(weight_); }

 private:
  const ValidatedConfig* config_;
  std::array<double, 2> lambda_b_{};
  cplx weight_{};
};

ModeDrive drive_terms(const ValidatedConfig& config, Branch branch, Mode mode);

/// Lamb-Dicke state of one branch at a point in time (interaction picture).
struct LDState {
  double t = 0.0;
  std::array<cplx, 2> alpha{};     // per mode
  std::array<double, 2> geo{};     // geometric phase per mode, Im int alpha^* d alpha
  double light_shift = 0.0;        // motion-independent phase

  double phase() const { return light_shift + geo[0] + geo[1]; }
};

struct LDTrajectory {
  Branch branch = Branch::DownDown;
  double phi0 = 0.0;
  std::vector<double> t;
  std::vector<cplx> alpha_c;
  std::vector<cplx> alpha_s;
  double geo_c = 0.0;
  double geo_s = 0.0;
  double light_shift = 0.0;
  cplx residual_c{};
  cplx residual_s{};

  double geometric_phase() const { return geo_c + geo_s; }
  double phase() const { return light_shift + geo_c + geo_s; }
};

/// Closed-form Lamb-Dicke propagator for one configuration. Builds the
/// envelope Fourier integrals once; branches and phi0 values are then
/// evaluated algebraically.
class LDPropagator {
 public:
  explicit LDPropagator(const ValidatedConfig& config);

  /// Advances `start` to time t1 for the given branch and phi0.
  LDState advance(Branch branch, double phi0, const LDState& start, double t1) const;
  /// Final state after the whole gate, starting from rest.
  LDState final_state(Branch branch, double phi0) const;

  const ValidatedConfig& config() const { return *config_; }

 private:
  struct Coefficients {
    std::array<std::array<cplx, 2>, 2> alpha;  // [mode][minus/plus]
    cplx light_shift;
  };
  Coefficients coefficients(Branch branch, double phi0) const;
  LDState apply(const Coefficients& c, const LDState& start, const IntervalIntegrals& ints,
                double t1) const;

  const ValidatedConfig* config_;
  SpectralIntegrator integrator_;
  IntervalIntegrals whole_;
};

/// Phase-space trajectory of one branch. With `samples` > 1 the history is
/// sampled on a uniform time grid including both end points.
LDTrajectory propagate_ld(const ValidatedConfig& config, Branch branch, double phi0,
                          int samples = 0);

struct LDGateResult {
  std::vector<double> phi0;
  std::vector<std::array<LDTrajectory, 4>> trajectories;  // [phi0][branch]
  std::vector<double> entangling_phases;                   // per phi0
  CoherenceMatrix coherence{};                             // phi0-averaged
  double bell_error = 0.0;
  double phi_half = 0.0;
  double bell_phase = 0.0;
  double entangling_phase = 0.0;  // phi0 average
  double phase_spread = 0.0;
  double closure_defect = 0.0;
  double max_displacement = 0.0;
};

/// Overlap <beta|alpha> of displaced motional states for one mode, averaged
/// over the initial state (ground, coherent or thermal).
cplx displaced_overlap(cplx alpha, cplx beta, const InitialState& initial, double nbar,
                       cplx initial_alpha);

/// phi0-averaged coherent gate error in the Lamb-Dicke approximation.
/// `samples` > 1 keeps sampled trajectories for plotting.
LDGateResult ld_gate_error(const ValidatedConfig& config, int samples = 0);

/// phi0-averaged (phi_du + phi_ud - phi_dd - phi_uu) / 2.
double entangling_phase(const ValidatedConfig& config);

}  // namespace fastgate
