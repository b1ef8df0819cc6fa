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

#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "fastgate/config.hpp"
#include "fastgate/ramsey.hpp"

namespace fastgate {

/// Rectangular 2D grid over the normal-mode coordinates (q_c, q_s), in
/// ground-state widths: the ground state is exp(-q^2/2) on each axis.
/// Storage is row-major with the COM index slowest.
struct MotionalGrid {
  int n_c = 64;
  int n_s = 64;
  double extent_c = 10.0;  // grid covers [-extent, extent)
  double extent_s = 10.0;

  double dq_c() const { return 2.0 * extent_c / n_c; }
  double dq_s() const { return 2.0 * extent_s / n_s; }
  std::size_t size() const { return static_cast<std::size_t>(n_c) * n_s; }
  std::vector<double> q_c() const;
  std::vector<double> q_s() const;
  /// Conjugate momenta in FFT ordering.
  std::vector<double> p_c() const;
  std::vector<double> p_s() const;

  bool operator==(const MotionalGrid&) const = default;
};

struct BranchWave {
  Branch branch = Branch::DownDown;
  double phi0 = 0.0;
  double t = 0.0;
  MotionalGrid grid;
  std::vector<cplx> psi;              // normalized: sum |psi|^2 = 1
  std::vector<double> norm_history;   // norm at each audit point

  double norm() const;
};

/// Coherent state |alpha_c, alpha_s> sampled on the grid.
BranchWave coherent_wave(const MotionalGrid& grid, cplx alpha_c, cplx alpha_s);

/// Grid sized from the Lamb-Dicke excursion unless overridden in SimOptions.
MotionalGrid plan_grid(const ValidatedConfig& config);

/// Target time step, unless overridden in SimOptions. Steps are further
/// shortened so every linear envelope piece holds a whole number of steps.
double plan_time_step(const ValidatedConfig& config, const MotionalGrid& grid);

/// Full optical potential V(q_c, q_s, t) for one branch, in rad/s:
///   Omega(t) sum_j lambda_{s_j} cos(theta_j + sqrt2 eta_c s_jc q_c + sqrt2 eta_s s_js q_s
///                                   - 2 pi nu t - phi0)
std::vector<double> build_potential(const ValidatedConfig& config, const MotionalGrid& grid,
                                    Branch branch, double t, double phi0);

struct FullDiagnostics {
  double max_displacement = 0.0;  // max |<a_m>| reached, ground-state units
  double squeezing = 1.0;         // max quadrature variance ratio at t_g
  double boundary_leakage = 0.0;  // max probability in the outer grid band
  double norm_drift = 0.0;        // max | ||psi|| - 1 |
  std::size_t steps = 0;
  double time_step = 0.0;

  void merge(const FullDiagnostics& other);
};

struct PropagationOptions {
  std::vector<double> snapshot_times;
  std::function<void(const BranchWave&)> on_snapshot;
  int audit_interval = 16;
  double leakage_limit = 1e-6;
  double time_step = 0.0;  // 0: plan_time_step
};

/// Split-operator propagation of one branch over the whole gate. The
/// harmonic part is applied exactly as three shears; the spatially uniform
/// light shift is integrated in closed form and applied as a phase.
/// Throws NumericalError on a failed grid or step-size audit.
BranchWave propagate_full(const ValidatedConfig& config, Branch branch, double phi0,
                          const BranchWave& initial, const PropagationOptions& options = {},
                          FullDiagnostics* diagnostics = nullptr);

struct FullGateResult {
  double bell_error = 0.0;
  double phi_half = 0.0;
  double bell_phase = 0.0;
  CoherenceMatrix coherence{};
  FullDiagnostics diagnostics;
  MotionalGrid grid;
  std::vector<BranchWave> final_states;  // only when requested
};

/// Coherent gate error of the full model averaged over phi0 and initial
/// motional samples.
FullGateResult full_gate_error(const ValidatedConfig& config, bool keep_states = false);

/// |psi|^2 snapshot: little-endian u64 n_c, u64 n_s, f64 extent_c,
/// f64 extent_s, f64 t, then n_c*n_s f64 row-major.
void write_density_snapshot(const std::filesystem::path& path, const BranchWave& wave);

}  // namespace fastgate
