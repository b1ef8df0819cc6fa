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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fastgate/config.hpp"

namespace fastgate {

/// Search space for mirror-symmetric pulses. Segment counts refer to the
/// expanded pulse, so 7 segments have 4 free durations.
struct SearchSpace {
  enum class Family { Stepped, Binary };

  Family family = Family::Stepped;
  int segments = 7;
  double gate_time = 1.6e-6;               // s, lower end when free
  std::optional<double> gate_time_max;     // free t_g in [gate_time, max]
  double min_duration = 10e-9;             // s, per expanded segment
  double min_amplitude = 0.0;
  double nu_min = 2.0e6;                   // Hz
  double nu_max = 3.3e6;
  double epsilon_t = 1e-4;
  double area_weight = 1e-6;
  double area_ref = 10.0;                  // rad
  int max_evaluations = 2000;              // per local optimization, all restarts
  int restarts = 3;
  double tolerance = 1e-6;
  int local_count = 0;                     // seeds kept for local search; 0 = all
  int refine_count = 3;                    // candidates re-optimized with the full solver
  int full_budget = 200;                   // full-solver evaluations per refined candidate
  GateConfig base;                         // trap, coupling, sim and edge time

  int free_segments() const { return (segments + 1) / 2; }
  bool free_gate_time() const { return gate_time_max.has_value(); }
};

/// Throws ConfigError on an inconsistent space.
void check(const SearchSpace& space);

struct Candidate {
  PulseShape pulse;                    // calibrated to |Phi| = pi/2
  std::vector<double> params;          // search coordinates
  double ld_error = 1.0;
  std::optional<double> full_error;
  double area = 0.0;
  std::optional<double> sensitivity;
  double entangling_phase = 0.0;
  std::string hash;                    // config_hash of the evaluated configuration
  bool converged = true;
  int evaluations = 0;

  double error() const { return full_error.value_or(ld_error); }
};

/// Pulse described by a parameter vector, before calibration.
PulseShape decode(const SearchSpace& space, const std::vector<double>& params);
/// Inverse of decode for pulses that fit the space.
std::vector<double> encode(const SearchSpace& space, const PulseShape& pulse);
/// Lower and upper bound per parameter.
std::pair<std::vector<double>, std::vector<double>> bounds(const SearchSpace& space);

/// Configuration for a pulse inside the space.
ValidatedConfig candidate_config(const SearchSpace& space, const PulseShape& pulse);

/// Scales omega_peak so the Lamb-Dicke entangling phase has magnitude
/// pi/2, then applies one Newton step on the exact phase.
PulseShape calibrate_phase(const PulseShape& pulse, const ValidatedConfig& config);

/// Decodes, calibrates and scores one parameter vector in the LD model.
Candidate evaluate_ld(const SearchSpace& space, const std::vector<double>& params);

/// Uniform draws within bounds, each calibrated and LD-scored.
std::vector<Candidate> seed_candidates(const SearchSpace& space, int count,
                                       std::uint64_t rng_seed);

/// Bounded Nelder-Mead on ld_error + area_weight * area / area_ref.
Candidate local_optimize(const SearchSpace& space, const Candidate& start);

struct RefineReport {
  std::vector<Candidate> candidates;
  int evaluations = 0;
  bool budget_exhausted = false;
};

/// Full-solver scores for every candidate, then coordinate descent with the
/// full solver in the loop for the best `refine_count`.
RefineReport refine_full(const SearchSpace& space, std::vector<Candidate> candidates);

struct SensitivityOptions {
  double sigma_t = 0.2e-9;   // s
  double sigma_a = 2e-3;     // relative
  int draws = 100;
  std::uint64_t rng_seed = 7;
};

/// Mean increase of the LD error under random segment timing and amplitude
/// errors, with omega_peak, phi_half and the Bell phase held fixed.
double sensitivity(const ValidatedConfig& config, const SensitivityOptions& options = {});

/// Non-dominated set over (error, area, sensitivity), sorted by
/// (error, area, hash).
std::vector<Candidate> pareto_select(const std::vector<Candidate>& candidates);

struct PipelineReport {
  std::vector<Candidate> seeds;
  std::vector<Candidate> optimized;
  std::vector<Candidate> screened;   // ld_error < epsilon_t
  std::vector<Candidate> solutions;
  bool budget_exhausted = false;
};

/// seed -> local optimization -> screen -> refine -> sensitivity -> Pareto.
PipelineReport run_pipeline(const SearchSpace& space, int seeds, std::uint64_t rng_seed,
                            const SensitivityOptions& sensitivity_options = {});

}  // namespace fastgate
