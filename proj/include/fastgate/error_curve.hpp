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

#include <optional>
#include <string>
#include <vector>

#include "fastgate/config.hpp"

namespace fastgate {

/// Where the beat frequency sits relative to the two axial modes.
enum class DriveRegime { BetweenModes, AboveStretch };
const char* regime_name(DriveRegime regime);

struct CurveOptions {
  int nu_points = 200;          // Lamb-Dicke scan points per regime
  int minima = 3;               // local minima refined per regime
  double nu_max_ratio = 4.0;    // upper regime ends at nu = ratio * f_c
  bool full_solver = true;
  int full_candidates = 1;      // refined minima per regime handed to the full solver
  int omega_polish = 0;         // full-solver evaluations spent rescaling omega
};

struct CurvePoint {
  double gate_time = 0.0;
  double error = 0.0;           // full-solver error, or the LD error without it
  double ld_error = 0.0;
  double nu = 0.0;
  double omega_peak = 0.0;
  std::optional<DriveRegime> regime;
  std::string failure;          // empty on success

  bool ok() const { return failure.empty(); }
};

/// Rectangular pulse of length `gate_time` built on the template's trap,
/// coupling, sim options and edge time.
GateConfig rectangular_from(const GateConfig& base, double gate_time, double nu);

/// Best rectangular pulse at one gate time: omega fixed by the pi/2 phase
/// condition, nu scanned in both regimes, refined, then checked with the
/// full solver. Failures are recorded on the point, never thrown.
CurvePoint rectangular_optimum(const GateConfig& base, double gate_time,
                               const CurveOptions& options = {});

/// One point per gate time, in input order. Points run on up to
/// `parallel` threads; the result does not depend on the thread count.
std::vector<CurvePoint> error_vs_time_curve(const GateConfig& base,
                                            const std::vector<double>& gate_times,
                                            const CurveOptions& options = {}, int parallel = 1);

/// Evaluates an already-shaped solution as a curve point.
CurvePoint evaluate_solution(const GateConfig& config, bool full_solver = true);

}  // namespace fastgate
