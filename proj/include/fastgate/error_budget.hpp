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
#include "fastgate/io.hpp"

namespace fastgate {

/// Photon scattering error eps = c_sc * area / |Delta|, with Delta the Raman
/// detuning in Hz and area the integrated pulse area in rad.
struct ScatteringModel {
  double c_sc = 0.0;  // Hz / rad
  std::string source;

  /// Constant that reproduces `error` for a gate of the given area and detuning.
  static ScatteringModel calibrated(double area, double detuning, double error,
                                    std::string source);
};

/// Calibration against the 1.59 us stepped gate: 6e-4 at Delta = -800 GHz.
const ScatteringModel& default_scattering_model();

double out_of_ld_component(double full_error, double ld_error);
double scattering_component(double area, double detuning,
                            const ScatteringModel& model = default_scattering_model());
double heating_component(double gate_time, double heating_rate);

struct BudgetComponent {
  std::string name;
  std::optional<double> value;  // empty when out of scope
  std::string note;
};

struct ErrorBudget {
  std::vector<BudgetComponent> components;
  double total = 0.0;

  const BudgetComponent* find(const std::string& name) const;
};

struct BudgetInputs {
  double ld_error = 0.0;
  double full_error = 0.0;
  double sensitivity = 0.0;
  double detuning = -800e9;    // Hz
  double heating_rate = 100.0; // quanta / s
  ScatteringModel scattering = default_scattering_model();
};

/// Fills every row and sums the numeric ones.
ErrorBudget assemble_budget(const ValidatedConfig& config, const BudgetInputs& inputs);

std::string render_table(const ErrorBudget& budget, const std::string& title = "");
Json to_json(const ErrorBudget& budget);

}  // namespace fastgate
