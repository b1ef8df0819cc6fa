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

#include "fastgate/error_budget.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "fastgate/presets.hpp"

namespace fastgate {

ScatteringModel ScatteringModel::calibrated(double area, double detuning, double error,
                                            std::string source) {
  if (!(area > 0)) throw ConfigError("scattering.area", "must be positive");
  if (detuning == 0.0) throw ConfigError("scattering.detuning", "must be non-zero");
  return {error * std::abs(detuning) / area, std::move(source)};
}

const ScatteringModel& default_scattering_model() {
  static const ScatteringModel model = ScatteringModel::calibrated(
      pulse_area(high_fidelity_gate().pulse), -800e9, 6e-4,
      "1.59 us five-segment gate, Delta = -800 GHz, eps = 6e-4");
  return model;
}

double out_of_ld_component(double full_error, double ld_error) {
  return std::max(full_error - ld_error, 0.0);
}

double scattering_component(double area, double detuning, const ScatteringModel& model) {
  if (detuning == 0.0) throw ConfigError("detuning", "must be non-zero");
  return model.c_sc * area / std::abs(detuning);
}

double heating_component(double gate_time, double heating_rate) {
  if (heating_rate < 0) throw ConfigError("heating_rate", "must be non-negative");
  return 0.5 * heating_rate * gate_time;
}

const BudgetComponent* ErrorBudget::find(const std::string& name) const {
  for (const auto& c : components)
    if (c.name == name) return &c;
  return nullptr;
}

ErrorBudget assemble_budget(const ValidatedConfig& config, const BudgetInputs& in) {
  ErrorBudget b;
  b.components = {
      {"out_of_ld", out_of_ld_component(in.full_error, in.ld_error),
       "full-model minus Lamb-Dicke coherent error"},
      {"scattering", scattering_component(pulse_area(config.pulse()), in.detuning, in.scattering),
       "c_sc * area / |Delta|"},
      {"heating", heating_component(config.gate_time(), in.heating_rate), "ndot * t_g / 2"},
      {"timing_amplitude", in.sensitivity, "Monte Carlo over segment timing and amplitude"},
      {"chirp_note", std::nullopt, "out of scope: AOM phase chirp is a hardware measurement"},
      {"radial_note", std::nullopt, "out of scope: radial modes need 3D trap data"},
  };
  for (const auto& c : b.components)
    if (c.value) b.total += *c.value;
  return b;
}

std::string render_table(const ErrorBudget& budget, const std::string& title) {
  std::ostringstream out;
  if (!title.empty()) out << title << '\n';
  char line[160];
  for (const auto& c : budget.components) {
    if (c.value) {
      std::snprintf(line, sizeof line, "  %-18s %12.3e   %s\n", c.name.c_str(), *c.value,
                    c.note.c_str());
    } else {
      std::snprintf(line, sizeof line, "  %-18s %12s   %s\n", c.name.c_str(), "-",
                    c.note.c_str());
    }
    out << line;
  }
  std::snprintf(line, sizeof line, "  %-18s %12.3e\n", "total", budget.total);
  out << line;
  return out.str();
}

Json to_json(const ErrorBudget& budget) {
  Json rows = Json::array();
  for (const auto& c : budget.components) {
    Json row = {{"name", c.name}, {"note", c.note}};
    row["value"] = c.value ? Json(*c.value) : Json("out of scope");
    rows.push_back(row);
  }
  return {{"schema_version", kSchemaVersion}, {"components", rows}, {"total", budget.total}};
}

}  // namespace fastgate
