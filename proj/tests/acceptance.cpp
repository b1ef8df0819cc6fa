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


// Acceptance run: one PASS/FAIL line per criterion, with diagnostics above
// it. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fastgate/error_budget.hpp"
#include "fastgate/error_curve.hpp"
#include "fastgate/full_solver.hpp"
#include "fastgate/io.hpp"
#include "fastgate/ld_solver.hpp"
#include "fastgate/optimizer.hpp"
#include "fastgate/presets.hpp"

using namespace fastgate;

namespace {

const std::string kConfigs = FASTGATE_SOURCE_DIR "/configs/";

// Tolerances.
constexpr double kStructuralTol = 1e-12;
constexpr double kFastestNuRatio = 3.427;
constexpr double kFastestNuRatioTol = 0.01;
constexpr double kAdiabaticAgreement = 1e-5;
constexpr double kAdiabaticMaxError = 1e-3;
constexpr double kHighFidelityMaxError = 1.5e-3;
constexpr double kHighFidelityOutOfLd[2] = {1.5e-4, 1.5e-3};
constexpr double kHighFidelityBudget[2] = {0.9e-3, 3e-3};
constexpr double kFastestError[2] = {0.15, 0.45};
constexpr double kFastestBudget[2] = {0.2, 0.45};
constexpr double kRectFloor[2] = {1e-2, 4e-2};
constexpr double kScreen = 1e-4;
constexpr double kRefinedMaxError = 1.5e-3;
constexpr int kOptimizerSeeds = 500;
constexpr double kSensitivityFactor = 3.0;
constexpr double kSensitivitySlow = 2e-4;
constexpr double kSensitivityFast = 1e-3;
constexpr double kOutOfLdReduction = 10.0;
constexpr double kPropertyBudgetSeconds = 600.0;

struct Outcome {
  bool pass = false;
  std::string summary;
};

void note(const char* fmt, auto... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

bool in_range(double x, const double (&r)[2]) { return x >= r[0] && x <= r[1]; }

double out_of_ld(const ValidatedConfig& v, double* ld = nullptr, double* full = nullptr) {
  const double l = ld_gate_error(v).bell_error;
  const double f = full_gate_error(v).bell_error;
  if (ld) *ld = l;
  if (full) *full = f;
  return out_of_ld_component(f, l);
}

Outcome structural_constants() {
  const ValidatedConfig v = validate(high_fidelity_gate());
  const double fs_ratio = v.f_s() / v.trap().f_c;
  const double eta_ratio = v.eta_s() / v.trap().eta_c;
  const GateConfig fast = fastest_gate();
  const double nu_ratio = fast.pulse.nu / fast.trap.f_c;
  note("f_s/f_c = %.15f, eta_s/eta_c = %.15f, fastest nu/f_c = %.5f", fs_ratio, eta_ratio,
       nu_ratio);
  const bool ok = std::abs(fs_ratio - std::sqrt(3.0)) < kStructuralTol &&
                  std::abs(eta_ratio - std::pow(3.0, -0.25)) < kStructuralTol &&
                  std::abs(nu_ratio - kFastestNuRatio) < kFastestNuRatioTol;
  return {ok, format("nu/f_c = %.4f", nu_ratio)};
}

Outcome adiabatic_regression() {
  const ValidatedConfig v = validate(load_config(kConfigs + "adiabatic_20us.json"));
  const LDGateResult ld = ld_gate_error(v);
  const FullGateResult full = full_gate_error(v);
  const double diff = std::abs(full.bell_error - ld.bell_error);
  note("t_g = %.3g s, nu/f_c = %.4f, LD error %.3e (phase spread %.2e), full error %.3e",
       v.gate_time(), v.pulse().nu / v.trap().f_c, ld.bell_error, ld.phase_spread,
       full.bell_error);
  const bool ok = diff < kAdiabaticAgreement && full.bell_error < kAdiabaticMaxError &&
                  ld.bell_error < kAdiabaticMaxError;
  return {ok, format("|full - LD| = %.3e (limit %.0e), full %.3e (limit %.0e)", diff,
                     kAdiabaticAgreement, full.bell_error, kAdiabaticMaxError)};
}

ErrorBudget budget_for(const ValidatedConfig& v, double ld, double full, double detuning) {
  BudgetInputs in;
  in.ld_error = ld;
  in.full_error = full;
  in.sensitivity = sensitivity(v);
  in.detuning = detuning;
  in.heating_rate = 100.0;
  return assemble_budget(v, in);
}

Outcome high_fidelity_gate_error() {
  const ValidatedConfig v = validate(load_config(kConfigs + "high_fidelity_1590ns.json"));
  double ld = 0, full = 0;
  const double oold = out_of_ld(v, &ld, &full);
  const ErrorBudget b = budget_for(v, ld, full, -800e9);
  note("LD error %.3e, full error %.3e, out-of-LD %.3e", ld, full, oold);
  for (const auto& c : b.components)
    if (c.value) note("budget %-16s %.3e", c.name.c_str(), *c.value);
  note("budget total %.3e", b.total);
  const bool ok = full <= kHighFidelityMaxError && in_range(oold, kHighFidelityOutOfLd) &&
                  in_range(b.total, kHighFidelityBudget);
  return {ok, format("full %.3e, out-of-LD %.3e, budget total %.3e", full, oold, b.total)};
}

Outcome fastest_gate_error() {
  const ValidatedConfig v = validate(load_config(kConfigs + "fastest_483ns.json"));
  double ld = 0, full = 0;
  out_of_ld(v, &ld, &full);
  const ErrorBudget b = budget_for(v, ld, full, -200e9);
  note("LD error %.3e, full error %.3e", ld, full);
  for (const auto& c : b.components)
    if (c.value) note("budget %-16s %.3e", c.name.c_str(), *c.value);
  note("budget total %.3e", b.total);
  const bool ok = in_range(full, kFastestError) && in_range(b.total, kFastestBudget);
  return {ok, format("full %.3f, budget total %.3f", full, b.total)};
}

Outcome rectangular_floor() {
  const GateConfig base = load_config(kConfigs + "rectangular_base.json");
  const std::vector<double> near = {2.05e-6, 2.1e-6, 2.13e-6, 2.2e-6};
  const std::vector<double> shorter = {1.5e-6, 1.6e-6, 1.7e-6, 1.8e-6, 1.9e-6};
  std::vector<double> times = shorter;
  times.insert(times.end(), near.begin(), near.end());
  const auto points = error_vs_time_curve(base, times);
  double floor = INFINITY, below = INFINITY;
  std::set<std::string> regimes;
  for (const CurvePoint& p : points) {
    if (!p.ok()) {
      note("t_g %.3g us: failed (%s)", p.gate_time * 1e6, p.failure.c_str());
      continue;
    }
    note("t_g %.3g us: error %.3e (LD %.3e), nu/f_c %.4f, %s", p.gate_time * 1e6, p.error,
         p.ld_error, p.nu / base.trap.f_c, regime_name(*p.regime));
    regimes.insert(regime_name(*p.regime));
    if (p.gate_time < 2e-6)
      below = std::min(below, p.error);
    else
      floor = std::min(floor, p.error);
  }
  note("optimum switches regime along the curve: %s", regimes.size() > 1 ? "yes" : "no");
  const bool ok = in_range(floor, kRectFloor) && below >= floor;
  return {ok, format("floor near 2.1 us %.3e, best below 2 us %.3e", floor, below)};
}

Outcome optimizer_reproduction() {
  SearchSpace space = search_space_from_json(load_json(kConfigs + "search_7seg_1600ns.json"));
  space.full_budget = 12;
  const PipelineReport r = run_pipeline(space, kOptimizerSeeds, 1);
  note("%zu seeds, %zu screened below %.0e, %zu solutions", r.seeds.size(), r.screened.size(),
       space.epsilon_t, r.solutions.size());
  bool ok = false;
  double best = INFINITY;
  for (const Candidate& c : r.solutions) {
    note("solution %s: LD %.3e, full %.3e, area %.2f rad, nu %.4f MHz", c.hash.c_str(),
         c.ld_error, c.error(), c.area, c.pulse.nu / 1e6);
    if (c.full_error) best = std::min(best, *c.full_error);
    if (c.ld_error < kScreen && c.full_error && *c.full_error < kRefinedMaxError) ok = true;
  }
  return {ok, format("%zu solutions, best refined full error %.3e", r.solutions.size(), best)};
}

Outcome sensitivity_consistency() {
  const double slow = sensitivity(validate(load_config(kConfigs + "high_fidelity_1590ns.json")));
  const double fast = sensitivity(validate(load_config(kConfigs + "fastest_483ns.json")));
  auto within = [](double x, double ref) {
    return x >= ref / kSensitivityFactor && x <= ref * kSensitivityFactor;
  };
  note("1.59 us: %.3e (target %.0e x/ 3), 483 ns: %.3e (target %.0e x/ 3)", slow,
       kSensitivitySlow, fast, kSensitivityFast);
  return {within(slow, kSensitivitySlow) && within(fast, kSensitivityFast),
          format("1.59 us %.2e, 483 ns %.2e", slow, fast)};
}

Outcome out_of_ld_scaling() {
  GateConfig g = load_config(kConfigs + "high_fidelity_1590ns.json");
  double ld_a = 0, full_a = 0, ld_b = 0, full_b = 0;
  const double a = out_of_ld(validate(g), &ld_a, &full_a);
  g.trap.eta_c = 0.08;
  const ValidatedConfig raw = validate(g);
  g.pulse = calibrate_phase(raw.pulse(), raw);
  const double b = out_of_ld(validate(g), &ld_b, &full_b);
  note("eta_c 0.126: LD %.3e, full %.3e, out-of-LD %.3e", ld_a, full_a, a);
  note("eta_c 0.080: LD %.3e, full %.3e, out-of-LD %.3e", ld_b, full_b, b);
  const double ratio = b > 0 ? a / b : INFINITY;
  return {ratio >= kOutOfLdReduction, format("reduction x%.2f (need x%.0f)", ratio, kOutOfLdReduction)};
}

Outcome property_suites() {
  const std::string filter =
      "norm is conserved*,halving the time step,doubling grid points and extent,"
      "closed-form propagation matches*,phi0 grid of 8 against 16,"
      "the pipeline is reproducible*,noiseless trace gives back*,one percent noise*";
  const std::string cmd = std::string("\"") + FASTGATE_TESTS_BINARY + "\" --test-case=\"" +
                          filter + "\" --no-intro --no-version";
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = std::system(cmd.c_str());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {rc == 0 && secs < kPropertyBudgetSeconds,
          format("exit %d after %.0f s (limit %.0f s)", rc, secs, kPropertyBudgetSeconds)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"structural constants", structural_constants},
      {"adiabatic LD/full agreement", adiabatic_regression},
      {"1.59 us five-segment gate", high_fidelity_gate_error},
      {"483 ns seven-segment gate", fastest_gate_error},
      {"rectangular-pulse floor", rectangular_floor},
      {"optimizer at 1.6 us", optimizer_reproduction},
      {"timing and amplitude sensitivity", sensitivity_consistency},
      {"out-of-Lamb-Dicke scaling with eta", out_of_ld_scaling},
      {"property suites", property_suites},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    std::printf("criterion %d: %s\n", id, criteria[i].first);
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s: %s [%.0f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                o.summary.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
