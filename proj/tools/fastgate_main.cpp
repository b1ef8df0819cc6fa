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

// fastgate command-line driver.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 no candidate passed the optimizer screen.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fastgate/error_budget.hpp"
#include "fastgate/error_curve.hpp"
#include "fastgate/full_solver.hpp"
#include "fastgate/io.hpp"
#include "fastgate/ld_solver.hpp"
#include "fastgate/optimizer.hpp"
#include "fastgate/parallel.hpp"
#include "fastgate/waveform.hpp"

namespace fs = std::filesystem;
using namespace fastgate;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitEmptyScreen = 3;

struct Globals {
  bool json = false;
  int parallel = 0;  // 0: FASTGATE_PARALLELISM or the config value
};

int default_parallelism(int from_config) {
  if (const char* env = std::getenv("FASTGATE_PARALLELISM")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
    throw ConfigError("FASTGATE_PARALLELISM", "expected a positive integer");
  }
  return from_config;
}

int parallelism(const Globals& g, int from_config) {
  return g.parallel > 0 ? g.parallel : default_parallelism(from_config);
}

// Outputs must never replace the file a command reads from.
void guard_output(const std::string& out, const std::vector<std::string>& inputs) {
  if (out.empty()) return;
  for (const auto& in : inputs) {
    std::error_code ec;
    if (fs::exists(out) && fs::equivalent(out, in, ec))
      throw ConfigError(out, "output would overwrite an input file");
  }
}

std::ofstream open_output(const std::string& path, bool binary = false) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ConfigError(path, "cannot open for writing");
  return out;
}

void print_json(const Json& doc) { std::cout << doc.dump(2) << '\n'; }

ValidatedConfig with_calibration(const ValidatedConfig& cfg) {
  const PulseShape p = calibrate_phase(cfg.pulse(), cfg);
  return cfg.with([&](GateConfig& g) { g.pulse = p; });
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::string solver = "ld";
  std::string out;
  std::string trajectories;
  int samples = 200;
  bool calibrate = false;
  std::optional<int> grid_points;
  std::optional<double> grid_extent;
  std::optional<double> time_step;
  std::optional<int> phi0;
};

int run_simulate(const SimulateArgs& a, const Globals& g) {
  guard_output(a.out, {a.config});
  guard_output(a.trajectories, {a.config});
  GateConfig raw = load_config(a.config);
  raw.sim.parallelism = parallelism(g, raw.sim.parallelism);
  if (a.grid_points) raw.sim.grid_points = *a.grid_points;
  if (a.grid_extent) raw.sim.grid_extent = *a.grid_extent;
  if (a.time_step) raw.sim.time_step = *a.time_step;
  if (a.phi0) raw.sim.phi0_grid_size = *a.phi0;
  ValidatedConfig cfg = validate(raw);
  if (a.calibrate) cfg = with_calibration(cfg);

  Json doc;
  if (a.solver == "full") {
    const FullGateResult r = full_gate_error(cfg);
    doc = full_result_json(cfg, r);
    doc["ld_error"] = ld_gate_error(cfg).bell_error;
  } else {
    const LDGateResult r = ld_gate_error(cfg);
    doc = ld_result_json(cfg, r);
  }
  if (!a.trajectories.empty()) {
    auto out = open_output(a.trajectories);
    write_trajectory_csv(out, ld_gate_error(cfg, std::max(a.samples, 2)));
  }
  if (!a.out.empty()) write_json(a.out, doc);

  if (g.json) {
    print_json(doc);
  } else {
    std::printf("solver        %s\n", a.solver.c_str());
    std::printf("gate_time     %.6g us\n", cfg.gate_time() * 1e6);
    std::printf("omega_peak    2pi x %.6g MHz\n", cfg.pulse().omega_peak / kTwoPi / 1e6);
    std::printf("pulse_area    %.6g rad\n", pulse_area(cfg.pulse()));
    std::printf("bell_error    %.6e\n", doc["bell_error"].get<double>());
    if (doc.contains("ld_error")) std::printf("ld_error      %.6e\n", doc["ld_error"].get<double>());
    std::printf("phi_half      %.6g deg\n", doc["phi_half"].get<double>() * 180.0 / std::numbers::pi);
  }
  return 0;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
  std::string space;
  int seeds = 500;
  std::uint64_t rng = 1;
  std::string out;
  std::optional<double> epsilon_t;
  int draws = 100;
};

std::string opt_num(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", *v);
  return buf;
}

int run_optimize(const OptimizeArgs& a, const Globals& g) {
  guard_output(a.out, {a.space});
  SearchSpace space = search_space_from_json(load_json(a.space));
  space.base.sim.parallelism = parallelism(g, space.base.sim.parallelism);
  if (a.epsilon_t) space.epsilon_t = *a.epsilon_t;
  check(space);
  SensitivityOptions so;
  so.draws = a.draws;
  const PipelineReport report = run_pipeline(space, a.seeds, a.rng, so);

  Json solutions = Json::array();
  for (const auto& c : report.solutions) solutions.push_back(to_json(c));
  Json space_doc = to_json(space);
  space_doc["sim"].erase("parallelism");
  Json doc = {
      {"schema_version", kSchemaVersion},
      {"command", "optimize"},
      {"space", space_doc},
      {"seeds", a.seeds},
      {"rng", a.rng},
      {"counts",
       {{"seeds", report.seeds.size()},
        {"optimized", report.optimized.size()},
        {"screened", report.screened.size()},
        {"solutions", report.solutions.size()}}},
      {"budget_exhausted", report.budget_exhausted},
      {"solutions", solutions},
  };
  if (!a.out.empty()) write_json(a.out, doc);

  if (g.json) {
    print_json(doc);
  } else {
    std::printf("seeds %zu  optimized %zu  screened %zu  solutions %zu\n", report.seeds.size(),
                report.optimized.size(), report.screened.size(), report.solutions.size());
    std::printf("%10s %12s %12s %10s %12s  %s\n", "t_g(us)", "ld_error", "full_error",
                "area", "sensitivity", "hash");
    for (const auto& c : report.solutions)
      std::printf("%10.4f %12.3e %12s %10.3f %12s  %s\n", c.pulse.gate_time() * 1e6, c.ld_error,
                  opt_num(c.full_error).c_str(), c.area, opt_num(c.sensitivity).c_str(),
                  c.hash.c_str());
  }
  if (report.screened.empty()) {
    std::fprintf(stderr, "no candidate passed the screen (epsilon_t = %g)\n", space.epsilon_t);
    return kExitEmptyScreen;
  }
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string config;
  std::string param;
  std::vector<std::string> values;
  std::string out;
  std::string solver = "full";
  bool calibrate = false;
  int nu_points = 200;
};

std::vector<double> expand_values(const std::vector<std::string>& tokens) {
  std::vector<double> out;
  for (const auto& tok : tokens) {
    // start:stop:count expands to an inclusive linear range.
    if (tok.find(':') != std::string::npos) {
      double lo, hi;
      int n;
      char c1, c2;
      std::istringstream in(tok);
      if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
        throw ConfigError("--values", "bad range '" + tok + "'");
      for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
      continue;
    }
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("--values", "not a number '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError("--values", "empty list");
  return out;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' ? ' ' : c);
  }
  return out + "\"";
}

GateConfig set_param(const Json& doc, const std::string& param, double value) {
  std::string pointer = "/" + param;
  for (auto& c : pointer)
    if (c == '.') c = '/';
  Json d = doc;
  const Json::json_pointer ptr(pointer);
  if (d.contains(ptr) && d[ptr].is_number_integer())
    d[ptr] = static_cast<long long>(std::llround(value));
  else
    d[ptr] = value;
  return config_from_json(d);
}

int run_sweep(const SweepArgs& a, const Globals& g) {
  guard_output(a.out, {a.config});
  const Json doc = load_json(a.config);
  const GateConfig base = config_from_json(doc);
  const std::vector<double> values = expand_values(a.values);
  const int workers = parallelism(g, base.sim.parallelism);
  const bool rectangular = a.param == "gate_time";
  if (!rectangular) set_param(doc, a.param, values.front());  // reject bad names up front

  CurveOptions options;
  options.full_solver = a.solver == "full";
  options.nu_points = a.nu_points;
  std::vector<CurvePoint> points(values.size());
  // One level of parallelism: across points when there are several,
  // inside the solver otherwise. Results do not depend on the split.
  const int outer = values.size() > 1 ? workers : 1;
  const int inner = values.size() > 1 ? 1 : workers;
  parallel_for(values.size(), outer, [&](std::size_t i) {
    if (rectangular) {
      GateConfig b = base;
      b.sim.parallelism = inner;
      points[i] = rectangular_optimum(b, values[i], options);
      return;
    }
    try {
      GateConfig c = set_param(doc, a.param, values[i]);
      c.sim.parallelism = inner;
      if (a.calibrate) c = with_calibration(validate(c)).raw();
      points[i] = evaluate_solution(c, options.full_solver);
    } catch (const std::exception& e) {
      points[i] = CurvePoint{};
      points[i].error = points[i].ld_error = std::nan("");
      points[i].failure = e.what();
    }
  });

  std::ostringstream csv;
  csv << a.param << ",gate_time,error,ld_error,nu,omega_peak,regime,errors\n";
  char line[512];
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%s,", values[i],
                  p.gate_time, p.error, p.ld_error, p.nu, p.omega_peak,
                  p.regime ? regime_name(*p.regime) : "");
    csv << line << (p.ok() ? "" : csv_quote(p.failure)) << '\n';
  }
  if (!a.out.empty()) open_output(a.out) << csv.str();

  if (g.json) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      Json row = {{"value", values[i]}, {"gate_time", p.gate_time}};
      if (p.ok()) {
        row["error"] = p.error;
        row["ld_error"] = p.ld_error;
        row["nu"] = p.nu;
        row["omega_peak"] = p.omega_peak;
        if (p.regime) row["regime"] = regime_name(*p.regime);
      } else {
        row["failure"] = p.failure;
      }
      rows.push_back(row);
    }
    print_json({{"schema_version", kSchemaVersion}, {"command", "sweep"}, {"param", a.param},
                {"rows", rows}});
  } else if (a.out.empty()) {
    std::cout << csv.str();
  }
  return 0;
}

// ---------------------------------------------------------------- budget

struct BudgetArgs {
  std::string config;
  std::string out;
  std::string solver = "full";
  std::optional<double> detuning;
  double heating_rate = 100.0;
  int draws = 100;
  bool calibrate = false;
};

int run_budget(const BudgetArgs& a, const Globals& g) {
  guard_output(a.out, {a.config});
  GateConfig raw = load_config(a.config);
  raw.sim.parallelism = parallelism(g, raw.sim.parallelism);
  ValidatedConfig cfg = validate(raw);
  if (a.calibrate) cfg = with_calibration(cfg);

  BudgetInputs in;
  in.ld_error = ld_gate_error(cfg).bell_error;
  in.full_error = a.solver == "full" ? full_gate_error(cfg).bell_error : in.ld_error;
  SensitivityOptions so;
  so.draws = a.draws;
  in.sensitivity = sensitivity(cfg, so);
  // Shaped gates up to 1 us ran at -200 GHz, longer ones at -800 GHz.
  in.detuning = a.detuning.value_or(cfg.gate_time() <= 1e-6 ? -200e9 : -800e9);
  in.heating_rate = a.heating_rate;
  const ErrorBudget budget = assemble_budget(cfg, in);

  Json doc = to_json(budget);
  doc["config_hash"] = config_hash(cfg.raw());
  doc["gate_time"] = cfg.gate_time();
  doc["detuning"] = in.detuning;
  doc["heating_rate"] = in.heating_rate;
  doc["ld_error"] = in.ld_error;
  doc["full_error"] = in.full_error;
  doc["solver"] = a.solver;
  if (!a.out.empty()) write_json(a.out, doc);
  if (g.json) {
    print_json(doc);
  } else {
    char title[128];
    std::snprintf(title, sizeof title, "error budget, t_g = %.4g us, Delta = %.4g GHz",
                  cfg.gate_time() * 1e6, in.detuning / 1e9);
    std::cout << render_table(budget, title);
  }
  return 0;
}

// ---------------------------------------------------------------- compile

struct CompileArgs {
  std::string input;
  std::size_t index = 0;
  std::string out;
  std::string format = "text";
  std::string transfer;
  double rate = 1.25e9;
  double edge = 5e-9;
  std::optional<int> bits;
};

PulseShape pulse_from_document(const Json& doc, std::size_t index) {
  if (doc.contains("solutions")) {
    const Json& sols = doc["solutions"];
    if (!sols.is_array() || index >= sols.size())
      throw ConfigError("solutions", "no solution at index " + std::to_string(index));
    return config_from_json(Json{{"pulse", sols[index]["pulse"]}}).pulse;
  }
  return config_from_json(doc).pulse;
}

TransferCurve load_transfer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  const Trace t = read_trace(in);
  return TransferCurve(t.t, t.amplitude);
}

int run_compile(const CompileArgs& a, const Globals& g) {
  guard_output(a.out, {a.input, a.transfer});
  const PulseShape pulse = pulse_from_document(load_json(a.input), a.index);
  WaveformOptions wo;
  wo.sample_rate = a.rate;
  wo.edge_time = a.edge;
  wo.quantization_bits = a.bits;
  SampleStream stream = compile(pulse, wo);
  if (!a.transfer.empty()) stream = compensate(stream, load_transfer(a.transfer));

  if (!a.out.empty()) {
    auto out = open_output(a.out, a.format == "binary");
    if (a.format == "binary") write_binary(out, stream);
    else write_text(out, stream);
  }
  if (g.json) {
    print_json({{"schema_version", kSchemaVersion},
                {"command", "compile"},
                {"sample_rate", stream.sample_rate},
                {"length", stream.samples.size()},
                {"pulse_hash", stream.pulse_hash},
                {"format", a.format}});
  } else if (a.out.empty()) {
    write_text(std::cout, stream);
  } else {
    std::printf("%zu samples at %.6g S/s -> %s\n", stream.samples.size(), stream.sample_rate,
                a.out.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string trace;
  int segments = 0;
  std::string nominal;
  double threshold = 0.025;
  std::string out;
};

int run_fit(const FitArgs& a, const Globals& g) {
  guard_output(a.out, {a.trace, a.nominal});
  std::ifstream in(a.trace);
  if (!in) throw ConfigError(a.trace, "cannot open file");
  FitRequest req;
  req.segments = a.segments;
  req.mismatch_threshold = a.threshold;
  if (!a.nominal.empty()) req.nominal = pulse_from_document(load_json(a.nominal), 0);
  const EnvelopeFit fit = fit_envelope(read_trace(in), req);

  Json doc = {{"schema_version", kSchemaVersion},
              {"command", "fit"},
              {"boundaries", fit.boundaries},
              {"boundary_errors", fit.boundary_errors},
              {"amplitudes", fit.amplitudes},
              {"amplitude_errors", fit.amplitude_errors},
              {"edge_time", fit.edge_time},
              {"edge_time_error", fit.edge_time_error},
              {"rms_residual", fit.rms_residual}};
  if (!a.out.empty()) write_json(a.out, doc);
  if (g.json) {
    print_json(doc);
  } else {
    std::printf("%4s %14s %10s %12s %10s\n", "seg", "duration(ns)", "+-(ns)", "amplitude", "+-");
    for (std::size_t i = 0; i < fit.amplitudes.size(); ++i) {
      const double err = std::hypot(fit.boundary_errors[i], fit.boundary_errors[i + 1]);
      std::printf("%4zu %14.4f %10.4f %12.6f %10.2e\n", i,
                  (fit.boundaries[i + 1] - fit.boundaries[i]) * 1e9, err * 1e9, fit.amplitudes[i],
                  fit.amplitude_errors[i]);
    }
    std::printf("edge %.4f +- %.4f ns, rms residual %.3e\n", fit.edge_time * 1e9,
                fit.edge_time_error * 1e9, fit.rms_residual);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fastgate: fast geometric phase gates on a two-ion crystal"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_flag("--json", g.json, "Print a machine-readable document on stdout");
  app.add_option("--parallel", g.parallel,
                 "Worker threads (default: FASTGATE_PARALLELISM, else sim.parallelism)")
      ->check(CLI::PositiveNumber);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Evaluate one gate configuration");
  cmd_sim->add_option("config", sim.config, "Configuration file")->required();
  cmd_sim->add_option("--solver", sim.solver, "ld or full")
      ->check(CLI::IsMember({"ld", "full"}));
  cmd_sim->add_option("--out", sim.out, "Result document");
  cmd_sim->add_option("--trajectories", sim.trajectories, "Phase-space trajectory CSV");
  cmd_sim->add_option("--samples", sim.samples, "Trajectory samples per branch");
  cmd_sim->add_flag("--calibrate", sim.calibrate, "Rescale omega_peak to an entangling phase of pi/2");
  cmd_sim->add_option("--grid", sim.grid_points, "Full-solver grid points per axis");
  cmd_sim->add_option("--extent", sim.grid_extent, "Full-solver grid half-width");
  cmd_sim->add_option("--dt", sim.time_step, "Full-solver time step (s)");
  cmd_sim->add_option("--phi0", sim.phi0, "Optical phase samples");

  OptimizeArgs opt;
  auto* cmd_opt = app.add_subcommand("optimize", "Seed, screen and refine pulse shapes");
  cmd_opt->add_option("space", opt.space, "Search-space file")->required();
  cmd_opt->add_option("--seeds", opt.seeds, "Random seeds")->check(CLI::PositiveNumber);
  cmd_opt->add_option("--rng", opt.rng, "Random-number seed");
  cmd_opt->add_option("--out", opt.out, "Solution set document");
  cmd_opt->add_option("--epsilon-t", opt.epsilon_t, "Override the LD screening threshold");
  cmd_opt->add_option("--draws", opt.draws, "Monte Carlo draws per sensitivity score");

  SweepArgs sw;
  auto* cmd_sweep = app.add_subcommand("sweep", "Evaluate a configuration over a parameter list");
  cmd_sweep->add_option("config", sw.config, "Configuration template")->required();
  cmd_sweep->add_option("--param", sw.param,
                        "gate_time (rectangular optimum) or a dotted key such as trap.eta_c")
      ->required();
  cmd_sweep->add_option("--values", sw.values, "Comma-separated values or start:stop:count")
      ->required()
      ->delimiter(',');
  cmd_sweep->add_option("--out", sw.out, "CSV output (stdout when omitted)");
  cmd_sweep->add_option("--solver", sw.solver, "ld or full")->check(CLI::IsMember({"ld", "full"}));
  cmd_sweep->add_flag("--calibrate", sw.calibrate, "Recalibrate omega_peak at every point");
  cmd_sweep->add_option("--nu-points", sw.nu_points, "Beat-frequency scan points per regime");

  BudgetArgs bud;
  auto* cmd_budget = app.add_subcommand("budget", "Error budget of one gate");
  cmd_budget->add_option("config", bud.config, "Configuration file")->required();
  cmd_budget->add_option("--out", bud.out, "Budget document");
  cmd_budget->add_option("--solver", bud.solver, "ld or full")->check(CLI::IsMember({"ld", "full"}));
  cmd_budget->add_option("--detuning", bud.detuning, "Raman detuning (Hz)");
  cmd_budget->add_option("--heating-rate", bud.heating_rate, "COM heating rate (quanta/s)");
  cmd_budget->add_option("--draws", bud.draws, "Monte Carlo draws for the timing row");
  cmd_budget->add_flag("--calibrate", bud.calibrate, "Rescale omega_peak first");

  CompileArgs comp;
  auto* cmd_compile = app.add_subcommand("compile", "Lower a pulse to an AWG sample stream");
  cmd_compile->add_option("input", comp.input, "Configuration or optimizer output")->required();
  cmd_compile->add_option("--index", comp.index, "Solution index in an optimizer output");
  cmd_compile->add_option("--out", comp.out, "Stream file (stdout text when omitted)");
  cmd_compile->add_option("--format", comp.format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}));
  cmd_compile->add_option("--transfer", comp.transfer, "Two-column drive/optical transfer curve");
  cmd_compile->add_option("--rate", comp.rate, "Sample rate (S/s)");
  cmd_compile->add_option("--edge", comp.edge, "Edge time (s)");
  cmd_compile->add_option("--bits", comp.bits, "Amplitude quantization bits");

  FitArgs fa;
  auto* cmd_fit = app.add_subcommand("fit", "Fit segment timings and levels to a measured trace");
  cmd_fit->add_option("trace", fa.trace, "Two-column (t, amplitude) trace")->required();
  cmd_fit->add_option("--segments", fa.segments, "Expanded segment count")->required();
  cmd_fit->add_option("--nominal", fa.nominal, "Nominal pulse as a starting point");
  cmd_fit->add_option("--threshold", fa.threshold, "Mismatch threshold (rms / peak)");
  cmd_fit->add_option("--out", fa.out, "Fit document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*cmd_sim) return run_simulate(sim, g);
    if (*cmd_opt) return run_optimize(opt, g);
    if (*cmd_sweep) return run_sweep(sw, g);
    if (*cmd_budget) return run_budget(bud, g);
    if (*cmd_compile) return run_compile(comp, g);
    if (*cmd_fit) return run_fit(fa, g);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const FitError& e) {
    std::fprintf(stderr, "fit failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
