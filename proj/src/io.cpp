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

#include "fastgate/io.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

namespace fastgate {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const Json& require_object(const Json& doc, const std::string& path) {
  if (!doc.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  return doc;
}

void reject_unknown(const Json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw ConfigError(join(path, it.key()), "unknown key");
  }
}

template <typename T>
void read(const Json& obj, const std::string& path, const char* key, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string field = join(path, key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw ConfigError(field, "expected true or false");
    out = it->template get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer()) throw ConfigError(field, "expected an integer");
    out = it->template get<T>();
  } else {
    if (!it->is_number()) throw ConfigError(field, "expected a number");
    out = it->template get<double>();
  }
}

template <typename T>
void read_optional(const Json& obj, const std::string& path, const char* key,
                   std::optional<T>& out) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  T v{};
  read(obj, path, key, v);
  out = v;
}

cplx read_complex(const Json& v, const std::string& field) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(field, "expected a number or [re, im]");
}

Json complex_json(cplx z) { return Json::array({z.real(), z.imag()}); }

const char* kind_name(InitialState::Kind k) {
  switch (k) {
    case InitialState::Kind::Ground: return "ground";
    case InitialState::Kind::Coherent: return "coherent";
    case InitialState::Kind::Thermal: return "thermal";
  }
  return "ground";
}

}  // namespace

GateConfig config_from_json(const Json& doc) {
  GateConfig c;
  require_object(doc, "");
  reject_unknown(doc, "", {"trap", "pulse", "coupling", "sim", "schema_version", "comment"});

  if (doc.contains("trap")) {
    const Json& t = require_object(doc["trap"], "trap");
    reject_unknown(t, "trap", {"f_c", "eta_c", "spacing_periods", "nbar_c", "nbar_s"});
    read(t, "trap", "f_c", c.trap.f_c);
    read(t, "trap", "eta_c", c.trap.eta_c);
    read(t, "trap", "spacing_periods", c.trap.spacing_periods);
    read(t, "trap", "nbar_c", c.trap.nbar_c);
    read(t, "trap", "nbar_s", c.trap.nbar_s);
  }

  if (doc.contains("pulse")) {
    const Json& p = require_object(doc["pulse"], "pulse");
    reject_unknown(p, "pulse",
                   {"segments", "symmetric", "edge_time", "omega_peak", "nu", "phi_half"});
    if (p.contains("segments")) {
      const Json& segs = p["segments"];
      if (!segs.is_array()) throw ConfigError("pulse.segments", "expected an array");
      c.pulse.segments.clear();
      for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string path = "pulse.segments[" + std::to_string(i) + "]";
        const Json& s = segs[i];
        Segment seg;
        if (s.is_array() && s.size() == 2 && s[0].is_number() && s[1].is_number()) {
          seg.duration = s[0].get<double>();
          seg.amplitude = s[1].get<double>();
        } else {
          require_object(s, path);
          reject_unknown(s, path, {"duration", "amplitude"});
          if (!s.contains("duration") || !s.contains("amplitude"))
            throw ConfigError(path, "needs duration and amplitude");
          read(s, path, "duration", seg.duration);
          read(s, path, "amplitude", seg.amplitude);
        }
        c.pulse.segments.push_back(seg);
      }
    }
    read(p, "pulse", "symmetric", c.pulse.symmetric);
    read(p, "pulse", "edge_time", c.pulse.edge_time);
    read(p, "pulse", "omega_peak", c.pulse.omega_peak);
    read(p, "pulse", "nu", c.pulse.nu);
    read(p, "pulse", "phi_half", c.pulse.phi_half);
  }

  if (doc.contains("coupling")) {
    const Json& k = require_object(doc["coupling"], "coupling");
    reject_unknown(k, "coupling", {"lambda_down", "lambda_up"});
    read(k, "coupling", "lambda_down", c.coupling.lambda_down);
    read(k, "coupling", "lambda_up", c.coupling.lambda_up);
  }

  if (doc.contains("sim")) {
    const Json& s = require_object(doc["sim"], "sim");
    reject_unknown(s, "sim",
                   {"phi0_grid_size", "phi0_offset", "grid_points", "grid_extent", "time_step",
                    "initial_state", "rng_seed", "parallelism", "optimize_phi_half"});
    read(s, "sim", "phi0_grid_size", c.sim.phi0_grid_size);
    read(s, "sim", "phi0_offset", c.sim.phi0_offset);
    read_optional(s, "sim", "grid_points", c.sim.grid_points);
    read_optional(s, "sim", "grid_extent", c.sim.grid_extent);
    read_optional(s, "sim", "time_step", c.sim.time_step);
    read(s, "sim", "rng_seed", c.sim.rng_seed);
    read(s, "sim", "parallelism", c.sim.parallelism);
    read(s, "sim", "optimize_phi_half", c.sim.optimize_phi_half);
    if (s.contains("initial_state")) {
      const std::string path = "sim.initial_state";
      const Json& i = require_object(s["initial_state"], path);
      reject_unknown(i, path, {"kind", "alpha_c", "alpha_s", "samples"});
      if (i.contains("kind")) {
        const std::string kind = i["kind"].is_string() ? i["kind"].get<std::string>() : "";
        if (kind == "ground") c.sim.initial.kind = InitialState::Kind::Ground;
        else if (kind == "coherent") c.sim.initial.kind = InitialState::Kind::Coherent;
        else if (kind == "thermal") c.sim.initial.kind = InitialState::Kind::Thermal;
        else throw ConfigError(path + ".kind", "expected ground, coherent or thermal");
      }
      if (i.contains("alpha_c")) c.sim.initial.alpha_c = read_complex(i["alpha_c"], path + ".alpha_c");
      if (i.contains("alpha_s")) c.sim.initial.alpha_s = read_complex(i["alpha_s"], path + ".alpha_s");
      read(i, path, "samples", c.sim.initial.samples);
    }
  }
  return c;
}

Json to_json(const GateConfig& c) {
  Json segs = Json::array();
  for (const auto& s : c.pulse.segments)
    segs.push_back({{"duration", s.duration}, {"amplitude", s.amplitude}});
  Json sim = {
      {"phi0_grid_size", c.sim.phi0_grid_size},
      {"phi0_offset", c.sim.phi0_offset},
      {"rng_seed", c.sim.rng_seed},
      {"parallelism", c.sim.parallelism},
      {"optimize_phi_half", c.sim.optimize_phi_half},
      {"initial_state",
       {{"kind", kind_name(c.sim.initial.kind)},
        {"alpha_c", complex_json(c.sim.initial.alpha_c)},
        {"alpha_s", complex_json(c.sim.initial.alpha_s)},
        {"samples", c.sim.initial.samples}}},
  };
  if (c.sim.grid_points) sim["grid_points"] = *c.sim.grid_points;
  if (c.sim.grid_extent) sim["grid_extent"] = *c.sim.grid_extent;
  if (c.sim.time_step) sim["time_step"] = *c.sim.time_step;
  return {
      {"trap",
       {{"f_c", c.trap.f_c},
        {"eta_c", c.trap.eta_c},
        {"spacing_periods", c.trap.spacing_periods},
        {"nbar_c", c.trap.nbar_c},
        {"nbar_s", c.trap.nbar_s}}},
      {"pulse",
       {{"segments", segs},
        {"symmetric", c.pulse.symmetric},
        {"edge_time", c.pulse.edge_time},
        {"omega_peak", c.pulse.omega_peak},
        {"nu", c.pulse.nu},
        {"phi_half", c.pulse.phi_half}}},
      {"coupling", {{"lambda_down", c.coupling.lambda_down}, {"lambda_up", c.coupling.lambda_up}}},
      {"sim", sim},
  };
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
}

GateConfig load_config(const std::filesystem::path& path) { return config_from_json(load_json(path)); }

std::string content_hash(const Json& doc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : doc.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const GateConfig& config) {
  Json doc = to_json(config);
  // Execution-only settings do not change the physics.
  doc["sim"].erase("parallelism");
  return content_hash(doc);
}

std::string pulse_hash(const PulseShape& pulse) {
  GateConfig c;
  c.pulse = pulse;
  return content_hash(to_json(c)["pulse"]);
}

Json to_json(const CoherenceMatrix& m) {
  Json rows = Json::array();
  for (const auto& row : m) {
    Json r = Json::array();
    for (const auto& v : row) r.push_back(complex_json(v));
    rows.push_back(r);
  }
  return rows;
}

Json ld_result_json(const ValidatedConfig& config, const LDGateResult& r) {
  Json doc = {
      {"schema_version", kSchemaVersion},
      {"solver", "ld"},
      {"config", to_json(config.raw())},
      {"config_hash", config_hash(config.raw())},
      {"gate_time", config.gate_time()},
      {"pulse_area", pulse_area(config.pulse())},
      {"bell_error", r.bell_error},
      {"phi_half", r.phi_half},
      {"bell_phase", r.bell_phase},
      {"entangling_phase", r.entangling_phase},
      {"phase_spread", r.phase_spread},
      {"closure_defect", r.closure_defect},
      {"max_displacement", r.max_displacement},
      {"phi0", r.phi0},
      {"entangling_phases", r.entangling_phases},
      {"coherence", to_json(r.coherence)},
  };
  Json branches = Json::array();
  for (const auto& per_phi : r.trajectories) {
    for (const auto& tr : per_phi) {
      branches.push_back({{"branch", branch_name(tr.branch)},
                          {"phi0", tr.phi0},
                          {"geometric_phase_c", tr.geo_c},
                          {"geometric_phase_s", tr.geo_s},
                          {"light_shift_phase", tr.light_shift},
                          {"residual_c", complex_json(tr.residual_c)},
                          {"residual_s", complex_json(tr.residual_s)}});
    }
  }
  if (!branches.empty()) doc["branches"] = branches;
  return doc;
}

Json full_result_json(const ValidatedConfig& config, const FullGateResult& r) {
  const auto& d = r.diagnostics;
  return {
      {"schema_version", kSchemaVersion},
      {"solver", "full"},
      {"config", to_json(config.raw())},
      {"config_hash", config_hash(config.raw())},
      {"gate_time", config.gate_time()},
      {"pulse_area", pulse_area(config.pulse())},
      {"bell_error", r.bell_error},
      {"phi_half", r.phi_half},
      {"bell_phase", r.bell_phase},
      {"coherence", to_json(r.coherence)},
      {"grid",
       {{"points_c", r.grid.n_c},
        {"points_s", r.grid.n_s},
        {"extent_c", r.grid.extent_c},
        {"extent_s", r.grid.extent_s}}},
      {"diagnostics",
       {{"max_displacement", d.max_displacement},
        {"squeezing", d.squeezing},
        {"boundary_leakage", d.boundary_leakage},
        {"norm_drift", d.norm_drift},
        {"steps", d.steps},
        {"time_step", d.time_step}}},
  };
}

SearchSpace search_space_from_json(const Json& doc) {
  require_object(doc, "");
  Json base = doc;
  base.erase("search");
  SearchSpace s;
  s.base = config_from_json(base);
  if (!doc.contains("search")) return s;
  const Json& q = require_object(doc["search"], "search");
  reject_unknown(q, "search",
                 {"family", "segments", "gate_time", "gate_time_max", "min_duration",
                  "min_amplitude", "nu_min", "nu_max", "epsilon_t", "area_weight", "area_ref",
                  "max_evaluations", "restarts", "tolerance", "local_count", "refine_count",
                  "full_budget"});
  if (q.contains("family")) {
    const std::string f = q["family"].is_string() ? q["family"].get<std::string>() : "";
    if (f == "stepped") s.family = SearchSpace::Family::Stepped;
    else if (f == "binary") s.family = SearchSpace::Family::Binary;
    else throw ConfigError("search.family", "expected stepped or binary");
  }
  read(q, "search", "segments", s.segments);
  read(q, "search", "gate_time", s.gate_time);
  read_optional(q, "search", "gate_time_max", s.gate_time_max);
  read(q, "search", "min_duration", s.min_duration);
  read(q, "search", "min_amplitude", s.min_amplitude);
  read(q, "search", "nu_min", s.nu_min);
  read(q, "search", "nu_max", s.nu_max);
  read(q, "search", "epsilon_t", s.epsilon_t);
  read(q, "search", "area_weight", s.area_weight);
  read(q, "search", "area_ref", s.area_ref);
  read(q, "search", "max_evaluations", s.max_evaluations);
  read(q, "search", "restarts", s.restarts);
  read(q, "search", "tolerance", s.tolerance);
  read(q, "search", "local_count", s.local_count);
  read(q, "search", "refine_count", s.refine_count);
  read(q, "search", "full_budget", s.full_budget);
  return s;
}

Json to_json(const SearchSpace& s) {
  Json doc = to_json(s.base);
  doc["search"] = {
      {"family", s.family == SearchSpace::Family::Binary ? "binary" : "stepped"},
      {"segments", s.segments},
      {"gate_time", s.gate_time},
      {"min_duration", s.min_duration},
      {"min_amplitude", s.min_amplitude},
      {"nu_min", s.nu_min},
      {"nu_max", s.nu_max},
      {"epsilon_t", s.epsilon_t},
      {"area_weight", s.area_weight},
      {"area_ref", s.area_ref},
      {"max_evaluations", s.max_evaluations},
      {"restarts", s.restarts},
      {"tolerance", s.tolerance},
      {"local_count", s.local_count},
      {"refine_count", s.refine_count},
      {"full_budget", s.full_budget},
  };
  if (s.gate_time_max) doc["search"]["gate_time_max"] = *s.gate_time_max;
  return doc;
}

Json to_json(const Candidate& c) {
  GateConfig g;
  g.pulse = c.pulse;
  Json doc = {
      {"pulse", to_json(g)["pulse"]},
      {"gate_time", c.pulse.gate_time()},
      {"params", c.params},
      {"ld_error", c.ld_error},
      {"area", c.area},
      {"entangling_phase", c.entangling_phase},
      {"hash", c.hash},
      {"converged", c.converged},
      {"evaluations", c.evaluations},
  };
  doc["full_error"] = c.full_error ? Json(*c.full_error) : Json(nullptr);
  doc["sensitivity"] = c.sensitivity ? Json(*c.sensitivity) : Json(nullptr);
  return doc;
}

void write_trajectory_csv(std::ostream& out, const LDGateResult& result) {
  out << "branch,phi0,t,re_alpha_c,im_alpha_c,re_alpha_s,im_alpha_s\n";
  char line[256];
  for (const auto& per_phi : result.trajectories) {
    for (const auto& tr : per_phi) {
      for (std::size_t i = 0; i < tr.t.size(); ++i) {
        std::snprintf(line, sizeof line, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      branch_name(tr.branch), tr.phi0, tr.t[i], tr.alpha_c[i].real(),
                      tr.alpha_c[i].imag(), tr.alpha_s[i].real(), tr.alpha_s[i].imag());
        out << line;
      }
    }
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace fastgate
