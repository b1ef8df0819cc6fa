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
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "fastgate/config.hpp"
#include "fastgate/full_solver.hpp"
#include "fastgate/ld_solver.hpp"
#include "fastgate/optimizer.hpp"

namespace fastgate {

using Json = nlohmann::json;

/// Version tag carried by every document the toolkit writes.
inline constexpr int kSchemaVersion = 1;

/// Parses a configuration document. Unknown keys and mistyped values raise
/// ConfigError naming the dotted path. Missing keys keep their defaults.
GateConfig config_from_json(const Json& doc);
Json to_json(const GateConfig& config);

/// Reads a configuration file; `//` and `/* */` comments are allowed.
GateConfig load_config(const std::filesystem::path& path);

/// Reads any JSON document from disk, with comments allowed.
Json load_json(const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical (sorted-key, compact) serialization,
/// as 16 lowercase hex digits.
std::string content_hash(const Json& doc);
std::string config_hash(const GateConfig& config);
std::string pulse_hash(const PulseShape& pulse);

Json to_json(const CoherenceMatrix& m);
Json ld_result_json(const ValidatedConfig& config, const LDGateResult& result);
Json full_result_json(const ValidatedConfig& config, const FullGateResult& result);

/// One row per sample: branch, phi0, t, Re/Im alpha_c, Re/Im alpha_s.
void write_trajectory_csv(std::ostream& out, const LDGateResult& result);

/// Search-space document: a configuration (trap, pulse edge time,
/// coupling, sim) plus a "search" object with the SearchSpace fields.
SearchSpace search_space_from_json(const Json& doc);
Json to_json(const SearchSpace& space);
Json to_json(const Candidate& candidate);

/// Writes `doc` pretty-printed, creating parent directories.
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace fastgate
