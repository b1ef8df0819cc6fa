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


#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fastgate/io.hpp"
#include "fastgate/presets.hpp"
#include "support.hpp"

using namespace fastgate;
using fastgate::testing::contains;

namespace {

std::string config_error(const Json& doc) {
  try {
    config_from_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("configurations survive a round trip") {
  for (const GateConfig& g : {high_fidelity_gate(), fastest_gate()}) {
    const GateConfig back = config_from_json(to_json(g));
    CHECK(back == g);
    CHECK(config_hash(back) == config_hash(g));
  }
  CHECK(config_hash(high_fidelity_gate()) != config_hash(fastest_gate()));
  CHECK(config_hash(high_fidelity_gate()).size() == 16);
}

TEST_CASE("unknown and mistyped keys name their path") {
  Json doc = to_json(high_fidelity_gate());
  doc["trap"]["f_com"] = 2e6;
  CHECK(contains(config_error(doc), "trap.f_com"));

  doc = to_json(high_fidelity_gate());
  doc["pulse"]["nu"] = "fast";
  CHECK(contains(config_error(doc), "pulse.nu"));

  doc = to_json(high_fidelity_gate());
  doc["extra"] = 1;
  CHECK(contains(config_error(doc), "extra"));
}

TEST_CASE("comments are allowed in configuration files") {
  const auto path = std::filesystem::temp_directory_path() / "fastgate_io_comments.json";
  {
    std::ofstream out(path);
    out << "// leading comment\n{\n  /* block */ \"trap\": {\"f_c\": 1.9e6},\n"
           "  \"pulse\": {\"segments\": [{\"duration\": 1e-6, \"amplitude\": 1.0}],  // tail\n"
           "            \"nu\": 2.5e6, \"symmetric\": false}\n}\n";
  }
  const GateConfig g = load_config(path);
  std::filesystem::remove(path);
  CHECK(g.trap.f_c == 1.9e6);
  CHECK(g.pulse.segments.size() == 1);
  CHECK_FALSE(g.pulse.symmetric);
}

TEST_CASE("shipped configurations load and validate") {
  const std::filesystem::path dir = FASTGATE_SOURCE_DIR "/configs";
  int gates = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const Json doc = load_json(entry.path());
    if (doc.contains("search")) {
      CHECK_NOTHROW(check(search_space_from_json(doc)));
    } else if (!doc.contains("pulse") || doc["pulse"].contains("segments")) {
      CAPTURE(entry.path().string());
      CHECK_NOTHROW(validate(config_from_json(doc)));
      ++gates;
    }
  }
  CHECK(gates >= 3);
}

TEST_CASE("search spaces round trip") {
  SearchSpace s;
  s.segments = 5;
  s.gate_time_max = 2e-6;
  s.base.trap.f_c = 1.9243e6;
  const SearchSpace back = search_space_from_json(to_json(s));
  CHECK(back.segments == 5);
  CHECK(back.gate_time_max == s.gate_time_max);
  CHECK(back.base.trap == s.base.trap);

  Json doc = to_json(s);
  doc["search"]["seeds"] = 4;
  CHECK_THROWS_AS(search_space_from_json(doc), ConfigError);
}

TEST_CASE("content hash ignores key order") {
  const Json a = Json::parse(R"({"a": 1, "b": [1, 2]})");
  const Json b = Json::parse(R"({"b": [1, 2], "a": 1})");
  CHECK(content_hash(a) == content_hash(b));
  CHECK(content_hash(a) != content_hash(Json::parse(R"({"a": 2, "b": [1, 2]})")));
}

}  // TEST_SUITE
