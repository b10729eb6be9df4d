// Copyright 2026 The Semanifold Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Scenario files.
//
// A scenario is a JSON document with the top-level keys
//
//   name, config, memory, rules, lexicon, axes, basins, mode, timeline,
//   states, suites
//
// of which only `timeline` is required. Timeline entries are single-key
// objects: {"observe": [...], "mode": "auto"}, {"command": "..."},
// {"tick": n}, {"set_mode": "live"}, {"expect": {"kind": ...}}.
// See README.md for the full format.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semanifold/belief.hpp"
#include "semanifold/config.hpp"
#include "semanifold/dynamics.hpp"
#include "semanifold/execution.hpp"
#include "semanifold/geometry.hpp"

namespace semanifold {

/// Raised for malformed or invalid scenario files. `where` is a field path
/// such as "timeline[3].tick", or "line 4, column 7" for JSON syntax errors.
class ScenarioError : public ConfigError {
 public:
  ScenarioError(std::string where, const std::string& what)
      : ConfigError(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct Assertion {
  enum class Kind {
    fragment_present,
    fragment_absent,
    persistence,
    kappa,
    action_fired,
    action_not_fired,
    is_vacuum,
    anchor,
    fragment_count,
  };
  Kind kind = Kind::is_vacuum;
  std::string name;                   // fragment or action name
  double value = 0.0;                 // expected value / count
  double tol = 1e-9;
  bool expected = true;               // is_vacuum only
  std::optional<std::string> sector;  // kappa only
  bool in_memory = false;             // look in the memory region instead

  std::string describe() const;
};

std::string_view to_string(Assertion::Kind k);

struct Command {
  std::string text;
  std::optional<std::string> name;
  std::optional<double> anchor;
};

struct TimelineEvent {
  enum class Kind { observe, command, tick, set_mode, expect };
  Kind kind = Kind::tick;
  std::vector<FragmentSpec> specs;                        // observe
  AssimilationMode mode = AssimilationMode::automatic;    // observe
  Command command;                                        // command
  int ticks = 0;                                          // tick
  ExecutionMode exec_mode = ExecutionMode::live;          // set_mode
  Assertion assertion;                                    // expect
};

struct AxisDecl {
  std::string label;
  std::vector<FragmentSpec> seed;
  bool null_seed = true;
  int max_k = 16;
};

struct Scenario {
  std::string name;
  ParameterConfig config;
  std::vector<FragmentSpec> memory;
  RuleSet rules;
  std::vector<std::string> lexicon;
  std::vector<AxisDecl> axes;
  std::vector<ActionBasin> basins;
  ExecutionMode initial_mode = ExecutionMode::live;
  std::vector<TimelineEvent> timeline;
  std::map<std::string, std::vector<FragmentSpec>> states;  // named states for gauge runs
  std::map<std::string, ProbeSuite> suites;

  /// Throws ScenarioError naming the first broken invariant.
  void validate() const;
};

Scenario parse_scenario(std::string_view json_text);
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

// Reusable pieces of the scenario format.
FragmentSpec fragment_spec_from_json(const nlohmann::json& j, const std::string& where);
ParameterConfig config_from_json(const nlohmann::json& j, const std::string& where = "config");
nlohmann::json config_to_json(const ParameterConfig& c);

}  // namespace semanifold
