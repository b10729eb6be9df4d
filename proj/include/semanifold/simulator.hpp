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

// The deterministic tick loop.
//
// Each tick runs, in this order:
//
//   1. introspect                      (meta event, op "introspect")
//   2. meta_assimilate                 (meta event, op "assimilate")
//   3. regulate, apply the action      (regulate_action)
//   4. allocate effort, charge monitors
//   5. goal > coherence > associative query, retrieve, integrate
//   6. drift when the state is the vacuum and a lexicon is present
//   7. nullify one tick, active state and memory  (nullify_prune)
//   8. evaluate every basin and resolve         (action_decision)
//
// A run is a pure function of the scenario and the seed.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semanifold/belief.hpp"
#include "semanifold/memory.hpp"
#include "semanifold/scenario.hpp"
#include "semanifold/tower.hpp"
#include "semanifold/trace.hpp"

namespace semanifold {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides config.seed
  std::optional<ExecutionMode> mode;  // overrides the scenario's initial mode
  bool strict = false;                // stop at the first failed assertion
};

struct AssertionOutcome {
  std::size_t timeline_index = 0;
  std::string description;
  bool passed = false;
  std::string actual;
};

struct RunResult {
  BeliefState state;
  MemoryStore memory;
  Trace trace;
  std::vector<AssertionOutcome> assertions;
  std::map<std::string, FragmentId> names;
  bool aborted = false;  // strict run stopped early

  bool all_passed() const;
};

/// Executes the whole timeline.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

/// Builds the tower for the named axis declaration. `max_k` overrides the
/// declared bound. Throws ScenarioError for an unknown label.
TowerTrajectory scenario_tower(const Scenario& scenario, const std::string& label,
                               std::optional<int> max_k = std::nullopt);

/// Axis from the named declaration; throws TowerError if it does not converge.
EpistemicAxis scenario_axis(const Scenario& scenario, const AxisDecl& decl);

/// Encodes a named entry of the scenario's `states` table.
BeliefState scenario_state(const Scenario& scenario, const std::string& name);

/// A probe suite by name: "default" or an entry of the `suites` table.
ProbeSuite scenario_suite(const Scenario& scenario, const std::string& name);

/// Per-tick values of a metric ("kappa", "load", "theta", "velocity") taken
/// from the introspection events of a trace. Each row is (tick, column ->
/// value); theta has one column per axis, the others a single column named
/// after the metric.
std::vector<std::pair<double, std::map<std::string, double>>> metric_series(
    const Trace& trace, const std::string& metric);

}  // namespace semanifold
