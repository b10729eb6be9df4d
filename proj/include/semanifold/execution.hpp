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

// Activation basins and action gating.
//
// Readiness is the geometric mean of per-clause satisfaction scores, so any
// fully unmet clause pins readiness to zero. An action fires only when
// readiness exceeds the basin threshold while still rising, no suppression
// clause holds, the reflective gate does not veto, and the engine is live.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semanifold/belief.hpp"

namespace semanifold {

struct Clause {
  enum class Kind { sector_density, level_present, coherence_conflict, token_present };
  Kind kind = Kind::sector_density;
  std::string sector;  // density, coherence, token (empty = whole state)
  double value = 0.0;  // density minimum, or conflict epsilon
  int level = 0;
  std::string token;

  static Clause density(std::string sector, double min);
  static Clause level_at(int k);
  static Clause conflict_at_most(std::string sector, double eps);
  static Clause has_token(std::string token, std::string sector = {});
};

enum class GateVerdict { approve, delay, suppress };

std::string_view to_string(GateVerdict v);
GateVerdict parse_gate_verdict(std::string_view s);

/// Fires when the pattern occurs as a contiguous token run in a reflective
/// fragment.
struct GateRule {
  Tokens pattern;
  GateVerdict verdict = GateVerdict::approve;
};

struct ActionBasin {
  std::string action;
  std::vector<Clause> clauses;
  double tau = 0.5;
  std::vector<Clause> suppression;
  std::vector<GateRule> gate;

  /// Throws std::invalid_argument on empty clauses or tau outside (0, 1].
  void validate() const;
};

enum class ExecutionMode { live, simulation };

std::string_view to_string(ExecutionMode m);
ExecutionMode parse_execution_mode(std::string_view s);

enum class Verdict {
  fired,
  below_threshold,
  no_momentum,
  suppressed,
  gated_delay,
  gated_suppress,
  blocked_simulation,
};

std::string_view to_string(Verdict v);

struct ActionDecision {
  std::string action;
  Verdict verdict = Verdict::below_threshold;
  double readiness = 0.0;
  double tick = 0.0;
  std::string cause;
};

double clause_score(const BeliefState& s, const Clause& c);
double readiness(const BeliefState& s, const ActionBasin& basin);

ActionDecision evaluate_action(const BeliefState& s, const ActionBasin& basin,
                               double prev_readiness, ExecutionMode mode);

/// Keeps the highest-readiness fired decision (ties: smallest action name)
/// and demotes every other fired decision to a delay with cause
/// "lost_resolution". Returns all decisions, in input order.
std::vector<ActionDecision> resolve_actions(std::vector<ActionDecision> decisions);

/// The single fired decision in a resolved list, if any.
std::optional<ActionDecision> winning_action(std::span<const ActionDecision> resolved);

}  // namespace semanifold
