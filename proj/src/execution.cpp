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

#include "semanifold/execution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "semanifold/regulation.hpp"

namespace semanifold {

Clause Clause::density(std::string sector, double min) {
  Clause c;
  c.kind = Kind::sector_density;
  c.sector = std::move(sector);
  c.value = min;
  return c;
}

Clause Clause::level_at(int k) {
  Clause c;
  c.kind = Kind::level_present;
  c.level = k;
  return c;
}

Clause Clause::conflict_at_most(std::string sector, double eps) {
  Clause c;
  c.kind = Kind::coherence_conflict;
  c.sector = std::move(sector);
  c.value = eps;
  return c;
}

Clause Clause::has_token(std::string token, std::string sector) {
  Clause c;
  c.kind = Kind::token_present;
  c.token = std::move(token);
  c.sector = std::move(sector);
  return c;
}

std::string_view to_string(GateVerdict v) {
  switch (v) {
    case GateVerdict::approve: return "approve";
    case GateVerdict::delay: return "delay";
    case GateVerdict::suppress: return "suppress";
  }
  return "?";
}

GateVerdict parse_gate_verdict(std::string_view s) {
  if (s == "approve") return GateVerdict::approve;
  if (s == "delay") return GateVerdict::delay;
  if (s == "suppress") return GateVerdict::suppress;
  throw std::invalid_argument("unknown gate verdict '" + std::string(s) + "'");
}

std::string_view to_string(ExecutionMode m) {
  return m == ExecutionMode::live ? "live" : "simulation";
}

ExecutionMode parse_execution_mode(std::string_view s) {
  if (s == "live") return ExecutionMode::live;
  if (s == "simulation") return ExecutionMode::simulation;
  throw std::invalid_argument("unknown execution mode '" + std::string(s) + "'");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::fired: return "fired";
    case Verdict::below_threshold: return "below_threshold";
    case Verdict::no_momentum: return "no_momentum";
    case Verdict::suppressed: return "suppressed";
    case Verdict::gated_delay: return "gated_delay";
    case Verdict::gated_suppress: return "gated_suppress";
    case Verdict::blocked_simulation: return "blocked_simulation";
  }
  return "?";
}

void ActionBasin::validate() const {
  if (action.empty()) throw std::invalid_argument("basin: empty action name");
  if (clauses.empty()) throw std::invalid_argument("basin '" + action + "': no clauses");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("basin '" + action + "': tau outside (0, 1]");
  for (const auto& g : gate)
    if (g.pattern.empty()) throw std::invalid_argument("basin '" + action + "': empty gate pattern");
}

double clause_score(const BeliefState& s, const Clause& c) {
  switch (c.kind) {
    case Clause::Kind::sector_density: {
      if (c.value <= 0.0) return 1.0;
      return std::min(activation_density(s, c.sector) / c.value, 1.0);
    }
    case Clause::Kind::level_present:
      return std::any_of(s.fragments().begin(), s.fragments().end(),
                         [&](const Fragment& f) { return f.level == c.level; })
                 ? 1.0
                 : 0.0;
    case Clause::Kind::coherence_conflict: {
      const double kappa = c.sector.empty() ? coherence(s) : coherence(s, c.sector);
      return (1.0 - kappa) <= c.value ? 1.0 : 0.0;
    }
    case Clause::Kind::token_present:
      for (const auto& f : s.fragments()) {
        if (!c.sector.empty() && !f.in_sector(c.sector)) continue;
        if (std::find(f.tokens.begin(), f.tokens.end(), c.token) != f.tokens.end()) return 1.0;
      }
      return 0.0;
  }
  return 0.0;
}

double readiness(const BeliefState& s, const ActionBasin& basin) {
  if (basin.clauses.empty()) return 0.0;
  double log_sum = 0.0;
  for (const auto& c : basin.clauses) {
    const double score = clause_score(s, c);
    if (score <= 0.0) return 0.0;
    log_sum += std::log(score);
  }
  return std::exp(log_sum / static_cast<double>(basin.clauses.size()));
}

namespace {

bool contains_run(const Tokens& hay, const Tokens& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::optional<GateVerdict> gate_decision(const BeliefState& s, const ActionBasin& basin) {
  const BeliefState refl = sector_projection(s, "refl");
  for (const auto& rule : basin.gate)
    for (const auto& f : refl.fragments())
      if (contains_run(f.tokens, rule.pattern)) return rule.verdict;
  return std::nullopt;
}

}  // namespace

ActionDecision evaluate_action(const BeliefState& s, const ActionBasin& basin,
                               double prev_readiness, ExecutionMode mode) {
  ActionDecision d;
  d.action = basin.action;
  d.tick = s.clock();
  d.readiness = readiness(s, basin);

  for (const auto& c : basin.suppression) {
    if (clause_score(s, c) >= 1.0) {
      d.verdict = Verdict::suppressed;
      d.cause = "suppression_clause";
      return d;
    }
  }
  if (d.readiness <= basin.tau) {
    d.verdict = Verdict::below_threshold;
    return d;
  }
  if (d.readiness - prev_readiness <= 0.0) {
    d.verdict = Verdict::no_momentum;
    return d;
  }
  if (auto g = gate_decision(s, basin); g && *g != GateVerdict::approve) {
    d.verdict = *g == GateVerdict::delay ? Verdict::gated_delay : Verdict::gated_suppress;
    d.cause = "reflective_gate";
    return d;
  }
  if (mode == ExecutionMode::simulation) {
    d.verdict = Verdict::blocked_simulation;
    return d;
  }
  d.verdict = Verdict::fired;
  return d;
}

std::vector<ActionDecision> resolve_actions(std::vector<ActionDecision> decisions) {
  std::optional<std::size_t> winner;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i].verdict != Verdict::fired) continue;
    if (!winner) {
      winner = i;
      continue;
    }
    const auto& w = decisions[*winner];
    const auto& c = decisions[i];
    if (c.readiness > w.readiness || (c.readiness == w.readiness && c.action < w.action)) winner = i;
  }
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i].verdict == Verdict::fired && i != *winner) {
      decisions[i].verdict = Verdict::gated_delay;
      decisions[i].cause = "lost_resolution";
    }
  }
  return decisions;
}

std::optional<ActionDecision> winning_action(std::span<const ActionDecision> resolved) {
  for (const auto& d : resolved)
    if (d.verdict == Verdict::fired) return d;
  return std::nullopt;
}

}  // namespace semanifold
