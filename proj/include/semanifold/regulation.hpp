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

// Meta-level monitors and the static regulation policies.
//
// Coherence counts contradicting ordered pairs over |phi|^2 (self pairs stay
// in the denominator). Load is c1*|phi| + c2*sum(alpha*cost) + c3*rate.
// Meta fragments live in "refl" at level 2 and are keyed by
// (metric, target) so a repeated breach rewrites its fragment in place.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semanifold/belief.hpp"
#include "semanifold/config.hpp"
#include "semanifold/tower.hpp"

namespace semanifold {

double coherence(const BeliefState& s);
double coherence(const BeliefState& s, const std::string& sector);

double cognitive_load(const BeliefState& s, const std::map<std::string, double>& activations,
                      int recent_ops, const ParameterConfig& config);

struct IntrospectiveReport {
  double kappa_global = 1.0;
  std::map<std::string, double> kappa_by_sector;
  double load = 0.0;
  std::map<std::string, double> theta_by_axis;
  double velocity = 0.0;
  double tick = 0.0;
  int depth = 1;
  /// Consecutive ticks (including this one) with a coherence breach; filled
  /// in by the tick loop, drives escalation to sector annihilation.
  int kappa_breach_ticks = 0;
};

IntrospectiveReport introspect(const BeliefState& s, const BeliefState* prev,
                               std::span<const EpistemicAxis> axes,
                               const std::map<std::string, double>& activations, int recent_ops,
                               const ParameterConfig& config);

/// True when global or any sector coherence is below kappa_crit.
bool coherence_breached(const IntrospectiveReport& r, const ParameterConfig& config);

struct MetaResult {
  BeliefState state;
  std::vector<FragmentId> added;
  std::vector<FragmentId> updated;
  bool dropped = false;  // report exceeded meta_depth_max
};

MetaResult meta_assimilate(const BeliefState& s, const IntrospectiveReport& report,
                           const ParameterConfig& config, IdAllocator& ids);

std::set<FragmentId> identity_signature(const BeliefState& s, const ParameterConfig& config);

/// Jaccard overlap; two empty signatures count as identical.
double identity_stability(const std::set<FragmentId>& a, const std::set<FragmentId>& b);

namespace effort {
inline constexpr const char* kCorrective = "corrective";
inline constexpr const char* kMonitors = "monitors";
inline constexpr const char* kRemainder = "remainder";
inline constexpr const char* kNullify = "nullify";
inline constexpr const char* kAbstraction = "abstraction";
inline constexpr const char* kPlanning = "planning";
inline constexpr const char* kMemory = "memory";
}  // namespace effort

struct EffortLedger {
  double budget = 0.0;
  std::map<std::string, double> allocations;
  std::map<std::string, double> spent;

  /// Class that pays for `process`: itself when allocated, else "remainder",
  /// else none.
  std::optional<std::string> payer(const std::string& process) const;
  double available(const std::string& process) const;
  /// Deducts `units` if the paying class can cover them.
  bool try_consume(const std::string& process, double units = 1.0);
  double total_allocated() const;
};

EffortLedger allocate_effort(const IntrospectiveReport& report, bool goals_present,
                             const ParameterConfig& config);

struct RegulationAction {
  enum class Kind {
    none,
    corrective_assimilation,
    accelerate_nullify,
    annihilate_sector,
    realign,
    mode_shift,
  };
  Kind kind = Kind::none;
  std::string sector;
  std::string axis;
  std::string cause;
};

std::string_view to_string(RegulationAction::Kind k);

RegulationAction regulate(const BeliefState& s, const IntrospectiveReport& report,
                          const ParameterConfig& config);

/// Formats a metric value the way meta fragments print it ("0.3", "0.778").
std::string format_metric(double v);

}  // namespace semanifold
