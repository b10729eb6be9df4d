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

// Belief lifecycle operators: assimilation, nullification (anchored
// exponential decay), annihilation and spontaneous drift.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semanifold/belief.hpp"
#include "semanifold/config.hpp"

namespace semanifold {

struct ConflictPair {
  FragmentId existing_id = 0;
  std::size_t incoming_index = 0;  // position in the incoming state's fragment list
  std::string key;

  friend bool operator==(const ConflictPair&, const ConflictPair&) = default;
};

enum class AssimilationMode { elab, corr, abs, conf, automatic };

std::string_view to_string(AssimilationMode m);
AssimilationMode parse_assimilation_mode(std::string_view s);

struct AssimilationReport {
  std::vector<FragmentId> added;
  std::vector<FragmentId> retracted;
  std::vector<FragmentId> elaborated;
  std::vector<std::size_t> elaborated_rules;  // rule index per elaborated id
  std::vector<FragmentId> abstracted;
  /// (incoming id, existing id) for each incoming duplicate that refreshed an
  /// existing fragment instead of being added.
  std::vector<std::pair<FragmentId, FragmentId>> refreshed;
  std::size_t conflicts_found = 0;
  AssimilationMode mode = AssimilationMode::automatic;
};

/// Matches a fragment either by proposition key or by a token pattern (every
/// pattern token present).
struct Trigger {
  std::optional<std::string> key;
  Tokens tokens;

  bool matches(const Fragment& f) const;
};

struct ElaborationRule {
  Trigger trigger;
  FragmentSpec emit;  // anchor defaults to 1.0
};

struct RuleSet {
  std::vector<ElaborationRule> elaborations;
  std::vector<Tokens> abstraction_groups;  // patterns for abs-mode merging
};

class AssimilationConflict : public std::runtime_error {
 public:
  explicit AssimilationConflict(std::vector<ConflictPair> pairs);
  const std::vector<ConflictPair>& pairs() const { return pairs_; }

 private:
  std::vector<ConflictPair> pairs_;
};

struct AssimilationResult {
  BeliefState state;
  AssimilationReport report;
};

std::vector<ConflictPair> detect_conflicts(const BeliefState& s, const BeliefState& input);

/// Pairs (lower id, higher id) of contradicting fragments inside one state.
std::vector<std::pair<FragmentId, FragmentId>> internal_conflicts(const BeliefState& s);

/// Staged assimilation: duplicate refresh, conflict detection, revision
/// (corr/auto), union, elaboration (elab/auto), abstraction (abs).
/// Throws AssimilationConflict when conflicts appear in elab mode.
AssimilationResult assimilate(const BeliefState& s, const BeliefState& input,
                              AssimilationMode mode, const RuleSet& rules,
                              const ParameterConfig& config, IdAllocator& ids);

/// Removes one side of every internal contradiction: lower anchor first, then
/// older fragment, then the higher id.
AssimilationResult resolve_internal_conflicts(const BeliefState& s);

BeliefState nullify(const BeliefState& s, double dt, const ParameterConfig& config);

/// Decays only fragments tagged `sector`; the clock does not move.
BeliefState nullify_sector(const BeliefState& s, const std::string& sector, double dt,
                           const ParameterConfig& config);

/// Ticks until the fragment's persistence falls to delta (0 if already there,
/// +inf if it never decays).
double half_life(const Fragment& f, const ParameterConfig& config);

BeliefState annihilate(const BeliefState& s);
BeliefState annihilate_sector(const BeliefState& s, const std::string& sector);

/// Seeded generator threaded through drift by value.
struct DriftRng {
  std::mt19937_64 engine;
  explicit DriftRng(std::uint64_t seed = 0) : engine(seed) {}
  friend bool operator==(const DriftRng&, const DriftRng&) = default;
};

struct DriftResult {
  BeliefState state;
  DriftRng rng;
  std::optional<FragmentId> added;
  bool warning = false;  // empty lexicon
};

DriftResult drift(const BeliefState& s, std::span<const std::string> lexicon,
                  const ParameterConfig& config, DriftRng rng, IdAllocator& ids);

}  // namespace semanifold
