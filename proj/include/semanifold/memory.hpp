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

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semanifold/belief.hpp"
#include "semanifold/config.hpp"
#include "semanifold/dynamics.hpp"

namespace semanifold {

enum class QuerySource { goal, coherence, associative, scripted };

std::string_view to_string(QuerySource s);
QuerySource parse_query_source(std::string_view s);

struct QueryCue {
  Tokens tokens;  // sorted, distinct
  QuerySource source = QuerySource::scripted;
  std::optional<FragmentId> origin_fragment;
};

/// The memory region. Decays under the same law as the active state.
struct MemoryStore {
  BeliefState fragments;

  friend bool operator==(const MemoryStore&, const MemoryStore&) = default;
};

/// Formulates a retrieval cue for `trigger`, or nothing when the trigger does
/// not apply. Fragments listed in `already_cued` are not used again.
/// A fragment is a goal when its token bag holds the configured goal marker.
bool is_goal_fragment(const Fragment& f, const ParameterConfig& config);

std::optional<QueryCue> generate_query(const BeliefState& active, QuerySource trigger,
                                       const ParameterConfig& config,
                                       std::span<const FragmentId> already_cued = {});

/// cosine(cue, fragment) * persistence.
double retrieval_score(const QueryCue& cue, const Fragment& f, std::size_t dim);

/// Copies of every memory fragment scoring at least tau_retrieval, keeping
/// their ids; the vacuum when nothing qualifies.
BeliefState retrieve(const MemoryStore& mem, const QueryCue& cue, const ParameterConfig& config,
                     const std::optional<std::string>& sector = std::nullopt);

struct IntegrationResult {
  BeliefState state;
  MemoryStore memory;
  AssimilationReport report;
  std::vector<FragmentId> reanchored;  // store ids whose twins were reinforced
};

/// Auto-mode assimilation of retrieved content, followed by re-anchoring: each
/// surviving retrieved fragment and its store twin get
/// anchor = max(anchor, reanchor_floor) and persistence 1.
IntegrationResult integrate_retrieved(const BeliefState& current, const BeliefState& retrieved,
                                      const MemoryStore& mem, const RuleSet& rules,
                                      const ParameterConfig& config, IdAllocator& ids);

}  // namespace semanifold
