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

// Abstraction and elaboration across levels, tower construction and the
// epistemic axes derived from converged towers.
//
// Abstraction is a deterministic agglomerative merge. Within every sector
// group (fragments sharing the same sector set) the most similar pair is
// merged into a summary, repeatedly, so one step halves the group (rounding
// up). A leftover fragment passes through one level up. Summaries keep the
// shared tokens of their members, or when nothing is shared the six heaviest
// tokens of the union.

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "semanifold/belief.hpp"
#include "semanifold/config.hpp"
#include "semanifold/embedding.hpp"

namespace semanifold {

class TowerError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kSummaryTokenCap = 6;

/// Collapses `members` into one abstracted summary at max level + 1.
Fragment merge_fragments(std::span<const Fragment> members, FragmentId id, double clock);

/// One abstraction step. Throws TowerError on the vacuum.
BeliefState abstract_step(const BeliefState& s, const ParameterConfig& config, IdAllocator& ids);

/// One elaboration step. Summaries whose members are found in `history` are
/// replaced by copies of those members; others become synthetic copies.
BeliefState elaborate_step(const BeliefState& s, std::span<const BeliefState> history,
                           IdAllocator& ids);

/// Distance between `s` and the historyless elaboration of its abstraction.
double roundtrip_loss(const BeliefState& s, const ParameterConfig& config);

struct TowerTrajectory {
  std::vector<BeliefState> levels;
  bool converged = false;
  double fixpoint_gap = 0.0;

  std::size_t steps() const { return levels.empty() ? 0 : levels.size() - 1; }
};

/// Iterates abstract_step until successive levels are within eps_fix of each
/// other or `max_k` steps have run.
TowerTrajectory build_tower(const BeliefState& seed, int max_k, const ParameterConfig& config,
                            IdAllocator& ids);

struct EpistemicAxis {
  std::string label;
  Embedding origin;
  Embedding direction;
};

/// Axis from a converged tower. `null_seed` places the origin at the vacuum
/// (zero) embedding. Throws TowerError for unconverged towers or a
/// degenerate direction.
EpistemicAxis derive_axis(const TowerTrajectory& t, const std::string& label, bool null_seed,
                          std::size_t dim);

}  // namespace semanifold
