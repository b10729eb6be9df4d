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

// Semantic distance, the orientation compass, drift correction, and gauge
// equivalence probing.
//
// All geometry happens in state-embedding space. Cosine distance is symmetric
// and non-negative but does not satisfy the triangle inequality in general.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semanifold/belief.hpp"
#include "semanifold/config.hpp"
#include "semanifold/dynamics.hpp"
#include "semanifold/embedding.hpp"
#include "semanifold/execution.hpp"
#include "semanifold/memory.hpp"
#include "semanifold/tower.hpp"

namespace semanifold {

/// 1 - cosine of the state embeddings; 0 for two vacua, 1 when exactly one
/// side is the vacuum.
double distance(const BeliefState& a, const BeliefState& b, std::size_t dim);

struct CompassReading {
  double proj_coeff = 0.0;
  double theta = 0.0;  // radians, [0, pi]
  double residual = 0.0;
};

CompassReading compass_reading(std::span<const double> embedding, const EpistemicAxis& axis);
CompassReading compass_reading(const BeliefState& s, const EpistemicAxis& axis, std::size_t dim);

/// Mean cos(theta) over the trajectory, in [-1, 1].
double trajectory_coherence(std::span<const BeliefState> states, const EpistemicAxis& axis,
                            std::size_t dim);

bool detect_drift(const CompassReading& reading, const ParameterConfig& config);

struct RealignResult {
  BeliefState state;
  std::vector<FragmentId> removed;  // in removal order
  std::vector<double> residuals;    // residual after each removal
  bool warning = false;             // alignment not reached
};

/// Greedy pruning toward the axis: drop the fragment whose removal lowers the
/// residual most, until drift clears, one fragment remains, or no removal
/// helps.
RealignResult realign(const BeliefState& s, const EpistemicAxis& axis,
                      const ParameterConfig& config);

// -- gauge probing ---------------------------------------------------------

struct Probe {
  std::string op;  // assimilate | nullify | generate_query | coherence | evaluate_action
  std::vector<FragmentSpec> context;
  AssimilationMode mode = AssimilationMode::automatic;
  double dt = 0.0;
  std::optional<std::string> sector;
  QuerySource trigger = QuerySource::goal;
  std::optional<ActionBasin> basin;
  double prev_readiness = 0.0;
  ExecutionMode exec_mode = ExecutionMode::simulation;
};

struct ProbeSuite {
  std::string name;
  std::vector<Probe> probes;
  double tolerance = 1e-9;
};

struct GaugeWitness {
  std::size_t probe_index = 0;
  std::string observable_a;
  std::string observable_b;
};

struct GaugeVerdict {
  bool equivalent = true;
  std::optional<GaugeWitness> witness;
};

/// Ten probes covering coherence, decay at three horizons, every query
/// trigger, identity assimilation and one basin evaluation.
ProbeSuite default_probe_suite();

/// Throws ConfigError for an empty suite or an unknown probe operator.
void validate_suite(const ProbeSuite& suite);

GaugeVerdict gauge_equivalent(const BeliefState& a, const BeliefState& b, const ProbeSuite& suite,
                              const ParameterConfig& config, const RuleSet& rules = {});

}  // namespace semanifold
