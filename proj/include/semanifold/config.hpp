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

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace semanifold {

/// Raised for invalid configuration values (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape of the anchoring modulator f(a) in lambda_i = lambda0 * f(a).
enum class DecayModulator {
  inverse_linear,       // 1 / (1 + a)
  inverse_exponential,  // exp(-a)
  constant,             // 1
};

DecayModulator parse_decay_modulator(std::string_view name);
std::string_view to_string(DecayModulator m);

struct Thresholds {
  double tau_theta = 1.0;  // radians
  double tau_r = 0.8;
  double kappa_crit = 0.8;
  double load_max = 5.0;
  double a_core = 5.0;
};

/// Architecture configuration. Only this subset of the architecture vector is
/// configurable; everything else is fixed by the engine.
struct ParameterConfig {
  double delta = 0.1;
  double lambda0 = 0.02;
  DecayModulator decay_modulator = DecayModulator::inverse_linear;
  std::size_t embed_dim = 64;
  double tau_retrieval = 0.3;
  double eps_fix = 1e-6;
  std::uint64_t seed = 0;
  std::map<std::string, double> sector_costs;  // unlisted sectors cost 1.0
  std::array<double, 3> load_coeffs{0.01, 1.0, 0.1};
  double effort_total = 12.0;
  Thresholds thresholds;
  int window = 10;
  int meta_depth_max = 3;

  // Engine policy knobs.
  double reanchor_floor = 5.0;
  int patience = 3;
  std::vector<std::string> sector_priority{"task", "plan", "perc", "mem", "narr", "refl"};
  bool background_drift = false;
  bool associative_queries = false;
  double accelerate_dt = 10.0;
  std::string goal_marker = "goal";
  double goal_anchor = 10.0;
  double drift_anchor = 0.1;
  double meta_anchor = 2.0;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;

  double modulator(double anchor) const;
  double decay_rate(double anchor) const { return lambda0 * modulator(anchor); }
  double sector_cost(const std::string& sector) const;
};

}  // namespace semanifold
