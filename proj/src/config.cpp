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

#include "semanifold/config.hpp"

#include <cmath>

namespace semanifold {

DecayModulator parse_decay_modulator(std::string_view name) {
  if (name == "inverse_linear") return DecayModulator::inverse_linear;
  if (name == "inverse_exponential") return DecayModulator::inverse_exponential;
  if (name == "constant") return DecayModulator::constant;
  throw ConfigError("unknown decay_modulator '" + std::string(name) + "'");
}

std::string_view to_string(DecayModulator m) {
  switch (m) {
    case DecayModulator::inverse_linear: return "inverse_linear";
    case DecayModulator::inverse_exponential: return "inverse_exponential";
    case DecayModulator::constant: return "constant";
  }
  return "?";
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(std::string("config: ") + what);
}

}  // namespace

void ParameterConfig::validate() const {
  require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
  require(lambda0 > 0.0 && std::isfinite(lambda0), "lambda0 must be positive");
  require(embed_dim >= 8, "embed_dim must be at least 8");
  require(tau_retrieval >= 0.0 && tau_retrieval <= 1.0, "tau_retrieval must lie in [0, 1]");
  require(eps_fix > 0.0 && std::isfinite(eps_fix), "eps_fix must be positive");
  for (const auto& [sector, cost] : sector_costs)
    require(std::isfinite(cost) && cost >= 0.0, "sector_costs must be finite and non-negative");
  for (double c : load_coeffs) require(std::isfinite(c), "load_coeffs must be finite");
  require(effort_total >= 0.0 && std::isfinite(effort_total), "effort_total must be non-negative");
  require(std::isfinite(thresholds.tau_theta) && std::isfinite(thresholds.tau_r) &&
              std::isfinite(thresholds.kappa_crit) && std::isfinite(thresholds.load_max) &&
              std::isfinite(thresholds.a_core),
          "thresholds must be finite");
  require(window >= 1, "window must be at least 1 tick");
  require(meta_depth_max >= 1, "meta_depth_max must be at least 1");
  require(reanchor_floor >= 0.0, "reanchor_floor must be non-negative");
  require(patience >= 1, "patience must be at least 1");
  require(accelerate_dt >= 0.0, "accelerate_dt must be non-negative");
  require(goal_anchor >= 0.0 && drift_anchor >= 0.0 && meta_anchor >= 0.0,
          "anchors must be non-negative");
  require(!goal_marker.empty(), "goal_marker must be non-empty");
}

double ParameterConfig::modulator(double anchor) const {
  switch (decay_modulator) {
    case DecayModulator::inverse_linear: return 1.0 / (1.0 + anchor);
    case DecayModulator::inverse_exponential: return std::exp(-anchor);
    case DecayModulator::constant: return 1.0;
  }
  return 1.0;
}

double ParameterConfig::sector_cost(const std::string& sector) const {
  auto it = sector_costs.find(sector);
  return it == sector_costs.end() ? 1.0 : it->second;
}

}  // namespace semanifold
