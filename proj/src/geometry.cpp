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

#include "semanifold/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "semanifold/regulation.hpp"

namespace semanifold {

double distance(const BeliefState& a, const BeliefState& b, std::size_t dim) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return 1.0;
  const double d = 1.0 - cosine(embed_state(a, dim), embed_state(b, dim));
  return std::clamp(d, 0.0, 2.0);
}

CompassReading compass_reading(std::span<const double> embedding, const EpistemicAxis& axis) {
  const Embedding u = subtract(embedding, axis.origin);
  const double vv = dot(axis.direction, axis.direction);
  const double uv = dot(u, axis.direction);
  const double nu = norm(u);
  CompassReading r;
  if (nu == 0.0) return r;
  r.proj_coeff = uv / vv;
  Embedding rest = u;
  for (std::size_t i = 0; i < rest.size(); ++i) rest[i] -= r.proj_coeff * axis.direction[i];
  r.residual = norm(rest);
  r.theta = std::atan2(r.residual, uv / std::sqrt(vv));
  return r;
}

CompassReading compass_reading(const BeliefState& s, const EpistemicAxis& axis, std::size_t dim) {
  return compass_reading(embed_state(s, dim), axis);
}

double trajectory_coherence(std::span<const BeliefState> states, const EpistemicAxis& axis,
                            std::size_t dim) {
  if (states.empty()) throw std::invalid_argument("trajectory_coherence: empty trajectory");
  double sum = 0.0;
  for (const auto& s : states) sum += std::cos(compass_reading(s, axis, dim).theta);
  return std::clamp(sum / static_cast<double>(states.size()), -1.0, 1.0);
}

bool detect_drift(const CompassReading& reading, const ParameterConfig& config) {
  return reading.theta > config.thresholds.tau_theta || reading.residual > config.thresholds.tau_r;
}

RealignResult realign(const BeliefState& s, const EpistemicAxis& axis,
                      const ParameterConfig& config) {
  RealignResult out{s, {}, {}, false};
  CompassReading cur = compass_reading(s, axis, config.embed_dim);
  while (detect_drift(cur, config) && out.state.size() > 1) {
    const auto& frags = out.state.fragments();
    std::size_t best = frags.size();
    CompassReading best_reading;
    for (std::size_t i = 0; i < frags.size(); ++i) {
      std::vector<Fragment> rest;
      rest.reserve(frags.size() - 1);
      for (std::size_t j = 0; j < frags.size(); ++j)
        if (j != i) rest.push_back(frags[j]);
      CompassReading r = compass_reading(BeliefState(std::move(rest), s.clock()), axis, config.embed_dim);
      if (best == frags.size() || r.residual < best_reading.residual) {
        best = i;
        best_reading = r;
      }
    }
    if (best_reading.residual > cur.residual) break;
    out.removed.push_back(frags[best].id);
    out.residuals.push_back(best_reading.residual);
    std::vector<Fragment> keep = frags;
    keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(best));
    out.state = BeliefState(std::move(keep), s.clock());
    cur = best_reading;
  }
  out.warning = detect_drift(cur, config);
  return out;
}

// -- gauge ---------------------------------------------------------------

namespace {

struct Observable {
  enum class Kind { state, scalar, label } kind = Kind::label;
  std::vector<CanonicalTuple> tuples;
  double scalar = 0.0;
  std::string label;

  std::string describe() const {
    switch (kind) {
      case Kind::scalar: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", scalar);
        return buf;
      }
      case Kind::label: return label;
      case Kind::state: {
        std::string out = "{";
        for (std::size_t i = 0; i < tuples.size(); ++i) {
          const auto& [tokens, prop, sectors, level] = tuples[i];
          if (i) out += "; ";
          out += "[";
          for (std::size_t t = 0; t < tokens.size(); ++t) out += (t ? " " : "") + tokens[t];
          out += "]";
          if (prop) out += " " + prop->key + std::string(to_string(prop->polarity));
          out += " @";
          for (const auto& sec : sectors) out += sec + ",";
          out += "k" + std::to_string(level);
        }
        return out + "}";
      }
    }
    return {};
  }
};

Observable state_observable(const BeliefState& s) {
  Observable o;
  o.kind = Observable::Kind::state;
  for (const auto& f : s.fragments()) o.tuples.push_back(canonical_tuple(f));
  std::sort(o.tuples.begin(), o.tuples.end());
  return o;
}

Observable scalar_observable(double v) {
  Observable o;
  o.kind = Observable::Kind::scalar;
  o.scalar = v;
  return o;
}

Observable label_observable(std::string v) {
  Observable o;
  o.kind = Observable::Kind::label;
  o.label = std::move(v);
  return o;
}

bool same(const Observable& a, const Observable& b, double tol) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Observable::Kind::state: return a.tuples == b.tuples;
    case Observable::Kind::scalar: return std::fabs(a.scalar - b.scalar) <= tol;
    case Observable::Kind::label: return a.label == b.label;
  }
  return false;
}

ActionBasin default_probe_basin() {
  ActionBasin b;
  b.action = "probe_action";
  b.clauses = {Clause::density("perc", 0.5), Clause::level_at(0)};
  b.tau = 0.5;
  return b;
}

Observable run_probe(const Probe& p, const BeliefState& s, const ParameterConfig& config,
                     const RuleSet& rules) {
  if (p.op == "coherence") return scalar_observable(p.sector ? coherence(s, *p.sector) : coherence(s));
  if (p.op == "nullify") return state_observable(nullify(s, p.dt, config));
  if (p.op == "generate_query") {
    auto cue = generate_query(s, p.trigger, config);
    if (!cue) return label_observable("none");
    std::string out(to_string(cue->source));
    for (const auto& t : cue->tokens) out += " " + t;
    return label_observable(out);
  }
  if (p.op == "assimilate") {
    IdAllocator ids(s.max_id() + 1);
    BeliefState input = encode_observation(p.context, s.clock() + 1.0, ids);
    try {
      return state_observable(assimilate(s, input, p.mode, rules, config, ids).state);
    } catch (const AssimilationConflict& e) {
      return label_observable("conflict x" + std::to_string(e.pairs().size()));
    }
  }
  if (p.op == "evaluate_action") {
    const ActionBasin basin = p.basin.value_or(default_probe_basin());
    return label_observable(std::string(to_string(evaluate_action(s, basin, p.prev_readiness, p.exec_mode).verdict)));
  }
  throw ConfigError("probe references undefined operator '" + p.op + "'");
}

}  // namespace

ProbeSuite default_probe_suite() {
  ProbeSuite suite;
  suite.name = "default";
  auto add = [&](Probe p) { suite.probes.push_back(std::move(p)); };
  Probe p;
  p.op = "coherence";
  add(p);
  p.sector = "perc";
  add(p);
  p = {};
  p.op = "nullify";
  for (double dt : {10.0, 100.0, 1000.0}) {
    p.dt = dt;
    add(p);
  }
  p = {};
  p.op = "generate_query";
  for (QuerySource src : {QuerySource::goal, QuerySource::coherence, QuerySource::associative}) {
    p.trigger = src;
    add(p);
  }
  p = {};
  p.op = "assimilate";
  add(p);
  p = {};
  p.op = "evaluate_action";
  add(p);
  return suite;
}

void validate_suite(const ProbeSuite& suite) {
  if (suite.probes.empty()) throw ConfigError("probe suite '" + suite.name + "' is empty");
  for (const auto& p : suite.probes) {
    if (p.op != "assimilate" && p.op != "nullify" && p.op != "generate_query" &&
        p.op != "coherence" && p.op != "evaluate_action")
      throw ConfigError("probe references undefined operator '" + p.op + "'");
    if (p.basin) p.basin->validate();
  }
}

GaugeVerdict gauge_equivalent(const BeliefState& a, const BeliefState& b, const ProbeSuite& suite,
                              const ParameterConfig& config, const RuleSet& rules) {
  validate_suite(suite);
  for (std::size_t i = 0; i < suite.probes.size(); ++i) {
    Observable oa = run_probe(suite.probes[i], a, config, rules);
    Observable ob = run_probe(suite.probes[i], b, config, rules);
    if (!same(oa, ob, suite.tolerance))
      return {false, GaugeWitness{i, oa.describe(), ob.describe()}};
  }
  return {true, std::nullopt};
}

}  // namespace semanifold
