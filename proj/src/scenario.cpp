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

#include "semanifold/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace semanifold {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScenarioError(where, what);
}

std::string at(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

std::string idx(const std::string& where, std::size_t i) {
  return where + "[" + std::to_string(i) + "]";
}

void expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
}

void expect_array(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
}

void reject_unknown(const json& j, const std::string& where,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      fail(at(where, key), "unknown field");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::int64_t get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    if (j.is_number_float()) {
      const double d = j.get<double>();
      if (std::floor(d) == d && std::fabs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    fail(where, "expected an integer");
  }
  return j.get<std::int64_t>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

/// A token list given either as one string or as an array of strings.
Tokens get_tokens(const json& j, const std::string& where) {
  if (j.is_string()) return tokenize(j.get<std::string>());
  expect_array(j, where);
  Tokens out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    for (auto& t : tokenize(get_string(j[i], idx(where, i)))) out.push_back(std::move(t));
  }
  return out;
}

template <typename F>
auto parse_enum(F&& parser, const json& j, const std::string& where) {
  const std::string s = get_string(j, where);
  try {
    return parser(s);
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
}

SectorSet get_sectors(const json& j, const std::string& where) {
  if (j.is_string()) return {j.get<std::string>()};
  expect_array(j, where);
  SectorSet out;
  for (std::size_t i = 0; i < j.size(); ++i) out.insert(get_string(j[i], idx(where, i)));
  return out;
}

Proposition get_prop(const json& j, const std::string& where) {
  expect_object(j, where);
  reject_unknown(j, where, {"key", "polarity"});
  if (!j.contains("key")) fail(at(where, "key"), "missing");
  Proposition p;
  p.key = get_string(j.at("key"), at(where, "key"));
  if (j.contains("polarity"))
    p.polarity = parse_enum(parse_polarity, j.at("polarity"), at(where, "polarity"));
  return p;
}

std::vector<FragmentSpec> get_specs(const json& j, const std::string& where) {
  expect_array(j, where);
  std::vector<FragmentSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(fragment_spec_from_json(j[i], idx(where, i)));
  return out;
}

Clause get_clause(const json& j, const std::string& where) {
  expect_object(j, where);
  if (!j.contains("kind")) fail(at(where, "kind"), "missing");
  const std::string kind = get_string(j.at("kind"), at(where, "kind"));
  auto opt_sector = [&]() -> std::string {
    return j.contains("sector") ? get_string(j.at("sector"), at(where, "sector")) : std::string();
  };
  if (kind == "density") {
    reject_unknown(j, where, {"kind", "sector", "min"});
    if (!j.contains("sector") || !j.contains("min")) fail(where, "density clause needs sector and min");
    return Clause::density(opt_sector(), get_number(j.at("min"), at(where, "min")));
  }
  if (kind == "level") {
    reject_unknown(j, where, {"kind", "level"});
    if (!j.contains("level")) fail(at(where, "level"), "missing");
    return Clause::level_at(static_cast<int>(get_int(j.at("level"), at(where, "level"))));
  }
  if (kind == "conflict") {
    reject_unknown(j, where, {"kind", "sector", "eps"});
    const double eps = j.contains("eps") ? get_number(j.at("eps"), at(where, "eps")) : 0.0;
    return Clause::conflict_at_most(opt_sector(), eps);
  }
  if (kind == "token") {
    reject_unknown(j, where, {"kind", "sector", "token"});
    if (!j.contains("token")) fail(at(where, "token"), "missing");
    Tokens t = tokenize(get_string(j.at("token"), at(where, "token")));
    if (t.size() != 1) fail(at(where, "token"), "expected exactly one token");
    return Clause::has_token(t.front(), opt_sector());
  }
  fail(at(where, "kind"), "unknown clause kind '" + kind + "'");
}

std::vector<Clause> get_clauses(const json& j, const std::string& where) {
  expect_array(j, where);
  std::vector<Clause> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_clause(j[i], idx(where, i)));
  return out;
}

ActionBasin get_basin(const json& j, const std::string& where) {
  expect_object(j, where);
  reject_unknown(j, where, {"action", "clauses", "tau", "suppression", "gate"});
  ActionBasin b;
  if (!j.contains("action")) fail(at(where, "action"), "missing");
  b.action = get_string(j.at("action"), at(where, "action"));
  if (j.contains("clauses")) b.clauses = get_clauses(j.at("clauses"), at(where, "clauses"));
  if (j.contains("tau")) b.tau = get_number(j.at("tau"), at(where, "tau"));
  if (j.contains("suppression"))
    b.suppression = get_clauses(j.at("suppression"), at(where, "suppression"));
  if (j.contains("gate")) {
    const auto& g = j.at("gate");
    const std::string gw = at(where, "gate");
    expect_array(g, gw);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string w = idx(gw, i);
      expect_object(g[i], w);
      reject_unknown(g[i], w, {"pattern", "verdict"});
      GateRule r;
      if (!g[i].contains("pattern")) fail(at(w, "pattern"), "missing");
      r.pattern = get_tokens(g[i].at("pattern"), at(w, "pattern"));
      if (g[i].contains("verdict"))
        r.verdict = parse_enum(parse_gate_verdict, g[i].at("verdict"), at(w, "verdict"));
      b.gate.push_back(std::move(r));
    }
  }
  try {
    b.validate();
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return b;
}

Probe get_probe(const json& j, const std::string& where) {
  expect_object(j, where);
  reject_unknown(j, where,
                 {"op", "context", "mode", "dt", "sector", "trigger", "basin", "prev_readiness",
                  "exec_mode"});
  Probe p;
  if (!j.contains("op")) fail(at(where, "op"), "missing");
  p.op = get_string(j.at("op"), at(where, "op"));
  if (j.contains("context")) p.context = get_specs(j.at("context"), at(where, "context"));
  if (j.contains("mode"))
    p.mode = parse_enum(parse_assimilation_mode, j.at("mode"), at(where, "mode"));
  if (j.contains("dt")) p.dt = get_number(j.at("dt"), at(where, "dt"));
  if (j.contains("sector")) p.sector = get_string(j.at("sector"), at(where, "sector"));
  if (j.contains("trigger"))
    p.trigger = parse_enum(parse_query_source, j.at("trigger"), at(where, "trigger"));
  if (j.contains("basin")) p.basin = get_basin(j.at("basin"), at(where, "basin"));
  if (j.contains("prev_readiness"))
    p.prev_readiness = get_number(j.at("prev_readiness"), at(where, "prev_readiness"));
  if (j.contains("exec_mode"))
    p.exec_mode = parse_enum(parse_execution_mode, j.at("exec_mode"), at(where, "exec_mode"));
  return p;
}

ProbeSuite get_suite(const std::string& name, const json& j, const std::string& where) {
  expect_object(j, where);
  reject_unknown(j, where, {"probes", "tolerance"});
  ProbeSuite s;
  s.name = name;
  if (j.contains("tolerance")) s.tolerance = get_number(j.at("tolerance"), at(where, "tolerance"));
  if (!j.contains("probes")) fail(at(where, "probes"), "missing");
  const auto& arr = j.at("probes");
  expect_array(arr, at(where, "probes"));
  for (std::size_t i = 0; i < arr.size(); ++i)
    s.probes.push_back(get_probe(arr[i], idx(at(where, "probes"), i)));
  return s;
}

RuleSet get_rules(const json& j, const std::string& where) {
  RuleSet rules;
  const json* elabs = nullptr;
  if (j.is_array()) {
    elabs = &j;
  } else {
    expect_object(j, where);
    reject_unknown(j, where, {"elaborations", "abstraction_groups"});
    if (j.contains("elaborations")) elabs = &j.at("elaborations");
    if (j.contains("abstraction_groups")) {
      const auto& g = j.at("abstraction_groups");
      const std::string gw = at(where, "abstraction_groups");
      expect_array(g, gw);
      for (std::size_t i = 0; i < g.size(); ++i) {
        Tokens t = get_tokens(g[i], idx(gw, i));
        if (t.empty()) fail(idx(gw, i), "empty pattern");
        rules.abstraction_groups.push_back(std::move(t));
      }
    }
  }
  if (elabs) {
    const std::string ew = j.is_array() ? where : at(where, "elaborations");
    expect_array(*elabs, ew);
    for (std::size_t i = 0; i < elabs->size(); ++i) {
      const json& r = (*elabs)[i];
      const std::string w = idx(ew, i);
      expect_object(r, w);
      reject_unknown(r, w, {"trigger", "emit"});
      if (!r.contains("trigger") || !r.contains("emit")) fail(w, "rule needs trigger and emit");
      ElaborationRule rule;
      const json& t = r.at("trigger");
      const std::string tw = at(w, "trigger");
      expect_object(t, tw);
      reject_unknown(t, tw, {"key", "tokens"});
      if (t.contains("key")) rule.trigger.key = get_string(t.at("key"), at(tw, "key"));
      if (t.contains("tokens")) rule.trigger.tokens = get_tokens(t.at("tokens"), at(tw, "tokens"));
      if (!rule.trigger.key && rule.trigger.tokens.empty()) fail(tw, "trigger needs key or tokens");
      rule.emit = fragment_spec_from_json(r.at("emit"), at(w, "emit"));
      rules.elaborations.push_back(std::move(rule));
    }
  }
  return rules;
}

Assertion get_assertion(const json& j, const std::string& where) {
  expect_object(j, where);
  reject_unknown(j, where, {"kind", "name", "value", "tol", "expected", "sector", "region"});
  if (!j.contains("kind")) fail(at(where, "kind"), "missing");
  const std::string kind = get_string(j.at("kind"), at(where, "kind"));
  Assertion a;
  using K = Assertion::Kind;
  bool found = false;
  for (K k : {K::fragment_present, K::fragment_absent, K::persistence, K::kappa, K::action_fired,
              K::action_not_fired, K::is_vacuum, K::anchor, K::fragment_count}) {
    if (to_string(k) == kind) {
      a.kind = k;
      found = true;
    }
  }
  if (!found) fail(at(where, "kind"), "unknown assertion kind '" + kind + "'");

  const bool needs_name = a.kind == K::fragment_present || a.kind == K::fragment_absent ||
                          a.kind == K::persistence || a.kind == K::anchor ||
                          a.kind == K::action_fired || a.kind == K::action_not_fired;
  const bool needs_value = a.kind == K::persistence || a.kind == K::anchor || a.kind == K::kappa ||
                           a.kind == K::fragment_count;
  if (needs_name) {
    if (!j.contains("name")) fail(at(where, "name"), "missing");
    a.name = get_string(j.at("name"), at(where, "name"));
  }
  if (needs_value) {
    if (!j.contains("value")) fail(at(where, "value"), "missing");
    a.value = get_number(j.at("value"), at(where, "value"));
  }
  if (j.contains("tol")) {
    a.tol = get_number(j.at("tol"), at(where, "tol"));
    if (!(a.tol >= 0.0)) fail(at(where, "tol"), "must be non-negative");
  }
  if (j.contains("expected")) a.expected = get_bool(j.at("expected"), at(where, "expected"));
  if (j.contains("sector")) a.sector = get_string(j.at("sector"), at(where, "sector"));
  if (j.contains("region")) {
    const std::string region = get_string(j.at("region"), at(where, "region"));
    if (region == "memory") a.in_memory = true;
    else if (region != "active") fail(at(where, "region"), "expected \"active\" or \"memory\"");
  }
  return a;
}

TimelineEvent get_event(const json& j, const std::string& where) {
  expect_object(j, where);
  TimelineEvent e;
  using K = TimelineEvent::Kind;
  if (j.contains("observe")) {
    reject_unknown(j, where, {"observe", "mode"});
    e.kind = K::observe;
    e.specs = get_specs(j.at("observe"), at(where, "observe"));
    if (j.contains("mode")) e.mode = parse_enum(parse_assimilation_mode, j.at("mode"), at(where, "mode"));
  } else if (j.contains("command")) {
    reject_unknown(j, where, {"command", "name", "anchor"});
    e.kind = K::command;
    e.command.text = get_string(j.at("command"), at(where, "command"));
    if (j.contains("name")) e.command.name = get_string(j.at("name"), at(where, "name"));
    if (j.contains("anchor")) e.command.anchor = get_number(j.at("anchor"), at(where, "anchor"));
  } else if (j.contains("tick")) {
    reject_unknown(j, where, {"tick"});
    e.kind = K::tick;
    const auto n = get_int(j.at("tick"), at(where, "tick"));
    if (n < 1) fail(at(where, "tick"), "ticks must advance the clock (n >= 1)");
    if (n > 100000000) fail(at(where, "tick"), "tick count too large");
    e.ticks = static_cast<int>(n);
  } else if (j.contains("set_mode")) {
    reject_unknown(j, where, {"set_mode"});
    e.kind = K::set_mode;
    e.exec_mode = parse_enum(parse_execution_mode, j.at("set_mode"), at(where, "set_mode"));
  } else if (j.contains("expect")) {
    reject_unknown(j, where, {"expect"});
    e.kind = K::expect;
    e.assertion = get_assertion(j.at("expect"), at(where, "expect"));
  } else {
    fail(where, "expected one of observe, command, tick, set_mode, expect");
  }
  return e;
}

AxisDecl get_axis(const json& j, const std::string& where) {
  expect_object(j, where);
  reject_unknown(j, where, {"label", "seed", "null_seed", "max_k"});
  AxisDecl a;
  if (!j.contains("label")) fail(at(where, "label"), "missing");
  a.label = get_string(j.at("label"), at(where, "label"));
  if (!j.contains("seed")) fail(at(where, "seed"), "missing");
  a.seed = get_specs(j.at("seed"), at(where, "seed"));
  if (j.contains("null_seed")) a.null_seed = get_bool(j.at("null_seed"), at(where, "null_seed"));
  if (j.contains("max_k")) a.max_k = static_cast<int>(get_int(j.at("max_k"), at(where, "max_k")));
  return a;
}

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string_view to_string(Assertion::Kind k) {
  using K = Assertion::Kind;
  switch (k) {
    case K::fragment_present: return "fragment_present";
    case K::fragment_absent: return "fragment_absent";
    case K::persistence: return "persistence";
    case K::kappa: return "kappa";
    case K::action_fired: return "action_fired";
    case K::action_not_fired: return "action_not_fired";
    case K::is_vacuum: return "is_vacuum";
    case K::anchor: return "anchor";
    case K::fragment_count: return "fragment_count";
  }
  return "?";
}

std::string Assertion::describe() const {
  std::string out(to_string(kind));
  if (!name.empty()) out += " " + name;
  if (sector) out += " sector=" + *sector;
  if (in_memory) out += " region=memory";
  switch (kind) {
    case Kind::persistence:
    case Kind::anchor:
    case Kind::kappa: {
      char buf[64];
      std::snprintf(buf, sizeof buf, " = %.9g +- %.3g", value, tol);
      out += buf;
      break;
    }
    case Kind::fragment_count: out += " = " + std::to_string(static_cast<long long>(value)); break;
    case Kind::is_vacuum: out += expected ? " = true" : " = false"; break;
    default: break;
  }
  return out;
}

FragmentSpec fragment_spec_from_json(const json& j, const std::string& where) {
  FragmentSpec s;
  if (j.is_string()) {
    s.text = j.get<std::string>();
    return s;
  }
  expect_object(j, where);
  reject_unknown(j, where, {"text", "name", "prop", "sectors", "sector", "level", "anchor", "persistence"});
  if (!j.contains("text")) fail(at(where, "text"), "missing");
  s.text = get_string(j.at("text"), at(where, "text"));
  if (j.contains("name")) s.name = get_string(j.at("name"), at(where, "name"));
  if (j.contains("prop")) s.prop = get_prop(j.at("prop"), at(where, "prop"));
  if (j.contains("sectors") && j.contains("sector")) fail(where, "give either sector or sectors");
  if (j.contains("sectors")) s.sectors = get_sectors(j.at("sectors"), at(where, "sectors"));
  if (j.contains("sector")) s.sectors = get_sectors(j.at("sector"), at(where, "sector"));
  if (j.contains("level")) s.level = static_cast<int>(get_int(j.at("level"), at(where, "level")));
  if (j.contains("anchor")) s.anchor = get_number(j.at("anchor"), at(where, "anchor"));
  if (j.contains("persistence"))
    s.persistence = get_number(j.at("persistence"), at(where, "persistence"));
  return s;
}

ParameterConfig config_from_json(const json& j, const std::string& where) {
  ParameterConfig c;
  expect_object(j, where);
  reject_unknown(j, where,
                 {"delta", "lambda0", "decay_modulator", "embed_dim", "tau_retrieval", "eps_fix",
                  "seed", "sector_costs", "load_coeffs", "effort_total", "thresholds", "window",
                  "meta_depth_max", "reanchor_floor", "patience", "sector_priority",
                  "background_drift", "associative_queries", "accelerate_dt", "goal_marker",
                  "goal_anchor", "drift_anchor", "meta_anchor"});
  auto num = [&](const char* key, double& out) {
    if (j.contains(key)) out = get_number(j.at(key), at(where, key));
  };
  auto integer = [&](const char* key, int& out) {
    if (j.contains(key)) out = static_cast<int>(get_int(j.at(key), at(where, key)));
  };
  num("delta", c.delta);
  num("lambda0", c.lambda0);
  if (j.contains("decay_modulator"))
    c.decay_modulator = parse_enum(parse_decay_modulator, j.at("decay_modulator"), at(where, "decay_modulator"));
  if (j.contains("embed_dim")) {
    const auto d = get_int(j.at("embed_dim"), at(where, "embed_dim"));
    if (d < 1) fail(at(where, "embed_dim"), "must be positive");
    c.embed_dim = static_cast<std::size_t>(d);
  }
  num("tau_retrieval", c.tau_retrieval);
  num("eps_fix", c.eps_fix);
  if (j.contains("seed")) {
    const auto& v = j.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      fail(at(where, "seed"), "expected a non-negative integer");
    c.seed = v.get<std::uint64_t>();
  }
  if (j.contains("sector_costs")) {
    const auto& m = j.at("sector_costs");
    expect_object(m, at(where, "sector_costs"));
    for (const auto& [k, v] : m.items())
      c.sector_costs[k] = get_number(v, at(at(where, "sector_costs"), k));
  }
  if (j.contains("load_coeffs")) {
    const auto& a = j.at("load_coeffs");
    const std::string w = at(where, "load_coeffs");
    expect_array(a, w);
    if (a.size() != 3) fail(w, "expected three coefficients");
    for (std::size_t i = 0; i < 3; ++i) c.load_coeffs[i] = get_number(a[i], idx(w, i));
  }
  num("effort_total", c.effort_total);
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    const std::string tw = at(where, "thresholds");
    expect_object(t, tw);
    reject_unknown(t, tw, {"tau_theta", "tau_r", "kappa_crit", "load_max", "a_core"});
    auto tnum = [&](const char* key, double& out) {
      if (t.contains(key)) out = get_number(t.at(key), at(tw, key));
    };
    tnum("tau_theta", c.thresholds.tau_theta);
    tnum("tau_r", c.thresholds.tau_r);
    tnum("kappa_crit", c.thresholds.kappa_crit);
    tnum("load_max", c.thresholds.load_max);
    tnum("a_core", c.thresholds.a_core);
  }
  integer("window", c.window);
  integer("meta_depth_max", c.meta_depth_max);
  num("reanchor_floor", c.reanchor_floor);
  integer("patience", c.patience);
  if (j.contains("sector_priority")) {
    const auto& a = j.at("sector_priority");
    const std::string w = at(where, "sector_priority");
    expect_array(a, w);
    c.sector_priority.clear();
    for (std::size_t i = 0; i < a.size(); ++i) c.sector_priority.push_back(get_string(a[i], idx(w, i)));
  }
  if (j.contains("background_drift"))
    c.background_drift = get_bool(j.at("background_drift"), at(where, "background_drift"));
  if (j.contains("associative_queries"))
    c.associative_queries = get_bool(j.at("associative_queries"), at(where, "associative_queries"));
  num("accelerate_dt", c.accelerate_dt);
  if (j.contains("goal_marker")) c.goal_marker = get_string(j.at("goal_marker"), at(where, "goal_marker"));
  num("goal_anchor", c.goal_anchor);
  num("drift_anchor", c.drift_anchor);
  num("meta_anchor", c.meta_anchor);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    fail(where, e.what());
  }
  return c;
}

json config_to_json(const ParameterConfig& c) {
  json j;
  j["delta"] = c.delta;
  j["lambda0"] = c.lambda0;
  j["decay_modulator"] = std::string(to_string(c.decay_modulator));
  j["embed_dim"] = c.embed_dim;
  j["tau_retrieval"] = c.tau_retrieval;
  j["eps_fix"] = c.eps_fix;
  j["seed"] = c.seed;
  j["sector_costs"] = c.sector_costs;
  j["load_coeffs"] = c.load_coeffs;
  j["effort_total"] = c.effort_total;
  j["thresholds"] = {{"tau_theta", c.thresholds.tau_theta},
                     {"tau_r", c.thresholds.tau_r},
                     {"kappa_crit", c.thresholds.kappa_crit},
                     {"load_max", c.thresholds.load_max},
                     {"a_core", c.thresholds.a_core}};
  j["window"] = c.window;
  j["meta_depth_max"] = c.meta_depth_max;
  j["reanchor_floor"] = c.reanchor_floor;
  j["patience"] = c.patience;
  j["sector_priority"] = c.sector_priority;
  j["background_drift"] = c.background_drift;
  j["associative_queries"] = c.associative_queries;
  j["accelerate_dt"] = c.accelerate_dt;
  j["goal_marker"] = c.goal_marker;
  j["goal_anchor"] = c.goal_anchor;
  j["drift_anchor"] = c.drift_anchor;
  j["meta_anchor"] = c.meta_anchor;
  return j;
}

void Scenario::validate() const {
  try {
    config.validate();
  } catch (const ConfigError& e) {
    fail("config", e.what());
  }

  std::set<std::string> names;
  auto check_spec = [&](const FragmentSpec& s, const std::string& where, bool allow_persistence) {
    try {
      Fragment f = make_fragment(s, 1, 0.0, Origin::observed);
      if (s.persistence) {
        if (!allow_persistence) throw std::invalid_argument("persistence is only allowed in memory preloads");
        f.persistence = *s.persistence;
      }
      f.validate();
    } catch (const std::invalid_argument& e) {
      fail(where, e.what());
    }
    if (s.name && !names.insert(*s.name).second) fail(where + ".name", "duplicate fragment name '" + *s.name + "'");
  };

  for (std::size_t i = 0; i < memory.size(); ++i) check_spec(memory[i], idx("memory", i), true);
  for (std::size_t i = 0; i < rules.elaborations.size(); ++i)
    check_spec(rules.elaborations[i].emit, idx("rules.elaborations", i) + ".emit", false);

  std::set<std::string> actions;
  for (std::size_t i = 0; i < basins.size(); ++i) {
    try {
      basins[i].validate();
    } catch (const std::invalid_argument& e) {
      fail(idx("basins", i), e.what());
    }
    if (!actions.insert(basins[i].action).second)
      fail(idx("basins", i) + ".action", "duplicate action '" + basins[i].action + "'");
  }

  std::set<std::string> labels;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto& a = axes[i];
    if (a.label.empty()) fail(idx("axes", i) + ".label", "empty label");
    if (!labels.insert(a.label).second) fail(idx("axes", i) + ".label", "duplicate axis '" + a.label + "'");
    if (a.seed.empty()) fail(idx("axes", i) + ".seed", "axis seed must not be empty");
    if (a.max_k < 1) fail(idx("axes", i) + ".max_k", "must be at least 1");
    for (std::size_t k = 0; k < a.seed.size(); ++k) {
      try {
        make_fragment(a.seed[k], 1, 0.0, Origin::observed).validate();
      } catch (const std::invalid_argument& e) {
        fail(idx(idx("axes", i) + ".seed", k), e.what());
      }
    }
  }

  for (const auto& [name, specs] : states) {
    for (std::size_t k = 0; k < specs.size(); ++k) {
      try {
        make_fragment(specs[k], 1, 0.0, Origin::observed).validate();
      } catch (const std::invalid_argument& e) {
        fail(idx("states." + name, k), e.what());
      }
    }
  }
  for (const auto& [name, suite] : suites) {
    try {
      validate_suite(suite);
    } catch (const ConfigError& e) {
      fail("suites." + name, e.what());
    } catch (const std::invalid_argument& e) {
      fail("suites." + name, e.what());
    }
  }

  // First pass collects every fragment name so an assertion may refer to a
  // fragment introduced later in the timeline.
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    const auto& e = timeline[i];
    const std::string w = idx("timeline", i);
    if (e.kind == TimelineEvent::Kind::observe) {
      if (e.specs.empty()) fail(w + ".observe", "empty observation");
      for (std::size_t k = 0; k < e.specs.size(); ++k) check_spec(e.specs[k], idx(w + ".observe", k), false);
    } else if (e.kind == TimelineEvent::Kind::command) {
      if (tokenize(e.command.text).empty()) fail(w + ".command", "command has no tokens");
      if (e.command.anchor && !(*e.command.anchor >= 0.0)) fail(w + ".anchor", "anchor must be non-negative");
      if (e.command.name && !names.insert(*e.command.name).second)
        fail(w + ".name", "duplicate fragment name '" + *e.command.name + "'");
    } else if (e.kind == TimelineEvent::Kind::tick && e.ticks < 1) {
      fail(w + ".tick", "ticks must advance the clock (n >= 1)");
    }
  }
  for (std::size_t i = 0; i < timeline.size(); ++i) {
    const auto& e = timeline[i];
    if (e.kind != TimelineEvent::Kind::expect) continue;
    const auto& a = e.assertion;
    const std::string w = idx("timeline", i) + ".expect.name";
    using K = Assertion::Kind;
    if ((a.kind == K::action_fired || a.kind == K::action_not_fired) && !actions.contains(a.name))
      fail(w, "unknown action '" + a.name + "'");
    if ((a.kind == K::fragment_present || a.kind == K::fragment_absent || a.kind == K::persistence ||
         a.kind == K::anchor) &&
        !names.contains(a.name))
      fail(w, "unknown fragment name '" + a.name + "'");
  }
}

Scenario scenario_from_json(const json& doc) {
  expect_object(doc, "scenario");
  reject_unknown(doc, "", {"name", "config", "memory", "rules", "lexicon", "axes", "basins", "mode",
                           "timeline", "states", "suites"});
  Scenario s;
  if (doc.contains("name")) s.name = get_string(doc.at("name"), "name");
  if (doc.contains("config")) s.config = config_from_json(doc.at("config"), "config");
  if (doc.contains("memory")) s.memory = get_specs(doc.at("memory"), "memory");
  if (doc.contains("rules")) s.rules = get_rules(doc.at("rules"), "rules");
  if (doc.contains("lexicon")) {
    const auto& l = doc.at("lexicon");
    expect_array(l, "lexicon");
    for (std::size_t i = 0; i < l.size(); ++i) {
      Tokens t = tokenize(get_string(l[i], idx("lexicon", i)));
      if (t.size() != 1) fail(idx("lexicon", i), "lexicon entries must be single tokens");
      s.lexicon.push_back(t.front());
    }
  }
  if (doc.contains("axes")) {
    const auto& a = doc.at("axes");
    expect_array(a, "axes");
    for (std::size_t i = 0; i < a.size(); ++i) s.axes.push_back(get_axis(a[i], idx("axes", i)));
  }
  if (doc.contains("basins")) {
    const auto& b = doc.at("basins");
    expect_array(b, "basins");
    for (std::size_t i = 0; i < b.size(); ++i) s.basins.push_back(get_basin(b[i], idx("basins", i)));
  }
  if (doc.contains("mode")) s.initial_mode = parse_enum(parse_execution_mode, doc.at("mode"), "mode");
  if (!doc.contains("timeline")) fail("timeline", "missing");
  {
    const auto& t = doc.at("timeline");
    expect_array(t, "timeline");
    for (std::size_t i = 0; i < t.size(); ++i) s.timeline.push_back(get_event(t[i], idx("timeline", i)));
  }
  if (doc.contains("states")) {
    const auto& st = doc.at("states");
    expect_object(st, "states");
    for (const auto& [name, specs] : st.items()) s.states[name] = get_specs(specs, "states." + name);
  }
  if (doc.contains("suites")) {
    const auto& su = doc.at("suites");
    expect_object(su, "suites");
    for (const auto& [name, suite] : su.items()) s.suites[name] = get_suite(name, suite, "suites." + name);
  }
  s.validate();
  return s;
}

Scenario parse_scenario(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(line_column(json_text, e.byte == 0 ? 0 : e.byte - 1), "JSON syntax error");
  }
  return scenario_from_json(doc);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ScenarioError(path.string(), "cannot open scenario file");
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    Scenario s = parse_scenario(buf.str());
    if (s.name.empty()) s.name = path.stem().string();
    return s;
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.filename().string() + ": " + e.where(),
                        std::string(e.what()).substr(e.where().size() + 2));
  }
}

}  // namespace semanifold
