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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "builders.hpp"
#include "oracles.hpp"
#include "semanifold/dynamics.hpp"
#include "semanifold/execution.hpp"
#include "semanifold/geometry.hpp"
#include "semanifold/memory.hpp"
#include "semanifold/regulation.hpp"
#include "semanifold/scenario.hpp"
#include "semanifold/simulator.hpp"
#include "semanifold/tower.hpp"
#include "semanifold/trace.hpp"

using namespace semanifold;
using nlohmann::json;

namespace {

const std::vector<std::string> kScenarios = {"sensor_alpha", "regulation", "drift",
                                             "gauge",      "execution",  "orientation"};

// Collects the first few failure messages of a criterion.
struct Check {
  std::size_t failures = 0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures;
    if (notes.size() < 3) notes.push_back(what);
  }
  bool ok() const { return failures == 0; }
  std::string summary() const {
    std::string s = std::to_string(failures) + " failure(s)";
    for (const auto& n : notes) s += "; " + n;
    return s;
  }
};

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::uint64_t snapshot_hash(const BeliefState& s) {
  std::ostringstream os;
  os << std::hexfloat << s.clock() << '\n';
  for (const auto& f : s.fragments()) {
    os << f.id << '|' << f.text << '|';
    for (const auto& t : f.tokens) os << t << ',';
    os << '|' << (f.prop ? f.prop->key + (f.prop->polarity == Polarity::positive ? "+" : "-") : "");
    for (const auto& sec : f.sectors) os << '|' << sec;
    os << '|' << f.level << '|' << f.anchor << '|' << f.persistence << '|' << f.created_at << '|'
       << to_string(f.origin) << '|' << f.meta_depth;
    for (FragmentId m : f.members) os << '|' << m;
    os << '\n';
  }
  return oracle::fnv1a(os.str());
}

std::uint64_t snapshot_hash(const QueryCue& q) {
  std::string s = std::string(to_string(q.source)) + "|" + (q.origin_fragment ? std::to_string(*q.origin_fragment) : "-");
  for (const auto& t : q.tokens) s += "|" + t;
  return oracle::fnv1a(s);
}

// The goal command and the memory preload of the worked example, built
// through the public encoding path.
struct Fixture {
  Scenario scenario;
  BeliefState active;
  MemoryStore memory;
  FragmentId goal_id = 0;
  FragmentId memory_id = 0;
  IdAllocator ids{1};
};

Fixture worked_example() {
  Fixture fx;
  fx.scenario = load_scenario(build::scenario_path("sensor_alpha"));
  fx.memory.fragments = encode_observation(fx.scenario.memory, 0.0, fx.ids);
  fx.memory_id = fx.memory.fragments.fragments().front().id;
  FragmentSpec goal;
  goal.text = fx.scenario.config.goal_marker + ": Check Sensor Alpha status";
  goal.sectors = {"task"};
  goal.anchor = fx.scenario.config.goal_anchor;
  fx.active = encode_observation(std::span<const FragmentSpec>(&goal, 1), 0.0, fx.ids);
  fx.goal_id = fx.active.fragments().front().id;
  return fx;
}

// ---------------------------------------------------------------------------

Outcome worked_example_trace() {
  Check ck;
  const auto t0 = std::chrono::steady_clock::now();

  // Query, retrieve, integrate by hand, then the three coarse decay jumps.
  Fixture fx = worked_example();
  const ParameterConfig& c = fx.scenario.config;
  ck.expect(c.delta == 0.1 && c.lambda0 == 0.02 && c.decay_modulator == DecayModulator::inverse_linear,
            "fixture parameters");
  auto cue = generate_query(fx.active, QuerySource::goal, c);
  ck.expect(cue.has_value(), "no goal cue");
  if (!cue) return {false, ck.summary()};
  BeliefState got = retrieve(fx.memory, *cue, c);
  IntegrationResult integ = integrate_retrieved(fx.active, got, fx.memory, fx.scenario.rules, c, fx.ids);
  ck.expect(integ.state.size() == 3, "integration should yield three fragments");
  const Fragment* phi2 = integ.state.find(fx.memory_id);
  ck.expect(phi2 && phi2->anchor == 5.0 && phi2->persistence == 1.0, "re-anchor a2 = 5, d2 = 1");
  FragmentId phi3_id = 0;
  for (const auto& f : integ.state.fragments())
    if (f.origin == Origin::elaborated) phi3_id = f.id;
  ck.expect(phi3_id != 0, "no elaborated fragment");

  const FragmentId ids[3] = {fx.goal_id, fx.memory_id, phi3_id};
  const double published[3][3] = {{0.96, 0.94, 0.82}, {0.84, 0.72, 0.37}, {0.64, 0.44, 0.08}};
  const double jumps[3] = {20.0, 80.0, 150.0};
  BeliefState s = integ.state;
  ParameterConfig no_prune = c;
  no_prune.delta = 0.0;
  BeliefState raw = integ.state;
  std::string values;
  for (int k = 0; k < 3; ++k) {
    s = nullify(s, jumps[k], c);
    raw = nullify(raw, jumps[k], no_prune);
    for (int i = 0; i < 3; ++i) {
      const Fragment* f = raw.find(ids[i]);
      const double d = f ? f->persistence : -1.0;
      values += fmt(d, 3) + (i == 2 ? (k == 2 ? "" : " / ") : ",");
      ck.expect(std::fabs(d - published[k][i]) <= 0.01,
                "t=" + fmt(raw.clock()) + " id " + std::to_string(ids[i]) + " d=" + fmt(d));
    }
    const bool last = k == 2;
    ck.expect(s.contains(ids[0]) && s.contains(ids[1]), "phi1/phi2 must survive");
    ck.expect(s.contains(ids[2]) != last, last ? "phi3 not pruned at 250" : "phi3 pruned before 250");
  }

  // The full simulator run must agree, and its trace must show the re-anchoring.
  RunResult r = run(fx.scenario);
  ck.expect(r.all_passed(), "scenario assertions failed");
  const FragmentId mem_name = r.names.at("phi2");
  bool saw_integrate = false, saw_first_decay = false;
  for (const auto& e : r.trace.events) {
    if (e.kind == TraceKind::integrate && !saw_integrate) {
      saw_integrate = true;
      const json& a = e.payload.at("anchors");
      ck.expect(a.contains(std::to_string(mem_name)) && a.at(std::to_string(mem_name)) == 5.0,
                "integrate event anchor for phi2");
    }
    if (e.kind == TraceKind::nullify_prune && saw_integrate && !saw_first_decay) {
      saw_first_decay = true;
      const double d = e.payload.at("persistence").at(std::to_string(mem_name)).get<double>();
      ck.expect(std::fabs(d - oracle::decayed(1.0, 5.0, 0.02, 1.0)) <= 1e-9, "d2 not reset to 1");
    }
  }
  ck.expect(saw_integrate && saw_first_decay, "trace lacks integrate/decay events");
  const double secs = seconds_since(t0);
  ck.expect(secs < 1.0, "runtime " + fmt(secs) + " s");
  return {ck.ok(), ck.ok() ? "d = " + values + ", phi3 pruned at 250, a2=5 d2=1, " + fmt(secs, 2) + " s"
                           : ck.summary()};
}

Outcome nullification_laws() {
  Check ck;
  const auto t0 = std::chrono::steady_clock::now();
  ParameterConfig c;
  gen::Generator g(1001);
  for (int i = 0; i < 1000; ++i) {
    BeliefState s = g.state();
    const double t1 = g.real(0.0, 200.0), t2 = g.real(0.0, 200.0);

    BeliefState a = nullify(s, t1, c), b = nullify(s, t1 + t2, c);
    ck.expect(b.size() <= a.size() && b.total_mass() <= a.total_mass() + 1e-12, "weakening");

    BeliefState two = nullify(a, t2, c);
    bool same = two.size() == b.size() && std::fabs(two.clock() - b.clock()) <= 1e-9;
    for (std::size_t k = 0; same && k < b.size(); ++k)
      same = two.fragments()[k].id == b.fragments()[k].id &&
             std::fabs(two.fragments()[k].persistence - b.fragments()[k].persistence) <= 1e-9;
    ck.expect(same, "semigroup at state " + std::to_string(i));

    // Common starting persistence, anchors on a half-unit grid.
    std::vector<Fragment> fs = s.fragments();
    for (auto& f : fs) {
      f.persistence = 1.0;
      f.anchor = 0.5 * static_cast<double>(g.uniform(0, 20));
    }
    BeliefState cur(fs);
    std::map<FragmentId, int> pruned_at;
    for (int t = 1; !cur.empty(); ++t) {
      BeliefState next = nullify(cur, 1.0, c);
      for (const auto& f : cur.fragments())
        if (!next.contains(f.id)) pruned_at[f.id] = t;
      cur = std::move(next);
    }
    for (const auto& x : fs)
      for (const auto& y : fs)
        if (x.anchor > y.anchor) ck.expect(pruned_at[x.id] > pruned_at[y.id], "anchor ordering");
  }
  const double secs = seconds_since(t0);
  ck.expect(secs < 5.0, "runtime " + fmt(secs) + " s");
  return {ck.ok(), ck.ok() ? "1000 states, " + fmt(secs, 2) + " s" : ck.summary()};
}

Outcome coherence_oracle() {
  Check ck;
  gen::Generator g(1002);
  for (int i = 0; i < 500; ++i) {
    BeliefState s = g.state({.max_size = 50, .prop_rate = g.real(0.2, 1.0), .key_pool = static_cast<int>(g.uniform(1, 6))});
    ck.expect(coherence(s) == oracle::kappa(s), "state " + std::to_string(i));
  }
  return {ck.ok(), ck.ok() ? "500 states, exact" : ck.summary()};
}

Outcome assimilation_desiderata() {
  Check ck;
  ParameterConfig c;
  gen::Generator g(1003);
  for (int i = 0; i < 200; ++i) {
    BeliefState s = resolve_internal_conflicts(g.state({.min_size = 1, .prop_rate = 0.3})).state;
    IdAllocator ids(5000);
    auto r = assimilate(s, build::renumbered(s, 1000), AssimilationMode::automatic, {}, c, ids);
    bool ok = r.state.size() == s.size();
    for (const auto& f : s.fragments()) {
      const Fragment* h = r.state.find(f.id);
      ok = ok && h && h->anchor == f.anchor + 1.0 && canonical_tuple(*h) == canonical_tuple(f);
    }
    ck.expect(ok, "redundant input at state " + std::to_string(i));
  }
  for (int i = 0; i < 200; ++i) {
    BeliefState s = resolve_internal_conflicts(g.state({.min_size = 1, .prop_rate = 1.0, .key_pool = 3})).state;
    // Mirror every keyed fragment with its negation so each key conflicts.
    std::vector<Fragment> rivals;
    FragmentId next = 1000;
    for (const auto& f : s.fragments()) {
      if (!f.prop) continue;
      Fragment n = f;
      n.id = next++;
      n.prop->polarity = f.prop->polarity == Polarity::positive ? Polarity::negative : Polarity::positive;
      n.anchor = g.real(0.0, 10.0);
      rivals.push_back(n);
    }
    BeliefState in(rivals, s.clock());
    ck.expect(!detect_conflicts(s, in).empty(), "constructed scenario lacks conflicts");
    IdAllocator ids(5000);
    auto r = assimilate(s, in, AssimilationMode::corr, {}, c, ids);
    ck.expect(internal_conflicts(r.state).empty(), "corrective left conflicts at " + std::to_string(i));
  }
  {
    // The closed-panel belief predates the incoming observation.
    BeliefState s = build::state({{.id = 1, .text = "Panel is closed", .prop = build::pos("panel_closed")}});
    BeliefState in = build::state({{.id = 2, .text = "Panel is open", .prop = build::neg("panel_closed"), .created_at = 1}}, 1.0);
    IdAllocator ids(10);
    auto r = assimilate(s, in, AssimilationMode::corr, {}, c, ids);
    ck.expect(r.state.size() == 1 && r.state.fragments()[0].text == "Panel is open", "panel example");
  }
  return {ck.ok(), ck.ok() ? "redundancy 200/200, corrective 200/200, panel example ok" : ck.summary()};
}

Outcome annihilation_invariants() {
  Check ck;
  gen::Generator g(1004);
  std::size_t n = 0;
  for (int i = 0; i < 500; ++i) {
    BeliefState s = g.state({.max_size = 20}, g.real(0.0, 50.0));
    BeliefState k = annihilate(s);
    ck.expect(is_vacuum(k) && annihilate(k) == k && k.clock() == s.clock(), "global");
    for (const auto& sec : gen::sectors()) {
      BeliefState ks = annihilate_sector(s, sec);
      ck.expect(is_vacuum(sector_projection(ks, sec)), "sector not emptied");
      ck.expect(annihilate_sector(ks, sec) == ks, "sector idempotence");
      for (const auto& f : s.fragments())
        if (!f.in_sector(sec)) ck.expect(ks.contains(f.id), "unrelated fragment removed");
      ++n;
    }
  }
  return {ck.ok(), ck.ok() ? "500 states, " + std::to_string(n) + " sector cases" : ck.summary()};
}

Outcome tower_convergence() {
  Check ck;
  ParameterConfig c;
  gen::Generator g(1005);
  std::string worst;
  for (std::size_t n : {2, 4, 8, 16, 32}) {
    const std::size_t bound = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
    std::size_t max_steps = 0;
    for (int i = 0; i < 40; ++i) {
      BeliefState raw = g.state({.min_size = n, .max_size = n, .single_sector = true});
      const int base = static_cast<int>(g.uniform(0, 2));
      std::vector<Fragment> fs = raw.fragments();
      for (auto& f : fs) f.level = base;
      IdAllocator ids(1000);
      TowerTrajectory t = build_tower(BeliefState(fs), 64, c, ids);
      max_steps = std::max(max_steps, t.steps());
      ck.expect(t.converged && t.steps() <= bound, "n=" + std::to_string(n) + " steps " + std::to_string(t.steps()));
      ck.expect(t.fixpoint_gap < 1e-6, "gap " + fmt(t.fixpoint_gap));
      std::size_t expected_size = n;
      for (std::size_t k = 0; k < t.levels.size(); ++k) {
        ck.expect(t.levels[k].size() == expected_size, "level size");
        for (const auto& f : t.levels[k].fragments())
          ck.expect(f.level == base + static_cast<int>(k), "level bookkeeping");
        expected_size = (expected_size + 1) / 2;
      }
    }
    worst += (worst.empty() ? "" : " ") + std::to_string(n) + ":" + std::to_string(max_steps) + "/" + std::to_string(bound);
  }
  return {ck.ok(), ck.ok() ? "max steps/bound " + worst : ck.summary()};
}

Outcome compass_geometry() {
  Check ck;
  gen::Generator g(1006);
  const std::size_t dim = 64;
  double worst_pyth = 0.0, worst_theta = 0.0;
  for (int i = 0; i < 1000; ++i) {
    BeliefState s = g.state();
    BeliefState head = g.state({.min_size = 1});
    const bool null_seed = g.chance(0.5);
    BeliefState tail = g.state({.min_size = 1});
    Embedding origin = null_seed ? Embedding(dim, 0.0) : embed_state(tail, dim);
    Embedding dir = subtract(embed_state(head, dim), origin);
    if (norm(dir) < 1e-9) continue;
    EpistemicAxis ax{"a", origin, dir};

    CompassReading r = compass_reading(s, ax, dim);
    const double u2 = std::pow(norm(subtract(embed_state(s, dim), origin)), 2);
    const double p = r.proj_coeff * norm(dir);
    const double err = std::fabs(r.residual * r.residual + p * p - u2);
    worst_pyth = std::max(worst_pyth, err);
    ck.expect(err <= 1e-6, "Pythagoras " + fmt(err));
    ck.expect(r.theta >= 0.0 && r.theta <= std::numbers::pi, "theta range");

    // The head state sits exactly at origin + direction.
    CompassReading on = compass_reading(head, ax, dim);
    worst_theta = std::max(worst_theta, on.theta);
    ck.expect(on.theta <= 1e-9, "on-axis theta " + fmt(on.theta));

    const BeliefState traj[3] = {s, head, tail};
    const double kt = trajectory_coherence(traj, ax, dim);
    ck.expect(kt >= -1.0 && kt <= 1.0, "kappa_T range");
    const BeliefState on_traj[3] = {head, head, head};
    ck.expect(std::fabs(trajectory_coherence(on_traj, ax, dim) - 1.0) <= 1e-9, "on-axis kappa_T");
  }
  return {ck.ok(), ck.ok() ? "1000 pairs, max Pythagoras err " + fmt(worst_pyth, 2) + ", max on-axis theta " + fmt(worst_theta, 2)
                           : ck.summary()};
}

Outcome gauge_harness() {
  Check ck;
  ParameterConfig c;
  ProbeSuite suite = default_probe_suite();
  ck.expect(suite.probes.size() == 10, "default suite size");
  gen::Generator g(1007);
  for (int i = 0; i < 100; ++i) {
    BeliefState a = g.state({.max_size = 6});
    std::vector<Fragment> fs = a.fragments();
    for (auto& f : fs) {
      std::shuffle(f.tokens.begin(), f.tokens.end(), g.rng());
      f.text.clear();
      for (const auto& t : f.tokens) f.text += (f.text.empty() ? "" : " ") + t;
    }
    GaugeVerdict pv = gauge_equivalent(a, BeliefState(fs, a.clock()), suite, c);
    ck.expect(pv.equivalent, "permuted pair " + std::to_string(i) +
                                 (pv.witness ? " probe " + std::to_string(pv.witness->probe_index) + ": " +
                                                   pv.witness->observable_a + " vs " + pv.witness->observable_b
                                             : ""));
  }

  BeliefState p = build::state({{.id = 1, .text = "claim", .prop = build::pos("p")}});
  BeliefState q = build::state({{.id = 1, .text = "claim", .prop = build::pos("q")}});
  ProbeSuite corr;
  corr.name = "corr";
  Probe probe;
  probe.op = "assimilate";
  probe.mode = AssimilationMode::corr;
  FragmentSpec ctx;
  ctx.text = "claim denied";
  ctx.prop = build::neg("p");
  ctx.anchor = 2.0;
  probe.context = {ctx};
  corr.probes = {probe};
  GaugeVerdict v = gauge_equivalent(p, q, corr, c);
  ck.expect(!v.equivalent && v.witness && v.witness->observable_a != v.witness->observable_b, "p/q witness");
  std::string witness = v.witness ? v.witness->observable_a + " vs " + v.witness->observable_b : "";

  for (int i = 0; i < 100; ++i) {
    BeliefState a = g.state({.max_size = 6}), b = g.state({.max_size = 6});
    ck.expect(gauge_equivalent(a, a, suite, c).equivalent, "reflexivity");
    ck.expect(gauge_equivalent(a, b, suite, c).equivalent == gauge_equivalent(b, a, suite, c).equivalent, "symmetry");
  }
  return {ck.ok(), ck.ok() ? "100 permuted pairs equivalent; witness " + witness : ck.summary()};
}

Outcome memory_cycle() {
  Check ck;
  Fixture fx = worked_example();
  const ParameterConfig& c = fx.scenario.config;
  const Fragment before = *fx.memory.fragments.find(fx.memory_id);
  const std::uint64_t h_active = snapshot_hash(fx.active), h_mem = snapshot_hash(fx.memory.fragments);
  auto cue = generate_query(fx.active, QuerySource::goal, c);
  ck.expect(cue.has_value(), "no cue");
  if (!cue) return {false, ck.summary()};
  const std::uint64_t h_cue = snapshot_hash(*cue);
  BeliefState got = retrieve(fx.memory, *cue, c);
  ck.expect(snapshot_hash(fx.memory.fragments) == h_mem && snapshot_hash(*cue) == h_cue, "retrieve mutated inputs");
  IntegrationResult r = integrate_retrieved(fx.active, got, fx.memory, fx.scenario.rules, c, fx.ids);
  ck.expect(snapshot_hash(fx.active) == h_active && snapshot_hash(fx.memory.fragments) == h_mem,
            "integration mutated inputs");
  const Fragment* after = r.memory.fragments.find(fx.memory_id);
  ck.expect(after != nullptr, "twin missing");
  const double hl0 = half_life(before, c), hl1 = after ? half_life(*after, c) : 0.0;
  ck.expect(hl1 > hl0, "half-life did not increase");

  gen::Generator g(1008);
  for (int i = 0; i < 300; ++i) {
    MemoryStore mem{g.state({.max_size = 15})};
    QueryCue q;
    q.tokens = g.tokens(4);
    std::sort(q.tokens.begin(), q.tokens.end());
    q.tokens.erase(std::unique(q.tokens.begin(), q.tokens.end()), q.tokens.end());
    const std::uint64_t hm = snapshot_hash(mem.fragments), hq = snapshot_hash(q);
    ParameterConfig loose = c;
    loose.tau_retrieval = g.real(0.0, 0.6);
    BeliefState out = retrieve(mem, q, loose, g.chance(0.3) ? std::optional<std::string>("perc") : std::nullopt);
    ck.expect(snapshot_hash(mem.fragments) == hm && snapshot_hash(q) == hq, "random retrieval mutated inputs");
    for (const auto& f : out.fragments()) ck.expect(f.origin == Origin::retrieved, "origin");
  }
  return {ck.ok(), ck.ok() ? "half-life " + fmt(hl0, 5) + " -> " + fmt(hl1, 5) + "; 301 retrievals hash-stable" : ck.summary()};
}

BeliefState perc_share(double share) {
  std::vector<build::F> fs;
  if (share > 0.0) fs.push_back({.id = 1, .text = "signal seen", .anchor = share});
  if (share < 1.0) fs.push_back({.id = 2, .text = "route plan", .sectors = {"plan"}, .anchor = 1.0 - share});
  return build::state(fs);
}

json strip_mode_switches(json doc) {
  json kept = json::array();
  for (const auto& e : doc.at("timeline"))
    if (!e.contains("set_mode")) kept.push_back(e);
  doc["timeline"] = kept;
  return doc;
}

Outcome execution_gating() {
  Check ck;
  gen::Generator g(1009);
  ActionBasin basin;
  basin.action = "report";
  basin.clauses = {Clause::density("perc", 1.0)};
  for (int i = 0; i < 300; ++i) {
    basin.tau = g.real(0.1, 0.9);
    double prev = 0.0;
    int first_expected = -1, first_fired = -1;
    for (int t = 0; t < 12; ++t) {
      const double share = g.chance(0.7) ? std::min(1.0, prev + g.real(0.0, 0.3)) : g.real(0.0, 1.0);
      ActionDecision d = evaluate_action(perc_share(share), basin, prev, ExecutionMode::live);
      ck.expect(std::fabs(d.readiness - share) <= 1e-12, "readiness");
      const bool should = share > basin.tau && share > prev;
      ck.expect((d.verdict == Verdict::fired) == should, "ramp verdict");
      if (should && first_expected < 0) first_expected = t;
      if (d.verdict == Verdict::fired && first_fired < 0) first_fired = t;
      prev = d.readiness;
    }
    ck.expect(first_expected == first_fired, "first firing tick");
  }

  std::size_t vetoed_fired = 0, veto_cases = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<build::F> fs = {{.id = 1, .text = "signal abort"},
                                {.id = 2, .text = "model flags unsafe posture", .sectors = {"refl"}, .anchor = 0.0}};
    BeliefState s = build::state(fs);
    ActionBasin b;
    b.action = "lift";
    b.clauses = {Clause::has_token("signal")};
    b.tau = g.real(0.05, 0.95);
    ck.expect(readiness(s, b) == 1.0, "veto case readiness");
    ActionBasin sup = b;
    sup.suppression = {Clause::has_token("abort")};
    ActionBasin gate_s = b, gate_d = b;
    gate_s.gate = {{{"unsafe", "posture"}, GateVerdict::suppress}};
    gate_d.gate = {{{"unsafe", "posture"}, GateVerdict::delay}};
    for (const ActionBasin* x : {&sup, &gate_s, &gate_d}) {
      ++veto_cases;
      vetoed_fired += evaluate_action(s, *x, 0.0, ExecutionMode::live).verdict == Verdict::fired;
    }
  }
  ck.expect(vetoed_fired == 0, std::to_string(vetoed_fired) + " vetoed decisions fired");

  std::size_t external = 0, decisions = 0;
  for (const auto& name : kScenarios) {
    Scenario sc = scenario_from_json(strip_mode_switches(read_json(build::scenario_path(name))));
    RunOptions o;
    o.mode = ExecutionMode::simulation;
    RunResult r = run(sc, o);
    for (const auto& e : r.trace.events) {
      if (e.kind != TraceKind::action_decision) continue;
      ++decisions;
      external += e.payload.value("external", false) || e.payload.value("verdict", "") == "fired";
    }
  }
  ck.expect(external == 0, std::to_string(external) + " external events in simulation");
  ck.expect(decisions > 0, "simulation runs produced no decisions to inspect");

  const Verdict kinds[] = {Verdict::fired, Verdict::below_threshold, Verdict::no_momentum, Verdict::gated_delay};
  for (int i = 0; i < 500; ++i) {
    std::vector<ActionDecision> ds;
    for (std::size_t k = 0, n = g.uniform(0, 8); k < n; ++k) {
      ActionDecision d;
      d.action = "a" + std::to_string(g.uniform(0, 5));
      d.verdict = kinds[g.uniform(0, 3)];
      d.readiness = static_cast<double>(g.uniform(0, 4)) / 4.0;
      ds.push_back(d);
    }
    auto out = resolve_actions(ds);
    ck.expect(std::count_if(out.begin(), out.end(), [](const auto& d) { return d.verdict == Verdict::fired; }) <= 1,
              "more than one fired");
  }
  return {ck.ok(), ck.ok() ? "300 ramps exact; 0/" + std::to_string(veto_cases) + " vetoed fired; 0 external of " +
                                 std::to_string(decisions) + " simulated decisions; 500 resolutions"
                           : ck.summary()};
}

Outcome determinism() {
  Check ck;
  std::size_t events = 0;
  for (const auto& name : kScenarios) {
    Scenario sc = load_scenario(build::scenario_path(name));
    const Trace a = run(sc).trace, b = run(sc).trace;
    ck.expect(a.serialize() == b.serialize(), name + " not byte-identical");
    events += a.events.size();

    RunOptions o;
    o.seed = sc.config.seed + 1;
    const Trace d = run(sc, o).trace;
    json ha = a.header, hd = d.header;
    ha["config"].erase("seed");
    hd["config"].erase("seed");
    ck.expect(ha == hd, name + " header differs beyond the seed");
    ck.expect(a.events.size() == d.events.size(), name + " event count differs across seeds");
    for (std::size_t i = 0; i < std::min(a.events.size(), d.events.size()); ++i) {
      if (a.events[i].to_json() == d.events[i].to_json()) continue;
      ck.expect(a.events[i].kind == TraceKind::drift && d.events[i].kind == TraceKind::drift,
                name + " non-drift event " + std::to_string(i) + " differs across seeds");
    }
  }
  return {ck.ok(), ck.ok() ? "6 scenarios, " + std::to_string(events) + " events identical; seed changes touch drift only"
                           : ck.summary()};
}

Outcome regulation_loop() {
  Check ck;
  Scenario sc = load_scenario(build::scenario_path("regulation"));
  const ParameterConfig& c = sc.config;
  RunResult r = run(sc);
  ck.expect(r.all_passed(), "scenario assertions");
  double breach_tick = -1.0, corrective_tick = -1.0, restored_tick = -1.0, lowest = 1.0;
  bool meta_seen = false;
  for (const auto& e : r.trace.events) {
    if (e.kind == TraceKind::meta && e.payload.at("op") == "introspect") {
      double k = e.payload.at("kappa").get<double>();
      for (const auto& [sec, v] : e.payload.at("kappa_by_sector").items()) k = std::min(k, v.get<double>());
      if (k < c.thresholds.kappa_crit && breach_tick < 0) breach_tick = e.tick;
      lowest = std::min(lowest, k);
      if (breach_tick >= 0 && k == 1.0 && restored_tick < 0) restored_tick = e.tick;
    }
    if (e.kind == TraceKind::meta && e.payload.at("op") == "assimilate")
      for (const auto& [id, text] : e.payload.at("texts").items())
        meta_seen |= text.get<std::string>().rfind("coherence plan low", 0) == 0;
    if (e.kind == TraceKind::regulate_action && e.payload.at("action") == "corrective_assimilation" && corrective_tick < 0)
      corrective_tick = e.tick;
  }
  ck.expect(breach_tick >= 0, "coherence never dropped below kappa_crit");
  ck.expect(meta_seen, "no 'coherence plan low' meta fragment");
  ck.expect(corrective_tick >= 0, "no corrective_assimilation");
  ck.expect(restored_tick >= 0 && restored_tick - breach_tick <= c.patience, "kappa not restored within patience");
  ck.expect(coherence(r.state) == 1.0, "final kappa");
  return {ck.ok(), ck.ok() ? "min kappa " + fmt(lowest) + " at t=" + fmt(breach_tick) + ", corrective at t=" +
                                 fmt(corrective_tick) + ", restored by t=" + fmt(restored_tick) + " (patience " +
                                 std::to_string(c.patience) + ")"
                           : ck.summary()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"worked-example trace", worked_example_trace},
      {"nullification laws", nullification_laws},
      {"coherence oracle equivalence", coherence_oracle},
      {"assimilation desiderata", assimilation_desiderata},
      {"annihilation invariants", annihilation_invariants},
      {"tower convergence", tower_convergence},
      {"compass geometry", compass_geometry},
      {"gauge harness", gauge_harness},
      {"memory cycle", memory_cycle},
      {"execution gating", execution_gating},
      {"determinism", determinism},
      {"regulation loop", regulation_loop},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("%s  [%2zu] %s: %s\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
