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

#include "semanifold/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "semanifold/dynamics.hpp"
#include "semanifold/execution.hpp"
#include "semanifold/geometry.hpp"
#include "semanifold/regulation.hpp"

namespace semanifold {

using nlohmann::json;

namespace {

constexpr double kMemoryCycleCost = 3.0;  // query, retrieve, integrate
constexpr const char* kTraceFormat = "semanifold-trace/1";

json id_list(const std::vector<FragmentId>& ids) {
  json out = json::array();
  for (FragmentId id : ids) out.push_back(id);
  return out;
}

json fragment_json(const Fragment& f, const std::optional<std::string>& name) {
  json j{{"id", f.id},
         {"text", f.text},
         {"sectors", std::vector<std::string>(f.sectors.begin(), f.sectors.end())},
         {"level", f.level},
         {"anchor", f.anchor},
         {"persistence", f.persistence}};
  if (name) j["name"] = *name;
  if (f.prop) j["prop"] = f.prop->key + (f.prop->polarity == Polarity::positive ? "+" : "-");
  return j;
}

json persistence_map(const BeliefState& s) {
  json out = json::object();
  for (const auto& f : s.fragments()) out[std::to_string(f.id)] = f.persistence;
  return out;
}

std::vector<FragmentId> missing_ids(const BeliefState& before, const BeliefState& after) {
  std::vector<FragmentId> out;
  for (const auto& f : before.fragments())
    if (!after.contains(f.id)) out.push_back(f.id);
  return out;
}

bool has_goal(const BeliefState& s, const ParameterConfig& config) {
  return std::any_of(s.fragments().begin(), s.fragments().end(), [&](const Fragment& f) {
    return is_goal_fragment(f, config);
  });
}

class Engine {
 public:
  Engine(const Scenario& sc, const RunOptions& opt)
      : sc_(sc), cfg_(sc.config), opt_(opt), mode_(opt.mode.value_or(sc.initial_mode)) {
    if (opt.seed) cfg_.seed = *opt.seed;
    rng_ = DriftRng(cfg_.seed);
    for (std::size_t i = 0; i < sc.axes.size(); ++i) {
      try {
        axes_.push_back(scenario_axis(sc, sc.axes[i]));
      } catch (const TowerError& e) {
        throw ScenarioError("axes[" + std::to_string(i) + "]", e.what());
      }
    }
    trace_.header = {{"format", kTraceFormat},
                     {"scenario", sc.name},
                     {"mode", std::string(to_string(mode_))},
                     {"config", config_to_json(cfg_)}};
    preload_memory();
  }

  void run_timeline() {
    for (std::size_t i = 0; i < sc_.timeline.size() && !aborted_; ++i) {
      const auto& e = sc_.timeline[i];
      switch (e.kind) {
        case TimelineEvent::Kind::observe: observe(e.specs, e.mode); break;
        case TimelineEvent::Kind::command: command(e.command); break;
        case TimelineEvent::Kind::tick:
          for (int k = 0; k < e.ticks; ++k) tick_once();
          break;
        case TimelineEvent::Kind::set_mode: mode_ = e.exec_mode; break;
        case TimelineEvent::Kind::expect: expect(i, e.assertion); break;
      }
    }
  }

  RunResult finish() {
    RunResult r;
    r.state = std::move(state_);
    r.memory = std::move(mem_);
    r.trace = std::move(trace_);
    r.assertions = std::move(outcomes_);
    r.names = std::move(names_);
    r.aborted = aborted_;
    return r;
  }

 private:
  void emit(TraceKind kind, json payload) {
    trace_.events.push_back(TraceEvent{state_.clock(), seq_++, kind, std::move(payload)});
  }

  long long tick_index() const { return std::llround(state_.clock()); }

  void note_op() { ++ops_[tick_index()]; }

  int recent_ops() const {
    const long long now = tick_index();
    int total = 0;
    for (auto it = ops_.upper_bound(now - cfg_.window); it != ops_.end(); ++it) total += it->second;
    return total;
  }

  void preload_memory() {
    std::vector<Fragment> frags;
    for (const auto& spec : sc_.memory) {
      Fragment f = make_fragment(spec, ids_.next(), 0.0, Origin::observed);
      if (spec.name) names_[*spec.name] = f.id;
      frags.push_back(std::move(f));
    }
    mem_.fragments = BeliefState(std::move(frags), 0.0);
  }

  void track_names(const AssimilationReport& report) {
    for (std::size_t k = 0; k < report.elaborated.size(); ++k) {
      const auto& emit_spec = sc_.rules.elaborations.at(report.elaborated_rules.at(k)).emit;
      if (emit_spec.name) names_[*emit_spec.name] = report.elaborated[k];
    }
    for (const auto& [incoming, existing] : report.refreshed) {
      for (auto& [name, id] : names_)
        if (id == incoming) id = existing;
    }
  }

  json report_json(const AssimilationReport& r) const {
    json refreshed = json::array();
    for (const auto& [inc, ex] : r.refreshed) refreshed.push_back({inc, ex});
    return json{{"mode", std::string(to_string(r.mode))},
                {"added", id_list(r.added)},
                {"retracted", id_list(r.retracted)},
                {"elaborated", id_list(r.elaborated)},
                {"abstracted", id_list(r.abstracted)},
                {"refreshed", refreshed},
                {"conflicts", r.conflicts_found}};
  }

  void ingest(const BeliefState& input, const std::vector<FragmentSpec>& specs,
              const std::string& source, AssimilationMode mode) {
    json frags = json::array();
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Fragment& f = input.fragments()[i];
      if (specs[i].name) names_[*specs[i].name] = f.id;
      frags.push_back(fragment_json(f, specs[i].name));
    }
    emit(TraceKind::ingest, {{"source", source}, {"fragments", frags}});
    try {
      AssimilationResult res = assimilate(state_, input, mode, sc_.rules, cfg_, ids_);
      state_ = std::move(res.state);
      track_names(res.report);
      emit(TraceKind::assimilate, report_json(res.report));
      note_op();
    } catch (const AssimilationConflict& e) {
      json pairs = json::array();
      for (const auto& p : e.pairs())
        pairs.push_back({{"existing", p.existing_id}, {"incoming", p.incoming_index}, {"key", p.key}});
      emit(TraceKind::warning, {{"reason", "assimilation_conflict"}, {"pairs", pairs}});
    }
  }

  void observe(const std::vector<FragmentSpec>& specs, AssimilationMode mode) {
    BeliefState input = encode_observation(specs, state_.clock(), ids_);
    ingest(input, specs, "observe", mode);
  }

  void command(const Command& c) {
    FragmentSpec spec;
    spec.text = cfg_.goal_marker + ": " + c.text;
    spec.name = c.name;
    spec.sectors = {"task"};
    spec.anchor = c.anchor.value_or(cfg_.goal_anchor);
    std::vector<FragmentSpec> specs{spec};
    BeliefState input = encode_observation(specs, state_.clock(), ids_);
    ingest(input, specs, "command", AssimilationMode::automatic);
  }

  // -- tick ---------------------------------------------------------------

  void tick_once() {
    const BeliefState start = state_;

    IntrospectiveReport rep = introspect(state_, prev_ ? &*prev_ : nullptr, axes_,
                                         sector_activations(state_), recent_ops(), cfg_);
    breach_ticks_ = coherence_breached(rep, cfg_) ? breach_ticks_ + 1 : 0;
    rep.kappa_breach_ticks = breach_ticks_;
    emit(TraceKind::meta, {{"op", "introspect"},
                           {"kappa", rep.kappa_global},
                           {"kappa_by_sector", rep.kappa_by_sector},
                           {"load", rep.load},
                           {"theta", rep.theta_by_axis},
                           {"velocity", rep.velocity},
                           {"depth", rep.depth},
                           {"breach_ticks", rep.kappa_breach_ticks}});

    MetaResult meta = meta_assimilate(state_, rep, cfg_, ids_);
    if (meta.dropped) {
      emit(TraceKind::meta, {{"op", "dropped"}, {"depth", rep.depth}});
    } else if (!meta.added.empty() || !meta.updated.empty()) {
      state_ = std::move(meta.state);
      json texts = json::object();
      for (FragmentId id : meta.added) texts[std::to_string(id)] = state_.find(id)->text;
      for (FragmentId id : meta.updated) texts[std::to_string(id)] = state_.find(id)->text;
      emit(TraceKind::meta, {{"op", "assimilate"},
                             {"added", id_list(meta.added)},
                             {"updated", id_list(meta.updated)},
                             {"texts", texts}});
      note_op();
    }

    apply_regulation(regulate(state_, rep, cfg_));

    EffortLedger ledger = allocate_effort(rep, has_goal(state_, cfg_), cfg_);
    ledger.try_consume(effort::kMonitors, 1.0);

    memory_cycle(ledger);
    maybe_drift(ledger);
    decay();
    evaluate_basins(ledger);

    prev_ = start;
  }

  void apply_regulation(const RegulationAction& a) {
    using K = RegulationAction::Kind;
    if (a.kind == K::none || a.kind == K::mode_shift) return;
    json payload{{"action", std::string(to_string(a.kind))}, {"cause", a.cause}};
    if (!a.sector.empty()) payload["sector"] = a.sector;
    const BeliefState before = state_;
    switch (a.kind) {
      case K::corrective_assimilation: {
        BeliefState scope = a.sector.empty() ? state_ : sector_projection(state_, a.sector);
        AssimilationResult res = resolve_internal_conflicts(scope);
        std::set<FragmentId> gone(res.report.retracted.begin(), res.report.retracted.end());
        std::vector<Fragment> keep;
        for (const auto& f : state_.fragments())
          if (!gone.contains(f.id)) keep.push_back(f);
        state_ = BeliefState(std::move(keep), state_.clock());
        payload["retracted"] = id_list(res.report.retracted);
        break;
      }
      case K::accelerate_nullify: {
        const double t = state_.clock();
        state_ = a.sector.empty() ? nullify(state_, cfg_.accelerate_dt, cfg_).with_clock(t)
                                  : nullify_sector(state_, a.sector, cfg_.accelerate_dt, cfg_);
        payload["dt"] = cfg_.accelerate_dt;
        payload["pruned"] = id_list(missing_ids(before, state_));
        break;
      }
      case K::annihilate_sector:
        state_ = annihilate_sector(state_, a.sector);
        payload["removed"] = id_list(missing_ids(before, state_));
        break;
      case K::realign: {
        const auto it = std::find_if(axes_.begin(), axes_.end(),
                                     [&](const EpistemicAxis& x) { return x.label == a.axis; });
        RealignResult res = realign(state_, *it, cfg_);
        state_ = std::move(res.state);
        payload["axis"] = a.axis;
        payload["removed"] = id_list(res.removed);
        payload["aligned"] = !res.warning;
        emit(TraceKind::correction, payload);
        note_op();
        return;
      }
      default: break;
    }
    emit(TraceKind::regulate_action, payload);
    note_op();
  }

  void memory_cycle(EffortLedger& ledger) {
    std::optional<QueryCue> cue = generate_query(state_, QuerySource::goal, cfg_, cued_goals_);
    if (!cue) cue = generate_query(state_, QuerySource::coherence, cfg_);
    if (!cue && cfg_.associative_queries)
      cue = generate_query(state_, QuerySource::associative, cfg_, cued_assoc_);
    if (!cue) return;
    if (ledger.available(effort::kMemory) + 1e-12 < kMemoryCycleCost) {
      emit(TraceKind::effort_skip, {{"process", "memory_cycle"},
                                    {"needed", kMemoryCycleCost},
                                    {"available", ledger.available(effort::kMemory)}});
      return;
    }
    ledger.try_consume(effort::kMemory, kMemoryCycleCost);
    if (cue->origin_fragment) {
      if (cue->source == QuerySource::goal) cued_goals_.push_back(*cue->origin_fragment);
      if (cue->source == QuerySource::associative) cued_assoc_.push_back(*cue->origin_fragment);
    }
    json query{{"source", std::string(to_string(cue->source))}, {"tokens", cue->tokens}};
    if (cue->origin_fragment) query["origin"] = *cue->origin_fragment;
    emit(TraceKind::query, query);
    note_op();

    BeliefState retrieved = retrieve(mem_, *cue, cfg_);
    json scores = json::object();
    for (const auto& f : retrieved.fragments()) {
      const Fragment* twin = mem_.fragments.find(f.id);
      scores[std::to_string(f.id)] = retrieval_score(*cue, *twin, cfg_.embed_dim);
    }
    std::vector<FragmentId> got;
    for (const auto& f : retrieved.fragments()) got.push_back(f.id);
    emit(TraceKind::retrieve, {{"ids", id_list(got)}, {"scores", scores}});
    note_op();
    if (retrieved.empty()) return;

    IntegrationResult res = integrate_retrieved(state_, retrieved, mem_, sc_.rules, cfg_, ids_);
    state_ = std::move(res.state);
    mem_ = std::move(res.memory);
    track_names(res.report);
    json payload = report_json(res.report);
    payload["reanchored"] = id_list(res.reanchored);
    json anchors = json::object();
    for (FragmentId id : res.reanchored)
      if (const Fragment* f = mem_.fragments.find(id)) anchors[std::to_string(id)] = f->anchor;
    payload["anchors"] = anchors;
    emit(TraceKind::integrate, payload);
    note_op();
  }

  void maybe_drift(EffortLedger& ledger) {
    if (sc_.lexicon.empty()) return;
    if (!state_.empty() && !cfg_.background_drift) return;
    if (!ledger.try_consume("drift", 1.0)) {
      emit(TraceKind::effort_skip, {{"process", "drift"}, {"needed", 1.0}, {"available", ledger.available("drift")}});
      return;
    }
    DriftResult d = drift(state_, sc_.lexicon, cfg_, rng_, ids_);
    rng_ = d.rng;
    state_ = std::move(d.state);
    json payload = json::object();
    if (d.added) payload["fragment"] = fragment_json(*state_.find(*d.added), std::nullopt);
    emit(TraceKind::drift, payload);
    note_op();
  }

  void decay() {
    const BeliefState before = state_;
    const BeliefState mem_before = mem_.fragments;
    state_ = nullify(state_, 1.0, cfg_);
    mem_.fragments = nullify(mem_.fragments, 1.0, cfg_);
    emit(TraceKind::nullify_prune, {{"dt", 1.0},
                                    {"pruned", id_list(missing_ids(before, state_))},
                                    {"memory_pruned", id_list(missing_ids(mem_before, mem_.fragments))},
                                    {"persistence", persistence_map(state_)},
                                    {"memory_persistence", persistence_map(mem_.fragments)}});
  }

  void evaluate_basins(EffortLedger& ledger) {
    if (sc_.basins.empty()) return;
    if (!ledger.try_consume(effort::kPlanning, 1.0)) {
      emit(TraceKind::effort_skip, {{"process", "basin_evaluation"},
                                    {"needed", 1.0},
                                    {"available", ledger.available(effort::kPlanning)}});
      last_fired_.clear();
      return;
    }
    std::vector<ActionDecision> decisions;
    for (const auto& b : sc_.basins) {
      ActionDecision d = evaluate_action(state_, b, prev_readiness_[b.action], mode_);
      d.tick = state_.clock();
      decisions.push_back(std::move(d));
    }
    for (const auto& d : resolve_actions(std::move(decisions))) {
      const bool fired = d.verdict == Verdict::fired;
      emit(TraceKind::action_decision, {{"action", d.action},
                                        {"verdict", std::string(to_string(d.verdict))},
                                        {"readiness", d.readiness},
                                        {"cause", d.cause},
                                        {"mode", std::string(to_string(mode_))},
                                        {"external", fired && mode_ == ExecutionMode::live}});
      prev_readiness_[d.action] = d.readiness;
      last_fired_[d.action] = fired;
    }
  }

  // -- assertions ---------------------------------------------------------

  void expect(std::size_t index, const Assertion& a) {
    const BeliefState& region = a.in_memory ? mem_.fragments : state_;
    auto lookup = [&]() -> const Fragment* {
      auto it = names_.find(a.name);
      return it == names_.end() ? nullptr : region.find(it->second);
    };
    auto num = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.9g", v);
      return std::string(buf);
    };
    auto close = [&](double v) { return std::fabs(v - a.value) <= a.tol; };

    bool passed = false;
    std::string actual;
    using K = Assertion::Kind;
    switch (a.kind) {
      case K::fragment_present:
      case K::fragment_absent: {
        const bool present = lookup() != nullptr;
        passed = present == (a.kind == K::fragment_present);
        actual = present ? "present" : "absent";
        break;
      }
      case K::persistence:
      case K::anchor: {
        const Fragment* f = lookup();
        if (!f) {
          actual = "absent";
          break;
        }
        const double v = a.kind == K::persistence ? f->persistence : f->anchor;
        passed = close(v);
        actual = num(v);
        break;
      }
      case K::kappa: {
        const double k = a.sector ? coherence(region, *a.sector) : coherence(region);
        passed = close(k);
        actual = num(k);
        break;
      }
      case K::action_fired:
      case K::action_not_fired: {
        auto it = last_fired_.find(a.name);
        const bool fired = it != last_fired_.end() && it->second;
        passed = fired == (a.kind == K::action_fired);
        actual = fired ? "fired" : "not fired";
        break;
      }
      case K::is_vacuum:
        passed = region.empty() == a.expected;
        actual = region.empty() ? "true" : "false";
        break;
      case K::fragment_count:
        passed = static_cast<double>(region.size()) == a.value;
        actual = std::to_string(region.size());
        break;
    }
    emit(TraceKind::assertion_result, {{"index", index},
                                       {"assertion", a.describe()},
                                       {"passed", passed},
                                       {"actual", actual}});
    outcomes_.push_back({index, a.describe(), passed, actual});
    if (!passed && opt_.strict) aborted_ = true;
  }

  const Scenario& sc_;
  ParameterConfig cfg_;
  RunOptions opt_;
  ExecutionMode mode_;
  IdAllocator ids_{1};
  BeliefState state_;
  MemoryStore mem_;
  DriftRng rng_;
  std::vector<EpistemicAxis> axes_;
  std::map<std::string, FragmentId> names_;
  std::optional<BeliefState> prev_;
  std::map<std::string, double> prev_readiness_;
  std::map<std::string, bool> last_fired_;
  std::vector<FragmentId> cued_goals_;
  std::vector<FragmentId> cued_assoc_;
  int breach_ticks_ = 0;
  std::map<long long, int> ops_;
  Trace trace_;
  std::uint64_t seq_ = 0;
  std::vector<AssertionOutcome> outcomes_;
  bool aborted_ = false;
};

const AxisDecl& find_axis(const Scenario& sc, const std::string& label) {
  for (const auto& a : sc.axes)
    if (a.label == label) return a;
  throw ScenarioError("axes", "no axis labelled '" + label + "'");
}

}  // namespace

bool RunResult::all_passed() const {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const AssertionOutcome& o) { return o.passed; });
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  Engine engine(scenario, options);
  engine.run_timeline();
  return engine.finish();
}

TowerTrajectory scenario_tower(const Scenario& scenario, const std::string& label,
                               std::optional<int> max_k) {
  const AxisDecl& decl = find_axis(scenario, label);
  IdAllocator ids(1);
  BeliefState seed = encode_observation(decl.seed, 0.0, ids);
  return build_tower(seed, max_k.value_or(decl.max_k), scenario.config, ids);
}

EpistemicAxis scenario_axis(const Scenario& scenario, const AxisDecl& decl) {
  TowerTrajectory t = scenario_tower(scenario, decl.label);
  return derive_axis(t, decl.label, decl.null_seed, scenario.config.embed_dim);
}

BeliefState scenario_state(const Scenario& scenario, const std::string& name) {
  auto it = scenario.states.find(name);
  if (it == scenario.states.end()) throw ScenarioError("states", "no state named '" + name + "'");
  IdAllocator ids(1);
  return encode_observation(it->second, 0.0, ids);
}

ProbeSuite scenario_suite(const Scenario& scenario, const std::string& name) {
  auto it = scenario.suites.find(name);
  if (it != scenario.suites.end()) return it->second;
  if (name == "default") return default_probe_suite();
  throw ScenarioError("suites", "no probe suite named '" + name + "'");
}

std::vector<std::pair<double, std::map<std::string, double>>> metric_series(
    const Trace& trace, const std::string& metric) {
  if (metric != "kappa" && metric != "load" && metric != "theta" && metric != "velocity")
    throw ConfigError("unknown metric '" + metric + "' (expected kappa, load, theta or velocity)");
  std::vector<std::pair<double, std::map<std::string, double>>> rows;
  for (const auto& e : trace.events) {
    if (e.kind != TraceKind::meta || e.payload.value("op", "") != "introspect") continue;
    std::map<std::string, double> cols;
    if (metric == "kappa") {
      cols["global"] = e.payload.at("kappa").get<double>();
      for (const auto& [sector, v] : e.payload.at("kappa_by_sector").items()) cols[sector] = v.get<double>();
    } else if (metric == "theta") {
      for (const auto& [axis, v] : e.payload.at("theta").items()) cols[axis] = v.get<double>();
    } else {
      cols[metric] = e.payload.at(metric).get<double>();
    }
    rows.emplace_back(e.tick, std::move(cols));
  }
  return rows;
}

}  // namespace semanifold
