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

#include <doctest.h>

#include <cmath>
#include <string>

#include "builders.hpp"
#include "oracles.hpp"
#include "semanifold/dynamics.hpp"
#include "semanifold/regulation.hpp"

using namespace semanifold;
using build::F;
using build::neg;
using build::pos;

namespace {

ParameterConfig defaults() { return ParameterConfig{}; }

// First tick (at one-tick granularity) on which the fragment is pruned.
int prune_tick(Fragment f, const ParameterConfig& c) {
  BeliefState s({std::move(f)});
  for (int t = 1; t < 100000; ++t) {
    s = nullify(s, 1.0, c);
    if (s.empty()) return t;
  }
  return -1;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("detect_conflicts examples") {
    BeliefState s = build::state({{.id = 1, .text = "Panel is closed", .prop = pos("panel_closed")}});
    BeliefState in = build::state({{.id = 2, .text = "Panel is open", .prop = neg("panel_closed")}});
    auto pairs = detect_conflicts(s, in);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].existing_id == 1);
    CHECK(pairs[0].incoming_index == 0);
    CHECK(pairs[0].key == "panel_closed");

    BeliefState other = build::state({{.id = 3, .text = "fan on", .prop = pos("fan")}});
    CHECK(detect_conflicts(s, other).empty());

    BeliefState pq = build::state({{.id = 1, .text = "p", .prop = pos("p")}, {.id = 2, .text = "q", .prop = pos("q")}});
    BeliefState npq = build::state({{.id = 3, .text = "not p", .prop = neg("p")}, {.id = 4, .text = "not q", .prop = neg("q")}});
    CHECK(detect_conflicts(pq, npq).size() == 2);

    BeliefState keyless = build::state({{.id = 5, .text = "Panel is open"}});
    CHECK(detect_conflicts(s, keyless).empty());
  }

  TEST_CASE("assimilating into the vacuum") {
    IdAllocator ids(10);
    BeliefState in = build::state({{.id = 1, .text = "Goal: Check Sensor Alpha status", .sectors = {"task"}}});
    auto r = assimilate(BeliefState::vacuum(), in, AssimilationMode::automatic, {}, defaults(), ids);
    CHECK(r.state.size() == 1);
    CHECK(r.report.added == std::vector<FragmentId>{1});
  }

  TEST_CASE("corrective assimilation keeps the newer of two equally anchored rivals") {
    IdAllocator ids(10);
    BeliefState s = build::state({{.id = 1, .text = "Panel is closed", .prop = pos("panel_closed"), .created_at = 0}});
    BeliefState in = build::state({{.id = 2, .text = "Panel is open", .prop = neg("panel_closed"), .created_at = 1}}, 1.0);
    auto r = assimilate(s, in, AssimilationMode::corr, {}, defaults(), ids);
    REQUIRE(r.state.size() == 1);
    CHECK(r.state.fragments()[0].text == "Panel is open");
    CHECK(r.report.retracted == std::vector<FragmentId>{1});
    CHECK(r.report.conflicts_found == 1);
  }

  TEST_CASE("revision tie-breaks: anchor, then age, then the incoming side") {
    IdAllocator ids(10);
    BeliefState strong = build::state({{.id = 1, .text = "p holds", .prop = pos("p"), .anchor = 3.0}});
    BeliefState weak_in = build::state({{.id = 2, .text = "p fails", .prop = neg("p"), .anchor = 1.0, .created_at = 5}}, 5.0);
    auto r = assimilate(strong, weak_in, AssimilationMode::corr, {}, defaults(), ids);
    CHECK(r.state.contains(1));
    CHECK_FALSE(r.state.contains(2));

    BeliefState same = build::state({{.id = 1, .text = "p holds", .prop = pos("p")}});
    BeliefState same_in = build::state({{.id = 2, .text = "p fails", .prop = neg("p")}});
    r = assimilate(same, same_in, AssimilationMode::corr, {}, defaults(), ids);
    CHECK(r.state.contains(1));
    CHECK(r.report.retracted == std::vector<FragmentId>{2});
  }

  TEST_CASE("result clock is the later of state and input") {
    IdAllocator ids(10);
    BeliefState s = build::state({{.id = 1, .text = "a"}}, 2.0);
    BeliefState in = build::state({{.id = 2, .text = "b", .created_at = 9}}, 9.0);
    CHECK(assimilate(s, in, AssimilationMode::automatic, {}, defaults(), ids).state.clock() == 9.0);
    CHECK(assimilate(in, BeliefState::vacuum(1.0), AssimilationMode::automatic, {}, defaults(), ids).state.clock() == 9.0);
  }

  TEST_CASE("elaboration rule fires once and emits an elaborated fragment") {
    RuleSet rules;
    ElaborationRule rule;
    rule.trigger.key = "light_green";
    rule.emit.text = "Proceeding is likely safe";
    rule.emit.sectors = {"plan"};
    rules.elaborations.push_back(rule);
    IdAllocator ids(10);
    BeliefState in = build::state({{.id = 1, .text = "Light is green", .prop = pos("light_green")}});
    auto r = assimilate(BeliefState::vacuum(), in, AssimilationMode::elab, rules, defaults(), ids);
    REQUIRE(r.state.size() == 2);
    REQUIRE(r.report.elaborated.size() == 1);
    const Fragment* e = r.state.find(r.report.elaborated[0]);
    REQUIRE(e != nullptr);
    CHECK(e->text == "Proceeding is likely safe");
    CHECK(e->origin == Origin::elaborated);
    CHECK(e->anchor == 1.0);
    CHECK(e->persistence == 1.0);

    // Already present: no second emission.
    auto again = assimilate(r.state, build::state({{.id = 20, .text = "light green again", .prop = pos("light_green")}}),
                            AssimilationMode::elab, rules, defaults(), ids);
    CHECK(again.report.elaborated.empty());
  }

  TEST_CASE("elab-only mode refuses conflicts and names the pairs") {
    IdAllocator ids(10);
    BeliefState s = build::state({{.id = 1, .text = "p", .prop = pos("p")}});
    BeliefState in = build::state({{.id = 2, .text = "not p", .prop = neg("p")}});
    try {
      assimilate(s, in, AssimilationMode::elab, {}, defaults(), ids);
      FAIL("expected AssimilationConflict");
    } catch (const AssimilationConflict& e) {
      REQUIRE(e.pairs().size() == 1);
      CHECK(e.pairs()[0].key == "p");
    }
  }

  TEST_CASE("redundant input confirms: same fragment set, anchors +1, persistence 1") {
    BeliefState s = build::state({{.id = 1, .text = "a b", .anchor = 2.0, .persistence = 0.5},
                                  {.id = 2, .text = "c", .prop = pos("k"), .persistence = 0.3}},
                                 4.0);
    IdAllocator ids(100);
    auto r = assimilate(s, build::renumbered(s, 50), AssimilationMode::automatic, {}, defaults(), ids);
    REQUIRE(r.state.size() == 2);
    CHECK(r.state.find(1)->anchor == 3.0);
    CHECK(r.state.find(2)->anchor == 2.0);
    CHECK(r.state.find(1)->persistence == 1.0);
    CHECK(r.state.find(2)->persistence == 1.0);
    CHECK(r.report.added.empty());
    CHECK(r.report.refreshed.size() == 2);
  }

  TEST_CASE("abstracting mode merges a pattern group into one summary") {
    RuleSet rules;
    rules.abstraction_groups.push_back({"reading"});
    IdAllocator ids(10);
    BeliefState in = build::state({{.id = 1, .text = "reading 5.1"}, {.id = 2, .text = "reading 4.9"}, {.id = 3, .text = "door shut"}});
    auto r = assimilate(BeliefState::vacuum(), in, AssimilationMode::abs, rules, defaults(), ids);
    REQUIRE(r.report.abstracted.size() == 1);
    CHECK(r.state.size() == 2);
    const Fragment* sum = r.state.find(r.report.abstracted[0]);
    CHECK(sum->tokens == Tokens{"reading"});
    CHECK(sum->members == std::vector<FragmentId>{1, 2});
    CHECK(r.report.added == std::vector<FragmentId>{3});
  }

  TEST_CASE("nullify reproduces the worked decay values") {
    ParameterConfig c;  // delta 0.1, lambda0 0.02, 1/(1+a)
    BeliefState s = build::state({{.id = 1, .text = "goal check", .anchor = 10.0},
                                  {.id = 3, .text = "status likely ok", .anchor = 1.0}});
    BeliefState at20 = nullify(s, 20.0, c);
    CHECK(at20.find(1)->persistence == doctest::Approx(std::exp(-(0.02 / 11.0) * 20.0)));
    CHECK(std::fabs(at20.find(1)->persistence - 0.96) <= 0.01);
    CHECK(at20.clock() == 20.0);

    BeliefState at250 = nullify(s, 250.0, c);
    CHECK_FALSE(at250.contains(3));  // exp(-2.5) ~ 0.082 <= 0.1
    CHECK(std::exp(-0.01 * 250.0) == doctest::Approx(0.0821).epsilon(1e-3));

    CHECK(nullify(s, 0.0, c) == s);
    CHECK_THROWS(nullify(s, -1.0, c));
  }

  TEST_CASE("decay modulators") {
    ParameterConfig c;
    CHECK(c.modulator(1.0) == doctest::Approx(0.5));
    c.decay_modulator = DecayModulator::inverse_exponential;
    CHECK(c.modulator(1.0) == doctest::Approx(std::exp(-1.0)));
    c.decay_modulator = DecayModulator::constant;
    CHECK(c.modulator(7.0) == 1.0);
  }

  TEST_CASE("nullify_sector decays only the tagged fragments and keeps the clock") {
    ParameterConfig c;
    BeliefState s = build::state({{.id = 1, .text = "a", .sectors = {"plan"}}, {.id = 2, .text = "b"}}, 5.0);
    BeliefState out = nullify_sector(s, "plan", 10.0, c);
    CHECK(out.clock() == 5.0);
    CHECK(out.find(1)->persistence < 1.0);
    CHECK(out.find(2)->persistence == 1.0);
  }

  TEST_CASE("half life") {
    ParameterConfig c;
    Fragment f = build::frag({.id = 1, .text = "x", .anchor = 1.0});
    CHECK(half_life(f, c) == doctest::Approx(std::log(10.0) / 0.01));
    CHECK(half_life(f, c) == doctest::Approx(230.26).epsilon(1e-4));
    Fragment g = f;
    g.anchor = 2.0;
    CHECK(half_life(g, c) > half_life(f, c));
    f.persistence = 0.1;
    CHECK(half_life(f, c) == 0.0);
    f.persistence = 0.05;
    CHECK(half_life(f, c) == 0.0);
    c.lambda0 = 1e-300;
    c.decay_modulator = DecayModulator::inverse_exponential;
    Fragment h = build::frag({.id = 1, .text = "x", .anchor = 1e6});
    CHECK(std::isinf(half_life(h, c)));
  }

  TEST_CASE("annihilation") {
    gen::Generator g(7);
    BeliefState five = g.state({.min_size = 5, .max_size = 5}, 3.0);
    BeliefState v = annihilate(five);
    CHECK(is_vacuum(v));
    CHECK(v.clock() == 3.0);
    CHECK(annihilate(v) == v);

    BeliefState s = build::state({{.id = 1, .text = "a", .sectors = {"perc"}},
                                  {.id = 2, .text = "b", .sectors = {"plan"}},
                                  {.id = 3, .text = "c", .sectors = {"narr", "refl"}}});
    BeliefState no_plan = annihilate_sector(s, "plan");
    CHECK(no_plan.size() == 2);
    CHECK(annihilate_sector(no_plan, "plan") == no_plan);
    BeliefState no_narr = annihilate_sector(s, "narr");
    CHECK_FALSE(no_narr.contains(3));
    CHECK(is_vacuum(sector_projection(no_narr, "refl")));
  }

  TEST_CASE("drift") {
    ParameterConfig c;
    const std::vector<std::string> lex = {"cold", "warmth", "hum", "glint"};
    IdAllocator ids;
    auto r = drift(BeliefState::vacuum(), lex, c, DriftRng(42), ids);
    REQUIRE_FALSE(is_vacuum(r.state));
    const Fragment& f = r.state.fragments()[0];
    CHECK(f.origin == Origin::drifted);
    CHECK(f.anchor == doctest::Approx(0.1));
    CHECK(f.persistence == 1.0);
    CHECK(f.sectors == SectorSet{"perc"});
    CHECK(f.level == 0);
    CHECK_FALSE(r.rng == DriftRng(42));

    IdAllocator ids2;
    auto r2 = drift(BeliefState::vacuum(), lex, c, DriftRng(42), ids2);
    CHECK(r2.state == r.state);
    CHECK(r2.rng == r.rng);

    CHECK(half_life(f, c) == doctest::Approx(std::log(10.0) / (0.02 / 1.1)));
    CHECK(half_life(f, c) == doctest::Approx(126.6).epsilon(1e-3));

    IdAllocator ids3;
    auto empty = drift(BeliefState::vacuum(), {}, c, DriftRng(1), ids3);
    CHECK(empty.warning);
    CHECK(is_vacuum(empty.state));
    CHECK(empty.rng == DriftRng(1));
  }

  TEST_CASE("property: monotonic weakening and vacuum limit") {
    ParameterConfig c;
    gen::Generator g(11);
    for (int i = 0; i < 200; ++i) {
      BeliefState s = g.state();
      const double t1 = g.real(0.0, 200.0), t2 = t1 + g.real(0.0, 200.0);
      BeliefState a = nullify(s, t1, c), b = nullify(s, t2, c);
      CHECK(b.size() <= a.size());
      CHECK(b.total_mass() <= a.total_mass() + 1e-12);
      CHECK(is_vacuum(nullify(s, 1e6, c)));
    }
  }

  TEST_CASE("property: nullify is a semigroup") {
    ParameterConfig c;
    gen::Generator g(12);
    for (int i = 0; i < 200; ++i) {
      BeliefState s = g.state();
      const double t1 = g.real(0.0, 150.0), t2 = g.real(0.0, 150.0);
      BeliefState two = nullify(nullify(s, t1, c), t2, c);
      BeliefState one = nullify(s, t1 + t2, c);
      // Fragments sitting on the threshold may fall on either side.
      for (const auto& f : one.fragments()) {
        const Fragment* h = two.find(f.id);
        if (h) CHECK(std::fabs(h->persistence - f.persistence) <= 1e-9);
        else CHECK(std::fabs(f.persistence - c.delta) <= 1e-9);
      }
      for (const auto& f : two.fragments())
        if (!one.contains(f.id)) CHECK(std::fabs(f.persistence - c.delta) <= 1e-9);
      CHECK(std::fabs(two.clock() - one.clock()) <= 1e-9);
    }
  }

  TEST_CASE("property: higher anchor prunes strictly later") {
    ParameterConfig c;
    for (double a : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      Fragment lo = build::frag({.id = 1, .text = "x", .anchor = a});
      Fragment hi = build::frag({.id = 1, .text = "x", .anchor = a + 0.5});
      CHECK(prune_tick(hi, c) > prune_tick(lo, c));
    }
  }

  TEST_CASE("property: corrective assimilation leaves no contradictions") {
    ParameterConfig c;
    gen::Generator g(13);
    for (int i = 0; i < 200; ++i) {
      BeliefState s = g.state({.prop_rate = 0.9, .key_pool = 3});
      s = resolve_internal_conflicts(s).state;
      BeliefState in = g.state({.prop_rate = 0.9, .key_pool = 3}, 0.0, 1000);
      IdAllocator ids(5000);
      auto r = assimilate(s, in, AssimilationMode::corr, {}, c, ids);
      CHECK(internal_conflicts(r.state).empty());
      CHECK(coherence(r.state) == 1.0);
      for (FragmentId id : r.report.retracted)
        CHECK(std::find(r.report.added.begin(), r.report.added.end(), id) == r.report.added.end());
    }
  }

  TEST_CASE("property: fully redundant input leaves the fragment set identical") {
    ParameterConfig c;
    gen::Generator g(14);
    for (int i = 0; i < 200; ++i) {
      BeliefState s = g.state({.prop_rate = 0.3});
      IdAllocator ids(5000);
      auto r = assimilate(s, build::renumbered(s, 1000), AssimilationMode::automatic, {}, c, ids);
      REQUIRE(r.state.size() == s.size());
      for (const auto& f : s.fragments()) {
        const Fragment* h = r.state.find(f.id);
        REQUIRE(h != nullptr);
        CHECK(h->anchor == f.anchor + 1.0);
        CHECK(h->persistence == 1.0);
        CHECK(canonical_tuple(*h) == canonical_tuple(f));
      }
    }
  }
}
