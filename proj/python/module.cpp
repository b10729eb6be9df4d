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

#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "semanifold/belief.hpp"
#include "semanifold/dynamics.hpp"
#include "semanifold/embedding.hpp"
#include "semanifold/execution.hpp"
#include "semanifold/geometry.hpp"
#include "semanifold/memory.hpp"
#include "semanifold/regulation.hpp"
#include "semanifold/scenario.hpp"
#include "semanifold/simulator.hpp"
#include "semanifold/tower.hpp"
#include "semanifold/trace.hpp"

namespace py = pybind11;
using namespace semanifold;

namespace {

std::optional<std::pair<std::string, std::string>> prop_tuple(const std::optional<Proposition>& p) {
  if (!p) return std::nullopt;
  return std::make_pair(p->key, std::string(to_string(p->polarity)));
}

std::optional<Proposition> make_prop(const std::optional<std::string>& key, const std::string& polarity) {
  if (!key) return std::nullopt;
  return Proposition{*key, parse_polarity(polarity)};
}

py::dict report_dict(const AssimilationReport& r) {
  py::dict d;
  d["added"] = r.added;
  d["retracted"] = r.retracted;
  d["elaborated"] = r.elaborated;
  d["abstracted"] = r.abstracted;
  d["conflicts_found"] = r.conflicts_found;
  d["mode"] = std::string(to_string(r.mode));
  return d;
}

ParameterConfig config_or_default(const std::optional<ParameterConfig>& c) {
  return c.value_or(ParameterConfig{});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Belief-state dynamics: assimilation, decay, towers, memory, orientation, regulation.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
  py::register_exception<AssimilationConflict>(m, "AssimilationConflict", PyExc_RuntimeError);
  py::register_exception<TowerError>(m, "TowerError", PyExc_ValueError);
  py::register_exception<TraceError>(m, "TraceError", PyExc_ValueError);

  py::class_<ParameterConfig>(m, "Config")
      .def(py::init<>())
      .def_static("from_json", [](const std::string& text) {
        return config_from_json(nlohmann::json::parse(text));
      }, py::arg("text"))
      .def("to_json", [](const ParameterConfig& c) { return canonical_json(config_to_json(c)); })
      .def("validate", &ParameterConfig::validate)
      .def_readwrite("delta", &ParameterConfig::delta)
      .def_readwrite("lambda0", &ParameterConfig::lambda0)
      .def_readwrite("embed_dim", &ParameterConfig::embed_dim)
      .def_readwrite("tau_retrieval", &ParameterConfig::tau_retrieval)
      .def_readwrite("eps_fix", &ParameterConfig::eps_fix)
      .def_readwrite("seed", &ParameterConfig::seed)
      .def_readwrite("reanchor_floor", &ParameterConfig::reanchor_floor)
      .def_readwrite("patience", &ParameterConfig::patience)
      .def_readwrite("goal_marker", &ParameterConfig::goal_marker)
      .def_readwrite("goal_anchor", &ParameterConfig::goal_anchor)
      .def_property(
          "kappa_crit", [](const ParameterConfig& c) { return c.thresholds.kappa_crit; },
          [](ParameterConfig& c, double v) { c.thresholds.kappa_crit = v; });

  py::class_<Fragment>(m, "Fragment")
      .def_readonly("id", &Fragment::id)
      .def_readonly("text", &Fragment::text)
      .def_readonly("tokens", &Fragment::tokens)
      .def_property_readonly("prop", [](const Fragment& f) { return prop_tuple(f.prop); })
      .def_readonly("sectors", &Fragment::sectors)
      .def_readonly("level", &Fragment::level)
      .def_readonly("anchor", &Fragment::anchor)
      .def_readonly("persistence", &Fragment::persistence)
      .def_readonly("created_at", &Fragment::created_at)
      .def_property_readonly("origin", [](const Fragment& f) { return std::string(to_string(f.origin)); })
      .def_readonly("members", &Fragment::members)
      .def("__repr__", [](const Fragment& f) {
        return "<Fragment #" + std::to_string(f.id) + " '" + f.text + "' a=" + std::to_string(f.anchor) +
               " d=" + std::to_string(f.persistence) + ">";
      });

  py::class_<FragmentSpec>(m, "FragmentSpec")
      .def(py::init([](std::string text, std::vector<std::string> sectors, double anchor,
                       std::optional<std::string> key, std::string polarity, int level,
                       std::optional<std::string> name, std::optional<double> persistence) {
             FragmentSpec s;
             s.text = std::move(text);
             s.sectors = SectorSet(sectors.begin(), sectors.end());
             s.anchor = anchor;
             s.prop = make_prop(key, polarity);
             s.level = level;
             s.name = std::move(name);
             s.persistence = persistence;
             return s;
           }),
           py::arg("text"), py::arg("sectors") = std::vector<std::string>{"perc"}, py::arg("anchor") = 1.0,
           py::arg("key") = std::nullopt, py::arg("polarity") = "+", py::arg("level") = 0,
           py::arg("name") = std::nullopt, py::arg("persistence") = std::nullopt)
      .def_readonly("text", &FragmentSpec::text)
      .def_readonly("anchor", &FragmentSpec::anchor);

  py::class_<BeliefState>(m, "BeliefState")
      .def(py::init<>())
      .def_static("vacuum", &BeliefState::vacuum, py::arg("clock") = 0.0)
      .def_property_readonly("fragments", &BeliefState::fragments)
      .def_property_readonly("clock", &BeliefState::clock)
      .def("__len__", &BeliefState::size)
      .def("__contains__", &BeliefState::contains)
      .def("find", [](const BeliefState& s, FragmentId id) -> std::optional<Fragment> {
        if (const Fragment* f = s.find(id)) return *f;
        return std::nullopt;
      })
      .def("total_mass", &BeliefState::total_mass)
      .def("is_vacuum", [](const BeliefState& s) { return is_vacuum(s); })
      .def(py::self == py::self)
      .def("__repr__", [](const BeliefState& s) {
        return "<BeliefState clock=" + std::to_string(s.clock()) + " fragments=" + std::to_string(s.size()) + ">";
      });

  py::class_<IdAllocator>(m, "IdAllocator")
      .def(py::init<FragmentId>(), py::arg("first") = 1)
      .def("peek", &IdAllocator::peek);

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def("token_hash", &token_hash, py::arg("token"));
  m.def(
      "encode_observation",
      [](const std::vector<FragmentSpec>& specs, double clock, IdAllocator& ids) {
        return encode_observation(specs, clock, ids);
      },
      py::arg("specs"), py::arg("clock"), py::arg("ids"));
  m.def("embed_state", &embed_state, py::arg("state"), py::arg("dim") = 64);
  m.def("activation_density", &activation_density, py::arg("state"), py::arg("sector"));
  m.def("sector_projection", &sector_projection, py::arg("state"), py::arg("sector"));

  m.def(
      "assimilate",
      [](const BeliefState& s, const BeliefState& input, const std::string& mode,
         const std::optional<ParameterConfig>& config, IdAllocator& ids) {
        AssimilationResult r = assimilate(s, input, parse_assimilation_mode(mode), {}, config_or_default(config), ids);
        return py::make_tuple(r.state, report_dict(r.report));
      },
      py::arg("state"), py::arg("input"), py::arg("mode") = "auto", py::arg("config") = std::nullopt,
      py::arg("ids"));
  m.def(
      "nullify",
      [](const BeliefState& s, double dt, const std::optional<ParameterConfig>& c) {
        return nullify(s, dt, config_or_default(c));
      },
      py::arg("state"), py::arg("dt"), py::arg("config") = std::nullopt);
  m.def(
      "half_life",
      [](const Fragment& f, const std::optional<ParameterConfig>& c) { return half_life(f, config_or_default(c)); },
      py::arg("fragment"), py::arg("config") = std::nullopt);
  m.def("annihilate", &annihilate, py::arg("state"));
  m.def("annihilate_sector", &annihilate_sector, py::arg("state"), py::arg("sector"));

  m.def("coherence", py::overload_cast<const BeliefState&>(&coherence), py::arg("state"));
  m.def("coherence", py::overload_cast<const BeliefState&, const std::string&>(&coherence), py::arg("state"),
        py::arg("sector"));

  py::class_<TowerTrajectory>(m, "TowerTrajectory")
      .def_readonly("levels", &TowerTrajectory::levels)
      .def_readonly("converged", &TowerTrajectory::converged)
      .def_readonly("fixpoint_gap", &TowerTrajectory::fixpoint_gap)
      .def_property_readonly("steps", &TowerTrajectory::steps);
  m.def(
      "build_tower",
      [](const BeliefState& seed, int max_k, const std::optional<ParameterConfig>& c, IdAllocator& ids) {
        return build_tower(seed, max_k, config_or_default(c), ids);
      },
      py::arg("seed"), py::arg("max_k"), py::arg("config") = std::nullopt, py::arg("ids"));

  py::class_<EpistemicAxis>(m, "EpistemicAxis")
      .def_readonly("label", &EpistemicAxis::label)
      .def_readonly("origin", &EpistemicAxis::origin)
      .def_readonly("direction", &EpistemicAxis::direction);
  m.def("derive_axis", &derive_axis, py::arg("tower"), py::arg("label"), py::arg("null_seed"),
        py::arg("dim") = 64);

  py::class_<CompassReading>(m, "CompassReading")
      .def_readonly("proj_coeff", &CompassReading::proj_coeff)
      .def_readonly("theta", &CompassReading::theta)
      .def_readonly("residual", &CompassReading::residual);
  m.def("compass_reading",
        py::overload_cast<const BeliefState&, const EpistemicAxis&, std::size_t>(&compass_reading),
        py::arg("state"), py::arg("axis"), py::arg("dim") = 64);
  m.def("distance", &distance, py::arg("a"), py::arg("b"), py::arg("dim") = 64);

  m.def(
      "gauge_equivalent",
      [](const BeliefState& a, const BeliefState& b, const std::optional<ParameterConfig>& c) {
        GaugeVerdict v = gauge_equivalent(a, b, default_probe_suite(), config_or_default(c));
        py::dict d;
        d["equivalent"] = v.equivalent;
        if (v.witness) {
          d["probe_index"] = v.witness->probe_index;
          d["observable_a"] = v.witness->observable_a;
          d["observable_b"] = v.witness->observable_b;
        }
        return d;
      },
      py::arg("a"), py::arg("b"), py::arg("config") = std::nullopt);

  m.def(
      "generate_query",
      [](const BeliefState& active, const std::string& trigger,
         const std::optional<ParameterConfig>& c) -> std::optional<Tokens> {
        auto q = generate_query(active, parse_query_source(trigger), config_or_default(c));
        if (!q) return std::nullopt;
        return q->tokens;
      },
      py::arg("active"), py::arg("trigger") = "goal", py::arg("config") = std::nullopt);
  m.def(
      "retrieve",
      [](const BeliefState& store, const Tokens& cue, const std::optional<ParameterConfig>& c) {
        QueryCue q{cue, QuerySource::scripted, std::nullopt};
        std::sort(q.tokens.begin(), q.tokens.end());
        q.tokens.erase(std::unique(q.tokens.begin(), q.tokens.end()), q.tokens.end());
        return retrieve(MemoryStore{store}, q, config_or_default(c));
      },
      py::arg("store"), py::arg("cue"), py::arg("config") = std::nullopt);
  m.def(
      "integrate_retrieved",
      [](const BeliefState& current, const BeliefState& retrieved, const BeliefState& store,
         const std::optional<ParameterConfig>& c, IdAllocator& ids) {
        IntegrationResult r = integrate_retrieved(current, retrieved, MemoryStore{store}, {}, config_or_default(c), ids);
        return py::make_tuple(r.state, r.memory.fragments, r.reanchored);
      },
      py::arg("current"), py::arg("retrieved"), py::arg("store"), py::arg("config") = std::nullopt,
      py::arg("ids"));

  py::class_<AssertionOutcome>(m, "AssertionOutcome")
      .def_readonly("timeline_index", &AssertionOutcome::timeline_index)
      .def_readonly("description", &AssertionOutcome::description)
      .def_readonly("passed", &AssertionOutcome::passed)
      .def_readonly("actual", &AssertionOutcome::actual);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("state", &RunResult::state)
      .def_property_readonly("memory", [](const RunResult& r) { return r.memory.fragments; })
      .def_readonly("assertions", &RunResult::assertions)
      .def_readonly("names", &RunResult::names)
      .def_readonly("aborted", &RunResult::aborted)
      .def("all_passed", &RunResult::all_passed)
      .def("trace_text", [](const RunResult& r) { return r.trace.serialize(); })
      .def_property_readonly("event_count", [](const RunResult& r) { return r.trace.events.size(); });

  auto run_with = [](const Scenario& sc, std::optional<std::uint64_t> seed, bool strict,
                     std::optional<std::string> mode) {
    RunOptions o;
    o.seed = seed;
    o.strict = strict;
    if (mode) o.mode = parse_execution_mode(*mode);
    return run(sc, o);
  };
  m.def(
      "run_scenario",
      [run_with](const std::string& path, std::optional<std::uint64_t> seed, bool strict,
                 std::optional<std::string> mode) { return run_with(load_scenario(path), seed, strict, mode); },
      py::arg("path"), py::arg("seed") = std::nullopt, py::arg("strict") = false, py::arg("mode") = std::nullopt);
  m.def(
      "run_scenario_text",
      [run_with](const std::string& text, std::optional<std::uint64_t> seed, bool strict,
                 std::optional<std::string> mode) { return run_with(parse_scenario(text), seed, strict, mode); },
      py::arg("text"), py::arg("seed") = std::nullopt, py::arg("strict") = false, py::arg("mode") = std::nullopt);
}
