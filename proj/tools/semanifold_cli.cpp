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

// semanifold: run scenarios, inspect towers and traces, compare states.
//
// Exit status: 0 success, 1 assertion or verification failure,
// 2 configuration or input error.

#include <algorithm>
#include <cstdio>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "semanifold/geometry.hpp"
#include "semanifold/scenario.hpp"
#include "semanifold/simulator.hpp"
#include "semanifold/trace.hpp"

namespace sm = semanifold;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kBadInput = 2;

void print_state(const char* title, const sm::BeliefState& s) {
  std::printf("%s (clock %g, %zu fragments)\n", title, s.clock(), s.size());
  for (const auto& f : s.fragments()) {
    std::string sectors;
    for (const auto& sec : f.sectors) sectors += (sectors.empty() ? "" : ",") + sec;
    std::printf("  #%-4llu k=%d a=%-6g d=%-10.6f [%s] %s\n",
                static_cast<unsigned long long>(f.id), f.level, f.anchor, f.persistence,
                sectors.c_str(), f.text.c_str());
  }
}

int cmd_run(const std::string& path, const std::string& trace_path, bool strict,
            std::optional<std::uint64_t> seed, const std::string& mode) {
  sm::Scenario sc = sm::load_scenario(path);
  sm::RunOptions opt;
  opt.strict = strict;
  opt.seed = seed;
  if (!mode.empty()) opt.mode = sm::parse_execution_mode(mode);
  sm::RunResult r = sm::run(sc, opt);
  if (!trace_path.empty()) r.trace.write(trace_path);

  std::size_t failed = 0;
  for (const auto& a : r.assertions) {
    std::printf("%s  %s (actual %s)\n", a.passed ? "ok  " : "FAIL", a.description.c_str(),
                a.actual.c_str());
    failed += a.passed ? 0 : 1;
  }
  print_state("final state", r.state);
  print_state("memory", r.memory.fragments);
  std::printf("%zu trace events, %zu assertions, %zu failed%s\n", r.trace.events.size(),
              r.assertions.size(), failed, r.aborted ? " (stopped early)" : "");
  return failed == 0 ? kOk : kFailed;
}

int cmd_tower(const std::string& path, const std::string& axis, std::optional<int> max_k) {
  sm::Scenario sc = sm::load_scenario(path);
  sm::TowerTrajectory t = sm::scenario_tower(sc, axis, max_k);
  const std::size_t dim = sc.config.embed_dim;
  for (std::size_t k = 0; k < t.levels.size(); ++k) {
    const double gap = k == 0 ? 0.0 : sm::distance(t.levels[k], t.levels[k - 1], dim);
    std::printf("level %zu: %zu fragments, d(prev) = %.9g\n", k, t.levels[k].size(), gap);
  }
  std::printf("steps %zu, converged %s, fixpoint gap %.9g\n", t.steps(),
              t.converged ? "yes" : "no", t.fixpoint_gap);
  if (t.converged) {
    const auto& decl = *std::find_if(sc.axes.begin(), sc.axes.end(),
                                     [&](const sm::AxisDecl& a) { return a.label == axis; });
    sm::EpistemicAxis ax = sm::derive_axis(t, axis, decl.null_seed, dim);
    std::printf("axis '%s': |direction| = %.9g\n", axis.c_str(), sm::norm(ax.direction));
  }
  return t.converged ? kOk : kFailed;
}

int cmd_gauge(const std::string& path, const std::string& a, const std::string& b,
              const std::string& suite_name) {
  sm::Scenario sc = sm::load_scenario(path);
  sm::ProbeSuite suite = sm::scenario_suite(sc, suite_name);
  sm::GaugeVerdict v = sm::gauge_equivalent(sm::scenario_state(sc, a), sm::scenario_state(sc, b),
                                            suite, sc.config, sc.rules);
  if (v.equivalent) {
    std::printf("equivalent under suite '%s' (%zu probes)\n", suite.name.c_str(), suite.probes.size());
  } else {
    const auto& w = *v.witness;
    std::printf("inequivalent under suite '%s'\n", suite.name.c_str());
    std::printf("  probe %zu (%s)\n  %s: %s\n  %s: %s\n", w.probe_index,
                suite.probes[w.probe_index].op.c_str(), a.c_str(), w.observable_a.c_str(),
                b.c_str(), w.observable_b.c_str());
  }
  return kOk;
}

int cmd_inspect(const std::string& path, const std::string& metric) {
  sm::Trace t = sm::read_trace(path);
  auto rows = sm::metric_series(t, metric);
  std::set<std::string> columns;
  for (const auto& [tick, cols] : rows)
    for (const auto& [name, v] : cols) columns.insert(name);
  std::printf("%8s", "tick");
  for (const auto& c : columns) std::printf(" %12s", c.c_str());
  std::printf("\n");
  for (const auto& [tick, cols] : rows) {
    std::printf("%8g", tick);
    for (const auto& c : columns) {
      auto it = cols.find(c);
      if (it == cols.end()) std::printf(" %12s", "-");
      else std::printf(" %12.6g", it->second);
    }
    std::printf("\n");
  }
  return kOk;
}

int cmd_verify(const std::string& trace, const std::string& golden) {
  sm::VerifyReport r = sm::verify_golden(sm::read_trace(trace), golden);
  if (r.match) {
    std::printf("%s\n", r.message.c_str());
    return kOk;
  }
  std::printf("divergence at line %zu: %s\n", *r.divergence + 1, r.message.c_str());
  return kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semanifold: belief-state dynamics simulator"};
  app.require_subcommand(1);

  std::string scenario, trace_path, mode, axis, state_a, state_b, suite = "default", metric, golden;
  bool strict = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_k;

  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("scenario", scenario, "Scenario file")->required();
  run->add_option("--trace", trace_path, "Write the trace (JSON Lines) here");
  run->add_flag("--strict", strict, "Stop at the first failed assertion");
  run->add_option("--seed", seed, "Override the configured seed");
  run->add_option("--mode", mode, "Initial execution mode")->check(CLI::IsMember({"live", "simulation"}));

  auto* tower = app.add_subcommand("tower", "Build the tower for an axis declaration");
  tower->add_option("scenario", scenario, "Scenario file")->required();
  tower->add_option("--axis", axis, "Axis label")->required();
  tower->add_option("--max-k", max_k, "Step bound")->check(CLI::PositiveNumber);

  auto* gauge = app.add_subcommand("gauge", "Probe two named states for gauge equivalence");
  gauge->add_option("scenario", scenario, "Scenario file")->required();
  gauge->add_option("--state-a", state_a, "First state name")->required();
  gauge->add_option("--state-b", state_b, "Second state name")->required();
  gauge->add_option("--suite", suite, "Probe suite name")->capture_default_str();

  auto* inspect = app.add_subcommand("inspect", "Per-tick metric table from a trace");
  inspect->add_option("trace", trace_path, "Trace file")->required();
  inspect->add_option("--metric", metric, "kappa, load, theta or velocity")
      ->required()
      ->check(CLI::IsMember({"kappa", "load", "theta", "velocity"}));

  auto* verify = app.add_subcommand("verify", "Compare a trace with a golden trace");
  verify->add_option("trace", trace_path, "Trace file")->required();
  verify->add_option("golden", golden, "Golden trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*run) return cmd_run(scenario, trace_path, strict, seed, mode);
    if (*tower) return cmd_tower(scenario, axis, max_k);
    if (*gauge) return cmd_gauge(scenario, state_a, state_b, suite);
    if (*inspect) return cmd_inspect(trace_path, metric);
    if (*verify) return cmd_verify(trace_path, golden);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  }
  return kBadInput;
}
