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

#include "semanifold/regulation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "semanifold/geometry.hpp"

namespace semanifold {

namespace {

// Contradicting ordered pairs, counted per proposition key: every (+, -)
// combination contributes two ordered pairs.
double kappa_of(const BeliefState& s) {
  if (s.empty()) return 1.0;
  std::map<std::string, std::pair<double, double>> by_key;
  for (const auto& f : s.fragments()) {
    if (!f.prop) continue;
    auto& slot = by_key[f.prop->key];
    (f.prop->polarity == Polarity::positive ? slot.first : slot.second) += 1.0;
  }
  double contradictions = 0.0;
  for (const auto& [key, counts] : by_key) contradictions += 2.0 * counts.first * counts.second;
  const double n = static_cast<double>(s.size());
  return 1.0 - contradictions / (n * n);
}

constexpr const char* kMetaKeyPrefix = "meta.";

std::string meta_key(const std::string& metric, const std::string& target) {
  return kMetaKeyPrefix + metric + "." + target;
}

bool targets_refl(const Fragment& f) {
  return f.origin == Origin::meta && f.prop && f.prop->key.size() > 5 &&
         f.prop->key.ends_with(".refl");
}

struct Breach {
  std::string metric;
  std::string target;
  std::string word;
  double value;
};

}  // namespace

double coherence(const BeliefState& s) { return kappa_of(s); }

double coherence(const BeliefState& s, const std::string& sector) {
  return kappa_of(sector_projection(s, sector));
}

double cognitive_load(const BeliefState& s, const std::map<std::string, double>& activations,
                      int recent_ops, const ParameterConfig& config) {
  double sector_term = 0.0;
  for (const auto& [sector, alpha] : activations) sector_term += alpha * config.sector_cost(sector);
  const auto& c = config.load_coeffs;
  return c[0] * static_cast<double>(s.size()) + c[1] * sector_term +
         c[2] * static_cast<double>(recent_ops);
}

IntrospectiveReport introspect(const BeliefState& s, const BeliefState* prev,
                               std::span<const EpistemicAxis> axes,
                               const std::map<std::string, double>& activations, int recent_ops,
                               const ParameterConfig& config) {
  IntrospectiveReport r;
  r.tick = s.clock();
  r.kappa_global = coherence(s);
  for (const auto& sector : sectors_of(s)) r.kappa_by_sector[sector] = coherence(s, sector);
  r.load = cognitive_load(s, activations, recent_ops, config);
  for (const auto& axis : axes)
    r.theta_by_axis[axis.label] = compass_reading(s, axis, config.embed_dim).theta;
  r.velocity = prev ? distance(s, *prev, config.embed_dim) : 0.0;
  int inspected = 0;
  for (const auto& f : s.fragments())
    if (targets_refl(f)) inspected = std::max(inspected, f.meta_depth);
  r.depth = std::min(1 + inspected, config.meta_depth_max + 1);
  return r;
}

bool coherence_breached(const IntrospectiveReport& r, const ParameterConfig& config) {
  const double crit = config.thresholds.kappa_crit;
  if (r.kappa_global < crit) return true;
  return std::any_of(r.kappa_by_sector.begin(), r.kappa_by_sector.end(),
                     [&](const auto& kv) { return kv.second < crit; });
}

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

MetaResult meta_assimilate(const BeliefState& s, const IntrospectiveReport& report,
                           const ParameterConfig& config, IdAllocator& ids) {
  MetaResult out{s, {}, {}, false};
  if (report.depth > config.meta_depth_max) {
    out.dropped = true;
    return out;
  }
  const auto& th = config.thresholds;
  std::vector<Breach> breaches;
  if (report.kappa_global < th.kappa_crit)
    breaches.push_back({"coherence", "global", "low", report.kappa_global});
  for (const auto& [sector, k] : report.kappa_by_sector)
    if (k < th.kappa_crit) breaches.push_back({"coherence", sector, "low", k});
  if (report.load > th.load_max) breaches.push_back({"load", "global", "high", report.load});
  for (const auto& [axis, theta] : report.theta_by_axis)
    if (theta > th.tau_theta) breaches.push_back({"orientation", axis, "drift", theta});
  if (breaches.empty()) return out;

  std::vector<Fragment> frags = s.fragments();
  for (const auto& b : breaches) {
    const std::string key = meta_key(b.metric, b.target);
    const std::string text = b.metric + " " + b.target + " " + b.word + " " + format_metric(b.value);
    auto it = std::find_if(frags.begin(), frags.end(), [&](const Fragment& f) {
      return f.origin == Origin::meta && f.prop && f.prop->key == key;
    });
    if (it != frags.end()) {
      it->text = text;
      it->tokens = tokenize(text);
      it->persistence = 1.0;
      it->meta_depth = report.depth;
      out.updated.push_back(it->id);
      continue;
    }
    Fragment f;
    f.id = ids.next();
    f.text = text;
    f.tokens = tokenize(text);
    f.prop = Proposition{key, Polarity::positive};
    f.sectors = {"refl"};
    f.level = 2;
    f.anchor = config.meta_anchor;
    f.persistence = 1.0;
    f.created_at = s.clock();
    f.origin = Origin::meta;
    f.meta_depth = report.depth;
    out.added.push_back(f.id);
    frags.push_back(std::move(f));
  }
  out.state = BeliefState(std::move(frags), s.clock());
  return out;
}

std::set<FragmentId> identity_signature(const BeliefState& s, const ParameterConfig& config) {
  std::set<FragmentId> out;
  for (const auto& f : s.fragments())
    if ((f.in_sector("refl") || f.in_sector("narr")) && f.anchor >= config.thresholds.a_core)
      out.insert(f.id);
  return out;
}

double identity_stability(const std::set<FragmentId>& a, const std::set<FragmentId>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  for (FragmentId id : a) common += b.contains(id) ? 1 : 0;
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::optional<std::string> EffortLedger::payer(const std::string& process) const {
  if (allocations.contains(process)) return process;
  if (allocations.contains(effort::kRemainder)) return std::string(effort::kRemainder);
  return std::nullopt;
}

double EffortLedger::available(const std::string& process) const {
  auto who = payer(process);
  if (!who) return 0.0;
  auto sp = spent.find(*who);
  return allocations.at(*who) - (sp == spent.end() ? 0.0 : sp->second);
}

bool EffortLedger::try_consume(const std::string& process, double units) {
  auto who = payer(process);
  if (!who || available(process) + 1e-12 < units) return false;
  spent[*who] += units;
  return true;
}

double EffortLedger::total_allocated() const {
  double sum = 0.0;
  for (const auto& [k, v] : allocations) sum += v;
  return sum;
}

EffortLedger allocate_effort(const IntrospectiveReport& report, bool goals_present,
                             const ParameterConfig& config) {
  EffortLedger l;
  l.budget = config.effort_total;
  const double e = config.effort_total;
  const auto& th = config.thresholds;
  if (report.kappa_global < th.kappa_crit) {
    l.allocations = {{effort::kCorrective, 0.6 * e}, {effort::kMonitors, 0.2 * e},
                     {effort::kRemainder, 0.2 * e}};
  } else if (report.load > th.load_max) {
    l.allocations = {{effort::kNullify, 0.5 * e}, {effort::kAbstraction, 0.3 * e},
                     {effort::kMonitors, 0.2 * e}};
  } else if (goals_present) {
    l.allocations = {{effort::kPlanning, 0.5 * e}, {effort::kMemory, 0.3 * e},
                     {effort::kMonitors, 0.2 * e}};
  } else {
    for (const char* cls : {effort::kMemory, effort::kMonitors, effort::kPlanning, effort::kRemainder})
      l.allocations[cls] = e / 4.0;
  }
  return l;
}

std::string_view to_string(RegulationAction::Kind k) {
  using K = RegulationAction::Kind;
  switch (k) {
    case K::none: return "none";
    case K::corrective_assimilation: return "corrective_assimilation";
    case K::accelerate_nullify: return "accelerate_nullify";
    case K::annihilate_sector: return "annihilate_sector";
    case K::realign: return "realign";
    case K::mode_shift: return "mode_shift";
  }
  return "?";
}

namespace {

std::string lowest_priority_sector(const BeliefState& s, const ParameterConfig& config) {
  const SectorSet active = sectors_of(s);
  std::string unlisted;
  for (const auto& sector : active) {
    if (std::find(config.sector_priority.begin(), config.sector_priority.end(), sector) ==
        config.sector_priority.end())
      unlisted = sector;  // set iteration is ordered, so this ends on the greatest
  }
  if (!unlisted.empty()) return unlisted;
  for (auto it = config.sector_priority.rbegin(); it != config.sector_priority.rend(); ++it)
    if (active.contains(*it)) return *it;
  return {};
}

}  // namespace

RegulationAction regulate(const BeliefState& s, const IntrospectiveReport& report,
                          const ParameterConfig& config) {
  using K = RegulationAction::Kind;
  const auto& th = config.thresholds;
  RegulationAction a;

  if (coherence_breached(report, config)) {
    // Most conflicted sector; ties go to the alphabetically first.
    std::string worst = "global";
    double worst_kappa = report.kappa_global;
    bool have_sector = false;
    for (const auto& [sector, k] : report.kappa_by_sector) {
      if (!have_sector || k < worst_kappa) {
        worst = sector;
        worst_kappa = k;
        have_sector = true;
      }
    }
    if (worst_kappa >= th.kappa_crit) {
      worst = "global";
      worst_kappa = report.kappa_global;
    }
    if (report.kappa_breach_ticks >= config.patience && worst != "global") {
      a.kind = K::annihilate_sector;
      a.sector = worst;
      a.cause = "coherence " + worst + " " + format_metric(worst_kappa) + " persisted " +
                std::to_string(report.kappa_breach_ticks) + " ticks";
    } else {
      a.kind = K::corrective_assimilation;
      a.sector = worst == "global" ? std::string() : worst;
      a.cause = "coherence " + worst + " " + format_metric(worst_kappa) + " < kappa_crit";
    }
    return a;
  }
  if (report.load > th.load_max) {
    a.kind = K::accelerate_nullify;
    a.sector = lowest_priority_sector(s, config);
    a.cause = "load " + format_metric(report.load) + " > load_max";
    return a;
  }
  for (const auto& [axis, theta] : report.theta_by_axis) {
    if (theta > th.tau_theta) {
      a.kind = K::realign;
      a.axis = axis;
      a.cause = "orientation " + axis + " " + format_metric(theta) + " > tau_theta";
      return a;
    }
  }
  return a;
}

}  // namespace semanifold
