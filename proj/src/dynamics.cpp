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

#include "semanifold/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "semanifold/tower.hpp"

namespace semanifold {

std::string_view to_string(AssimilationMode m) {
  switch (m) {
    case AssimilationMode::elab: return "elab";
    case AssimilationMode::corr: return "corr";
    case AssimilationMode::abs: return "abs";
    case AssimilationMode::conf: return "conf";
    case AssimilationMode::automatic: return "auto";
  }
  return "?";
}

AssimilationMode parse_assimilation_mode(std::string_view s) {
  if (s == "elab") return AssimilationMode::elab;
  if (s == "corr") return AssimilationMode::corr;
  if (s == "abs") return AssimilationMode::abs;
  if (s == "conf") return AssimilationMode::conf;
  if (s == "auto") return AssimilationMode::automatic;
  throw std::invalid_argument("unknown assimilation mode '" + std::string(s) + "'");
}

bool Trigger::matches(const Fragment& f) const {
  if (key) return f.prop && f.prop->key == *key;
  if (tokens.empty()) return false;
  return std::all_of(tokens.begin(), tokens.end(), [&](const std::string& t) {
    return std::find(f.tokens.begin(), f.tokens.end(), t) != f.tokens.end();
  });
}

AssimilationConflict::AssimilationConflict(std::vector<ConflictPair> pairs)
    : std::runtime_error("assimilation in elab mode found " + std::to_string(pairs.size()) +
                         " conflict(s); use corr mode"),
      pairs_(std::move(pairs)) {}

namespace {

bool contradicts(const Fragment& a, const Fragment& b) {
  return a.prop && b.prop && a.prop->key == b.prop->key && a.prop->polarity != b.prop->polarity;
}

// Loser of a contradiction between an existing and an incoming fragment.
bool retract_existing(const Fragment& existing, const Fragment& incoming) {
  if (existing.anchor != incoming.anchor) return existing.anchor < incoming.anchor;
  if (existing.created_at != incoming.created_at) return existing.created_at < incoming.created_at;
  return false;
}

// Loser between two fragments that sit on the same side.
const Fragment& peer_loser(const Fragment& a, const Fragment& b) {
  if (a.anchor != b.anchor) return a.anchor < b.anchor ? a : b;
  if (a.created_at != b.created_at) return a.created_at < b.created_at ? a : b;
  return a.id > b.id ? a : b;
}

bool can_correct(AssimilationMode m) {
  return m == AssimilationMode::corr || m == AssimilationMode::automatic;
}

bool can_elaborate(AssimilationMode m) {
  return m == AssimilationMode::elab || m == AssimilationMode::automatic;
}

}  // namespace

std::vector<ConflictPair> detect_conflicts(const BeliefState& s, const BeliefState& input) {
  std::vector<ConflictPair> out;
  for (const auto& e : s.fragments()) {
    if (!e.prop) continue;
    for (std::size_t j = 0; j < input.fragments().size(); ++j) {
      const auto& in = input.fragments()[j];
      if (contradicts(e, in)) out.push_back({e.id, j, e.prop->key});
    }
  }
  return out;
}

std::vector<std::pair<FragmentId, FragmentId>> internal_conflicts(const BeliefState& s) {
  std::map<std::string, std::pair<std::vector<FragmentId>, std::vector<FragmentId>>> by_key;
  for (const auto& f : s.fragments()) {
    if (!f.prop) continue;
    auto& slot = by_key[f.prop->key];
    (f.prop->polarity == Polarity::positive ? slot.first : slot.second).push_back(f.id);
  }
  std::vector<std::pair<FragmentId, FragmentId>> out;
  for (const auto& [key, ids] : by_key)
    for (FragmentId p : ids.first)
      for (FragmentId n : ids.second) out.emplace_back(std::min(p, n), std::max(p, n));
  std::sort(out.begin(), out.end());
  return out;
}

AssimilationResult resolve_internal_conflicts(const BeliefState& s) {
  AssimilationResult res{s, {}};
  res.report.mode = AssimilationMode::corr;
  auto pairs = internal_conflicts(s);
  res.report.conflicts_found = pairs.size();
  std::set<FragmentId> gone;
  for (const auto& [a, b] : pairs) {
    if (gone.contains(a) || gone.contains(b)) continue;
    gone.insert(peer_loser(*s.find(a), *s.find(b)).id);
  }
  if (gone.empty()) return res;
  std::vector<Fragment> keep;
  for (const auto& f : s.fragments())
    if (!gone.contains(f.id)) keep.push_back(f);
  res.state = BeliefState(std::move(keep), s.clock());
  res.report.retracted.assign(gone.begin(), gone.end());
  return res;
}

AssimilationResult assimilate(const BeliefState& s, const BeliefState& input,
                              AssimilationMode mode, const RuleSet& rules,
                              [[maybe_unused]] const ParameterConfig& config, IdAllocator& ids) {
  AssimilationReport report;
  report.mode = mode;
  const double clock = std::max(s.clock(), input.clock());

  // Stage 1: redundant input confirms what is already believed.
  std::vector<Fragment> existing = s.fragments();
  std::vector<Fragment> incoming;
  std::vector<CanonicalTuple> existing_keys;
  existing_keys.reserve(existing.size());
  for (const auto& e : existing) existing_keys.push_back(canonical_tuple(e));
  std::vector<CanonicalTuple> incoming_keys;
  std::vector<bool> refreshed(existing.size(), false);
  for (const auto& f : input.fragments()) {
    auto key = canonical_tuple(f);
    // Each existing copy absorbs one redundant copy before any is reused.
    std::size_t hit = existing.size();
    for (std::size_t i = 0; i < existing.size(); ++i) {
      if (existing_keys[i] != key) continue;
      if (hit == existing.size()) hit = i;
      if (!refreshed[i]) {
        hit = i;
        break;
      }
    }
    if (hit != existing.size()) {
      refreshed[hit] = true;
      auto& e = existing[hit];
      e.persistence = 1.0;
      e.anchor += 1.0;
      report.refreshed.emplace_back(f.id, e.id);
      continue;
    }
    if (std::find(incoming_keys.begin(), incoming_keys.end(), key) != incoming_keys.end()) continue;
    incoming_keys.push_back(std::move(key));
    Fragment added = f;
    added.persistence = 1.0;
    incoming.push_back(std::move(added));
  }

  // Stage 2: contradictions against the existing state and within the input.
  const BeliefState incoming_state(incoming, clock);
  auto pairs = detect_conflicts(BeliefState(existing, s.clock()), incoming_state);
  auto peer_pairs = internal_conflicts(incoming_state);
  report.conflicts_found = pairs.size() + peer_pairs.size();
  if (mode == AssimilationMode::elab && report.conflicts_found > 0) {
    std::vector<ConflictPair> all = pairs;
    for (const auto& [a, b] : peer_pairs) {
      std::size_t idx = 0;
      for (; idx < incoming.size(); ++idx)
        if (incoming[idx].id == b) break;
      all.push_back({a, idx, incoming_state.find(a)->prop->key});
    }
    throw AssimilationConflict(std::move(all));
  }

  // Stage 3: revision.
  std::set<FragmentId> retracted;
  if (can_correct(mode)) {
    for (const auto& p : pairs) {
      const Fragment* e = nullptr;
      for (const auto& x : existing)
        if (x.id == p.existing_id) e = &x;
      const Fragment& in = incoming[p.incoming_index];
      if (retracted.contains(e->id) || retracted.contains(in.id)) continue;
      retracted.insert(retract_existing(*e, in) ? e->id : in.id);
    }
    for (const auto& [a, b] : peer_pairs) {
      if (retracted.contains(a) || retracted.contains(b)) continue;
      retracted.insert(peer_loser(*incoming_state.find(a), *incoming_state.find(b)).id);
    }
  }

  // Stage 4: union.
  std::vector<Fragment> merged;
  for (const auto& e : existing)
    if (!retracted.contains(e.id)) merged.push_back(e);
  std::vector<Fragment> added_now;
  for (const auto& in : incoming) {
    if (retracted.contains(in.id)) continue;
    merged.push_back(in);
    added_now.push_back(in);
    report.added.push_back(in.id);
  }
  report.retracted.assign(retracted.begin(), retracted.end());

  // Stage 5: elaboration, one emission per rule per call.
  if (can_elaborate(mode)) {
    for (std::size_t r = 0; r < rules.elaborations.size(); ++r) {
      const auto& rule = rules.elaborations[r];
      bool fired = std::any_of(added_now.begin(), added_now.end(),
                               [&](const Fragment& f) { return rule.trigger.matches(f); });
      if (!fired) continue;
      Fragment emitted = make_fragment(rule.emit, 0, clock, Origin::elaborated);
      emitted.persistence = 1.0;
      auto key = canonical_tuple(emitted);
      bool present = std::any_of(merged.begin(), merged.end(),
                                 [&](const Fragment& f) { return canonical_tuple(f) == key; });
      if (present) continue;

      const Fragment* rival = nullptr;
      for (const auto& f : merged)
        if (contradicts(f, emitted)) rival = &f;
      if (rival) {
        if (mode == AssimilationMode::elab)
          throw AssimilationConflict({{rival->id, 0, rival->prop->key}});
        ++report.conflicts_found;
        emitted.id = ids.next();
        if (retract_existing(*rival, emitted)) {
          FragmentId gone = rival->id;
          report.retracted.push_back(gone);
          std::erase_if(merged, [&](const Fragment& f) { return f.id == gone; });
          std::erase(report.added, gone);
        } else {
          report.retracted.push_back(emitted.id);
          continue;
        }
      } else {
        emitted.id = ids.next();
      }
      report.elaborated.push_back(emitted.id);
      report.elaborated_rules.push_back(r);
      merged.push_back(std::move(emitted));
    }
  }

  // Stage 6: abstracting merge over configured pattern groups.
  if (mode == AssimilationMode::abs) {
    for (const auto& pattern : rules.abstraction_groups) {
      Trigger match{std::nullopt, pattern};
      std::map<SectorSet, std::vector<Fragment>> groups;
      for (const auto& f : merged)
        if (match.matches(f)) groups[f.sectors].push_back(f);
      for (auto& [sectors, group] : groups) {
        if (group.size() < 2) continue;
        Fragment summary = merge_fragments(group, ids.next(), clock);
        std::set<FragmentId> consumed;
        for (const auto& g : group) consumed.insert(g.id);
        std::erase_if(merged, [&](const Fragment& f) { return consumed.contains(f.id); });
        std::erase_if(report.added, [&](FragmentId id) { return consumed.contains(id); });
        report.abstracted.push_back(summary.id);
        merged.push_back(std::move(summary));
      }
    }
  }

  std::sort(report.retracted.begin(), report.retracted.end());
  return {BeliefState(std::move(merged), clock), std::move(report)};
}

namespace {

BeliefState decay(const BeliefState& s, double dt, const ParameterConfig& config,
                  const std::string* sector, double new_clock) {
  if (dt < 0.0) throw std::invalid_argument("nullify: dt must be non-negative");
  std::vector<Fragment> keep;
  keep.reserve(s.size());
  for (const auto& f : s.fragments()) {
    Fragment g = f;
    if (sector == nullptr || f.in_sector(*sector)) {
      g.persistence = f.persistence * std::exp(-config.decay_rate(f.anchor) * dt);
      if (g.persistence <= config.delta) continue;
    }
    keep.push_back(std::move(g));
  }
  return BeliefState(std::move(keep), new_clock);
}

}  // namespace

BeliefState nullify(const BeliefState& s, double dt, const ParameterConfig& config) {
  return decay(s, dt, config, nullptr, s.clock() + dt);
}

BeliefState nullify_sector(const BeliefState& s, const std::string& sector, double dt,
                           const ParameterConfig& config) {
  return decay(s, dt, config, &sector, s.clock());
}

double half_life(const Fragment& f, const ParameterConfig& config) {
  if (f.persistence <= config.delta) return 0.0;
  const double rate = config.decay_rate(f.anchor);
  if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
  return std::log(f.persistence / config.delta) / rate;
}

BeliefState annihilate(const BeliefState& s) { return BeliefState::vacuum(s.clock()); }

BeliefState annihilate_sector(const BeliefState& s, const std::string& sector) {
  std::vector<Fragment> keep;
  for (const auto& f : s.fragments())
    if (!f.in_sector(sector)) keep.push_back(f);
  return BeliefState(std::move(keep), s.clock());
}

DriftResult drift(const BeliefState& s, std::span<const std::string> lexicon,
                  const ParameterConfig& config, DriftRng rng, IdAllocator& ids) {
  if (lexicon.empty()) return {s, rng, std::nullopt, true};
  const auto idx = static_cast<std::size_t>(rng.engine() % lexicon.size());
  FragmentSpec spec;
  spec.text = lexicon[idx];
  spec.sectors = {"perc"};
  spec.anchor = config.drift_anchor;
  Fragment f = make_fragment(spec, ids.next(), s.clock(), Origin::drifted);
  const FragmentId id = f.id;
  std::vector<Fragment> next = s.fragments();
  next.push_back(std::move(f));
  return {BeliefState(std::move(next), s.clock()), rng, id, false};
}

}  // namespace semanifold
