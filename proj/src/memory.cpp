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

#include "semanifold/memory.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "semanifold/embedding.hpp"

namespace semanifold {

std::string_view to_string(QuerySource s) {
  switch (s) {
    case QuerySource::goal: return "goal";
    case QuerySource::coherence: return "coherence";
    case QuerySource::associative: return "associative";
    case QuerySource::scripted: return "scripted";
  }
  return "?";
}

QuerySource parse_query_source(std::string_view s) {
  if (s == "goal") return QuerySource::goal;
  if (s == "coherence") return QuerySource::coherence;
  if (s == "associative") return QuerySource::associative;
  if (s == "scripted") return QuerySource::scripted;
  throw std::invalid_argument("unknown query source '" + std::string(s) + "'");
}

namespace {

Tokens distinct_sorted(Tokens t) {
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

bool listed(std::span<const FragmentId> ids, FragmentId id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

}  // namespace

bool is_goal_fragment(const Fragment& f, const ParameterConfig& config) {
  return std::find(f.tokens.begin(), f.tokens.end(), config.goal_marker) != f.tokens.end();
}

std::optional<QueryCue> generate_query(const BeliefState& active, QuerySource trigger,
                                       const ParameterConfig& config,
                                       std::span<const FragmentId> already_cued) {
  switch (trigger) {
    case QuerySource::goal: {
      const Fragment* best = nullptr;
      for (const auto& f : active.fragments()) {
        if (!is_goal_fragment(f, config)) continue;
        if (listed(already_cued, f.id)) continue;
        if (!best || f.anchor > best->anchor) best = &f;
      }
      if (!best) return std::nullopt;
      Tokens body;
      for (const auto& t : best->tokens)
        if (t != config.goal_marker) body.push_back(t);
      if (body.empty()) return std::nullopt;
      return QueryCue{distinct_sorted(std::move(body)), QuerySource::goal, best->id};
    }
    case QuerySource::coherence: {
      for (const auto& [a, b] : internal_conflicts(active)) {
        if (listed(already_cued, a) && listed(already_cued, b)) continue;
        Tokens t = active.find(a)->tokens;
        const auto& other = active.find(b)->tokens;
        t.insert(t.end(), other.begin(), other.end());
        return QueryCue{distinct_sorted(std::move(t)), QuerySource::coherence, a};
      }
      return std::nullopt;
    }
    case QuerySource::associative: {
      const Fragment* latest = nullptr;
      for (const auto& f : active.fragments())
        if (!latest || f.created_at >= latest->created_at) latest = &f;
      if (!latest || listed(already_cued, latest->id)) return std::nullopt;
      return QueryCue{distinct_sorted(latest->tokens), QuerySource::associative, latest->id};
    }
    case QuerySource::scripted: return std::nullopt;
  }
  return std::nullopt;
}

double retrieval_score(const QueryCue& cue, const Fragment& f, std::size_t dim) {
  return cosine(embed_tokens(cue.tokens, dim), embed_fragment(f, dim)) * f.persistence;
}

BeliefState retrieve(const MemoryStore& mem, const QueryCue& cue, const ParameterConfig& config,
                     const std::optional<std::string>& sector) {
  std::vector<Fragment> hits;
  const Embedding q = embed_tokens(cue.tokens, config.embed_dim);
  for (const auto& f : mem.fragments.fragments()) {
    if (sector && !f.in_sector(*sector)) continue;
    const double score = cosine(q, embed_fragment(f, config.embed_dim)) * f.persistence;
    if (score < config.tau_retrieval) continue;
    Fragment copy = f;
    copy.origin = Origin::retrieved;
    copy.members.clear();
    hits.push_back(std::move(copy));
  }
  return BeliefState(std::move(hits), mem.fragments.clock());
}

IntegrationResult integrate_retrieved(const BeliefState& current, const BeliefState& retrieved,
                                      const MemoryStore& mem, const RuleSet& rules,
                                      const ParameterConfig& config, IdAllocator& ids) {
  if (retrieved.empty()) return {current, mem, {}, {}};
  auto [state, report] = assimilate(current, retrieved, AssimilationMode::automatic, rules, config, ids);

  // store id -> id of the active fragment carrying it
  std::map<FragmentId, FragmentId> survivors;
  for (const auto& f : retrieved.fragments())
    if (state.contains(f.id)) survivors[f.id] = f.id;
  for (const auto& [incoming, existing] : report.refreshed) survivors[incoming] = existing;

  std::vector<Fragment> active = state.fragments();
  for (auto& f : active) {
    for (const auto& [store_id, active_id] : survivors) {
      if (f.id != active_id) continue;
      f.anchor = std::max(f.anchor, config.reanchor_floor);
      f.persistence = 1.0;
    }
  }
  std::vector<Fragment> stored = mem.fragments.fragments();
  std::vector<FragmentId> reanchored;
  for (auto& f : stored) {
    if (!survivors.contains(f.id)) continue;
    f.anchor = std::max(f.anchor, config.reanchor_floor);
    f.persistence = 1.0;
    reanchored.push_back(f.id);
  }
  return {BeliefState(std::move(active), state.clock()),
          MemoryStore{BeliefState(std::move(stored), mem.fragments.clock())}, std::move(report),
          std::move(reanchored)};
}

}  // namespace semanifold
