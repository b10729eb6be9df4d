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

#include "semanifold/tower.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "semanifold/geometry.hpp"

namespace semanifold {

namespace {

constexpr double kTieTolerance = 1e-12;

std::string join(const Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

Tokens multiset_intersection(std::span<const Fragment> members) {
  std::map<std::string, int> common;
  for (const auto& t : members.front().tokens) ++common[t];
  for (std::size_t i = 1; i < members.size(); ++i) {
    std::map<std::string, int> here;
    for (const auto& t : members[i].tokens) ++here[t];
    for (auto& [tok, n] : common) {
      auto it = here.find(tok);
      n = std::min(n, it == here.end() ? 0 : it->second);
    }
  }
  // Keep the first member's token order.
  Tokens out;
  for (const auto& t : members.front().tokens) {
    auto it = common.find(t);
    if (it != common.end() && it->second > 0) {
      out.push_back(t);
      --it->second;
    }
  }
  return out;
}

Tokens heaviest_union(std::span<const Fragment> members) {
  std::map<std::string, double> weight;
  for (const auto& m : members)
    for (const auto& t : m.tokens) weight[t] += m.mass();
  std::vector<std::pair<std::string, double>> ranked(weight.begin(), weight.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Tokens out;
  for (std::size_t i = 0; i < ranked.size() && i < kSummaryTokenCap; ++i)
    out.push_back(ranked[i].first);
  return out;
}

}  // namespace

Fragment merge_fragments(std::span<const Fragment> members, FragmentId id, double clock) {
  if (members.size() < 2) throw TowerError("merge_fragments needs at least two members");
  Fragment out;
  out.id = id;
  out.tokens = multiset_intersection(members);
  if (out.tokens.empty()) out.tokens = heaviest_union(members);
  out.text = join(out.tokens);
  out.sectors = members.front().sectors;
  out.anchor = 0.0;
  out.persistence = 0.0;
  out.level = 0;
  out.created_at = clock;
  out.origin = Origin::abstracted;
  std::optional<Proposition> shared = members.front().prop;
  for (const auto& m : members) {
    out.anchor = std::max(out.anchor, m.anchor);
    out.persistence = std::max(out.persistence, m.persistence);
    out.level = std::max(out.level, m.level + 1);
    out.members.push_back(m.id);
    if (m.prop != shared) shared.reset();
  }
  out.prop = shared;
  return out;
}

BeliefState abstract_step(const BeliefState& s, const ParameterConfig& config, IdAllocator& ids) {
  if (s.empty()) throw TowerError("abstraction of the vacuum is undefined");
  ids.reserve_above(s.max_id());

  std::map<SectorSet, std::vector<Fragment>> groups;
  for (const auto& f : s.fragments()) groups[f.sectors].push_back(f);

  std::vector<Fragment> out;
  for (auto& [sectors, pool] : groups) {
    std::vector<Embedding> emb;
    emb.reserve(pool.size());
    for (const auto& f : pool) emb.push_back(embed_fragment(f, config.embed_dim));
    std::vector<bool> used(pool.size(), false);
    std::size_t remaining = pool.size();

    while (remaining >= 2) {
      std::size_t bi = 0, bj = 0;
      double best = -2.0;
      bool found = false;
      // Pool is id-ordered, so the first pair reaching a tied similarity is
      // the lowest id pair.
      for (std::size_t i = 0; i < pool.size(); ++i) {
        if (used[i]) continue;
        for (std::size_t j = i + 1; j < pool.size(); ++j) {
          if (used[j]) continue;
          const double c = cosine(emb[i], emb[j]);
          if (!found || c > best + kTieTolerance) {
            best = c;
            bi = i;
            bj = j;
            found = true;
          }
        }
      }
      used[bi] = used[bj] = true;
      remaining -= 2;
      const Fragment pair[2] = {pool[bi], pool[bj]};
      out.push_back(merge_fragments(pair, ids.next(), s.clock()));
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (used[i]) continue;
      Fragment pass = pool[i];
      pass.level += 1;
      out.push_back(std::move(pass));
    }
  }
  return BeliefState(std::move(out), s.clock());
}

BeliefState elaborate_step(const BeliefState& s, std::span<const BeliefState> history,
                           IdAllocator& ids) {
  ids.reserve_above(s.max_id());
  for (const auto& h : history) ids.reserve_above(h.max_id());

  auto lookup = [&](FragmentId id) -> const Fragment* {
    for (auto it = history.rbegin(); it != history.rend(); ++it)
      if (const Fragment* f = it->find(id)) return f;
    return nullptr;
  };

  std::vector<Fragment> out;
  for (const auto& f : s.fragments()) {
    if (f.origin != Origin::abstracted) {
      Fragment pass = f;
      pass.level = std::max(0, f.level - 1);
      out.push_back(std::move(pass));
      continue;
    }
    std::vector<const Fragment*> found;
    for (FragmentId m : f.members)
      if (const Fragment* hit = lookup(m)) found.push_back(hit);
    const int level = std::max(0, f.level - 1);
    if (found.size() == f.members.size()) {
      for (const Fragment* m : found) {
        Fragment copy = *m;
        copy.id = ids.next();
        copy.level = level;
        out.push_back(std::move(copy));
      }
    } else {
      Fragment copy = f;
      copy.id = ids.next();
      copy.level = level;
      copy.origin = Origin::synthetic;
      copy.members.clear();
      out.push_back(std::move(copy));
    }
  }
  return BeliefState(std::move(out), s.clock());
}

double roundtrip_loss(const BeliefState& s, const ParameterConfig& config) {
  if (s.empty()) throw TowerError("round-trip loss of the vacuum is undefined");
  IdAllocator ids(s.max_id() + 1);
  BeliefState up = abstract_step(s, config, ids);
  BeliefState down = elaborate_step(up, {}, ids);
  return distance(s, down, config.embed_dim);
}

TowerTrajectory build_tower(const BeliefState& seed, int max_k, const ParameterConfig& config,
                            IdAllocator& ids) {
  if (max_k < 1) throw TowerError("build_tower: max_k must be at least 1");
  if (seed.empty()) throw TowerError("build_tower: seed must be non-vacuum");
  TowerTrajectory t;
  t.levels.push_back(seed);
  for (int k = 0; k < max_k; ++k) {
    BeliefState next = abstract_step(t.levels.back(), config, ids);
    t.fixpoint_gap = distance(next, t.levels.back(), config.embed_dim);
    t.levels.push_back(std::move(next));
    if (t.fixpoint_gap < config.eps_fix) {
      t.converged = true;
      break;
    }
  }
  return t;
}

EpistemicAxis derive_axis(const TowerTrajectory& t, const std::string& label, bool null_seed,
                          std::size_t dim) {
  if (!t.converged || t.levels.empty()) throw TowerError("axis '" + label + "': tower not converged");
  EpistemicAxis axis;
  axis.label = label;
  axis.origin = null_seed ? Embedding(dim, 0.0) : embed_state(t.levels.front(), dim);
  axis.direction = subtract(embed_state(t.levels.back(), dim), axis.origin);
  if (norm(axis.direction) < 1e-12) throw TowerError("axis '" + label + "': degenerate direction");
  return axis;
}

}  // namespace semanifold
