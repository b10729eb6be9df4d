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

#include "semanifold/belief.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace semanifold {

std::string_view to_string(Polarity p) { return p == Polarity::positive ? "+" : "-"; }

std::string_view to_string(Origin o) {
  switch (o) {
    case Origin::observed: return "observed";
    case Origin::elaborated: return "elaborated";
    case Origin::abstracted: return "abstracted";
    case Origin::retrieved: return "retrieved";
    case Origin::meta: return "meta";
    case Origin::drifted: return "drifted";
    case Origin::synthetic: return "synthetic";
  }
  return "?";
}

Polarity parse_polarity(std::string_view s) {
  if (s == "+" || s == "pos" || s == "positive") return Polarity::positive;
  if (s == "-" || s == "neg" || s == "negative") return Polarity::negative;
  throw std::invalid_argument("unknown polarity '" + std::string(s) + "'");
}

Origin parse_origin(std::string_view s) {
  for (Origin o : {Origin::observed, Origin::elaborated, Origin::abstracted, Origin::retrieved,
                   Origin::meta, Origin::drifted, Origin::synthetic}) {
    if (to_string(o) == s) return o;
  }
  throw std::invalid_argument("unknown origin '" + std::string(s) + "'");
}

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void Fragment::validate() const {
  if (tokens.empty()) throw std::invalid_argument("fragment " + std::to_string(id) + ": empty text");
  if (!(persistence >= 0.0 && persistence <= 1.0))
    throw std::invalid_argument("fragment " + std::to_string(id) + ": persistence outside [0, 1]");
  if (!(anchor >= 0.0) || !std::isfinite(anchor))
    throw std::invalid_argument("fragment " + std::to_string(id) + ": negative anchor");
  if (level < 0) throw std::invalid_argument("fragment " + std::to_string(id) + ": negative level");
  if (members.empty() == (origin == Origin::abstracted))
    throw std::invalid_argument("fragment " + std::to_string(id) +
                                ": members must be present exactly for abstracted fragments");
}

CanonicalTuple canonical_tuple(const Fragment& f) {
  Tokens sorted = f.tokens;
  std::sort(sorted.begin(), sorted.end());
  return {std::move(sorted), f.prop, f.sectors, f.level};
}

bool operator==(const Fragment& a, const Fragment& b) {
  return a.id == b.id && a.text == b.text && a.tokens == b.tokens && a.prop == b.prop &&
         a.sectors == b.sectors && a.level == b.level && a.anchor == b.anchor &&
         a.persistence == b.persistence && a.created_at == b.created_at &&
         a.origin == b.origin && a.members == b.members && a.meta_depth == b.meta_depth;
}

BeliefState::BeliefState(std::vector<Fragment> fragments, double clock)
    : fragments_(std::move(fragments)), clock_(clock) {
  if (!(clock_ >= 0.0)) throw std::invalid_argument("belief state clock must be non-negative");
  std::sort(fragments_.begin(), fragments_.end(),
            [](const Fragment& a, const Fragment& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < fragments_.size(); ++i) {
    fragments_[i].validate();
    if (i > 0 && fragments_[i - 1].id == fragments_[i].id)
      throw std::invalid_argument("duplicate fragment id " + std::to_string(fragments_[i].id));
  }
}

const Fragment* BeliefState::find(FragmentId id) const {
  auto it = std::lower_bound(fragments_.begin(), fragments_.end(), id,
                             [](const Fragment& f, FragmentId v) { return f.id < v; });
  return (it != fragments_.end() && it->id == id) ? &*it : nullptr;
}

double BeliefState::total_mass() const {
  double m = 0.0;
  for (const auto& f : fragments_) m += f.mass();
  return m;
}

bool operator==(const BeliefState& a, const BeliefState& b) {
  return a.clock_ == b.clock_ && a.fragments_ == b.fragments_;
}

Fragment make_fragment(const FragmentSpec& spec, FragmentId id, double clock, Origin origin) {
  Fragment f;
  f.id = id;
  f.text = spec.text;
  f.tokens = tokenize(spec.text);
  f.prop = spec.prop;
  f.sectors = spec.sectors;
  f.level = spec.level;
  f.anchor = spec.anchor;
  f.persistence = spec.persistence.value_or(1.0);
  f.created_at = clock;
  f.origin = origin;
  return f;
}

BeliefState encode_observation(std::span<const FragmentSpec> specs, double clock,
                               IdAllocator& ids) {
  // Validate everything before consuming ids so a rejected batch leaves the
  // allocator untouched.
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    if (tokenize(spec.text).empty())
      throw SpecError(i, "observation spec " + std::to_string(i) + ": empty text");
    if (spec.sectors.empty())
      throw SpecError(i, "observation spec " + std::to_string(i) + ": no sector");
    if (!(spec.anchor >= 0.0) || spec.level < 0)
      throw SpecError(i, "observation spec " + std::to_string(i) + ": bad anchor or level");
  }
  std::vector<Fragment> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    Fragment f = make_fragment(spec, ids.next(), clock, Origin::observed);
    f.persistence = 1.0;
    out.push_back(std::move(f));
  }
  return BeliefState(std::move(out), clock);
}

BeliefState sector_projection(const BeliefState& s, const std::string& sector) {
  std::vector<Fragment> keep;
  for (const auto& f : s.fragments())
    if (f.in_sector(sector)) keep.push_back(f);
  return BeliefState(std::move(keep), s.clock());
}

double activation_density(const BeliefState& s, const std::string& sector) {
  double total = 0.0, tagged = 0.0;
  for (const auto& f : s.fragments()) {
    total += f.mass();
    if (f.in_sector(sector)) tagged += f.mass();
  }
  return total > 0.0 ? tagged / total : 0.0;
}

std::map<std::string, double> sector_activations(const BeliefState& s) {
  std::map<std::string, double> out;
  for (const auto& sector : sectors_of(s)) out[sector] = activation_density(s, sector);
  return out;
}

SectorSet sectors_of(const BeliefState& s) {
  SectorSet out;
  for (const auto& f : s.fragments()) out.insert(f.sectors.begin(), f.sectors.end());
  return out;
}

}  // namespace semanifold
