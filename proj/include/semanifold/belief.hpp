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

// Fragments and belief states.
//
// A BeliefState is an immutable snapshot: a set of fragments with unique ids
// (kept sorted by id) and a logical clock. Every operator in the library takes
// states by const reference and returns a new state.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace semanifold {

using FragmentId = std::uint64_t;
using Tokens = std::vector<std::string>;
using SectorSet = std::set<std::string>;

enum class Polarity { positive, negative };

struct Proposition {
  std::string key;
  Polarity polarity = Polarity::positive;

  friend bool operator==(const Proposition&, const Proposition&) = default;
  friend auto operator<=>(const Proposition&, const Proposition&) = default;
};

enum class Origin { observed, elaborated, abstracted, retrieved, meta, drifted, synthetic };

std::string_view to_string(Polarity p);
std::string_view to_string(Origin o);
Polarity parse_polarity(std::string_view s);
Origin parse_origin(std::string_view s);

/// Lowercased ASCII alphanumeric runs; everything else separates tokens.
Tokens tokenize(std::string_view text);

struct Fragment {
  FragmentId id = 0;
  std::string text;  // display form; semantics live in `tokens`
  Tokens tokens;
  std::optional<Proposition> prop;
  SectorSet sectors{"perc"};
  int level = 0;
  double anchor = 1.0;
  double persistence = 1.0;
  double created_at = 0.0;
  Origin origin = Origin::observed;
  std::vector<FragmentId> members;  // constituents of an abstracted fragment
  int meta_depth = 0;               // recursion depth, meta fragments only

  bool in_sector(const std::string& sector) const { return sectors.contains(sector); }
  double mass() const { return anchor * persistence; }

  /// Throws std::invalid_argument when a field invariant is broken.
  void validate() const;
};

/// Id-agnostic identity of a fragment: sorted token multiset, proposition,
/// sectors and level. Used for duplicate detection and gauge observables.
using CanonicalTuple =
    std::tuple<Tokens, std::optional<Proposition>, SectorSet, int>;
CanonicalTuple canonical_tuple(const Fragment& f);

class BeliefState {
 public:
  BeliefState() = default;
  explicit BeliefState(std::vector<Fragment> fragments, double clock = 0.0);

  static BeliefState vacuum(double clock = 0.0) { return BeliefState({}, clock); }

  const std::vector<Fragment>& fragments() const { return fragments_; }
  double clock() const { return clock_; }
  std::size_t size() const { return fragments_.size(); }
  bool empty() const { return fragments_.empty(); }

  const Fragment* find(FragmentId id) const;
  bool contains(FragmentId id) const { return find(id) != nullptr; }
  FragmentId max_id() const { return fragments_.empty() ? 0 : fragments_.back().id; }
  double total_mass() const;

  BeliefState with_clock(double clock) const { return BeliefState(fragments_, clock); }

  friend bool operator==(const BeliefState&, const BeliefState&);

 private:
  std::vector<Fragment> fragments_;
  double clock_ = 0.0;
};

bool operator==(const Fragment& a, const Fragment& b);

/// Monotonic source of fragment ids. One per engine run.
class IdAllocator {
 public:
  explicit IdAllocator(FragmentId first = 1) : next_(first) {}
  FragmentId next() { return next_++; }
  FragmentId peek() const { return next_; }
  void reserve_above(FragmentId id) {
    if (id >= next_) next_ = id + 1;
  }

 private:
  FragmentId next_;
};

/// Structured observation: one fragment to be encoded.
struct FragmentSpec {
  std::string text;
  std::optional<std::string> name;
  std::optional<Proposition> prop;
  SectorSet sectors{"perc"};
  int level = 0;
  double anchor = 1.0;
  std::optional<double> persistence;  // memory preloads only
};

class SpecError : public std::invalid_argument {
 public:
  SpecError(std::size_t index, const std::string& what)
      : std::invalid_argument(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Encodes pre-segmented observations as fresh `observed` fragments created at
/// `clock`. Throws SpecError carrying the index of the first invalid spec.
BeliefState encode_observation(std::span<const FragmentSpec> specs, double clock,
                               IdAllocator& ids);

Fragment make_fragment(const FragmentSpec& spec, FragmentId id, double clock,
                       Origin origin);

BeliefState sector_projection(const BeliefState& s, const std::string& sector);

/// Share of anchor*persistence mass carried by fragments tagged `sector`.
double activation_density(const BeliefState& s, const std::string& sector);

/// Activation density for every sector present in `s`.
std::map<std::string, double> sector_activations(const BeliefState& s);

SectorSet sectors_of(const BeliefState& s);

inline bool is_vacuum(const BeliefState& s) { return s.empty(); }

}  // namespace semanifold
