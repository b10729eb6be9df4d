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

#include "semanifold/embedding.hpp"

#include <cmath>

namespace semanifold {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void normalize_in_place(Embedding& v) {
  double n = norm(v);
  if (n == 0.0) return;
  for (double& x : v) x /= n;
}

}  // namespace

std::uint64_t token_hash(std::string_view token) {
  std::uint64_t h = kFnvOffset;
  for (char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

std::size_t token_cell(std::string_view token, std::size_t dim) {
  return static_cast<std::size_t>(token_hash(token) % dim);
}

Embedding embed_tokens(std::span<const std::string> tokens, std::size_t dim) {
  Embedding v(dim, 0.0);
  for (const auto& t : tokens) v[token_cell(t, dim)] += 1.0;
  normalize_in_place(v);
  return v;
}

Embedding embed_fragment(const Fragment& f, std::size_t dim) {
  return embed_tokens(f.tokens, dim);
}

Embedding embed_state(const BeliefState& s, std::size_t dim) {
  Embedding acc(dim, 0.0);
  if (s.empty()) return acc;
  // A state whose fragments all carry zero mass still has content; fall back
  // to uniform weights so only the vacuum embeds to zero.
  const bool uniform = s.total_mass() <= 0.0;
  for (const auto& f : s.fragments()) {
    const double w = uniform ? 1.0 : f.mass();
    if (w == 0.0) continue;
    Embedding e = embed_fragment(f, dim);
    for (std::size_t i = 0; i < dim; ++i) acc[i] += w * e[i];
  }
  normalize_in_place(acc);
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

Embedding subtract(std::span<const double> a, std::span<const double> b) {
  Embedding out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - (i < b.size() ? b[i] : 0.0);
  return out;
}

bool is_zero(std::span<const double> a) {
  for (double x : a)
    if (x != 0.0) return false;
  return true;
}

}  // namespace semanifold
