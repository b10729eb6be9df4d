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

// Deterministic token-hash embeddings.
//
// Every token is hashed with 64-bit FNV-1a into one of `dim` cells; a text is
// the L2-normalised count vector over those cells. The hash does not depend on
// the run seed, so embeddings are stable across runs and platforms.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "semanifold/belief.hpp"

namespace semanifold {

using Embedding = std::vector<double>;

std::uint64_t token_hash(std::string_view token);
std::size_t token_cell(std::string_view token, std::size_t dim);

Embedding embed_tokens(std::span<const std::string> tokens, std::size_t dim);
Embedding embed_fragment(const Fragment& f, std::size_t dim);

/// Mean of fragment embeddings weighted by anchor*persistence, normalised.
/// The vacuum embeds to the zero vector.
Embedding embed_state(const BeliefState& s, std::size_t dim);

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
/// Cosine similarity; 0 when either side is the zero vector.
double cosine(std::span<const double> a, std::span<const double> b);
Embedding subtract(std::span<const double> a, std::span<const double> b);
bool is_zero(std::span<const double> a);

}  // namespace semanifold
