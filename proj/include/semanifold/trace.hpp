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

// Run traces as JSON Lines.
//
// Line 1 is a header object {"header": {...}}; every following line is one
// event {"kind", "payload", "seq", "tick"}. Serialization is canonical: keys
// sorted, floats printed with 9 significant digits, so equal runs produce
// byte-identical files.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace semanifold {

enum class TraceKind {
  ingest,
  assimilate,
  nullify_prune,
  drift,
  query,
  retrieve,
  integrate,
  meta,
  regulate_action,
  effort_skip,
  action_decision,
  correction,
  warning,
  assertion_result,
};

std::string_view to_string(TraceKind k);
TraceKind parse_trace_kind(std::string_view s);

struct TraceEvent {
  double tick = 0.0;
  std::uint64_t seq = 0;
  TraceKind kind = TraceKind::warning;
  nlohmann::json payload = nlohmann::json::object();

  nlohmann::json to_json() const;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Canonical text form of a JSON value.
std::string canonical_json(const nlohmann::json& value);

struct Trace {
  nlohmann::json header = nlohmann::json::object();
  std::vector<TraceEvent> events;

  std::string serialize() const;
  void write(const std::filesystem::path& path) const;
};

/// Parses a serialized trace. Throws TraceError on malformed input.
Trace parse_trace(std::istream& in);
Trace read_trace(const std::filesystem::path& path);

struct VerifyReport {
  bool match = true;
  std::optional<std::size_t> divergence;  // 0 = header, i = event i-1
  std::string message;
};

/// Line-by-line comparison; numbers agree within `tolerance` (absolute).
VerifyReport compare_traces(const Trace& actual, const Trace& golden, double tolerance = 1e-9);
VerifyReport verify_golden(const Trace& actual, const std::filesystem::path& golden_path,
                           double tolerance = 1e-9);

}  // namespace semanifold
