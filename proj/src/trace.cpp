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

#include "semanifold/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace semanifold {

using nlohmann::json;

namespace {

constexpr TraceKind kAllKinds[] = {
    TraceKind::ingest,       TraceKind::assimilate,      TraceKind::nullify_prune,
    TraceKind::drift,        TraceKind::query,           TraceKind::retrieve,
    TraceKind::integrate,    TraceKind::meta,            TraceKind::regulate_action,
    TraceKind::effort_skip,  TraceKind::action_decision, TraceKind::correction,
    TraceKind::warning,      TraceKind::assertion_result,
};

void write_canonical(const json& v, std::string& out) {
  switch (v.type()) {
    case json::value_t::null: out += "null"; break;
    case json::value_t::boolean: out += v.get<bool>() ? "true" : "false"; break;
    case json::value_t::number_integer: out += std::to_string(v.get<std::int64_t>()); break;
    case json::value_t::number_unsigned: out += std::to_string(v.get<std::uint64_t>()); break;
    case json::value_t::number_float: {
      double d = v.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        break;
      }
      if (d == 0.0) d = 0.0;  // drop the sign of negative zero
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.9g", d);
      out += buf;
      break;
    }
    case json::value_t::string: out += v.dump(); break;
    case json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : v) {
        if (!first) out.push_back(',');
        first = false;
        write_canonical(item, out);
      }
      out.push_back(']');
      break;
    }
    case json::value_t::object: {
      // nlohmann's default object type is an ordered std::map.
      out.push_back('{');
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out.push_back(',');
        first = false;
        out += json(key).dump();
        out.push_back(':');
        write_canonical(item, out);
      }
      out.push_back('}');
      break;
    }
    default: out += v.dump(); break;
  }
}

std::optional<std::string> first_difference(const json& a, const json& b, double tol,
                                            const std::string& path) {
  if (a.is_number() && b.is_number()) {
    if (std::fabs(a.get<double>() - b.get<double>()) <= tol) return std::nullopt;
    return path + ": " + canonical_json(a) + " vs " + canonical_json(b);
  }
  if (a.type() != b.type()) return path + ": type differs";
  if (a.is_object()) {
    for (const auto& [key, item] : a.items()) {
      if (!b.contains(key)) return path + "." + key + ": missing in golden";
      if (auto d = first_difference(item, b.at(key), tol, path + "." + key)) return d;
    }
    for (const auto& [key, item] : b.items())
      if (!a.contains(key)) return path + "." + key + ": missing in trace";
    return std::nullopt;
  }
  if (a.is_array()) {
    if (a.size() != b.size())
      return path + ": length " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      if (auto d = first_difference(a[i], b[i], tol, path + "[" + std::to_string(i) + "]")) return d;
    return std::nullopt;
  }
  if (a == b) return std::nullopt;
  return path + ": " + canonical_json(a) + " vs " + canonical_json(b);
}

}  // namespace

std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::ingest: return "ingest";
    case TraceKind::assimilate: return "assimilate";
    case TraceKind::nullify_prune: return "nullify_prune";
    case TraceKind::drift: return "drift";
    case TraceKind::query: return "query";
    case TraceKind::retrieve: return "retrieve";
    case TraceKind::integrate: return "integrate";
    case TraceKind::meta: return "meta";
    case TraceKind::regulate_action: return "regulate_action";
    case TraceKind::effort_skip: return "effort_skip";
    case TraceKind::action_decision: return "action_decision";
    case TraceKind::correction: return "correction";
    case TraceKind::warning: return "warning";
    case TraceKind::assertion_result: return "assertion_result";
  }
  return "?";
}

TraceKind parse_trace_kind(std::string_view s) {
  for (TraceKind k : kAllKinds)
    if (to_string(k) == s) return k;
  throw TraceError("unknown trace event kind '" + std::string(s) + "'");
}

json TraceEvent::to_json() const {
  return json{{"tick", tick}, {"seq", seq}, {"kind", std::string(to_string(kind))}, {"payload", payload}};
}

std::string canonical_json(const json& value) {
  std::string out;
  write_canonical(value, out);
  return out;
}

std::string Trace::serialize() const {
  std::string out = canonical_json(json{{"header", header}});
  out.push_back('\n');
  for (const auto& e : events) {
    out += canonical_json(e.to_json());
    out.push_back('\n');
  }
  return out;
}

void Trace::write(const std::filesystem::path& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw TraceError("cannot write trace to " + path.string());
  f << serialize();
}

Trace parse_trace(std::istream& in) {
  Trace t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw TraceError("trace line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!have_header) {
      if (!j.is_object() || !j.contains("header"))
        throw TraceError("trace line " + std::to_string(lineno) + ": missing header");
      t.header = j.at("header");
      have_header = true;
      continue;
    }
    try {
      TraceEvent e;
      e.tick = j.at("tick").get<double>();
      e.seq = j.at("seq").get<std::uint64_t>();
      e.kind = parse_trace_kind(j.at("kind").get<std::string>());
      e.payload = j.at("payload");
      t.events.push_back(std::move(e));
    } catch (const json::exception& e) {
      throw TraceError("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw TraceError("trace is empty");
  return t;
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw TraceError("cannot open trace " + path.string());
  return parse_trace(f);
}

VerifyReport compare_traces(const Trace& actual, const Trace& golden, double tolerance) {
  VerifyReport r;
  if (auto d = first_difference(actual.header, golden.header, tolerance, "header")) {
    r.match = false;
    r.divergence = 0;
    r.message = *d;
    return r;
  }
  const std::size_t n = std::min(actual.events.size(), golden.events.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto d = first_difference(actual.events[i].to_json(), golden.events[i].to_json(), tolerance,
                                  "event")) {
      r.match = false;
      r.divergence = i + 1;
      r.message = "event " + std::to_string(i) + " (" +
                  std::string(to_string(golden.events[i].kind)) + "): " + *d;
      return r;
    }
  }
  if (actual.events.size() != golden.events.size()) {
    r.match = false;
    r.divergence = n + 1;
    r.message = "length mismatch: trace has " + std::to_string(actual.events.size()) +
                " events, golden has " + std::to_string(golden.events.size());
    return r;
  }
  r.message = "match (" + std::to_string(n) + " events)";
  return r;
}

VerifyReport verify_golden(const Trace& actual, const std::filesystem::path& golden_path,
                           double tolerance) {
  return compare_traces(actual, read_trace(golden_path), tolerance);
}

}  // namespace semanifold
