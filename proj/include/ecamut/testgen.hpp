// Copyright 2026 The ecamut Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded random context flows and test suites.
//
// Random stream contract (stable across platforms and reimplementations):
//   - engine: MT19937-64 (std::mt19937_64) seeded with the 64-bit suite seed
//     through its single-integer seeding constructor;
//   - bounded draw in [lo, hi]: let r = hi - lo + 1 as an unsigned 64-bit
//     span (r = 0 meaning the full 2^64 range). Draw x; when r != 0, reject
//     and redraw while x >= 2^64 - (2^64 mod r); return lo + (x mod r);
//   - instance: one bounded draw per property in schema order;
//   - flow: successive instances are redrawn whole until they differ from
//     the previous one;
//   - suite: flows generated in order from one stream.

#ifndef ECAMUT_TESTGEN_HPP
#define ECAMUT_TESTGEN_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ecamut/io.hpp"
#include "ecamut/model.hpp"
#include "ecamut/text.hpp"
#include "json.hpp"

namespace ecamut {

using Rng = std::mt19937_64;

inline constexpr std::string_view kPrngName = "mt19937_64";

inline Value uniform_value(Rng& rng, Value lo, Value hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  std::uint64_t x = rng();
  if (span == 0) return static_cast<Value>(x);  // full 64-bit range
  const std::uint64_t limit = std::uint64_t(0) - (std::uint64_t(0) - span) % span;  // 2^64 - 2^64 mod span
  while (limit != 0 && x >= limit) x = rng();
  return static_cast<Value>(static_cast<std::uint64_t>(lo) + x % span);
}

inline ContextInstance random_instance(const ContextSchema& schema, Rng& rng) {
  ContextInstance inst;
  inst.reserve(schema.arity());
  for (const auto& p : schema.properties) inst.push_back(uniform_value(rng, p.lower, p.upper));
  return inst;
}

inline bool has_successor(const ContextSchema& schema) {
  for (const auto& p : schema.properties)
    if (p.lower != p.upper) return true;
  return false;
}

inline ContextFlow random_flow(const ContextSchema& schema, std::size_t length, Rng& rng) {
  if (length >= 2 && !has_successor(schema))
    throw std::invalid_argument("every property has a single value; no flow longer than 1 exists");
  ContextFlow flow;
  flow.instances.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    ContextInstance inst = random_instance(schema, rng);
    if (i > 0)
      while (inst == flow.instances.back()) inst = random_instance(schema, rng);
    flow.instances.push_back(std::move(inst));
  }
  return flow;
}

struct TestSuite {
  std::vector<ContextFlow> flows;
  std::uint64_t seed = 0;
  std::size_t flow_length = 0;
  std::size_t flow_count = 0;

  friend bool operator==(const TestSuite&, const TestSuite&) = default;
};

inline TestSuite random_suite(const ContextSchema& schema, std::size_t flow_count,
                              std::size_t flow_length, std::uint64_t seed) {
  Rng rng(seed);
  TestSuite suite{{}, seed, flow_length, flow_count};
  suite.flows.reserve(flow_count);
  for (std::size_t i = 0; i < flow_count; ++i) suite.flows.push_back(random_flow(schema, flow_length, rng));
  return suite;
}

// ---------------------------------------------------------------------------
// On-disk suites: <dir>/flow-NNN.flow plus <dir>/suite.json
// ---------------------------------------------------------------------------

inline std::string flow_file_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "flow-%03zu.flow", i);
  return buf;
}

/// suite.json:
///   {"format": "ecamut-suite/1", "prng": "mt19937_64", "seed": S,
///    "flow_count": N, "flow_length": L, "flows": ["flow-000.flow", ...]}
inline void write_suite(const TestSuite& suite, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < suite.flows.size(); ++i) {
    write_text_file(dir / flow_file_name(i), serialize_flow(suite.flows[i]));
    files.push_back(flow_file_name(i));
  }
  nlohmann::json index = {{"format", "ecamut-suite/1"},     {"prng", kPrngName},
                          {"seed", suite.seed},             {"flow_count", suite.flow_count},
                          {"flow_length", suite.flow_length}, {"flows", files}};
  write_text_file(dir / "suite.json", index.dump(2) + "\n");
}

inline TestSuite read_suite(const std::filesystem::path& dir, const ContextSchema& schema) {
  auto index = nlohmann::json::parse(read_text_file(dir / "suite.json"));
  TestSuite suite;
  suite.seed = index.value("seed", std::uint64_t{0});
  suite.flow_length = index.value("flow_length", std::size_t{0});
  for (const auto& f : index.at("flows")) {
    auto path = dir / f.get<std::string>();
    try {
      suite.flows.push_back(parse_flow(read_text_file(path), schema));
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.message(), e.span());
    }
  }
  suite.flow_count = suite.flows.size();
  return suite;
}

}  // namespace ecamut

#endif  // ECAMUT_TESTGEN_HPP
