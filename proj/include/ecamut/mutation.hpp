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

// Mutation operators for action-based adaptation policies.
//
// Environmental-completeness faults (a property or some of its values are
// ignored):
//   ICP   delete every rule triggered by property p
//   ISV   delete every rule triggered when property p has level v
//   IMV   the union of ISV over n couples with distinct properties; kept only
//         when the deleted rules trigger on at least two properties
//
// Adaptation-correctness faults (the adaptation fires but is wrong):
//   SRA   swap the action values of two rules acting on the same property
//   MRCV  widen a <, <=, >, >= condition by moving its constant

#ifndef ECAMUT_MUTATION_HPP
#define ECAMUT_MUTATION_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "ecamut/io.hpp"
#include "ecamut/model.hpp"
#include "ecamut/text.hpp"
#include "json.hpp"

namespace ecamut {

enum class Operator { ICP, ISV, IMV, SRA, MRCV };

inline constexpr Operator kAllOperators[] = {Operator::ICP, Operator::ISV, Operator::IMV,
                                             Operator::SRA, Operator::MRCV};

inline std::string_view to_string(Operator op) {
  switch (op) {
    case Operator::ICP: return "ICP";
    case Operator::ISV: return "ISV";
    case Operator::IMV: return "IMV";
    case Operator::SRA: return "SRA";
    case Operator::MRCV: return "MRCV";
  }
  return "?";
}

inline std::optional<Operator> parse_operator(std::string_view s) {
  auto u = to_lower(s);
  for (auto op : kAllOperators)
    if (to_lower(to_string(op)) == u) return op;
  return std::nullopt;
}

struct PropertyValue {
  std::string property;
  Level level;

  friend bool operator==(const PropertyValue&, const PropertyValue&) = default;
};

struct IcpParams {
  std::string property;
  friend bool operator==(const IcpParams&, const IcpParams&) = default;
};
struct IsvParams {
  PropertyValue couple;
  friend bool operator==(const IsvParams&, const IsvParams&) = default;
};
struct ImvParams {
  std::vector<PropertyValue> couples;
  friend bool operator==(const ImvParams&, const ImvParams&) = default;
};
struct SraParams {
  std::size_t first = 0;
  std::size_t second = 0;
  friend bool operator==(const SraParams&, const SraParams&) = default;
};
struct MrcvParams {
  std::size_t rule = 0;
  Value old_value = 0;
  Value new_value = 0;
  friend bool operator==(const MrcvParams&, const MrcvParams&) = default;
};

using MutationParams = std::variant<IcpParams, IsvParams, ImvParams, SraParams, MrcvParams>;

struct Mutant {
  std::string id;  // e.g. "ISV-003"; assigned by enumerate_mutants
  Operator op = Operator::ICP;
  MutationParams params;
  Policy policy;
  std::set<std::size_t> affected_rules;  // 0-based indices into the original
};

struct MutantSet {
  Policy original;
  std::vector<Mutant> mutants;
  std::size_t raw_count = 0;
  std::size_t deduped_count = 0;

  std::size_t size() const { return mutants.size(); }
  bool empty() const { return mutants.empty(); }
};

/// Short human-readable parameter summary, e.g. "LOAD='high',requestdensity='low'".
inline std::string describe_params(const MutationParams& params) {
  struct V {
    std::string operator()(const IcpParams& p) const { return p.property; }
    std::string operator()(const IsvParams& p) const {
      return p.couple.property + "='" + p.couple.level.str() + "'";
    }
    std::string operator()(const ImvParams& p) const {
      std::string s;
      for (std::size_t i = 0; i < p.couples.size(); ++i) {
        if (i) s += ",";
        s += p.couples[i].property + "='" + p.couples[i].level.str() + "'";
      }
      return s;
    }
    std::string operator()(const SraParams& p) const {
      return "rules " + std::to_string(p.first) + "," + std::to_string(p.second);
    }
    std::string operator()(const MrcvParams& p) const {
      return "rule " + std::to_string(p.rule) + " " + std::to_string(p.old_value) + "->" +
             std::to_string(p.new_value);
    }
  };
  return std::visit(V{}, params);
}

inline nlohmann::json params_to_json(const MutationParams& params) {
  struct V {
    nlohmann::json operator()(const IcpParams& p) const { return {{"property", p.property}}; }
    nlohmann::json operator()(const IsvParams& p) const {
      return {{"property", p.couple.property}, {"level", p.couple.level.str()}};
    }
    nlohmann::json operator()(const ImvParams& p) const {
      nlohmann::json cs = nlohmann::json::array();
      for (const auto& c : p.couples) cs.push_back({{"property", c.property}, {"level", c.level.str()}});
      return {{"couples", cs}};
    }
    nlohmann::json operator()(const SraParams& p) const {
      return {{"rules", {p.first, p.second}}};
    }
    nlohmann::json operator()(const MrcvParams& p) const {
      return {{"rule", p.rule}, {"old_value", p.old_value}, {"new_value", p.new_value}};
    }
  };
  return std::visit(V{}, params);
}

inline MutationParams params_from_json(Operator op, const nlohmann::json& j) {
  switch (op) {
    case Operator::ICP: return IcpParams{j.at("property").get<std::string>()};
    case Operator::ISV:
      return IsvParams{{j.at("property").get<std::string>(), Level(j.at("level").get<std::string>())}};
    case Operator::IMV: {
      ImvParams p;
      for (const auto& c : j.at("couples"))
        p.couples.push_back({c.at("property").get<std::string>(), Level(c.at("level").get<std::string>())});
      return p;
    }
    case Operator::SRA:
      return SraParams{j.at("rules").at(0).get<std::size_t>(), j.at("rules").at(1).get<std::size_t>()};
    case Operator::MRCV:
      return MrcvParams{j.at("rule").get<std::size_t>(), j.at("old_value").get<Value>(),
                        j.at("new_value").get<Value>()};
  }
  throw std::invalid_argument("unknown operator");
}

namespace detail {

inline Policy without(const Policy& p, const std::set<std::size_t>& drop) {
  Policy out;
  for (std::size_t i = 0; i < p.rules.size(); ++i)
    if (!drop.count(i)) out.rules.push_back(p.rules[i]);
  return out;
}

/// Rules executable when `property` has level `level`.
inline std::set<std::size_t> rules_on(const Policy& p, const std::string& property, const Level& level) {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < p.rules.size(); ++i)
    if (p.rules[i].trigger.property == property && p.rules[i].trigger.accepts(level)) out.insert(i);
  return out;
}

constexpr Value kMax = std::numeric_limits<Value>::max();
constexpr Value kMin = std::numeric_limits<Value>::min();

inline Value widen_up(Value v);

/// Lowers v: v/10 for positive v, v-1 when that does not move it; negative
/// values mirror widen_up.
inline Value widen_down(Value v) {
  if (v < 0) return v == kMin ? kMin : -widen_up(-v);
  Value d = v / 10;
  return d != v ? d : v - 1;
}

/// Raises v: v*10 for positive v, 10 for zero; negative values mirror
/// widen_down.
inline Value widen_up(Value v) {
  if (v < 0) return v == kMin ? kMin / 10 : -widen_down(-v);
  if (v == 0) return 10;
  return v > kMax / 10 ? (v == kMax ? kMax : v + 1) : v * 10;
}

}  // namespace detail

/// New constant for a widened condition, or nullopt for == and != (and for
/// constants already at the representable limit).
inline std::optional<Value> mrcv_value(CmpOp op, Value v) {
  Value nv;
  switch (op) {
    case CmpOp::Lt:
    case CmpOp::Le: nv = detail::widen_up(v); break;
    case CmpOp::Gt:
    case CmpOp::Ge: nv = detail::widen_down(v); break;
    default: return std::nullopt;
  }
  if (nv == v) return std::nullopt;
  return nv;
}

inline std::vector<Mutant> gen_icp(const Policy& policy, const ContextSchema& schema) {
  std::vector<Mutant> out;
  for (const auto& prop : schema.properties) {
    std::set<std::size_t> drop;
    for (std::size_t i = 0; i < policy.rules.size(); ++i)
      if (policy.rules[i].trigger.property == prop.name) drop.insert(i);
    if (drop.empty()) continue;
    out.push_back({"", Operator::ICP, IcpParams{prop.name}, detail::without(policy, drop), drop});
  }
  return out;
}

inline std::vector<Mutant> gen_isv(const Policy& policy, const ContextSchema& schema) {
  std::vector<Mutant> out;
  for (const auto& prop : schema.properties) {
    for (const auto& iv : prop.levels) {
      auto drop = detail::rules_on(policy, prop.name, iv.name);
      if (drop.empty()) continue;
      out.push_back({"", Operator::ISV, IsvParams{{prop.name, iv.name}},
                     detail::without(policy, drop), drop});
    }
  }
  return out;
}

/// Every choice of n distinct properties (schema order) and one declared
/// level for each (declaration order).
inline std::vector<Mutant> gen_imv(const Policy& policy, const ContextSchema& schema, std::size_t n = 2) {
  if (n < 2) throw std::invalid_argument("IMV needs at least two couples");
  std::vector<Mutant> out;
  const auto& props = schema.properties;
  if (n > props.size()) return out;

  std::vector<std::size_t> chosen(n);
  std::vector<std::size_t> level_idx(n);

  auto emit = [&] {
    std::set<std::size_t> drop;
    ImvParams params;
    for (std::size_t k = 0; k < n; ++k) {
      const auto& prop = props[chosen[k]];
      const auto& lvl = prop.levels[level_idx[k]].name;
      params.couples.push_back({prop.name, lvl});
      auto d = detail::rules_on(policy, prop.name, lvl);
      drop.insert(d.begin(), d.end());
    }
    std::set<std::string> touched;
    for (auto i : drop) touched.insert(policy.rules[i].trigger.property);
    if (touched.size() < 2) return;
    out.push_back({"", Operator::IMV, std::move(params), detail::without(policy, drop), drop});
  };

  // Levels: odometer over the chosen properties' level lists.
  auto over_levels = [&] {
    std::fill(level_idx.begin(), level_idx.end(), 0);
    while (true) {
      emit();
      std::size_t k = n;
      while (k > 0) {
        --k;
        if (++level_idx[k] < props[chosen[k]].levels.size()) break;
        level_idx[k] = 0;
        if (k == 0) return;
      }
    }
  };

  // Properties: lexicographic n-combinations.
  for (std::size_t k = 0; k < n; ++k) chosen[k] = k;
  while (true) {
    over_levels();
    std::size_t k = n;
    while (k > 0 && chosen[k - 1] == props.size() - n + (k - 1)) --k;
    if (k == 0) break;
    ++chosen[k - 1];
    for (std::size_t j = k; j < n; ++j) chosen[j] = chosen[j - 1] + 1;
  }
  return out;
}

inline std::vector<Mutant> gen_sra(const Policy& policy) {
  std::vector<Mutant> out;
  const auto& rules = policy.rules;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rules.size(); ++j) {
      if (rules[i].action.property != rules[j].action.property) continue;
      if (rules[i].action.value == rules[j].action.value) continue;
      Policy m = policy;
      std::swap(m.rules[i].action.value, m.rules[j].action.value);
      out.push_back({"", Operator::SRA, SraParams{i, j}, std::move(m), {i, j}});
    }
  }
  return out;
}

inline std::vector<Mutant> gen_mrcv(const Policy& policy) {
  std::vector<Mutant> out;
  for (std::size_t i = 0; i < policy.rules.size(); ++i) {
    const auto& c = policy.rules[i].condition;
    auto nv = mrcv_value(c.op, c.value);
    if (!nv) continue;
    Policy m = policy;
    m.rules[i].condition.value = *nv;
    out.push_back({"", Operator::MRCV, MrcvParams{i, c.value, *nv}, std::move(m), {i}});
  }
  return out;
}

inline std::string mutant_id(Operator op, std::size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", ordinal);
  return std::string(to_string(op)) + "-" + buf;
}

/// Runs the selected operators in fixed order (ICP, ISV, IMV, SRA, MRCV),
/// drops identity mutants and per-operator textual duplicates, and numbers
/// the survivors per operator starting at 001.
inline MutantSet enumerate_mutants(const Policy& policy, const ContextSchema& schema,
                                   const std::set<Operator>& operators, std::size_t imv_n = 2,
                                   const PolicyBridge& bridge = default_bridge()) {
  MutantSet set;
  set.original = policy;
  const std::string original_text = bridge.serialize(policy);

  for (Operator op : kAllOperators) {
    if (!operators.count(op)) continue;
    std::vector<Mutant> batch;
    switch (op) {
      case Operator::ICP: batch = gen_icp(policy, schema); break;
      case Operator::ISV: batch = gen_isv(policy, schema); break;
      case Operator::IMV: batch = gen_imv(policy, schema, imv_n); break;
      case Operator::SRA: batch = gen_sra(policy); break;
      case Operator::MRCV: batch = gen_mrcv(policy); break;
    }
    std::unordered_set<std::string> seen;
    std::size_t ordinal = 0;
    for (auto& m : batch) {
      ++set.raw_count;
      std::string text = bridge.serialize(m.policy);
      if (text == original_text) continue;
      if (!seen.insert(std::move(text)).second) continue;
      m.id = mutant_id(op, ++ordinal);
      set.mutants.push_back(std::move(m));
    }
  }
  set.deduped_count = set.mutants.size();
  return set;
}

inline MutantSet enumerate_mutants(const Policy& policy, const ContextSchema& schema) {
  return enumerate_mutants(policy, schema, {std::begin(kAllOperators), std::end(kAllOperators)});
}

// ---------------------------------------------------------------------------
// On-disk mutant sets: <dir>/<id>.apl plus <dir>/manifest.json
// ---------------------------------------------------------------------------

/// manifest.json:
///   {"format": "ecamut-mutants/1", "original": "<canonical policy text>",
///    "raw_count": N, "deduped_count": M,
///    "mutants": [{"id", "operator", "file", "params", "affected_rules"}]}
inline nlohmann::json manifest_json(const MutantSet& set, const PolicyBridge& bridge = default_bridge()) {
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : set.mutants) {
    ms.push_back({{"id", m.id},
                  {"operator", std::string(to_string(m.op))},
                  {"file", m.id + std::string(bridge.extension())},
                  {"params", params_to_json(m.params)},
                  {"affected_rules", std::vector<std::size_t>(m.affected_rules.begin(),
                                                              m.affected_rules.end())}});
  }
  return {{"format", "ecamut-mutants/1"},
          {"original", bridge.serialize(set.original)},
          {"raw_count", set.raw_count},
          {"deduped_count", set.deduped_count},
          {"mutants", ms}};
}

inline void write_mutant_set(const MutantSet& set, const std::filesystem::path& dir,
                             const PolicyBridge& bridge = default_bridge()) {
  std::filesystem::create_directories(dir);
  for (const auto& m : set.mutants)
    write_text_file(dir / (m.id + std::string(bridge.extension())), bridge.serialize(m.policy));
  write_text_file(dir / "manifest.json", manifest_json(set, bridge).dump(2) + "\n");
}

inline MutantSet read_mutant_set(const std::filesystem::path& dir,
                                 const PolicyBridge& bridge = default_bridge()) {
  auto manifest = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
  MutantSet set;
  set.original = bridge.parse(manifest.at("original").get<std::string>()).policy;
  set.raw_count = manifest.at("raw_count").get<std::size_t>();
  for (const auto& e : manifest.at("mutants")) {
    Mutant m;
    m.id = e.at("id").get<std::string>();
    auto op = parse_operator(e.at("operator").get<std::string>());
    if (!op) throw std::runtime_error("unknown operator in manifest: " + e.at("operator").dump());
    m.op = *op;
    m.params = params_from_json(m.op, e.at("params"));
    for (auto i : e.at("affected_rules")) m.affected_rules.insert(i.get<std::size_t>());
    m.policy = bridge.parse(read_text_file(dir / e.at("file").get<std::string>())).policy;
    set.mutants.push_back(std::move(m));
  }
  set.deduped_count = set.mutants.size();
  return set;
}

}  // namespace ecamut

#endif  // ECAMUT_MUTATION_HPP
