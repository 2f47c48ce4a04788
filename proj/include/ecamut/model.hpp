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

#ifndef ECAMUT_MODEL_HPP
#define ECAMUT_MODEL_HPP

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ecamut {

using Value = std::int64_t;

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

/// Qualitative value ('low', 'HIGH', ...). Stored lower-cased, so equality
/// and ordering are case-insensitive everywhere a Level is compared.
class Level {
 public:
  Level() = default;
  explicit Level(std::string_view name) : name_(to_lower(name)) {}

  const std::string& str() const { return name_; }
  bool empty() const { return name_.empty(); }

  friend auto operator<=>(const Level&, const Level&) = default;
  friend bool operator==(const Level&, const Level&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Level& l) {
    return os << '\'' << l.name_ << '\'';
  }

 private:
  std::string name_;
};

/// Thrown when a schema or system model breaks one of its structural
/// invariants (overlapping levels, duplicate names, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Context
// ---------------------------------------------------------------------------

struct LevelInterval {
  Level name;
  Value lo = 0;
  Value hi = 0;

  friend bool operator==(const LevelInterval&, const LevelInterval&) = default;
};

struct PropertySchema {
  std::string name;
  Value lower = 0;
  Value upper = 0;
  std::vector<LevelInterval> levels;  // declaration order

  bool contains(Value v) const { return v >= lower && v <= upper; }

  /// Number of integer values in [lower, upper].
  std::uint64_t domain_size() const {
    return static_cast<std::uint64_t>(upper) - static_cast<std::uint64_t>(lower) + 1;
  }

  const LevelInterval* find_level(const Level& l) const {
    for (const auto& iv : levels)
      if (iv.name == l) return &iv;
    return nullptr;
  }

  /// Level containing `v`, or nullptr when `v` is out of bounds.
  const LevelInterval* level_at(Value v) const {
    for (const auto& iv : levels)
      if (v >= iv.lo && v <= iv.hi) return &iv;
    return nullptr;
  }

  friend bool operator==(const PropertySchema&, const PropertySchema&) = default;
};

/// Ordered list of environment properties. Property order is the tuple order
/// of every ContextInstance.
struct ContextSchema {
  std::vector<PropertySchema> properties;

  std::size_t arity() const { return properties.size(); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < properties.size(); ++i)
      if (properties[i].name == name) return i;
    return std::nullopt;
  }

  const PropertySchema* find(std::string_view name) const {
    auto i = index_of(name);
    return i ? &properties[*i] : nullptr;
  }

  friend bool operator==(const ContextSchema&, const ContextSchema&) = default;
};

/// Checks one property's invariants; throws ModelError on the first problem.
inline void check_property(const PropertySchema& p) {
  if (p.name.empty()) throw ModelError("property with empty name");
  if (p.lower > p.upper)
    throw ModelError("property " + p.name + ": lower bound " + std::to_string(p.lower) +
                     " exceeds upper bound " + std::to_string(p.upper));
  if (p.levels.empty()) throw ModelError("property " + p.name + " declares no levels");

  std::set<Level> seen;
  for (const auto& iv : p.levels) {
    if (iv.name.empty()) throw ModelError("property " + p.name + ": empty level name");
    if (!seen.insert(iv.name).second)
      throw ModelError("property " + p.name + ": duplicate level " + iv.name.str());
    if (iv.lo > iv.hi)
      throw ModelError("property " + p.name + ": level " + iv.name.str() + " has empty interval");
  }

  std::vector<LevelInterval> sorted = p.levels;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.lo < b.lo; });
  if (sorted.front().lo != p.lower)
    throw ModelError("property " + p.name + ": gap in levels at " + std::to_string(p.lower) +
                     ".." + std::to_string(sorted.front().lo - 1));
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const auto& prev = sorted[i - 1];
    const auto& cur = sorted[i];
    if (cur.lo <= prev.hi)
      throw ModelError("property " + p.name + ": overlapping levels at " + std::to_string(cur.lo) +
                       ".." + std::to_string(std::min(prev.hi, cur.hi)));
    if (cur.lo > prev.hi + 1)
      throw ModelError("property " + p.name + ": gap in levels at " + std::to_string(prev.hi + 1) +
                       ".." + std::to_string(cur.lo - 1));
  }
  if (sorted.back().hi != p.upper)
    throw ModelError("property " + p.name + ": levels do not cover " +
                     std::to_string(sorted.back().hi + 1) + ".." + std::to_string(p.upper));
}

inline void check_schema(const ContextSchema& s) {
  if (s.properties.empty()) throw ModelError("schema declares no properties");
  std::set<std::string> names;
  for (const auto& p : s.properties) {
    check_property(p);
    if (!names.insert(p.name).second) throw ModelError("duplicate property " + p.name);
  }
}

using ContextInstance = std::vector<Value>;

struct ContextFlow {
  std::vector<ContextInstance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }

  friend bool operator==(const ContextFlow&, const ContextFlow&) = default;
};

// ---------------------------------------------------------------------------
// Policy
// ---------------------------------------------------------------------------

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

inline std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

inline std::optional<CmpOp> parse_cmp(std::string_view s) {
  if (s == "==") return CmpOp::Eq;
  if (s == "!=") return CmpOp::Ne;
  if (s == "<") return CmpOp::Lt;
  if (s == "<=") return CmpOp::Le;
  if (s == ">") return CmpOp::Gt;
  if (s == ">=") return CmpOp::Ge;
  return std::nullopt;
}

inline bool compare(Value lhs, CmpOp op, Value rhs) {
  switch (op) {
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ne: return lhs != rhs;
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Gt: return lhs > rhs;
    case CmpOp::Ge: return lhs >= rhs;
  }
  return false;
}

struct EventTrigger {
  std::string property;
  std::vector<Level> accepted;  // textual order, no duplicates

  bool accepts(const Level& l) const {
    return std::find(accepted.begin(), accepted.end(), l) != accepted.end();
  }

  friend bool operator==(const EventTrigger&, const EventTrigger&) = default;
};

struct Condition {
  std::string state_ref;
  CmpOp op = CmpOp::Eq;
  Value value = 0;

  friend bool operator==(const Condition&, const Condition&) = default;
};

struct Action {
  std::string property;
  Level value;

  friend bool operator==(const Action&, const Action&) = default;
};

struct Rule {
  EventTrigger trigger;
  Condition condition;
  Action action;

  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Ordered rule set; textual order is execution priority.
struct Policy {
  std::vector<Rule> rules;

  std::size_t size() const { return rules.size(); }
  bool empty() const { return rules.empty(); }

  friend bool operator==(const Policy&, const Policy&) = default;
};

// ---------------------------------------------------------------------------
// System model: internal state and the effect of actions on it
// ---------------------------------------------------------------------------

/// `target := [var] + offset`. With no var the expression is the constant.
struct Assignment {
  std::string target;
  std::optional<std::string> var;
  Value offset = 0;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct StateVar {
  std::string name;
  Value initial = 0;

  friend bool operator==(const StateVar&, const StateVar&) = default;
};

struct Effect {
  std::string action_property;
  Level action_value;
  std::vector<Assignment> assignments;  // applied in order

  friend bool operator==(const Effect&, const Effect&) = default;
};

struct SystemModel {
  std::vector<StateVar> state_vars;
  std::vector<Effect> effects;

  const StateVar* find_var(std::string_view name) const {
    for (const auto& v : state_vars)
      if (v.name == name) return &v;
    return nullptr;
  }

  const Effect* find_effect(std::string_view prop, const Level& value) const {
    for (const auto& e : effects)
      if (e.action_property == prop && e.action_value == value) return &e;
    return nullptr;
  }

  friend bool operator==(const SystemModel&, const SystemModel&) = default;
};

inline void check_system_model(const SystemModel& m) {
  std::set<std::string> names;
  for (const auto& v : m.state_vars) {
    if (v.name.empty()) throw ModelError("state variable with empty name");
    if (!names.insert(v.name).second) throw ModelError("duplicate state variable " + v.name);
  }
  for (const auto& e : m.effects) {
    for (const auto& a : e.assignments) {
      if (!names.count(a.target)) throw ModelError("effect assigns undeclared state variable " + a.target);
      if (a.var && !names.count(*a.var))
        throw ModelError("effect reads undeclared state variable " + *a.var);
    }
  }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::optional<std::size_t> index;  // rule index or flow instance index
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t size() const { return violations.size(); }

  void add(std::optional<std::size_t> index, std::string message) {
    violations.push_back({index, std::move(message)});
  }

  std::string to_string() const {
    std::string out;
    for (const auto& v : violations) {
      if (v.index) out += "[" + std::to_string(*v.index) + "] ";
      out += v.message;
      out += '\n';
    }
    return out;
  }
};

/// Static consistency of a policy against the schema and system model.
/// Action properties and values are not checked: actions without a declared
/// effect are legal and leave internal state untouched.
inline ValidationReport validate_policy(const Policy& policy, const ContextSchema& schema,
                                        const SystemModel& sys) {
  ValidationReport report;
  for (std::size_t i = 0; i < policy.rules.size(); ++i) {
    const Rule& r = policy.rules[i];
    const PropertySchema* prop = schema.find(r.trigger.property);
    if (!prop) {
      report.add(i, "unknown property " + r.trigger.property);
    } else {
      for (const auto& l : r.trigger.accepted)
        if (!prop->find_level(l))
          report.add(i, "unknown level '" + l.str() + "' for property " + prop->name);
    }
    if (r.trigger.accepted.empty()) report.add(i, "trigger accepts no level");
    if (r.condition.state_ref.empty()) {
      report.add(i, "empty state reference in condition");
    } else if (!sys.find_var(r.condition.state_ref)) {
      report.add(i, "unknown state variable " + r.condition.state_ref);
    }
    if (r.action.property.empty() || r.action.value.empty())
      report.add(i, "incomplete action");
  }
  return report;
}

inline ValidationReport validate_instance(const ContextInstance& inst, const ContextSchema& schema,
                                          std::optional<std::size_t> index = std::nullopt) {
  ValidationReport report;
  if (inst.size() != schema.arity()) {
    report.add(index, "instance has " + std::to_string(inst.size()) + " values, expected " +
                          std::to_string(schema.arity()));
    return report;
  }
  for (std::size_t p = 0; p < inst.size(); ++p) {
    const auto& prop = schema.properties[p];
    if (!prop.contains(inst[p]))
      report.add(index, "value " + std::to_string(inst[p]) + " out of bounds for property " +
                            prop.name + " [" + std::to_string(prop.lower) + "," +
                            std::to_string(prop.upper) + "]");
  }
  return report;
}

inline ValidationReport validate_flow(const ContextFlow& flow, const ContextSchema& schema) {
  ValidationReport report;
  for (std::size_t i = 0; i < flow.instances.size(); ++i) {
    auto r = validate_instance(flow.instances[i], schema, i);
    report.violations.insert(report.violations.end(), r.violations.begin(), r.violations.end());
    if (i > 0 && flow.instances[i] == flow.instances[i - 1])
      report.add(i, "consecutive instances identical at index " + std::to_string(i));
  }
  return report;
}

}  // namespace ecamut

#endif  // ECAMUT_MODEL_HPP
