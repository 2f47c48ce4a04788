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

// Simulated adaptation pipeline: an emulator replays a context flow, the
// sensor turns value changes into events, the reconfiguration engine matches
// rules against events and internal state, and a probe records every
// reconfiguration request.
//
// Step semantics:
//   - events are produced in schema property order; on the first step every
//     property produces an event, afterwards only properties whose value
//     changed do;
//   - for each event, rules are scanned in textual order; a rule fires when
//     its trigger property matches, the event level is accepted and its
//     condition holds on the current internal state;
//   - a fired rule's effect is applied at once, so later rules in the same
//     step observe the updated state.

#ifndef ECAMUT_ENGINE_HPP
#define ECAMUT_ENGINE_HPP

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecamut/model.hpp"
#include "ecamut/text.hpp"
#include "json.hpp"

namespace ecamut {

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using StateMap = std::map<std::string, Value>;

struct Event {
  std::string property;
  Value value = 0;
  Level level;

  friend bool operator==(const Event&, const Event&) = default;
};

struct ReconfigurationRequest {
  std::string action_property;
  Level value;
  std::size_t rule_index = 0;

  friend bool operator==(const ReconfigurationRequest&, const ReconfigurationRequest&) = default;
};

struct EngineState {
  StateMap internal;
  std::optional<ContextInstance> last_instance;

  friend bool operator==(const EngineState&, const EngineState&) = default;
};

struct StepRecord {
  ContextInstance instance;
  std::vector<Event> events;
  std::vector<ReconfigurationRequest> requests;
  StateMap post_state;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct Trace {
  std::vector<StepRecord> steps;

  std::size_t size() const { return steps.size(); }

  friend bool operator==(const Trace&, const Trace&) = default;
};

inline const Level& level_of(const ContextSchema& schema, std::string_view property, Value value) {
  const PropertySchema* p = schema.find(property);
  if (!p) throw EngineError("unknown property " + std::string(property));
  const LevelInterval* iv = p->level_at(value);
  if (!iv)
    throw EngineError("value " + std::to_string(value) + " out of bounds for property " + p->name);
  return iv->name;
}

inline std::vector<Event> events_between(const ContextSchema& schema,
                                         const std::optional<ContextInstance>& prev,
                                         const ContextInstance& curr) {
  if (curr.size() != schema.arity() || (prev && prev->size() != schema.arity()))
    throw EngineError("instance arity does not match schema (expected " +
                      std::to_string(schema.arity()) + ")");
  std::vector<Event> events;
  for (std::size_t i = 0; i < curr.size(); ++i) {
    if (prev && (*prev)[i] == curr[i]) continue;
    const auto& prop = schema.properties[i];
    events.push_back({prop.name, curr[i], level_of(schema, prop.name, curr[i])});
  }
  return events;
}

inline bool eval_condition(const Condition& cond, const StateMap& internal) {
  auto it = internal.find(cond.state_ref);
  if (it == internal.end()) throw EngineError("unknown state variable " + cond.state_ref);
  return compare(it->second, cond.op, cond.value);
}

inline EngineState initial_state(const SystemModel& sys) {
  EngineState s;
  for (const auto& v : sys.state_vars) s.internal[v.name] = v.initial;
  return s;
}

/// Applies the effect bound to (action, value), if any.
inline void apply_effect(const SystemModel& sys, const std::string& action, const Level& value,
                         StateMap& internal) {
  const Effect* e = sys.find_effect(action, value);
  if (!e) return;
  for (const auto& a : e->assignments) {
    Value base = 0;
    if (a.var) {
      auto it = internal.find(*a.var);
      if (it == internal.end()) throw EngineError("unknown state variable " + *a.var);
      base = it->second;
    }
    internal[a.target] = base + a.offset;
  }
}

/// Policy, schema and system model bound together for repeated simulation.
/// Holds references; the referenced objects must outlive the Simulator.
class Simulator {
 public:
  Simulator(const Policy& policy, const ContextSchema& schema, const SystemModel& sys)
      : policy_(policy), schema_(schema), sys_(sys), by_property_(schema.arity()) {
    for (std::size_t r = 0; r < policy.rules.size(); ++r) {
      auto idx = schema.index_of(policy.rules[r].trigger.property);
      if (idx) by_property_[*idx].push_back(r);
    }
  }

  EngineState initial() const { return initial_state(sys_); }

  /// Advances `state` by one context instance and returns the step record.
  StepRecord step(EngineState& state, const ContextInstance& instance) const {
    auto report = validate_instance(instance, schema_);
    if (!report.ok()) throw EngineError(report.violations.front().message);

    StepRecord rec;
    rec.instance = instance;
    rec.events = events_between(schema_, state.last_instance, instance);
    for (const Event& ev : rec.events) {
      auto pidx = *schema_.index_of(ev.property);
      for (std::size_t r : by_property_[pidx]) {
        const Rule& rule = policy_.rules[r];
        if (!rule.trigger.accepts(ev.level)) continue;
        if (!eval_condition(rule.condition, state.internal)) continue;
        rec.requests.push_back({rule.action.property, rule.action.value, r});
        apply_effect(sys_, rule.action.property, rule.action.value, state.internal);
      }
    }
    state.last_instance = instance;
    rec.post_state = state.internal;
    return rec;
  }

  Trace run(const ContextFlow& flow) const {
    Trace trace;
    trace.steps.reserve(flow.size());
    EngineState state = initial();
    for (const auto& inst : flow.instances) trace.steps.push_back(step(state, inst));
    return trace;
  }

 private:
  const Policy& policy_;
  const ContextSchema& schema_;
  const SystemModel& sys_;
  std::vector<std::vector<std::size_t>> by_property_;  // schema index -> rule indices
};

inline std::pair<EngineState, StepRecord> step(const Policy& policy, const ContextSchema& schema,
                                               const SystemModel& sys, EngineState state,
                                               const ContextInstance& instance) {
  StepRecord rec = Simulator(policy, schema, sys).step(state, instance);
  return {std::move(state), std::move(rec)};
}

inline Trace run_flow(const Policy& policy, const ContextSchema& schema, const SystemModel& sys,
                      const ContextFlow& flow) {
  return Simulator(policy, schema, sys).run(flow);
}

// ---------------------------------------------------------------------------
// Trace export
// ---------------------------------------------------------------------------

/// Line-oriented form, one block per step:
///   step 1 instance 12,3
///     event LOAD 12 'low'
///     request addFileServer 'low' rule 3
///     state FileServers.size=0 cacheHandler.size=0
inline std::string trace_to_text(const Trace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    out += "step " + std::to_string(i + 1) + " instance " + serialize_instance(s.instance) + "\n";
    for (const auto& e : s.events)
      out += "  event " + e.property + " " + std::to_string(e.value) + " '" + e.level.str() + "'\n";
    for (const auto& r : s.requests)
      out += "  request " + r.action_property + " '" + r.value.str() + "' rule " +
             std::to_string(r.rule_index) + "\n";
    out += "  state";
    for (const auto& [k, v] : s.post_state) out += " " + k + "=" + std::to_string(v);
    out += "\n";
  }
  return out;
}

/// {"steps": [{"step", "instance", "events": [{"property","value","level"}],
///             "requests": [{"action","value","rule"}], "state": {...}}]}
inline nlohmann::json trace_to_json(const Trace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : s.events)
      events.push_back({{"property", e.property}, {"value", e.value}, {"level", e.level.str()}});
    nlohmann::json requests = nlohmann::json::array();
    for (const auto& r : s.requests)
      requests.push_back(
          {{"action", r.action_property}, {"value", r.value.str()}, {"rule", r.rule_index}});
    nlohmann::json state = nlohmann::json::object();
    for (const auto& [k, v] : s.post_state) state[k] = v;
    steps.push_back({{"step", i + 1},
                     {"instance", s.instance},
                     {"events", events},
                     {"requests", requests},
                     {"state", state}});
  }
  return {{"steps", steps}};
}

}  // namespace ecamut

#endif  // ECAMUT_ENGINE_HPP
