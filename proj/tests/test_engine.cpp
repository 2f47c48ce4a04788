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

#include <gtest/gtest.h>

#include "ecamut/engine.hpp"
#include "ecamut/mutation.hpp"
#include "ecamut/text.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/reference_engine.hpp"

namespace ecamut {
namespace {

using testing::basic_policy;
using testing::web_schema;
using testing::web_sys;

using Req = std::pair<std::string, std::string>;

std::vector<Req> reqs(const StepRecord& s) {
  std::vector<Req> out;
  for (const auto& r : s.requests) out.emplace_back(r.action_property, r.value.str());
  return out;
}

TEST(LevelOf, IntervalLookup) {
  auto s = web_schema();
  EXPECT_EQ(level_of(s, "LOAD", 12), Level("low"));
  EXPECT_EQ(level_of(s, "LOAD", 49), Level("low"));
  EXPECT_EQ(level_of(s, "LOAD", 50), Level("high"));
  EXPECT_EQ(level_of(s, "requestdensity", 0), Level("low"));
  EXPECT_EQ(level_of(s, "requestdensity", 34), Level("medium"));
  EXPECT_EQ(level_of(s, "requestdensity", 100), Level("high"));
  EXPECT_THROW(level_of(s, "temp", 1), EngineError);
  EXPECT_THROW(level_of(s, "LOAD", 101), EngineError);
  EXPECT_THROW(level_of(s, "LOAD", -1), EngineError);
}

TEST(EventsBetween, ChangedPropertiesOnly) {
  auto s = web_schema();
  auto ev = events_between(s, ContextInstance{12, 3}, {80, 3});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0], (Event{"LOAD", 80, Level("high")}));
}

TEST(EventsBetween, BootstrapEmitsAllInSchemaOrder) {
  auto ev = events_between(web_schema(), std::nullopt, {12, 3});
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].property, "LOAD");
  EXPECT_EQ(ev[1], (Event{"requestdensity", 3, Level("low")}));
}

TEST(EventsBetween, NoChangeAndArity) {
  auto s = web_schema();
  EXPECT_TRUE(events_between(s, ContextInstance{12, 3}, {12, 3}).empty());
  EXPECT_THROW(events_between(s, std::nullopt, {1, 2, 3}), EngineError);
  EXPECT_THROW(events_between(s, ContextInstance{1}, {1, 2}), EngineError);
}

TEST(EvalCondition, Comparisons) {
  EXPECT_TRUE(eval_condition({"cacheHandler.size", CmpOp::Eq, 0}, {{"cacheHandler.size", 0}}));
  EXPECT_FALSE(eval_condition({"FileServers.size", CmpOp::Le, 10}, {{"FileServers.size", 11}}));
  EXPECT_TRUE(eval_condition({"FileServers.size", CmpOp::Le, 10}, {{"FileServers.size", 10}}));
  EXPECT_FALSE(eval_condition({"x", CmpOp::Ne, 5}, {{"x", 5}}));
  EXPECT_TRUE(eval_condition({"x", CmpOp::Gt, 4}, {{"x", 5}}));
  EXPECT_FALSE(eval_condition({"x", CmpOp::Lt, 5}, {{"x", 5}}));
  EXPECT_TRUE(eval_condition({"x", CmpOp::Ge, 5}, {{"x", 5}}));
  EXPECT_THROW(eval_condition({"y", CmpOp::Eq, 0}, {{"x", 5}}), EngineError);
}

TEST(Step, FirstInstanceLowLow) {
  auto p = basic_policy();
  auto s = web_schema();
  auto sys = web_sys();
  auto [state, rec] = step(p, s, sys, initial_state(sys), {12, 3});
  EXPECT_EQ(reqs(rec), (std::vector<Req>{{"addFileServer", "low"}, {"addCache", "low"}}));
  EXPECT_EQ(rec.requests[0].rule_index, 3u);
  EXPECT_EQ(rec.requests[1].rule_index, 1u);
  EXPECT_EQ(state.internal, (StateMap{{"cacheHandler.size", 0}, {"FileServers.size", 0}}));
  EXPECT_EQ(state.last_instance, (ContextInstance{12, 3}));
}

TEST(Step, FirstInstanceHighHigh) {
  auto p = basic_policy();
  auto s = web_schema();
  auto sys = web_sys();
  auto [state, rec] = step(p, s, sys, initial_state(sys), {80, 80});
  EXPECT_EQ(reqs(rec), (std::vector<Req>{{"addFileServer", "high"}, {"addCache", "high"}}));
  EXPECT_EQ(rec.post_state, (StateMap{{"cacheHandler.size", 1}, {"FileServers.size", 1}}));
}

TEST(Step, EffectsAreVisibleToLaterRulesInTheSameStep) {
  auto p = parse_policy(
      "when LOAD is 'high' if cacheHandler.size == 0 then utility of addCache is 'high'\n"
      "when LOAD is 'high' if cacheHandler.size == 0 then utility of addCache is 'high'\n");
  auto s = web_schema();
  auto sys = web_sys();
  auto [state, rec] = step(p, s, sys, initial_state(sys), {80, 0});
  EXPECT_EQ(rec.requests.size(), 1u);
}

TEST(Step, NoRelevantChange) {
  auto p = basic_policy();
  auto s = web_schema();
  auto sys = web_sys();
  auto [st, first] = step(p, s, sys, initial_state(sys), {12, 3});
  // Without the requestdensity-'low' rule, moving requestdensity within
  // 'low' matches nothing.
  Policy q = p;
  q.rules.erase(q.rules.begin() + 1);
  auto [st2, rec] = step(q, s, sys, st, {12, 4});
  EXPECT_TRUE(rec.requests.empty());
  EXPECT_EQ(st2.internal, st.internal);
}

TEST(RunFlow, EmptyAndTwoSteps) {
  auto p = basic_policy();
  auto s = web_schema();
  auto sys = web_sys();
  EXPECT_TRUE(run_flow(p, s, sys, ContextFlow{}).steps.empty());

  ContextFlow f{{{12, 3}, {80, 3}}};
  Trace t = run_flow(p, s, sys, f);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(reqs(t.steps[1]), (std::vector<Req>{{"addFileServer", "high"}}));
  EXPECT_EQ(t.steps[1].post_state.at("FileServers.size"), 1);
  EXPECT_EQ(run_flow(p, s, sys, f), t);
}

TEST(RunFlow, FileServerCapStopsAt11) {
  auto p = basic_policy();
  auto s = web_schema();
  auto sys = web_sys();
  ContextFlow f;
  for (int i = 0; i < 30; ++i) f.instances.push_back({50 + i, 0});
  Trace t = run_flow(p, s, sys, f);
  EXPECT_EQ(t.steps.back().post_state.at("FileServers.size"), 11);
  EXPECT_TRUE(t.steps.back().requests.empty());
  EXPECT_EQ(t.steps[10].requests.size(), 1u);
  EXPECT_TRUE(t.steps[11].requests.empty());
}

TEST(RunFlow, RejectsInvalidInstances) {
  auto p = basic_policy();
  auto s = web_schema();
  auto sys = web_sys();
  EXPECT_THROW(run_flow(p, s, sys, ContextFlow{{{101, 0}}}), EngineError);
  EXPECT_THROW(run_flow(p, s, sys, ContextFlow{{{1}}}), EngineError);
}

TEST(TraceExport, TextAndJson) {
  auto p = basic_policy();
  auto s = web_schema();
  auto sys = web_sys();
  Trace t = run_flow(p, s, sys, ContextFlow{{{12, 3}, {80, 3}}});
  EXPECT_EQ(trace_to_text(t),
            "step 1 instance 12,3\n"
            "  event LOAD 12 'low'\n"
            "  event requestdensity 3 'low'\n"
            "  request addFileServer 'low' rule 3\n"
            "  request addCache 'low' rule 1\n"
            "  state FileServers.size=0 cacheHandler.size=0\n"
            "step 2 instance 80,3\n"
            "  event LOAD 80 'high'\n"
            "  request addFileServer 'high' rule 2\n"
            "  state FileServers.size=1 cacheHandler.size=0\n");
  auto j = trace_to_json(t);
  ASSERT_EQ(j["steps"].size(), 2u);
  EXPECT_EQ(j["steps"][1]["instance"], (nlohmann::json{80, 3}));
  EXPECT_EQ(j["steps"][1]["requests"][0]["action"], "addFileServer");
  EXPECT_EQ(j["steps"][1]["requests"][0]["value"], "high");
  EXPECT_EQ(j["steps"][1]["requests"][0]["rule"], 2);
  EXPECT_EQ(j["steps"][0]["events"][1]["level"], "low");
  EXPECT_EQ(j["steps"][1]["state"]["FileServers.size"], 1);
}

// --- properties ------------------------------------------------------------

ContextFlow random_flow_on(testing::Gen& g, const ContextSchema& s, std::size_t len) {
  ContextFlow f;
  while (f.size() < len) {
    ContextInstance i;
    for (const auto& p : s.properties) i.push_back(g.between(p.lower, p.upper));
    if (!f.empty() && f.instances.back() == i) continue;
    f.instances.push_back(i);
  }
  return f;
}

TEST(EngineProperties, AgreesWithReferenceAndHoldsInvariants) {
  testing::Gen g(99);
  auto s = web_schema();
  auto sys = parse_system_model(testing::data_file("webserver.sys"));
  auto policies = std::vector<Policy>{basic_policy(), parse_policy(testing::data_file("webserver.apl"))};
  for (const auto& m : enumerate_mutants(policies[1], s).mutants) policies.push_back(m.policy);

  for (const auto& p : policies) {
    for (int k = 0; k < 40; ++k) {
      ContextFlow f = random_flow_on(g, s, 1 + g.below(25));
      Trace t = run_flow(p, s, sys, f);
      ASSERT_EQ(t.size(), f.size());
      EXPECT_EQ(run_flow(p, s, sys, f), t);

      auto ref = testing::reference_run(p, s, sys, f);
      StateMap prev;
      for (const auto& v : sys.state_vars) prev[v.name] = v.initial;
      for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<Req> expect(ref[i].begin(), ref[i].end());
        ASSERT_EQ(reqs(t.steps[i]), expect) << "step " << i;
        // Bootstrap.
        if (i == 0) { EXPECT_EQ(t.steps[0].events.size(), s.arity()); }
        // Frame property.
        if (t.steps[i].requests.empty()) { EXPECT_EQ(t.steps[i].post_state, prev); }
        // Trigger soundness: replay each request against the pre-state.
        StateMap state = prev;
        for (const auto& r : t.steps[i].requests) {
          const Rule& rule = p.rules.at(r.rule_index);
          bool matched = false;
          for (const auto& e : t.steps[i].events)
            matched |= e.property == rule.trigger.property && rule.trigger.accepts(e.level);
          EXPECT_TRUE(matched);
          EXPECT_TRUE(eval_condition(rule.condition, state));
          EXPECT_EQ(r.action_property, rule.action.property);
          apply_effect(sys, r.action_property, r.value, state);
        }
        EXPECT_EQ(state, t.steps[i].post_state);
        prev = t.steps[i].post_state;
      }
    }
  }
}

TEST(EngineProperties, RuleDeletionNeverAddsRequestsWithoutStateFeedback) {
  // Effect-free system model: conditions never change, so the deleted
  // policy's requests at each step are a subsequence of the original's.
  testing::Gen g(5);
  auto s = web_schema();
  auto sys = parse_system_model("state cacheHandler.size = 0\nstate FileServers.size = 0\n");
  auto p = parse_policy(testing::data_file("webserver.apl"));
  auto set = enumerate_mutants(p, s, {Operator::ICP, Operator::ISV, Operator::IMV});
  for (const auto& m : set.mutants) {
    for (int k = 0; k < 20; ++k) {
      ContextFlow f = random_flow_on(g, s, 10);
      Trace a = run_flow(p, s, sys, f);
      Trace b = run_flow(m.policy, s, sys, f);
      for (std::size_t i = 0; i < f.size(); ++i) {
        auto ra = reqs(a.steps[i]);
        auto rb = reqs(b.steps[i]);
        std::size_t j = 0;
        for (const auto& r : ra)
          if (j < rb.size() && rb[j] == r) ++j;
        EXPECT_EQ(j, rb.size()) << m.id << " step " << i;
      }
    }
  }
}

}  // namespace
}  // namespace ecamut
