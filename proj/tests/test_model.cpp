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

#include "ecamut/model.hpp"
#include "ecamut/text.hpp"
#include "support/fixtures.hpp"

namespace ecamut {
namespace {

using testing::basic_policy;
using testing::web_schema;
using testing::web_sys;

TEST(Level, ComparesCaseInsensitively) {
  EXPECT_EQ(Level("LOW"), Level("low"));
  EXPECT_EQ(Level("Medium").str(), "medium");
  EXPECT_NE(Level("low"), Level("high"));
}

TEST(ValidatePolicy, BasicPolicyResolvesAgainstWebServerModel) {
  auto report = validate_policy(basic_policy(), web_schema(), web_sys());
  EXPECT_TRUE(report.ok()) << report.to_string();
}

TEST(ValidatePolicy, EmptyPolicyIsValid) {
  EXPECT_TRUE(validate_policy(Policy{}, web_schema(), web_sys()).ok());
}

TEST(ValidatePolicy, UnknownTriggerProperty) {
  auto p = parse_policy("when temp is 'high' if cacheHandler.size == 0 then utility of addCache is 'high'");
  auto report = validate_policy(p, web_schema(), web_sys());
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report.violations[0].message, "unknown property temp");
  EXPECT_EQ(report.violations[0].index, 0u);
}

TEST(ValidatePolicy, ReportsEveryViolation) {
  auto p = parse_policy(
      "when LOAD is 'medium' if cacheHandler.size == 0 then utility of addCache is 'high'\n"
      "when LOAD is 'high' if nothing.here > 1 then utility of addCache is 'high'\n");
  auto report = validate_policy(p, web_schema(), web_sys());
  ASSERT_EQ(report.size(), 2u);
  EXPECT_EQ(report.violations[0].message, "unknown level 'medium' for property LOAD");
  EXPECT_EQ(report.violations[1].message, "unknown state variable nothing.here");
  EXPECT_EQ(report.violations[1].index, 1u);
}

TEST(ValidateFlow, ExampleInstancesAreValid) {
  ContextFlow f{{{12, 3}, {80, 3}}};
  EXPECT_TRUE(validate_flow(f, web_schema()).ok());
}

TEST(ValidateFlow, ConsecutiveDuplicate) {
  ContextFlow f{{{12, 3}, {12, 3}}};
  auto report = validate_flow(f, web_schema());
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report.violations[0].message, "consecutive instances identical at index 1");
}

TEST(ValidateFlow, NonConsecutiveRepeatIsFine) {
  ContextFlow f{{{12, 3}, {80, 3}, {12, 3}}};
  EXPECT_TRUE(validate_flow(f, web_schema()).ok());
}

TEST(ValidateFlow, OutOfBounds) {
  ContextFlow f{{{101, 3}}};
  auto report = validate_flow(f, web_schema());
  ASSERT_EQ(report.size(), 1u);
  EXPECT_NE(report.violations[0].message.find("value 101 out of bounds"), std::string::npos);
}

TEST(ValidateFlow, WrongArity) {
  ContextFlow f{{{1, 2, 3}, {4}}};
  auto report = validate_flow(f, web_schema());
  ASSERT_EQ(report.size(), 2u);
  EXPECT_EQ(report.violations[0].message, "instance has 3 values, expected 2");
  EXPECT_EQ(report.violations[1].index, 1u);
}

TEST(Schema, LevelPartitionCoversEveryValueExactlyOnce) {
  for (const auto& p : web_schema().properties) {
    for (Value v = p.lower; v <= p.upper; ++v) {
      int hits = 0;
      for (const auto& iv : p.levels) hits += (iv.lo <= v && v <= iv.hi);
      EXPECT_EQ(hits, 1) << p.name << "=" << v;
    }
  }
}

TEST(Schema, CheckRejectsBrokenPartitions) {
  PropertySchema p{"x", 0, 10, {{Level("low"), 0, 4}, {Level("high"), 6, 10}}};
  EXPECT_THROW(check_property(p), ModelError);
  p.levels = {{Level("low"), 0, 5}, {Level("LOW"), 6, 10}};
  EXPECT_THROW(check_property(p), ModelError);
  p.levels = {{Level("low"), 0, 5}, {Level("high"), 6, 9}};
  EXPECT_THROW(check_property(p), ModelError);
  p.levels = {{Level("low"), 0, 5}, {Level("high"), 6, 10}};
  EXPECT_NO_THROW(check_property(p));
  EXPECT_THROW(check_schema(ContextSchema{}), ModelError);
  EXPECT_THROW(check_schema(ContextSchema{{p, p}}), ModelError);
}

TEST(SystemModel, CheckRejectsUndeclaredReferences) {
  SystemModel m = web_sys();
  EXPECT_NO_THROW(check_system_model(m));
  m.effects.push_back({"x", Level("high"), {{"ghost", std::nullopt, 1}}});
  EXPECT_THROW(check_system_model(m), ModelError);
}

}  // namespace
}  // namespace ecamut
