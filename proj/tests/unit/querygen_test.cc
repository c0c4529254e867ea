// Copyright 2026 The Hybrid DST Authors.
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

#include <algorithm>

#include "hdst/error.h"
#include "hdst/querygen.h"
#include "hdst/rng.h"
#include "test_support.h"

namespace hdst {
namespace {

const IntentSchema& Restaurant() {
  return testing::FixtureOntology().Intent("find_restaurant");
}

TEST(BuildQuery, DeclarationOrderAndParams) {
  const SqlQuery q = BuildQuery(Restaurant(), {{"cuisine", "kebab"}, {"city", "Tehran"}});
  EXPECT_EQ(q.text, "SELECT * FROM find_restaurant WHERE city = ? AND cuisine = ?");
  EXPECT_EQ(q.params, (std::vector<std::string>{"Tehran", "kebab"}));
}

TEST(BuildQuery, NoFillsNoWhere) {
  const SqlQuery q = BuildQuery(Restaurant(), {});
  EXPECT_EQ(q.text, "SELECT * FROM find_restaurant");
  EXPECT_TRUE(q.params.empty());
}

TEST(BuildQuery, InjectionStaysInParams) {
  const std::string evil = "x' OR '1'='1";
  const SqlQuery q = BuildQuery(Restaurant(), {{"city", evil}});
  EXPECT_EQ(q.text.find('\''), std::string::npos);
  EXPECT_EQ(q.params, std::vector<std::string>{evil});
}

TEST(BuildQuery, WildcardAndMandatoryOnly) {
  const SqlQuery any = BuildQuery(Restaurant(), {{"city", "Tehran"}, {"cuisine", "*"}});
  EXPECT_EQ(any.text, "SELECT * FROM find_restaurant WHERE city = ?");
  const SqlQuery full =
      BuildQuery(Restaurant(), {{"city", "Tehran"}, {"price", "cheap"}});
  EXPECT_EQ(full.text, "SELECT * FROM find_restaurant WHERE city = ? AND price = ?");
  const SqlQuery mand =
      BuildQuery(Restaurant(), {{"city", "Tehran"}, {"price", "cheap"}}, {.mandatory_only = true});
  EXPECT_EQ(mand.text, "SELECT * FROM find_restaurant WHERE city = ?");
  EXPECT_EQ(mand.params, std::vector<std::string>{"Tehran"});
}

TEST(BuildQuery, UnknownSlot) {
  try {
    BuildQuery(Restaurant(), {{"hotel_name", "x"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

// Text built straight from the constrained slot ids.
std::string ExpectedText(const IntentSchema& schema, const SlotValues& fills) {
  std::string text = "SELECT * FROM " + schema.id;
  const char* sep = " WHERE ";
  for (const SlotDef& s : schema.slots) {
    auto it = fills.find(s.id);
    if (it == fills.end() || it->second == "*") continue;
    text += sep + s.id + " = ?";
    sep = " AND ";
  }
  return text;
}

TEST(BuildQuery, FuzzedValuesNeverReachText) {
  Rng rng(404);
  const auto& intents = testing::FixtureOntology().intents();
  for (int i = 0; i < 10000; ++i) {
    const IntentSchema& schema = intents[rng.Below(intents.size())];
    SlotValues fills;
    for (const SlotDef& s : schema.slots) {
      if (rng.Bernoulli(0.7)) fills[s.id] = testing::FuzzSlotValue(rng);
    }
    const SqlQuery q = BuildQuery(schema, fills);
    ASSERT_EQ(q.text, ExpectedText(schema, fills));
    ASSERT_EQ(CountPlaceholders(q.text), q.params.size());
    ASSERT_TRUE(std::all_of(q.text.begin(), q.text.end(), [](char c) {
      return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
             c == '_' || c == ' ' || c == '*' || c == '=' || c == '?';
    })) << q.text;
    for (const auto& [slot, value] : fills) ASSERT_EQ(q.text.find(value), std::string::npos);
    std::size_t p = 0;
    for (const SlotDef& s : schema.slots) {
      auto it = fills.find(s.id);
      if (it != fills.end()) ASSERT_EQ(q.params.at(p++), it->second);
    }
  }
}

}  // namespace
}  // namespace hdst
