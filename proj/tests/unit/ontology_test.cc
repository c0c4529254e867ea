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
#include <set>

#include <nlohmann/json.hpp>

#include "hdst/error.h"
#include "hdst/ontology.h"
#include "oracles.h"
#include "test_support.h"

namespace hdst {
namespace {

using nlohmann::json;
using testing::FixtureOntology;

json MinimalDocument() {
  return json::parse(R"({
    "domains": ["weather"],
    "intents": [
      {"id": "get_weather", "domain": "weather",
       "slots": [{"id": "city", "name": "شهر", "mandatory": true,
                  "values": ["Tehran", "Shiraz"], "default_index": 0}]},
      {"id": "dont_care", "domain": "weather", "special": "dont_care", "slots": []}
    ],
    "questions": [
      {"intent": "get_weather", "slot": "city",
       "texts": ["Which city?", "What city?", "City please?", "For which city?", "کدام شهر؟"]}
    ]
  })");
}

ErrorCode CodeOf(const json& doc) {
  try {
    ParseOntology(doc.dump());
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "document was accepted";
  return ErrorCode::kIo;
}

std::string MessageOf(const json& doc) {
  try {
    ParseOntology(doc.dump());
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

TEST(ParseOntology, MinimalDocument) {
  const Ontology o = ParseOntology(MinimalDocument().dump());
  EXPECT_EQ(o.intents().size(), 2u);
  EXPECT_EQ(o.DontCareIntent().id, "dont_care");
  ASSERT_NE(o.Questions("get_weather", "city"), nullptr);
  EXPECT_EQ(o.Questions("get_weather", "city")->size(), 5u);
}

TEST(ParseOntology, RejectsFiveSlots) {
  json doc = MinimalDocument();
  auto& slots = doc["intents"][0]["slots"];
  for (int i = 0; i < 4; ++i) {
    slots.push_back({{"id", "extra" + std::to_string(i)}, {"name", "x"}, {"mandatory", false}});
  }
  EXPECT_EQ(CodeOf(doc), ErrorCode::kSemantic);
  EXPECT_NE(MessageOf(doc).find("slot count exceeds 4"), std::string::npos);
}

TEST(ParseOntology, RejectsQuestionOnOptionalSlot) {
  json doc = MinimalDocument();
  doc["intents"][0]["slots"].push_back({{"id", "date"}, {"name", "d"}, {"mandatory", false}});
  doc["questions"].push_back(
      {{"intent", "get_weather"}, {"slot", "date"}, {"texts", {"When?"}}});
  EXPECT_NE(MessageOf(doc).find("question bound to non-mandatory slot"), std::string::npos);
}

TEST(ParseOntology, SyntaxErrorIsReported) {
  try {
    ParseOntology("{\"domains\": [");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSyntax);
  }
}

TEST(ParseOntology, RejectsStructuralMistakes) {
  {
    json doc = MinimalDocument();
    doc["intents"].push_back(doc["intents"][0]);
    EXPECT_EQ(CodeOf(doc), ErrorCode::kSemantic) << "duplicate intent";
  }
  {
    json doc = MinimalDocument();
    doc["intents"][0]["domain"] = "nowhere";
    EXPECT_EQ(CodeOf(doc), ErrorCode::kSemantic) << "unknown domain";
  }
  {
    json doc = MinimalDocument();
    doc["intents"][0]["slots"][0]["default_index"] = 9;
    EXPECT_EQ(CodeOf(doc), ErrorCode::kSemantic) << "default index out of range";
  }
  {
    json doc = MinimalDocument();
    doc["questions"].clear();
    EXPECT_EQ(CodeOf(doc), ErrorCode::kSemantic) << "mandatory slot without questions";
  }
  {
    json doc = MinimalDocument();
    doc["intents"].erase(1);
    EXPECT_EQ(CodeOf(doc), ErrorCode::kSemantic) << "no dont_care intent";
  }
}

TEST(ParseOntology, RoundTripsFixture) {
  const Ontology& o = FixtureOntology();
  EXPECT_EQ(ParseOntology(SerializeOntology(o)), o);
  EXPECT_EQ(ParseOntology(SerializeOntology(o)).Checksum(), o.Checksum());
}

TEST(MissingMandatory, DeclarationOrderDifference) {
  const IntentSchema& s = FixtureOntology().Intent("find_restaurant");
  EXPECT_EQ(MissingMandatory(s, {"city"}), std::vector<std::string>{"cuisine"});
  EXPECT_TRUE(MissingMandatory(s, {"city", "cuisine"}).empty());
  EXPECT_EQ(MissingMandatory(s, {}), (std::vector<std::string>{"city", "cuisine"}));
  EXPECT_THROW(MissingMandatory(s, {"airline"}), Error);
}

TEST(MissingMandatory, SubsetOfMandatoryDisjointFromFilled) {
  for (const IntentSchema& schema : FixtureOntology().intents()) {
    const std::size_t n = schema.slots.size();
    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
      std::set<std::string> filled;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) filled.insert(schema.slots[i].id);
      }
      for (const std::string& slot : MissingMandatory(schema, filled)) {
        EXPECT_TRUE(schema.FindSlot(slot)->mandatory);
        EXPECT_FALSE(filled.count(slot));
      }
    }
  }
}

TEST(PickFollowupQuestion, DeterministicAndFromBank) {
  const Ontology& o = FixtureOntology();
  const auto& bank = *o.Questions("find_restaurant", "cuisine");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::string& q = PickFollowupQuestion(o, "find_restaurant", "cuisine", seed);
    EXPECT_EQ(q, PickFollowupQuestion(o, "find_restaurant", "cuisine", seed));
    EXPECT_NE(std::find(bank.begin(), bank.end(), q), bank.end());
  }
}

TEST(PickFollowupQuestion, SingletonListAlwaysPicksIt) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) EXPECT_EQ(FollowupIndex(seed, 1), 0u);
}

TEST(PickFollowupQuestion, EverySeedRangeCoversFiveQuestions) {
  std::set<std::size_t> seen;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) seen.insert(FollowupIndex(seed, 5));
  EXPECT_EQ(seen.size(), 5u);
}

TEST(PickFollowupQuestion, UniformByChiSquare) {
  constexpr int kDraws = 10000;
  for (std::size_t n : {2u, 3u, 5u, 7u}) {
    std::vector<int> counts(n, 0);
    for (std::uint64_t seed = 0; seed < kDraws; ++seed) ++counts[FollowupIndex(seed, n)];
    const double expected = static_cast<double>(kDraws) / static_cast<double>(n);
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, oracle::ChiSquareCritical(static_cast<double>(n - 1), 0.01))
        << "list size " << n;
  }
}

}  // namespace
}  // namespace hdst
