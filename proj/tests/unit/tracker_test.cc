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

#include <set>
#include <unordered_set>

#include "hdst/error.h"
#include "hdst/pipeline.h"
#include "hdst/tracker.h"
#include "test_support.h"

namespace hdst {
namespace {

using testing::AgreeingNlu;
using testing::Ambiguous;
using testing::Confirmed;
using testing::FixtureOntology;
using testing::SplitNlu;
using testing::Unclear;

const Ontology& Onto() { return FixtureOntology(); }

bool InBank(const std::string& intent, const std::string& slot, const std::string& q) {
  const auto* bank = Onto().Questions(intent, slot);
  return bank && std::find(bank->begin(), bank->end(), q) != bank->end();
}

TEST(NewSession, EmptyAndUnique) {
  const DialogueState a = NewSession(Onto(), 5);
  EXPECT_FALSE(a.active_intent);
  EXPECT_TRUE(a.fills.empty());
  EXPECT_TRUE(a.history.empty());
  EXPECT_EQ(a.turn_no, 0);
  EXPECT_EQ(a.pending, Pending::kNone);
  DialogueState b = NewSession(Onto(), 5);
  EXPECT_NE(a.session_id, b.session_id);
  b.session_id = a.session_id;
  EXPECT_EQ(a, b);

  std::unordered_set<std::string> ids;
  for (int i = 0; i < 10000; ++i) ids.insert(NewSession(Onto(), 1).session_id);
  EXPECT_EQ(ids.size(), 10000u);
}

TEST(DetectIntentShift, RequiresBothRunsToAgree) {
  DialogueState s = NewSession("s", 1);
  s.active_intent = "find_restaurant";
  EXPECT_TRUE(DetectIntentShift(s, AgreeingNlu("get_weather")));
  EXPECT_FALSE(DetectIntentShift(s, SplitNlu("get_weather", "find_restaurant")));
  EXPECT_FALSE(DetectIntentShift(s, SplitNlu("find_restaurant", "get_weather")));
  EXPECT_FALSE(DetectIntentShift(s, SplitNlu("get_weather", "find_hotel")));
  EXPECT_FALSE(DetectIntentShift(s, AgreeingNlu("find_restaurant")));
}

// Worked example: a single mandatory slot completes on the first turn.
TEST(Update, CompletesWhenOnlyMandatoryIsGiven) {
  DialogueState s = NewSession("w1", 1);
  const TrackerAction a = Update(s, AgreeingNlu("get_weather", {{"city", "Tehran"}}),
                                 Confirmed("get_weather"), Onto());
  ASSERT_EQ(a.kind, ActionKind::kComplete);
  ASSERT_TRUE(a.result);
  EXPECT_EQ(a.result->state, (SlotValues{{"city", "Tehran"}}));
  EXPECT_EQ(a.result->status, DialogueStatus::kComplete);
  EXPECT_FALSE(a.result->followup);
  EXPECT_FALSE(a.question);
  EXPECT_EQ(s.active_intent, "get_weather");
  EXPECT_EQ(s.fills.at("city").source, FillSource::kExtracted);
  EXPECT_EQ(s.fills.at("city").turn_no, 1);
}

// Worked example: a missing mandatory slot yields a follow-up from its bank.
TEST(Update, AsksFollowupForFirstMissingMandatory) {
  DialogueState s = NewSession("w2", 1);
  const TrackerAction a = Update(s, AgreeingNlu("find_restaurant", {{"city", "Tehran"}}),
                                 Confirmed("find_restaurant"), Onto());
  ASSERT_EQ(a.kind, ActionKind::kAskFollowup);
  ASSERT_TRUE(a.question);
  EXPECT_EQ(a.slot, "cuisine");
  EXPECT_TRUE(InBank("find_restaurant", "cuisine", *a.question)) << *a.question;
  EXPECT_EQ(*a.question,
            PickFollowupQuestion(Onto(), "find_restaurant", "cuisine", FollowupSeed(s)));
  EXPECT_FALSE(a.result);
}

// Worked example: unclear pauses without touching fills.
TEST(Update, UnclearPausesAndKeepsFills) {
  DialogueState s = NewSession("w3", 1);
  Update(s, AgreeingNlu("find_restaurant", {{"city", "Tehran"}}), Confirmed("find_restaurant"),
         Onto());
  const auto fills = s.fills;
  const TrackerAction a = Update(s, AgreeingNlu("find_restaurant", {{"city", "Shiraz"}}),
                                 Unclear(), Onto());
  EXPECT_EQ(a.kind, ActionKind::kAskClarifyUnclear);
  EXPECT_EQ(a.question, ClarifyUnclearQuestion());
  EXPECT_EQ(s.fills, fills);
  EXPECT_EQ(s.pending, Pending::kUnclear);
  EXPECT_EQ(s.turn_no, 2);
}

TEST(Update, AmbiguousNamesTopTwoIntents) {
  DialogueState s = NewSession("amb", 1);
  NluOutput nlu = AgreeingNlu("find_restaurant");
  nlu.scores = {{"find_restaurant", 0.45}, {"get_weather", 0.4}, {"find_hotel", 0.15}};
  const TrackerAction a = Update(s, nlu, Ambiguous(), Onto());
  EXPECT_EQ(a.kind, ActionKind::kAskClarifyIntent);
  EXPECT_EQ(a.question, ClarifyIntentQuestion("find_restaurant", "get_weather"));
  EXPECT_EQ(s.pending, Pending::kAmbiguous);
  EXPECT_TRUE(s.fills.empty());
}

TEST(Update, PendingIsAbsorbingForNonConfirmedTurns) {
  DialogueState s = NewSession("abs", 1);
  Update(s, AgreeingNlu("find_restaurant", {{"city", "Tehran"}}), Confirmed("find_restaurant"),
         Onto());
  const auto fills = s.fills;
  for (int i = 0; i < 6; ++i) {
    Update(s, AgreeingNlu("get_weather", {{"city", "Qom"}}), i % 2 ? Unclear() : Ambiguous(),
           Onto());
    EXPECT_EQ(s.fills, fills);
    EXPECT_NE(s.pending, Pending::kNone);
  }
  // A confirmed turn resumes.
  Update(s, AgreeingNlu("find_restaurant", {{"cuisine", "kebab"}}), Confirmed("find_restaurant"),
         Onto());
  EXPECT_EQ(s.pending, Pending::kNone);
  EXPECT_EQ(s.fills.at("cuisine").value, "kebab");
}

// Worked example: don't-care takes the schema default.
TEST(Update, DontCareTakesSchemaDefault) {
  const SlotDef* cuisine = Onto().Intent("find_restaurant").FindSlot("cuisine");
  ASSERT_TRUE(cuisine && !cuisine->free_text());
  const std::string expected = cuisine->values.at(static_cast<std::size_t>(cuisine->default_index));
  EXPECT_EQ(expected, "kebab");

  DialogueState s = NewSession("w5", 1);
  Update(s, AgreeingNlu("find_restaurant", {{"city", "Tehran"}}), Confirmed("find_restaurant"),
         Onto());
  const TrackerAction a = Update(s, AgreeingNlu("dont_care", {}, {"cuisine"}),
                                 Confirmed("dont_care"), Onto());
  EXPECT_EQ(s.active_intent, "find_restaurant");
  EXPECT_EQ(s.fills.at("cuisine"), (SlotFill{expected, FillSource::kDontCareDefault, 2}));
  ASSERT_EQ(a.kind, ActionKind::kComplete);
  EXPECT_EQ(a.result->dont_care, std::set<std::string>{"cuisine"});
}

TEST(Update, DontCareOnFreeTextSlotIsWildcardAndUnconstrained) {
  DialogueState s = NewSession("ft", 1);
  Update(s, AgreeingNlu("book_table", {}), Confirmed("book_table"), Onto());
  Update(s, AgreeingNlu("book_table", {}, {"restaurant_name"}), Confirmed("book_table"), Onto());
  ASSERT_TRUE(s.fills.count("restaurant_name"));
  EXPECT_EQ(s.fills.at("restaurant_name").value, "*");
  const DstResult r = EmitResult(s, Onto());
  EXPECT_EQ(r.query.text.find("restaurant_name"), std::string::npos) << r.query.text;
  for (const auto& p : r.query.params) EXPECT_NE(p, "*");
}

// Worked example: a shift carries shared slots and drops the rest.
TEST(Update, ShiftCarriesSharedSlotsAndDropsOthers) {
  DialogueState s = NewSession("w4", 1);
  Update(s, AgreeingNlu("find_restaurant", {{"city", "Tehran"}, {"cuisine", "kebab"}}),
         Confirmed("find_restaurant"), Onto());
  ASSERT_EQ(s.fills.size(), 2u);
  const TrackerAction a =
      Update(s, AgreeingNlu("get_weather"), Confirmed("get_weather"), Onto());
  EXPECT_EQ(s.active_intent, "get_weather");
  ASSERT_EQ(s.fills.size(), 1u);
  EXPECT_EQ(s.fills.at("city").value, "Tehran");
  EXPECT_EQ(s.fills.at("city").source, FillSource::kCarriedOver);
  ASSERT_EQ(a.kind, ActionKind::kComplete);
  EXPECT_EQ(a.result->state, (SlotValues{{"city", "Tehran"}}));
  bool logged = false;
  for (const StateRecord& r : s.history) logged |= r.kind == RecordKind::kShiftIntent;
  EXPECT_TRUE(logged);
}

TEST(Update, ContextRunAnchorsAgainstOneTurnNoise) {
  DialogueState s = NewSession("anchor", 1);
  Update(s, AgreeingNlu("find_restaurant", {{"city", "Tehran"}}), Confirmed("find_restaurant"),
         Onto());
  Update(s, SplitNlu("get_weather", "find_restaurant", {{"cuisine", "kebab"}}),
         Confirmed("find_restaurant"), Onto());
  EXPECT_EQ(s.active_intent, "find_restaurant");
  EXPECT_EQ(s.fills.size(), 2u);
}

TEST(Update, LatestTurnWins) {
  DialogueState s = NewSession("lw", 1);
  Update(s, AgreeingNlu("find_restaurant", {{"city", "Tehran"}}), Confirmed("find_restaurant"),
         Onto());
  Update(s, AgreeingNlu("find_restaurant", {{"city", "Shiraz"}}), Confirmed("find_restaurant"),
         Onto());
  EXPECT_EQ(s.fills.at("city"), (SlotFill{"Shiraz", FillSource::kExtracted, 2}));
}

TEST(Update, OutOfDomainOrOpeningDontCareIsUnclear) {
  DialogueState s = NewSession("ood", 1);
  EXPECT_EQ(Update(s, AgreeingNlu("out_of_domain"), Confirmed("out_of_domain"), Onto()).kind,
            ActionKind::kAskClarifyUnclear);
  EXPECT_EQ(Update(s, AgreeingNlu("dont_care", {}, {"cuisine"}), Confirmed("dont_care"), Onto()).kind,
            ActionKind::kAskClarifyUnclear);
  EXPECT_FALSE(s.active_intent);
}

TEST(Update, FailureLeavesStateUntouched) {
  DialogueState s = NewSession("exc", 1);
  Update(s, AgreeingNlu("find_restaurant", {{"city", "Tehran"}}), Confirmed("find_restaurant"),
         Onto());
  const DialogueState before = s;
  try {
    Update(s, AgreeingNlu("no_such_intent"), Confirmed("no_such_intent"), Onto());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  EXPECT_EQ(s, before);
  // Verdict naming an intent the NLU never scored.
  EXPECT_THROW(Update(s, AgreeingNlu("get_weather"), Confirmed("find_hotel"), Onto()), Error);
  EXPECT_EQ(s, before);
}

TEST(Update, IgnoresSlotsOutsideTheActiveSchema) {
  DialogueState s = NewSession("foreign", 1);
  Update(s, AgreeingNlu("find_restaurant", {{"city", "Tehran"}, {"hotel_name", "Abbasi"}}),
         Confirmed("find_restaurant"), Onto());
  EXPECT_EQ(s.fills.count("hotel_name"), 0u);
  for (const auto& [slot, fill] : s.fills) {
    EXPECT_TRUE(Onto().Intent(*s.active_intent).HasSlot(slot)) << slot;
  }
}

TEST(EmitResult, RequiresActiveIntent) {
  EXPECT_THROW(EmitResult(NewSession("x", 1), Onto()), Error);
}

TEST(FollowupQuestions, AlwaysFromTheBank) {
  for (const IntentSchema& intent : Onto().intents()) {
    if (intent.kind != IntentKind::kNormal) continue;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      DialogueState s = NewSession("fq", seed);
      const TrackerAction a = Update(s, AgreeingNlu(intent.id), Confirmed(intent.id), Onto());
      if (a.kind == ActionKind::kAskFollowup) {
        ASSERT_TRUE(InBank(intent.id, *a.slot, *a.question)) << intent.id;
        EXPECT_EQ(a.slot, MissingMandatory(intent, {}).front());
      }
    }
  }
}

struct GoldRun {
  std::vector<Conversation> conversations;
  std::vector<std::vector<std::string>> results;  // serialized, per turn
};

GoldRun RunGold(std::uint64_t seed) {
  GoldEchoNlu echo;
  RuleValidator validator;
  RuleStateTracker tracker(Onto());
  Pipeline pipeline(Onto(), echo, validator, tracker);
  GoldRun run;
  for (const Dialogue& d : testing::FixtureCorpus().dialogues) {
    Conversation c{NewSession(d.id, seed), {}, {}, {}};
    std::vector<std::string> per_turn;
    for (const Turn& t : d.turns) {
      if (!t.is_user()) continue;
      echo.Prime(t);
      const TurnOutcome out = pipeline.Step(c, t.text);
      per_turn.push_back(out.result ? SerializeDstResult(*out.result) : "");
    }
    run.conversations.push_back(std::move(c));
    run.results.push_back(std::move(per_turn));
  }
  return run;
}

TEST(Replay, ReconstructsEveryFixtureDialogue) {
  const GoldRun run = RunGold(77);
  ASSERT_EQ(run.conversations.size(), testing::FixtureCorpus().dialogues.size());
  for (const Conversation& c : run.conversations) {
    const DialogueState& live = c.state;
    const DialogueState replayed = Replay(live.session_id, live.rng_seed, live.history);
    ASSERT_EQ(replayed, live) << live.session_id;
    ASSERT_EQ(DialogueStateToJson(replayed).dump(), DialogueStateToJson(live).dump());
    // Every prefix of the log is a valid state too.
    for (std::size_t n = 0; n <= live.history.size(); ++n) {
      Replay(live.session_id, live.rng_seed,
             std::span<const StateRecord>(live.history.data(), n));
    }
  }
}

TEST(Replay, GoldStateMatchesAnnotations) {
  const GoldRun run = RunGold(3);
  const auto& dialogues = testing::FixtureCorpus().dialogues;
  for (std::size_t i = 0; i < dialogues.size(); ++i) {
    SlotValues last;
    for (const Turn& t : dialogues[i].turns) {
      if (t.is_user()) last = t.gold_state;
    }
    SlotValues live;
    for (const auto& [slot, fill] : run.conversations[i].state.fills) live[slot] = fill.value;
    EXPECT_EQ(live, last) << dialogues[i].id;
  }
}

TEST(Determinism, SameSeedSameResults) {
  EXPECT_EQ(RunGold(9).results, RunGold(9).results);
}

TEST(StateJson, RoundTrip) {
  const GoldRun run = RunGold(5);
  for (const Conversation& c : run.conversations) {
    const auto j = DialogueStateToJson(c.state);
    EXPECT_EQ(DialogueStateFromJson(nlohmann::json::parse(j.dump())), c.state);
    for (const StateRecord& r : c.state.history) {
      EXPECT_EQ(StateRecordFromJson(nlohmann::json::parse(StateRecordToJson(r).dump())), r);
    }
  }
}

TEST(DstResultJson, Shape) {
  DialogueState s = NewSession("j", 1);
  const TrackerAction a = Update(s, AgreeingNlu("find_restaurant", {{"city", "Tehran"}}),
                                 Confirmed("find_restaurant"), Onto());
  const auto j = nlohmann::json::parse(SerializeDstResult(EmitResult(s, Onto())));
  EXPECT_EQ(j["dialogue_status"], "in_progress");
  EXPECT_EQ(j["intent"], "find_restaurant");
  EXPECT_EQ(j["state"], nlohmann::json({{"city", "Tehran"}}));
  EXPECT_EQ(j["sql"]["params"], nlohmann::json({"Tehran"}));
  EXPECT_EQ(j["followup"], *a.question);
}

}  // namespace
}  // namespace hdst
