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
#include <filesystem>
#include <map>
#include <set>

#include "hdst/corpus.h"
#include "hdst/error.h"
#include "hdst/text.h"
#include "test_support.h"

namespace hdst {
namespace {

using testing::FixtureCorpus;
using testing::FixtureOntology;
using testing::TestDataPath;

TEST(LoadCorpus, SingleTurnDialogue) {
  const std::string text = R"({"ontology_checksum":")" + FixtureOntology().Checksum() +
                           R"(","dialogues":[{"id":"one","turns":[{"speaker":"user",
      "text":"weather in Tehran","intent":"get_weather","slots":{"city":"Tehran"},
      "state":{"city":"Tehran"}}]}]})";
  const Corpus corpus = LoadCorpus(text, FixtureOntology());
  ASSERT_EQ(corpus.dialogues.size(), 1u);
  EXPECT_EQ(corpus.user_turn_count(), 1u);
  EXPECT_EQ(corpus.dialogues[0].turns[0].gold_state.at("city"), "Tehran");
}

TEST(LoadCorpus, AcceptsBundledFixtures) {
  EXPECT_EQ(FixtureCorpus().dialogues.size(), 50u);
  EXPECT_NO_THROW(LoadCorpusFile(TestDataPath("valid_small.json"), FixtureOntology()));
}

TEST(LoadCorpus, RoundTrip) {
  const Corpus& corpus = FixtureCorpus();
  EXPECT_EQ(LoadCorpus(SerializeCorpus(corpus), FixtureOntology()), corpus);
}

// Each negative fixture is named after the one rule it breaks.
TEST(LoadCorpus, RejectsEveryNegativeFixtureWithItsRule) {
  const std::filesystem::path dir = TestDataPath("negative");
  std::size_t checked = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string rule = entry.path().stem().string();
    SCOPED_TRACE(rule);
    try {
      LoadCorpusFile(entry.path().string(), FixtureOntology());
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.rule(), rule) << e.what();
      const bool dialogue_level = rule != "checksum_mismatch";
      if (dialogue_level) {
        EXPECT_NE(std::string(e.what()).find("neg-" + rule), std::string::npos) << e.what();
      }
    }
    ++checked;
  }
  EXPECT_GE(checked, 12u);
}

TEST(LoadCorpus, NonMonotoneStateMessage) {
  try {
    LoadCorpusFile(TestDataPath("negative/non_monotone_state.json"), FixtureOntology());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAnnotation);
    EXPECT_NE(std::string(e.what()).find("non-monotone state without intent shift"),
              std::string::npos);
  }
}

TEST(LoadCorpus, UnknownIntentMessage) {
  try {
    LoadCorpusFile(TestDataPath("negative/unknown_intent.json"), FixtureOntology());
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unknown intent"), std::string::npos);
  }
}

Corpus FirstDialogues(std::size_t n) {
  Corpus out = FixtureCorpus();
  out.dialogues.resize(n);
  return out;
}

std::multiset<std::size_t> TestSizes(const std::vector<Fold>& folds) {
  std::multiset<std::size_t> sizes;
  for (const Fold& f : folds) sizes.insert(f.test.dialogues.size());
  return sizes;
}

TEST(SplitKFold, TenDialoguesTenFolds) {
  const auto folds = SplitKFold(FirstDialogues(10), 10, 3);
  ASSERT_EQ(folds.size(), 10u);
  for (const Fold& f : folds) {
    EXPECT_EQ(f.test.dialogues.size(), 1u);
    EXPECT_EQ(f.train.dialogues.size(), 9u);
  }
}

TEST(SplitKFold, TenDialoguesThreeFolds) {
  EXPECT_EQ(TestSizes(SplitKFold(FirstDialogues(10), 3, 3)),
            (std::multiset<std::size_t>{3, 3, 4}));
}

TEST(SplitKFold, PartitionsByDialogueDeterministically) {
  const Corpus& corpus = FixtureCorpus();
  for (int k : {2, 5, 7}) {
    for (std::uint64_t seed : {0u, 9u}) {
      const auto folds = SplitKFold(corpus, k, seed);
      const auto again = SplitKFold(corpus, k, seed);
      std::multiset<std::string> test_ids;
      std::size_t min_size = SIZE_MAX, max_size = 0;
      for (std::size_t i = 0; i < folds.size(); ++i) {
        EXPECT_EQ(folds[i].test, again[i].test);
        std::set<std::string> train_ids;
        for (const Dialogue& d : folds[i].train.dialogues) train_ids.insert(d.id);
        for (const Dialogue& d : folds[i].test.dialogues) {
          test_ids.insert(d.id);
          EXPECT_FALSE(train_ids.count(d.id)) << "dialogue in both train and test";
        }
        EXPECT_EQ(train_ids.size() + folds[i].test.dialogues.size(), corpus.dialogues.size());
        min_size = std::min(min_size, folds[i].test.dialogues.size());
        max_size = std::max(max_size, folds[i].test.dialogues.size());
      }
      EXPECT_LE(max_size - min_size, 1u);
      std::multiset<std::string> all;
      for (const Dialogue& d : corpus.dialogues) all.insert(d.id);
      EXPECT_EQ(test_ids, all);
    }
  }
}

TEST(SplitKFold, RejectsBadK) {
  EXPECT_THROW(SplitKFold(FirstDialogues(3), 0, 1), Error);
  EXPECT_THROW(SplitKFold(FirstDialogues(3), 4, 1), Error);
}

TEST(DontCareValue, DefaultOrWildcard) {
  const IntentSchema& s = FixtureOntology().Intent("find_restaurant");
  EXPECT_EQ(DontCareValue(*s.FindSlot("cuisine")), "kebab");
  const IntentSchema& table = FixtureOntology().Intent("book_table");
  EXPECT_EQ(DontCareValue(*table.FindSlot("restaurant_name")), std::string(kAnyValue));
}

}  // namespace
}  // namespace hdst
