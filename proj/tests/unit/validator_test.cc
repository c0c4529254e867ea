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

#include <cmath>
#include <vector>

#include "hdst/error.h"
#include "hdst/rng.h"
#include "hdst/validator.h"
#include "hdst/validator_data.h"
#include "test_support.h"

namespace hdst {
namespace {

ValidatorFeatures Features(std::vector<IntentScores> turns) {
  return ExtractFeatures(std::span<const IntentScores>(turns));
}

TEST(ExtractFeatures, DegenerateDistribution) {
  const ValidatorFeatures f = Features({{{"a", 1.0}}});
  EXPECT_EQ(f.top1, 1.0);
  EXPECT_EQ(f.top2, 0.0);
  EXPECT_EQ(f.margin, 1.0);
  EXPECT_EQ(f.entropy, 0.0);
  EXPECT_EQ(f.smoothed_max, 1.0);
  EXPECT_EQ(f.normalized_top1, 1.0);
  EXPECT_EQ(f.top_intent, "a");
}

TEST(ExtractFeatures, SmoothedMaxAcrossTurns) {
  const ValidatorFeatures f =
      Features({{{"a", 0.9}, {"b", 0.1}}, {{"a", 0.5}, {"b", 0.3}, {"c", 0.2}}});
  EXPECT_NEAR(f.smoothed_max, 0.7 * 0.5 + 0.3 * 0.9, 1e-15);
  EXPECT_NEAR(f.smoothed_max, 0.62, 1e-12);
  EXPECT_NEAR(f.normalized_top1, 0.5 / 0.9, 1e-15);
  EXPECT_NEAR(f.margin, 0.2, 1e-15);
  EXPECT_EQ(f.second_intent, "b");
}

TEST(ExtractFeatures, UniformEntropyIsLogOfSupport) {
  const ValidatorFeatures f =
      Features({{{"a", 0.25}, {"b", 0.25}, {"c", 0.25}, {"d", 0.25}}});
  EXPECT_NEAR(f.entropy, std::log(4.0), 1e-12);
  EXPECT_EQ(f.margin, 0.0);
  // Ties keep key order.
  EXPECT_EQ(f.top_intent, "a");
}

TEST(ExtractFeatures, VectorLayout) {
  const ValidatorFeatures f = Features({{{"a", 0.6}, {"b", 0.3}, {"c", 0.1}}});
  const auto v = f.Vector();
  ASSERT_EQ(v.size(), 27u);
  const auto base = f.Base();
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(v[i], base[i]);
  std::size_t k = 6;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i; j < 6; ++j) EXPECT_EQ(v[k++], base[i] * base[j]);
  }
}

TEST(ExtractFeatures, InvariantsOnRandomDistributions) {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng.Below(8);
    std::vector<IntentScores> turns;
    for (std::size_t t = 0; t <= rng.Below(4); ++t) {
      std::vector<double> w(n);
      double sum = 0.0;
      for (double& x : w) sum += (x = rng.Uniform() + 1e-3);
      IntentScores s;
      for (std::size_t i = 0; i < n; ++i) s["i" + std::to_string(i)] = w[i] / sum;
      turns.push_back(std::move(s));
    }
    const ValidatorFeatures f = Features(turns);
    EXPECT_GE(f.top1, f.top2);
    EXPECT_GE(f.top2, f.top3);
    EXPECT_GE(f.margin, 0.0);
    EXPECT_GE(f.entropy, 0.0);
    EXPECT_LE(f.entropy, std::log(static_cast<double>(n)) + 1e-12);
    EXPECT_GT(f.normalized_top1, 0.0);
    EXPECT_LE(f.normalized_top1, 1.0);
  }
}

TEST(ExtractFeatures, EmptyDialogueIsRejected) {
  EXPECT_THROW(Features({}), Error);
}

Verdict Rule(std::vector<double> top) {
  IntentScores s;
  double rest = 1.0;
  for (std::size_t i = 0; i < top.size(); ++i) {
    s["i" + std::to_string(i)] = top[i];
    rest -= top[i];
  }
  if (rest > 1e-12) s["rest"] = rest;
  return ClassifyRule(Features({s})).label;
}

TEST(ClassifyRule, DefaultThresholdTraces) {
  EXPECT_EQ(Rule({0.9, 0.05}), Verdict::kConfirmed);
  EXPECT_EQ(Rule({0.45, 0.40}), Verdict::kUnclear);    // top1 < 0.5
  EXPECT_EQ(Rule({0.52, 0.40}), Verdict::kAmbiguous);  // top2 >= 0.35
}

TEST(ClassifyRule, MarginDecidesBelowHigh) {
  // top2 below the high bar: margin alone separates confirmed from ambiguous.
  EXPECT_EQ(Rule({0.6, 0.3}), Verdict::kConfirmed);
  EXPECT_EQ(Rule({0.5, 0.34}), Verdict::kAmbiguous);
}

TEST(ClassifyRule, OneHotProbabilitiesAndChosenIntent) {
  const ValidationVerdict v = ClassifyRule(Features({{{"x", 0.9}, {"y", 0.1}}}));
  EXPECT_EQ(v.label, Verdict::kConfirmed);
  EXPECT_EQ(v.chosen_intent, "x");
  EXPECT_EQ(v.probabilities, (std::array<double, 3>{1.0, 0.0, 0.0}));
  const ValidationVerdict u = ClassifyRule(Features({{{"x", 0.4}, {"y", 0.6}}}), {0.7, 0.2, 0.35});
  EXPECT_EQ(u.label, Verdict::kUnclear);
  EXPECT_TRUE(u.chosen_intent.empty());
}

TEST(VerdictName, RoundTrip) {
  for (Verdict v : {Verdict::kConfirmed, Verdict::kAmbiguous, Verdict::kUnclear}) {
    EXPECT_EQ(ParseVerdict(VerdictName(v)), v);
  }
  EXPECT_THROW(ParseVerdict("maybe"), Error);
}

TEST(SyntheticValidatorDataset, ProportionsAndDeterminism) {
  const auto a = SyntheticValidatorDataset(10000, {0.97, 0.02, 0.01}, 5);
  const auto b = SyntheticValidatorDataset(10000, {0.97, 0.02, 0.01}, 5);
  ASSERT_EQ(a.size(), 10000u);
  const auto counts = LabelCounts(a);
  EXPECT_EQ(counts[0] + counts[1] + counts[2], 10000u);
  EXPECT_NEAR(counts[1], 200, 60);
  EXPECT_NEAR(counts[2], 100, 45);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].features, b[i].features);
    ASSERT_EQ(a[i].label, b[i].label);
    ASSERT_EQ(a[i].features.size(), kFeatureCount);
  }
}

// Labels a rule with thresholds inside default +- 0.25 (5 sd of the
// annotator jitter) can reach; each threshold acts on its own condition.
bool Reachable(Verdict label, double top1, double top2, double margin) {
  constexpr double kBox = 0.25;
  switch (label) {
    case Verdict::kUnclear:
      return top1 < 0.5 + kBox;
    case Verdict::kAmbiguous:
      return top1 >= 0.5 - kBox && (top2 >= 0.35 - kBox || margin < 0.2 + kBox);
    case Verdict::kConfirmed:
      return top1 >= 0.5 - kBox && top2 < 0.35 + kBox && margin >= 0.2 - kBox;
  }
  return false;
}

TEST(SyntheticValidatorDataset, LabelsDisagreeWithTheRuleOnlyNearItsBoundaries) {
  const auto data = SyntheticValidatorDataset(10000, {0.97, 0.02, 0.01}, 8);
  std::size_t agree = 0;
  for (const LabeledSample& s : data) {
    const double top1 = s.features[0], top2 = s.features[1], margin = s.features[2];
    ASSERT_TRUE(Reachable(s.label, top1, top2, margin)) << top1 << " " << top2;
    const Verdict nominal = top1 < 0.5               ? Verdict::kUnclear
                            : top2 >= 0.35           ? Verdict::kAmbiguous
                            : margin >= 0.2          ? Verdict::kConfirmed
                                                     : Verdict::kAmbiguous;
    agree += nominal == s.label;
  }
  // Jitter only matters near a boundary, so most samples keep the rule label.
  EXPECT_GT(agree, 9000u);
  EXPECT_LT(agree, data.size());
}

TEST(BuildValidatorDataset, RuleLabelsOnFixtureCorpus) {
  const LexiconBackend nlu(testing::FixtureLexicon());
  const auto data = BuildValidatorDataset(testing::FixtureCorpus(), testing::FixtureOntology(),
                                          nlu, DatasetOptions{});
  std::size_t user_turns = 0;
  for (const Dialogue& d : testing::FixtureCorpus().dialogues) {
    for (const Turn& t : d.turns) user_turns += t.is_user() ? 1 : 0;
  }
  ASSERT_EQ(data.size(), user_turns);
  EXPECT_GT(LabelCounts(data)[0], 0u);
  for (const auto& s : data) ASSERT_EQ(s.features.size(), kFeatureCount);

  // Full label noise moves every label to some other class.
  DatasetOptions noisy;
  noisy.label_noise = 1.0;
  noisy.seed = 3;
  const auto flipped = BuildValidatorDataset(testing::FixtureCorpus(), testing::FixtureOntology(),
                                             nlu, noisy);
  ASSERT_EQ(flipped.size(), data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(flipped[i].features, data[i].features);
    EXPECT_NE(flipped[i].label, data[i].label);
  }
}

}  // namespace
}  // namespace hdst
