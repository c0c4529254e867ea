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
#include <cmath>
#include <vector>

#include "hdst/error.h"
#include "hdst/gbt.h"
#include "hdst/rng.h"
#include "hdst/validator_data.h"
#include "oracles.h"

namespace hdst {
namespace {

// Three bands along x0; x1 is noise.
std::vector<LabeledSample> SeparableToySet(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = rng.Uniform();
    const Verdict label = x0 < 1.0 / 3 ? Verdict::kConfirmed
                          : x0 < 2.0 / 3 ? Verdict::kAmbiguous
                                         : Verdict::kUnclear;
    out.push_back({{x0, rng.Uniform()}, label});
  }
  return out;
}

std::vector<LabeledSample> RandomDataset(Rng& rng) {
  const std::size_t n = 20 + rng.Below(200);
  const std::size_t f = 1 + rng.Below(6);
  std::vector<LabeledSample> out(n);
  for (auto& s : out) {
    s.features.resize(f);
    for (double& x : s.features) x = rng.Normal();
    // Labels loosely tied to the first feature, with noise.
    const double z = s.features[0] + 0.8 * rng.Normal();
    s.label = z < -0.5 ? Verdict::kUnclear : z < 0.7 ? Verdict::kConfirmed : Verdict::kAmbiguous;
  }
  return out;
}

double Accuracy(const GbtModel& model, std::span<const LabeledSample> data) {
  std::size_t hit = 0;
  for (const auto& s : data) hit += PredictGbt(model, s.features).label == s.label;
  return static_cast<double>(hit) / static_cast<double>(data.size());
}

TEST(TrainGbt, LossNonIncreasingOnRandomDatasets) {
  Rng rng(2026);
  for (int trial = 0; trial < 100; ++trial) {
    const auto data = RandomDataset(rng);
    GbtParams p;
    p.n_trees = 20;
    p.max_depth = 1 + static_cast<int>(rng.Below(4));
    p.learning_rate = 0.1 + 0.9 * rng.Uniform();
    p.subsample = rng.Bernoulli(0.5) ? 1.0 : 0.7;
    p.seed = trial;
    if (rng.Bernoulli(0.5)) p.class_weights = DefaultClassWeights(data);
    TrainingTrace trace;
    const GbtModel model = TrainGbt(data, p, &trace);
    ASSERT_EQ(trace.loss.size(), 21u);
    for (std::size_t r = 1; r < trace.loss.size(); ++r) {
      ASSERT_LE(trace.loss[r], trace.loss[r - 1] + 1e-9) << "trial " << trial << " round " << r;
    }
    // The trace agrees with an independent evaluation of the final model.
    EXPECT_NEAR(trace.loss.back(), WeightedLogLoss(model, data, model.class_weights), 1e-9);
  }
}

TEST(TrainGbt, SeparableToySetFitsWithinFiftyRounds) {
  const auto data = SeparableToySet(300, 3);
  GbtParams p;
  p.n_trees = 50;
  p.max_depth = 3;
  const GbtModel model = TrainGbt(data, p);
  EXPECT_LE(model.rounds(), 50);
  EXPECT_EQ(Accuracy(model, data), 1.0);
}

TEST(TrainGbt, ZeroRoundsGivesUniformProbabilities) {
  GbtParams p;
  p.n_trees = 0;
  const GbtModel model = TrainGbt(SeparableToySet(30, 1), p);
  const ClassVector probs = model.Probabilities(std::vector<double>{0.2, 0.4});
  for (double q : probs) EXPECT_NEAR(q, 1.0 / 3.0, 1e-15);
}

TEST(TrainGbt, SingleClassDataPredictsThatClass) {
  std::vector<LabeledSample> data(40);
  Rng rng(4);
  for (auto& s : data) s = {{rng.Uniform(), rng.Uniform()}, Verdict::kUnclear};
  GbtParams p;
  p.n_trees = 10;
  const GbtModel model = TrainGbt(data, p);
  for (const auto& s : data) {
    const ClassVector probs = model.Probabilities(s.features);
    EXPECT_GT(probs[2], 0.9);
    EXPECT_EQ(PredictGbt(model, s.features).label, Verdict::kUnclear);
  }
}

TEST(TrainGbt, RejectsBadInput) {
  GbtParams p;
  EXPECT_THROW(TrainGbt({}, p), Error);
  std::vector<LabeledSample> ragged{{{1.0}, Verdict::kConfirmed}, {{1.0, 2.0}, Verdict::kAmbiguous}};
  try {
    TrainGbt(ragged, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  p.learning_rate = 0.0;
  EXPECT_THROW(TrainGbt(SeparableToySet(10, 1), p), Error);
}

TEST(PredictGbt, DimensionMismatch) {
  GbtParams p;
  p.n_trees = 2;
  const GbtModel model = TrainGbt(SeparableToySet(30, 1), p);
  try {
    PredictGbt(model, std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(DecideClass, OffsetArithmetic) {
  const ClassVector probs{0.6, 0.3, 0.1};
  EXPECT_EQ(DecideClass(probs, {0, 0, 0}), 0);
  // 0.3 + 0.35 = 0.65 > 0.6.
  EXPECT_EQ(DecideClass(probs, {0, 0.35, 0}), 1);
  EXPECT_EQ(DecideClass({0.4, 0.4, 0.2}, {0, 0, 0}), 0);  // lowest index on ties
}

TEST(DecideClass, ArgmaxInvariantUnderMonotoneTransform) {
  Rng rng(8);
  for (int i = 0; i < 10000; ++i) {
    ClassVector p{rng.Uniform(), rng.Uniform(), rng.Uniform()};
    const double sum = p[0] + p[1] + p[2];
    for (double& q : p) q /= sum;
    ClassVector t;
    for (int k = 0; k < 3; ++k) t[k] = std::log(p[k]) * 3.0 + 7.0;
    ASSERT_EQ(DecideClass(p, {}), DecideClass(t, {}));
  }
}

TEST(GbtModel, SerializationRoundTrip) {
  const auto data = SyntheticValidatorDataset(600, {0.8, 0.12, 0.08}, 2);
  GbtParams p;
  p.n_trees = 8;
  p.class_weights = DefaultClassWeights(data);
  GbtModel model = TrainGbt(data, p);
  model.thresholds = {0.0, 0.12, -0.03};
  const std::string text = SerializeGbtModel(model);
  const GbtModel back = ParseGbtModel(text);
  EXPECT_EQ(back, model);
  EXPECT_EQ(SerializeGbtModel(back), text);
  for (const auto& s : data) ASSERT_EQ(back.Probabilities(s.features), model.Probabilities(s.features));
}

TEST(GbtModel, ParseErrors) {
  EXPECT_THROW(ParseGbtModel("{"), Error);
  EXPECT_THROW(ParseGbtModel(R"({"n_classes":2})"), Error);
  EXPECT_THROW(ParseGbtModel(R"({"n_classes":3,"learning_rate":0.1})"), Error);
}

TEST(DefaultClassWeights, InverseFrequencyCapped) {
  std::vector<LabeledSample> data;
  for (int i = 0; i < 970; ++i) data.push_back({{0.0}, Verdict::kConfirmed});
  for (int i = 0; i < 20; ++i) data.push_back({{0.0}, Verdict::kAmbiguous});
  for (int i = 0; i < 10; ++i) data.push_back({{0.0}, Verdict::kUnclear});
  const ClassVector w = DefaultClassWeights(data);
  EXPECT_EQ(w[0], 1.0);
  EXPECT_DOUBLE_EQ(w[1], 970.0 / 20.0);
  EXPECT_EQ(w[2], 50.0);  // 97 capped
  data.resize(970);
  EXPECT_EQ(DefaultClassWeights(data), (ClassVector{1.0, 1.0, 1.0}));
}

TEST(MacroF1, MatchesHandCounts) {
  // Class 0: tp 2 fp 1 fn 0; class 1: tp 0 fp 0 fn 1.
  const std::vector<int> gold{0, 0, 1};
  const std::vector<int> pred{0, 0, 0};
  EXPECT_DOUBLE_EQ(MacroF1(gold, pred), (4.0 / 5.0 + 0.0) / 2.0);
  EXPECT_EQ(MacroF1(gold, gold), 1.0);
}

std::vector<int> GoldOf(std::span<const LabeledSample> data) {
  std::vector<int> gold;
  for (const auto& s : data) gold.push_back(static_cast<int>(s.label));
  return gold;
}

std::vector<ClassVector> ProbabilitiesOf(const GbtModel& model, std::span<const LabeledSample> data) {
  std::vector<ClassVector> out;
  for (const auto& s : data) out.push_back(model.Probabilities(s.features));
  return out;
}

TEST(TuneThresholds, PerfectDevKeepsZeroOffsets) {
  const auto data = SeparableToySet(200, 5);
  GbtParams p;
  p.n_trees = 50;
  const GbtModel model = TrainGbt(data, p);
  ASSERT_EQ(Accuracy(model, data), 1.0);
  EXPECT_EQ(TuneThresholds(model, data), (ClassVector{0, 0, 0}));
}

TEST(TuneThresholds, MatchesExhaustiveGridOracle) {
  for (std::uint64_t seed : {1, 2, 3, 4, 5, 6}) {
    const auto train = SyntheticValidatorDataset(1500, {0.85, 0.1, 0.05}, seed);
    const auto dev = SyntheticValidatorDataset(40, {0.6, 0.25, 0.15}, seed + 100);
    GbtParams p;
    p.n_trees = 5;
    p.max_depth = 2;
    const GbtModel model = TrainGbt(train, p);
    const ClassVector tuned = TuneThresholds(model, dev);
    const oracle::ThresholdChoice best = oracle::ExhaustiveThresholds(ProbabilitiesOf(model, dev), GoldOf(dev));
    for (int k = 0; k < 3; ++k) {
      EXPECT_EQ(tuned[k], best.grid[k] / 100.0) << "seed " << seed << " class " << k;
    }
  }
}

// One stump per class on x0: x0 = 0 gives probabilities `a`, x0 = 1 gives `b`.
GbtModel StumpModel(const ClassVector& a, const ClassVector& b) {
  GbtModel model;
  model.n_features = 1;
  model.trees.resize(3);
  for (int k = 0; k < 3; ++k) {
    RegressionTree tree;
    tree.nodes = {{0, 0.5, 1, 2, 0.0}, {-1, 0, -1, -1, std::log(a[k])},
                  {-1, 0, -1, -1, std::log(b[k])}};
    model.trees[k].push_back(tree);
  }
  return model;
}

TEST(TuneThresholds, FindsHandBuiltAmbiguousShift) {
  // Ambiguous samples sit just under confirmed. Raising ambiguous relative
  // to confirmed by more than 0.15 recovers them without stealing the
  // confident confirmed ones.
  const GbtModel model = StumpModel({0.9, 0.05, 0.05}, {0.55, 0.4, 0.05});
  std::vector<LabeledSample> dev;
  for (int i = 0; i < 10; ++i) {
    dev.push_back({{0.0}, Verdict::kConfirmed});
    dev.push_back({{1.0}, Verdict::kAmbiguous});
  }
  const oracle::ThresholdChoice best = oracle::ExhaustiveThresholds(ProbabilitiesOf(model, dev), GoldOf(dev));
  EXPECT_EQ(best.macro_f1, 1);
  EXPECT_EQ(best.grid[1] - best.grid[0], 16);
  EXPECT_EQ(std::abs(best.grid[0]) + std::abs(best.grid[1]) + std::abs(best.grid[2]), 16);
  const ClassVector tuned = TuneThresholds(model, dev);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(tuned[k], best.grid[k] / 100.0);
  EXPECT_LT(Accuracy(model, dev), 1.0);
}

TEST(TuneThresholds, OffsetsLieOnTheGrid) {
  const auto train = SyntheticValidatorDataset(800, {0.9, 0.06, 0.04}, 9);
  GbtParams p;
  p.n_trees = 5;
  const GbtModel model = TrainGbt(train, p);
  const ClassVector t = TuneThresholds(model, SyntheticValidatorDataset(80, {0.7, 0.2, 0.1}, 10));
  for (double o : t) {
    EXPECT_GE(o, -0.5);
    EXPECT_LE(o, 0.5);
    EXPECT_EQ(o, std::round(o * 100.0) / 100.0);
  }
}

}  // namespace
}  // namespace hdst
