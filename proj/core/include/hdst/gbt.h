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

#ifndef HDST_GBT_H_
#define HDST_GBT_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdst/validator.h"

namespace hdst {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // go left when x[feature] < threshold
  int left = -1;
  int right = -1;
  double leaf = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double Predict(std::span<const double> x) const;
  int Depth() const;
  bool operator==(const RegressionTree&) const = default;
};

using ClassVector = std::array<double, kNumVerdicts>;

// Multiclass boosted ensemble with a softmax link. Class order follows
// Verdict: confirmed, ambiguous, unclear.
struct GbtModel {
  int n_features = 0;
  double learning_rate = 0.3;
  ClassVector class_weights{1.0, 1.0, 1.0};
  ClassVector thresholds{};  // per-class decision offsets
  std::vector<std::vector<RegressionTree>> trees;  // [class][round]

  ClassVector Margins(std::span<const double> x) const;
  ClassVector Probabilities(std::span<const double> x) const;
  int rounds() const { return trees.empty() ? 0 : static_cast<int>(trees[0].size()); }
  bool operator==(const GbtModel&) const = default;
};

struct LabeledSample {
  std::vector<double> features;
  Verdict label = Verdict::kConfirmed;
};

struct GbtParams {
  int n_trees = 100;  // boosting rounds; each round grows one tree per class
  int max_depth = 3;
  double learning_rate = 0.3;
  std::optional<ClassVector> class_weights;  // unset: all ones
  double lambda = 1.0;               // L2 on leaf values
  double min_child_weight = 1e-3;    // minimum hessian mass per child
  double subsample = 1.0;            // row fraction per round
  std::uint64_t seed = 0;
};

struct TrainingTrace {
  // Weighted multiclass log-loss before training and after every round.
  std::vector<double> loss;
};

// Inverse class frequency relative to the majority class, capped at 50.
// Absent classes get weight 1.
ClassVector DefaultClassWeights(std::span<const LabeledSample> data);

// Trains with second-order boosting on the softmax objective; class weights
// scale per-sample gradients and hessians. Each round's step is halved until
// the training loss does not increase, so the loss is non-increasing.
GbtModel TrainGbt(std::span<const LabeledSample> data, const GbtParams& params,
                  TrainingTrace* trace = nullptr);

double WeightedLogLoss(const GbtModel& model, std::span<const LabeledSample> data,
                       const ClassVector& class_weights);

// Label = argmax(probability + offset), lowest class index on ties.
int DecideClass(const ClassVector& probabilities, const ClassVector& offsets);

ValidationVerdict PredictGbt(const GbtModel& model, std::span<const double> x);
ValidationVerdict PredictGbt(const GbtModel& model,
                             const ValidatorFeatures& features);

// Offsets on the 0.01 grid in [-0.5, 0.5] maximizing macro-F1 on `dev`.
// Among equally good offsets the one closest to zero (L1) wins.
ClassVector TuneThresholds(const GbtModel& model,
                           std::span<const LabeledSample> dev);
// Same search over precomputed class probabilities.
ClassVector TuneThresholds(std::span<const ClassVector> probabilities, std::span<const int> gold);

// Macro-F1 over the classes present in gold or predictions.
double MacroF1(std::span<const int> gold, std::span<const int> pred);

std::string SerializeGbtModel(const GbtModel& model);
GbtModel ParseGbtModel(std::string_view text);

}  // namespace hdst

#endif  // HDST_GBT_H_
