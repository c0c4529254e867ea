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

#ifndef HDST_VALIDATOR_H_
#define HDST_VALIDATOR_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hdst/nlu.h"

namespace hdst {

enum class Verdict { kConfirmed = 0, kAmbiguous = 1, kUnclear = 2 };
inline constexpr int kNumVerdicts = 3;

std::string_view VerdictName(Verdict verdict);
Verdict ParseVerdict(std::string_view name);

inline constexpr std::size_t kBaseFeatureCount = 6;
inline constexpr std::size_t kInteractionCount = 21;  // i <= j over 6 bases
inline constexpr std::size_t kFeatureCount = kBaseFeatureCount + kInteractionCount;
inline constexpr double kSmoothingAlpha = 0.7;

// Engineered features over the NLU score distributions of a dialogue.
// The model vector is [top1, top2, margin, entropy, smoothed_max,
// normalized_top1] followed by their degree-2 products; top3 is kept for
// inspection only.
struct ValidatorFeatures {
  double top1 = 0, top2 = 0, top3 = 0;
  double margin = 0;
  double entropy = 0;  // nats
  double smoothed_max = 0;
  double normalized_top1 = 0;
  std::array<double, kInteractionCount> interactions{};
  std::string top_intent;
  std::string second_intent;

  std::array<double, kBaseFeatureCount> Base() const;
  std::array<double, kFeatureCount> Vector() const;
};

// `outputs` is the dialogue so far, current turn last. Must be nonempty.
ValidatorFeatures ExtractFeatures(std::span<const NluOutput> outputs);
ValidatorFeatures ExtractFeatures(std::span<const IntentScores> scores);

struct ValidationVerdict {
  Verdict label = Verdict::kUnclear;
  std::array<double, kNumVerdicts> probabilities{};
  std::string chosen_intent;  // set when confirmed
};

struct RuleThresholds {
  double min = 0.5;     // top1 below this is unclear
  double margin = 0.2;  // confirmed needs top1 - top2 at least this
  double high = 0.35;   // a runner-up at or above this is ambiguous
};

ValidationVerdict ClassifyRule(const ValidatorFeatures& features,
                               const RuleThresholds& thresholds = {});

}  // namespace hdst

#endif  // HDST_VALIDATOR_H_
