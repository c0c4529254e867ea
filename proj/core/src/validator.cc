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

#include "hdst/validator.h"

#include <algorithm>
#include <cmath>

#include "hdst/error.h"

namespace hdst {

std::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kConfirmed: return "confirmed";
    case Verdict::kAmbiguous: return "ambiguous";
    case Verdict::kUnclear: return "unclear";
  }
  return "unclear";
}

Verdict ParseVerdict(std::string_view name) {
  if (name == "confirmed") return Verdict::kConfirmed;
  if (name == "ambiguous") return Verdict::kAmbiguous;
  if (name == "unclear") return Verdict::kUnclear;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown verdict \"" + std::string(name) + "\"");
}

std::array<double, kBaseFeatureCount> ValidatorFeatures::Base() const {
  return {top1, top2, margin, entropy, smoothed_max, normalized_top1};
}

std::array<double, kFeatureCount> ValidatorFeatures::Vector() const {
  std::array<double, kFeatureCount> v{};
  const auto base = Base();
  std::copy(base.begin(), base.end(), v.begin());
  std::copy(interactions.begin(), interactions.end(),
            v.begin() + kBaseFeatureCount);
  return v;
}

ValidatorFeatures ExtractFeatures(std::span<const IntentScores> scores) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "feature extraction needs a turn");
  }
  ValidatorFeatures f;
  double smoothed = 0.0;
  double running_max = 0.0;
  for (std::size_t t = 0; t < scores.size(); ++t) {
    double best = 0.0;
    for (const auto& [intent, s] : scores[t]) best = std::max(best, s);
    smoothed = t == 0 ? best
                      : kSmoothingAlpha * best + (1.0 - kSmoothingAlpha) * smoothed;
    running_max = std::max(running_max, best);
  }

  // Current turn: stable sort by descending score keeps key order on ties.
  std::vector<std::pair<std::string, double>> ranked(scores.back().begin(),
                                                     scores.back().end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  auto at = [&](std::size_t i) { return i < ranked.size() ? ranked[i].second : 0.0; };
  f.top1 = at(0);
  f.top2 = at(1);
  f.top3 = at(2);
  f.margin = f.top1 - f.top2;
  if (!ranked.empty()) f.top_intent = ranked[0].first;
  if (ranked.size() > 1) f.second_intent = ranked[1].first;
  for (const auto& [intent, p] : ranked) {
    if (p > 0.0) f.entropy -= p * std::log(p);
  }
  f.entropy = std::max(0.0, f.entropy);
  f.smoothed_max = smoothed;
  f.normalized_top1 = running_max > 0.0 ? f.top1 / running_max : 0.0;

  const auto base = f.Base();
  std::size_t k = 0;
  for (std::size_t i = 0; i < kBaseFeatureCount; ++i) {
    for (std::size_t j = i; j < kBaseFeatureCount; ++j) {
      f.interactions[k++] = base[i] * base[j];
    }
  }
  return f;
}

ValidatorFeatures ExtractFeatures(std::span<const NluOutput> outputs) {
  std::vector<IntentScores> scores;
  scores.reserve(outputs.size());
  for (const NluOutput& output : outputs) scores.push_back(output.scores);
  return ExtractFeatures(std::span<const IntentScores>(scores));
}

ValidationVerdict ClassifyRule(const ValidatorFeatures& features,
                               const RuleThresholds& thresholds) {
  ValidationVerdict verdict;
  if (features.top1 < thresholds.min) {
    verdict.label = Verdict::kUnclear;
  } else if (features.top2 >= thresholds.high) {
    verdict.label = Verdict::kAmbiguous;
  } else if (features.margin >= thresholds.margin) {
    verdict.label = Verdict::kConfirmed;
  } else {
    verdict.label = Verdict::kAmbiguous;
  }
  verdict.probabilities[static_cast<int>(verdict.label)] = 1.0;
  if (verdict.label == Verdict::kConfirmed) {
    verdict.chosen_intent = features.top_intent;
  }
  return verdict;
}

}  // namespace hdst
