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

#include "hdst/validator_data.h"

#include <algorithm>
#include <cmath>

#include "hdst/error.h"
#include "hdst/rng.h"

namespace hdst {
namespace {

// Scores over `n` intents with the given top two values; the remaining mass
// is spread randomly over the others, each kept below `second`.
IntentScores MakeScores(Rng& rng, int n, double top1, double top2) {
  std::vector<double> rest(static_cast<std::size_t>(std::max(0, n - 2)));
  double sum = 0.0;
  for (double& r : rest) {
    r = -std::log(1.0 - rng.Uniform());
    sum += r;
  }
  const double left = std::max(0.0, 1.0 - top1 - top2);
  IntentScores scores;
  const int winner = static_cast<int>(rng.Below(static_cast<std::uint64_t>(n)));
  int runner = static_cast<int>(rng.Below(static_cast<std::uint64_t>(n - 1)));
  if (runner >= winner) ++runner;
  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    const std::string id = "intent_" + std::to_string(i);
    if (i == winner) {
      scores[id] = top1;
    } else if (i == runner) {
      scores[id] = top2;
    } else {
      double v = sum > 0.0 ? left * rest[k] / sum : 0.0;
      scores[id] = std::min(v, top2);
      ++k;
    }
  }
  double total = 0.0;
  for (const auto& [id, v] : scores) total += v;
  for (auto& [id, v] : scores) v /= total;
  return scores;
}

double Between(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.Uniform(); }

// A turn the NLU was sure about.
IntentScores ConfidentScores(Rng& rng, int n) {
  const double top1 = Between(rng, 0.6, 0.97);
  return MakeScores(rng, n, top1, Between(rng, 0.0, std::min(1.0 - top1, top1 - 0.2)));
}

// Any plausible turn: top score in [0.15, 0.97], runner-up below it.
IntentScores PriorScores(Rng& rng, int n) {
  const double top1 = Between(rng, 0.15, 0.97);
  return MakeScores(rng, n, top1, Between(rng, 0.0, std::min(top1, 1.0 - top1)));
}

// Each annotator applies the rule with slightly different thresholds.
constexpr double kAnnotatorSpread = 0.05;

RuleThresholds AnnotatorThresholds(Rng& rng) {
  const RuleThresholds base;
  return {base.min + kAnnotatorSpread * rng.Normal(),
          base.margin + kAnnotatorSpread * rng.Normal(),
          base.high + kAnnotatorSpread * rng.Normal()};
}

}  // namespace

std::vector<LabeledSample> BuildValidatorDataset(const Corpus& corpus,
                                                 const Ontology& ontology,
                                                 const NluBackend& nlu,
                                                 const DatasetOptions& options) {
  Rng rng(options.seed);
  std::vector<LabeledSample> data;
  for (const Dialogue& dialogue : corpus.dialogues) {
    ScheduleHistory history;
    std::vector<NluOutput> outputs;
    for (const Turn& turn : dialogue.turns) {
      if (!turn.is_user()) continue;
      outputs.push_back(Predict(nlu, ontology, BuildSchedule(history, turn.text)));
      const ValidatorFeatures features = ExtractFeatures(outputs);
      Verdict label = ClassifyRule(features, options.thresholds).label;
      if (options.label_noise > 0.0 && rng.Bernoulli(options.label_noise)) {
        int other = static_cast<int>(rng.Below(2));
        if (other >= static_cast<int>(label)) ++other;
        label = static_cast<Verdict>(other);
      }
      const auto v = features.Vector();
      data.push_back({std::vector<double>(v.begin(), v.end()), label});
      history.emplace_back(turn.text, turn.gold_intent);
    }
  }
  return data;
}

std::vector<LabeledSample> SyntheticValidatorDataset(std::size_t n,
                                                     std::array<double, 3> mix,
                                                     std::uint64_t seed, int n_intents) {
  if (n_intents < 3) throw Error(ErrorCode::kInvalidArgument, "need at least 3 intents");
  const double total = mix[0] + mix[1] + mix[2];
  if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "class mix must be positive");
  Rng rng(seed);
  std::vector<LabeledSample> data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.Uniform() * total;
    const Verdict label = u < mix[0]            ? Verdict::kConfirmed
                          : u < mix[0] + mix[1] ? Verdict::kAmbiguous
                                                : Verdict::kUnclear;
    // A short history of confident turns precedes the labeled turn. Resample
    // until an annotator would give the drawn label.
    ValidatorFeatures features;
    do {
      std::vector<IntentScores> history;
      const std::uint64_t prior = rng.Below(3);
      for (std::uint64_t t = 0; t < prior; ++t) history.push_back(ConfidentScores(rng, n_intents));
      history.push_back(PriorScores(rng, n_intents));
      features = ExtractFeatures(std::span<const IntentScores>(history));
    } while (ClassifyRule(features, AnnotatorThresholds(rng)).label != label);
    const auto v = features.Vector();
    data.push_back({std::vector<double>(v.begin(), v.end()), label});
  }
  return data;
}

std::array<std::size_t, 3> LabelCounts(std::span<const LabeledSample> data) {
  std::array<std::size_t, 3> counts{};
  for (const LabeledSample& s : data) ++counts[static_cast<std::size_t>(s.label)];
  return counts;
}

}  // namespace hdst
