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

#ifndef HDST_METRICS_H_
#define HDST_METRICS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdst/corpus.h"
#include "hdst/gbt.h"
#include "hdst/nlu.h"
#include "hdst/pipeline.h"
#include "hdst/tracker.h"

namespace hdst {

struct BenchmarkVector {
  bool intent_ok = false;
  bool slots_ok = false;
  bool dont_care_ok = false;
  bool state_ok = false;
  std::optional<bool> human_ok;  // only from external annotation

  int present() const { return human_ok ? 5 : 4; }
  int passed() const;
  // Every present component holds; the joint-goal criterion.
  bool joint_ok() const { return state_ok && human_ok.value_or(true); }
  bool operator==(const BenchmarkVector&) const = default;
};

// Throws kInvalidArgument when `gold` is not an annotated user turn.
BenchmarkVector ComputeBenchmarkVector(const Turn& gold, const DstResult& pred,
                                       std::optional<bool> human_ok = {});

// Aggregates over turns. Each throws kInvalidArgument on empty input.
double Jga(std::span<const BenchmarkVector> turns);
double Fga(std::span<const BenchmarkVector> turns);
double Aga(std::span<const BenchmarkVector> turns);
// Fraction of dialogues whose every turn has state_ok.
double JgaDialogue(std::span<const std::vector<BenchmarkVector>> dialogues);

struct ClassScores {
  std::string label;
  double precision = 0, recall = 0, f1 = 0;
  std::size_t support = 0;
};

struct ClassificationReport {
  double accuracy = 0;
  double f1_micro = 0;
  double f1_macro = 0;
  std::vector<ClassScores> per_class;  // labels of gold or pred, sorted
};

// Macro average over labels seen in gold or pred; F1 is 0 when P + R = 0.
ClassificationReport ComputeClassificationReport(std::span<const std::string> gold,
                                                 std::span<const std::string> pred);

// One evaluated user turn.
struct TurnPrediction {
  std::string dialogue_id;
  std::size_t turn_index = 0;  // index into the dialogue's turns
  Turn gold;
  DstResult pred;
  std::optional<bool> human_ok;
};

struct MetricReport {
  std::size_t turns = 0;
  std::size_t dialogues = 0;
  double jga = 0, jga_dialogue = 0, fga = 0, aga = 0;
  double slot_accuracy = 0, intent_accuracy = 0;
  double f1_micro = 0, f1_macro = 0;
  std::vector<MetricReport> per_fold;
};

// Label used for turns where no intent was predicted.
inline constexpr std::string_view kNoIntentLabel = "<none>";

MetricReport Summarize(std::span<const TurnPrediction> turns);

// Mean of the fold reports, with the folds attached.
MetricReport MeanOfFolds(std::vector<MetricReport> folds);

nlohmann::ordered_json MetricReportToJson(const MetricReport& report);
std::string MetricReportTable(const MetricReport& report);
// Writes <base>.json and <base>.txt (a trailing .json or .txt is dropped).
void WriteMetricReport(const MetricReport& report, const std::string& base);

// Pipeline under evaluation. Null members take defaults: gold-echo NLU,
// rule validator, rule tracker.
struct EvalSetup {
  const NluBackend* nlu = nullptr;
  const IntentValidator* validator = nullptr;
  const StateTracker* tracker = nullptr;
  // Trains a GBT validator on each training fold (needs `nlu`).
  std::optional<GbtParams> train_validator;
  // Probability of corrupting one gold-state value of a turn's prediction.
  double noise = 0.0;
  std::uint64_t noise_seed = 0;
  // (dialogue id, turn index) -> human judgement.
  std::map<std::pair<std::string, std::size_t>, bool> human;
  TrackerOptions tracker_options;
};

struct Evaluation {
  MetricReport report;
  std::vector<std::vector<TurnPrediction>> folds;
};

// Runs every test fold through the pipeline. Errors carry the dialogue id
// and turn index.
Evaluation EvaluatePipeline(const Corpus& corpus, const Ontology& ontology,
                            const EvalSetup& setup, int k, std::uint64_t seed);

// Runs one dialogue's user turns in order and returns the predictions.
std::vector<TurnPrediction> RunDialogue(const Dialogue& dialogue, const Pipeline& pipeline,
                                        GoldEchoNlu* echo, std::uint64_t session_seed);

// Session seed used for a dialogue during evaluation.
std::uint64_t DialogueSeed(std::uint64_t seed, std::string_view dialogue_id);

// Reads {"annotations":[{"dialogue","turn","ok"}]}.
std::map<std::pair<std::string, std::size_t>, bool> LoadHumanAnnotations(
    const std::string& path);

}  // namespace hdst

#endif  // HDST_METRICS_H_
