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

#include "hdst/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <boost/multiprecision/cpp_int.hpp>

#include "hdst/error.h"
#include "hdst/rng.h"
#include "hdst/text.h"
#include "hdst/validator_data.h"

namespace hdst {
namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;
using nlohmann::json;
using nlohmann::ordered_json;

void RequireNonEmpty(std::size_t n, const char* what) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " of no turns");
}

double Ratio(std::size_t num, std::size_t den) {
  return static_cast<double>(num) / static_cast<double>(den);
}

// Correctly rounded (half to even) conversion of a non-negative rational.
double RationalToDouble(const cpp_rational& value) {
  cpp_int num = boost::multiprecision::numerator(value);
  const cpp_int den = boost::multiprecision::denominator(value);
  if (num == 0) return 0.0;
  if (num < 0) throw Error(ErrorCode::kInvariant, "negative metric value");
  const long shift_guess = 52 - (static_cast<long>(boost::multiprecision::msb(num)) -
                                 static_cast<long>(boost::multiprecision::msb(den)));
  const cpp_int lo = cpp_int(1) << 52;
  const cpp_int hi = cpp_int(1) << 53;
  long shift = shift_guess;
  cpp_int q, r, d;
  for (;;) {
    cpp_int n = num;
    d = den;
    if (shift >= 0) {
      n <<= static_cast<unsigned>(shift);
    } else {
      d <<= static_cast<unsigned>(-shift);
    }
    q = n / d;
    r = n % d;
    if (q >= hi) {
      --shift;
    } else if (q < lo) {
      ++shift;
    } else {
      break;
    }
  }
  const cpp_int twice = r * 2;
  if (twice > d || (twice == d && (q & 1) != 0)) ++q;
  return std::ldexp(q.convert_to<double>(), static_cast<int>(-shift));
}

}  // namespace

int BenchmarkVector::passed() const {
  return static_cast<int>(intent_ok) + static_cast<int>(slots_ok) +
         static_cast<int>(dont_care_ok) + static_cast<int>(state_ok) +
         static_cast<int>(human_ok.value_or(false));
}

BenchmarkVector ComputeBenchmarkVector(const Turn& gold, const DstResult& pred,
                                       std::optional<bool> human_ok) {
  if (!gold.is_user() || !gold.gold_intent) {
    throw Error(ErrorCode::kInvalidArgument, "gold turn is not an annotated user turn");
  }
  BenchmarkVector v;
  v.intent_ok = pred.intent == *gold.gold_intent;
  v.slots_ok = true;
  for (const auto& [slot, value] : gold.gold_state) {
    auto it = pred.state.find(slot);
    if (it == pred.state.end() || it->second != value) {
      v.slots_ok = false;
      break;
    }
  }
  v.dont_care_ok = pred.dont_care == gold.gold_dont_care;
  v.state_ok = v.intent_ok && v.slots_ok && v.dont_care_ok;
  v.human_ok = human_ok;
  return v;
}

double Jga(std::span<const BenchmarkVector> turns) {
  RequireNonEmpty(turns.size(), "JGA");
  const auto ok = std::count_if(turns.begin(), turns.end(),
                                [](const BenchmarkVector& v) { return v.joint_ok(); });
  return Ratio(static_cast<std::size_t>(ok), turns.size());
}

double Fga(std::span<const BenchmarkVector> turns) {
  RequireNonEmpty(turns.size(), "FGA");
  const auto ok = std::count_if(turns.begin(), turns.end(),
                                [](const BenchmarkVector& v) { return v.passed() > 0; });
  return Ratio(static_cast<std::size_t>(ok), turns.size());
}

double Aga(std::span<const BenchmarkVector> turns) {
  RequireNonEmpty(turns.size(), "AGA");
  // Every turn has 4 or 5 components, so passed * (20 / present) is an
  // integer and the mean needs one rounding only.
  std::uint64_t scaled = 0;
  for (const BenchmarkVector& v : turns) {
    scaled += static_cast<std::uint64_t>(v.passed()) *
              static_cast<std::uint64_t>(20 / v.present());
  }
  return static_cast<double>(scaled) / (20.0 * static_cast<double>(turns.size()));
}

double JgaDialogue(std::span<const std::vector<BenchmarkVector>> dialogues) {
  RequireNonEmpty(dialogues.size(), "dialogue JGA");
  std::size_t ok = 0;
  for (const auto& turns : dialogues) {
    if (std::all_of(turns.begin(), turns.end(),
                    [](const BenchmarkVector& v) { return v.joint_ok(); })) {
      ++ok;
    }
  }
  return Ratio(ok, dialogues.size());
}

ClassificationReport ComputeClassificationReport(std::span<const std::string> gold,
                                                 std::span<const std::string> pred) {
  if (gold.size() != pred.size()) {
    throw Error(ErrorCode::kInvalidArgument, "gold and predicted labels differ in length");
  }
  RequireNonEmpty(gold.size(), "classification report");
  std::set<std::string> labels(gold.begin(), gold.end());
  labels.insert(pred.begin(), pred.end());
  std::map<std::string, std::size_t> tp, fp, fn;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] == pred[i]) {
      ++tp[gold[i]];
      ++correct;
    } else {
      ++fn[gold[i]];
      ++fp[pred[i]];
    }
  }
  ClassificationReport report;
  report.accuracy = Ratio(correct, gold.size());
  cpp_rational macro = 0;
  std::size_t total_tp = 0, total_fp = 0, total_fn = 0;
  for (const std::string& label : labels) {
    const std::size_t t = tp[label], p = fp[label], n = fn[label];
    total_tp += t;
    total_fp += p;
    total_fn += n;
    ClassScores scores;
    scores.label = label;
    scores.support = t + n;
    if (t + p > 0) scores.precision = Ratio(t, t + p);
    if (t + n > 0) scores.recall = Ratio(t, t + n);
    // 2PR / (P + R) simplifies to 2tp / (2tp + fp + fn).
    cpp_rational f1 = 0;
    if (t > 0) f1 = cpp_rational(cpp_int(2 * t), cpp_int(2 * t + p + n));
    scores.f1 = RationalToDouble(f1);
    macro += f1;
    report.per_class.push_back(std::move(scores));
  }
  macro /= static_cast<unsigned>(labels.size());
  report.f1_macro = RationalToDouble(macro);
  report.f1_micro =
      total_tp == 0 ? 0.0
                    : RationalToDouble(cpp_rational(cpp_int(2 * total_tp),
                                                    cpp_int(2 * total_tp + total_fp + total_fn)));
  return report;
}

MetricReport Summarize(std::span<const TurnPrediction> turns) {
  RequireNonEmpty(turns.size(), "report");
  std::vector<BenchmarkVector> vectors;
  std::map<std::string, std::vector<BenchmarkVector>> by_dialogue;
  std::vector<std::string> gold_labels, pred_labels;
  std::size_t slots_total = 0, slots_ok = 0;
  for (const TurnPrediction& t : turns) {
    const BenchmarkVector v = ComputeBenchmarkVector(t.gold, t.pred, t.human_ok);
    vectors.push_back(v);
    by_dialogue[t.dialogue_id].push_back(v);
    gold_labels.push_back(*t.gold.gold_intent);
    pred_labels.push_back(t.pred.intent.empty() ? std::string(kNoIntentLabel) : t.pred.intent);
    for (const auto& [slot, value] : t.gold.gold_state) {
      ++slots_total;
      auto it = t.pred.state.find(slot);
      if (it != t.pred.state.end() && it->second == value) ++slots_ok;
    }
  }
  std::vector<std::vector<BenchmarkVector>> dialogues;
  for (auto& [id, list] : by_dialogue) dialogues.push_back(std::move(list));

  MetricReport report;
  report.turns = turns.size();
  report.dialogues = dialogues.size();
  report.jga = Jga(vectors);
  report.jga_dialogue = JgaDialogue(dialogues);
  report.fga = Fga(vectors);
  report.aga = Aga(vectors);
  report.slot_accuracy = slots_total == 0 ? 1.0 : Ratio(slots_ok, slots_total);
  const ClassificationReport cls = ComputeClassificationReport(gold_labels, pred_labels);
  report.intent_accuracy = cls.accuracy;
  report.f1_micro = cls.f1_micro;
  report.f1_macro = cls.f1_macro;
  return report;
}

MetricReport MeanOfFolds(std::vector<MetricReport> folds) {
  if (folds.empty()) throw Error(ErrorCode::kInvalidArgument, "no folds to average");
  MetricReport mean;
  const double k = static_cast<double>(folds.size());
  for (const MetricReport& f : folds) {
    mean.turns += f.turns;
    mean.dialogues += f.dialogues;
    mean.jga += f.jga / k;
    mean.jga_dialogue += f.jga_dialogue / k;
    mean.fga += f.fga / k;
    mean.aga += f.aga / k;
    mean.slot_accuracy += f.slot_accuracy / k;
    mean.intent_accuracy += f.intent_accuracy / k;
    mean.f1_micro += f.f1_micro / k;
    mean.f1_macro += f.f1_macro / k;
  }
  mean.per_fold = std::move(folds);
  return mean;
}

namespace {

ordered_json ReportFields(const MetricReport& r) {
  ordered_json j;
  j["turns"] = r.turns;
  j["dialogues"] = r.dialogues;
  j["jga"] = r.jga;
  j["jga_dialogue"] = r.jga_dialogue;
  j["fga"] = r.fga;
  j["aga"] = r.aga;
  j["slot_accuracy"] = r.slot_accuracy;
  j["intent_accuracy"] = r.intent_accuracy;
  j["f1_micro"] = r.f1_micro;
  j["f1_macro"] = r.f1_macro;
  return j;
}

std::string Row(const std::string& name, const MetricReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-6s %6zu %6.3f %8.3f %6.3f %6.3f %7.3f %7.3f %7.3f %7.3f\n",
                name.c_str(), r.turns, r.jga, r.jga_dialogue, r.fga, r.aga,
                r.slot_accuracy, r.intent_accuracy, r.f1_micro, r.f1_macro);
  return buf;
}

}  // namespace

ordered_json MetricReportToJson(const MetricReport& report) {
  ordered_json j = ReportFields(report);
  ordered_json folds = ordered_json::array();
  for (const MetricReport& f : report.per_fold) folds.push_back(ReportFields(f));
  j["per_fold"] = std::move(folds);
  return j;
}

std::string MetricReportTable(const MetricReport& report) {
  std::string out =
      "fold    turns    JGA JGA-dial    FGA    AGA slotacc intacc  F1-mic  F1-mac\n";
  for (std::size_t i = 0; i < report.per_fold.size(); ++i) {
    out += Row(std::to_string(i), report.per_fold[i]);
  }
  out += Row("mean", report);
  return out;
}

void WriteMetricReport(const MetricReport& report, const std::string& base) {
  std::string stem = base;
  for (const char* ext : {".json", ".txt"}) {
    const std::string e = ext;
    if (stem.size() > e.size() && stem.compare(stem.size() - e.size(), e.size(), e) == 0) {
      stem.resize(stem.size() - e.size());
    }
  }
  WriteFile(stem + ".json", MetricReportToJson(report).dump(2) + "\n");
  WriteFile(stem + ".txt", MetricReportTable(report));
}

std::uint64_t DialogueSeed(std::uint64_t seed, std::string_view dialogue_id) {
  return MixSeeds(seed, Fnv1a64(dialogue_id));
}

std::vector<TurnPrediction> RunDialogue(const Dialogue& dialogue, const Pipeline& pipeline,
                                        GoldEchoNlu* echo, std::uint64_t session_seed) {
  Conversation conversation;
  conversation.state = NewSession(dialogue.id, session_seed);
  std::vector<TurnPrediction> out;
  for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
    const Turn& turn = dialogue.turns[i];
    if (!turn.is_user()) continue;
    if (echo) echo->Prime(turn);
    try {
      TurnOutcome outcome = pipeline.Step(conversation, turn.text);
      TurnPrediction p;
      p.dialogue_id = dialogue.id;
      p.turn_index = i;
      p.gold = turn;
      if (outcome.result) p.pred = std::move(*outcome.result);
      out.push_back(std::move(p));
    } catch (const Error& e) {
      throw Error(e.code(),
                  "dialogue " + dialogue.id + " turn " + std::to_string(i) + ": " + e.what(),
                  e.rule());
    }
  }
  return out;
}

Evaluation EvaluatePipeline(const Corpus& corpus, const Ontology& ontology,
                            const EvalSetup& setup, int k, std::uint64_t seed) {
  if (setup.noise < 0.0 || setup.noise > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "noise must be in [0, 1]");
  }
  if (setup.train_validator && !setup.nlu) {
    throw Error(ErrorCode::kInvalidArgument, "validator training needs an NLU backend");
  }
  const std::vector<Fold> folds = SplitKFold(corpus, k, seed);
  GoldEchoNlu echo;
  const NluBackend& nlu = setup.nlu ? *setup.nlu : echo;
  RuleValidator rule_validator;
  RuleStateTracker rule_tracker(ontology, setup.tracker_options);
  const StateTracker& tracker = setup.tracker ? *setup.tracker : rule_tracker;
  Rng noise(setup.noise_seed);

  Evaluation eval;
  std::vector<MetricReport> reports;
  for (const Fold& fold : folds) {
    std::optional<GbtValidator> trained;
    if (setup.train_validator) {
      DatasetOptions options;
      options.seed = setup.train_validator->seed;
      const auto data = BuildValidatorDataset(fold.train, ontology, nlu, options);
      GbtParams params = *setup.train_validator;
      if (!params.class_weights) params.class_weights = DefaultClassWeights(data);
      trained.emplace(TrainGbt(data, params));
    }
    const IntentValidator& validator =
        trained ? *trained : setup.validator ? *setup.validator : rule_validator;
    const Pipeline pipeline(ontology, nlu, validator, tracker, setup.tracker_options);
    std::vector<TurnPrediction> predictions;
    for (const Dialogue& dialogue : fold.test.dialogues) {
      std::vector<TurnPrediction> turns =
          RunDialogue(dialogue, pipeline, setup.nlu ? nullptr : &echo,
                      DialogueSeed(seed, dialogue.id));
      for (TurnPrediction& p : turns) {
        if (setup.noise > 0.0 && noise.Bernoulli(setup.noise) && !p.gold.gold_state.empty()) {
          auto it = p.gold.gold_state.begin();
          std::advance(it, static_cast<std::ptrdiff_t>(noise.Below(p.gold.gold_state.size())));
          p.pred.state[it->first] = it->second + "~";
        }
        auto human = setup.human.find({p.dialogue_id, p.turn_index});
        if (human != setup.human.end()) p.human_ok = human->second;
        predictions.push_back(std::move(p));
      }
    }
    reports.push_back(Summarize(predictions));
    eval.folds.push_back(std::move(predictions));
  }
  eval.report = MeanOfFolds(std::move(reports));
  return eval;
}

std::map<std::pair<std::string, std::size_t>, bool> LoadHumanAnnotations(
    const std::string& path) {
  std::map<std::pair<std::string, std::size_t>, bool> out;
  try {
    const json doc = json::parse(ReadFile(path));
    for (const json& a : doc.at("annotations")) {
      out[{a.at("dialogue").get<std::string>(), a.at("turn").get<std::size_t>()}] =
          a.at("ok").get<bool>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSemantic, "human annotations " + path + ": " + e.what());
  }
  return out;
}

}  // namespace hdst
