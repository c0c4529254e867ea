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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "hdst/corpus.h"
#include "hdst/gbt.h"
#include "hdst/metrics.h"
#include "hdst/nlu.h"
#include "hdst/ontology.h"
#include "hdst/pipeline.h"
#include "hdst/querygen.h"
#include "hdst/validator_data.h"

namespace hdst {
namespace {

struct Fixture {
  Ontology ontology = LoadOntologyFile(HDST_DATA_DIR "/ontology.json");
  LexiconRules lexicon = LoadLexiconFile(HDST_DATA_DIR "/lexicon.json", ontology);
  Corpus corpus = LoadCorpusFile(HDST_DATA_DIR "/corpus_50.json", ontology);

  std::vector<std::string> UserTexts() const {
    std::vector<std::string> out;
    for (const Dialogue& d : corpus.dialogues) {
      for (const Turn& t : d.turns) {
        if (t.is_user()) out.push_back(t.text);
      }
    }
    return out;
  }
};

const Fixture& Data() {
  static const Fixture fixture;
  return fixture;
}

void BM_LexiconPredict(benchmark::State& state) {
  const auto backend = BuildLexiconBackend(Data().lexicon);
  const auto texts = Data().UserTexts();
  std::size_t i = 0;
  for (auto _ : state) {
    const NluOutput out =
        Predict(*backend, Data().ontology, BuildSchedule({}, texts[i++ % texts.size()]));
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LexiconPredict);

void BM_GbtPredict(benchmark::State& state) {
  const auto data = SyntheticValidatorDataset(2000, {0.97, 0.02, 0.01}, 1);
  GbtParams params;
  params.n_trees = static_cast<int>(state.range(0));
  const GbtModel model = TrainGbt(data, params);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(PredictGbt(model, data[i++ % data.size()].features));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GbtPredict)->Arg(10)->Arg(100);

void BM_GbtTrain(benchmark::State& state) {
  const auto data =
      SyntheticValidatorDataset(static_cast<std::size_t>(state.range(0)), {0.97, 0.02, 0.01}, 2);
  GbtParams params;
  params.n_trees = 20;
  params.class_weights = DefaultClassWeights(data);
  for (auto _ : state) benchmark::DoNotOptimize(TrainGbt(data, params));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GbtTrain)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_TuneThresholds(benchmark::State& state) {
  const auto data = SyntheticValidatorDataset(4000, {0.97, 0.02, 0.01}, 3);
  const std::vector<LabeledSample> train(data.begin(), data.begin() + 3000);
  const std::vector<LabeledSample> dev(data.begin() + 3000, data.end());
  GbtParams params;
  params.n_trees = 20;
  const GbtModel model = TrainGbt(train, params);
  for (auto _ : state) benchmark::DoNotOptimize(TuneThresholds(model, dev));
}
BENCHMARK(BM_TuneThresholds)->Unit(benchmark::kMillisecond);

void BM_BuildQuery(benchmark::State& state) {
  const IntentSchema& schema = Data().ontology.Intent("find_restaurant");
  SlotValues fills;
  for (const SlotDef& s : schema.slots) fills[s.id] = "x' OR '1'='1";
  for (auto _ : state) benchmark::DoNotOptimize(BuildQuery(schema, fills));
}
BENCHMARK(BM_BuildQuery);

// One full pipeline pass per fixture dialogue: NLU, validator, tracker.
void BM_PipelineDialogue(benchmark::State& state) {
  const auto nlu = BuildLexiconBackend(Data().lexicon);
  RuleValidator validator;
  RuleStateTracker tracker(Data().ontology);
  Pipeline pipeline(Data().ontology, *nlu, validator, tracker);
  std::size_t turns = 0;
  for (auto _ : state) {
    for (const Dialogue& d : Data().corpus.dialogues) {
      Conversation c{NewSession(d.id, 1), {}, {}, {}};
      for (const Turn& t : d.turns) {
        if (!t.is_user()) continue;
        benchmark::DoNotOptimize(pipeline.Step(c, t.text));
        ++turns;
      }
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(turns));
}
BENCHMARK(BM_PipelineDialogue)->Unit(benchmark::kMillisecond);

void BM_Summarize(benchmark::State& state) {
  EvalSetup setup;
  setup.noise = 0.3;
  const Evaluation e = EvaluatePipeline(Data().corpus, Data().ontology, setup, 5, 1);
  std::vector<TurnPrediction> turns;
  for (const auto& fold : e.folds) turns.insert(turns.end(), fold.begin(), fold.end());
  for (auto _ : state) benchmark::DoNotOptimize(Summarize(turns));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(turns.size()));
}
BENCHMARK(BM_Summarize);

}  // namespace
}  // namespace hdst

BENCHMARK_MAIN();
