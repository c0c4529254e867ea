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

#include "commands.h"

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numeric>
#include <string_view>
#include <thread>
#include <vector>

#include <spdlog/spdlog.h>

#include "hdst/corpus.h"
#include "hdst/engine.h"
#include "hdst/error.h"
#include "hdst/fixture_gen.h"
#include "hdst/gbt.h"
#include "hdst/metrics.h"
#include "hdst/nlu.h"
#include "hdst/ontology.h"
#include "hdst/pipeline.h"
#include "hdst/rng.h"
#include "hdst/service.h"
#include "hdst/session_store.h"
#include "hdst/text.h"
#include "hdst/validator_data.h"

namespace hdst::cli {
namespace fs = std::filesystem;

namespace {

std::string OrDefault(const std::string& explicit_path, const std::string& dir,
                      const char* name) {
  return explicit_path.empty() ? (fs::path(dir) / name).string() : explicit_path;
}

EngineConfig ConfigFor(const DataPaths& paths, const std::string& config_path) {
  if (!config_path.empty()) return LoadEngineConfig(config_path);
  EngineConfig config = DefaultEngineConfig(paths.data_dir);
  // Without a config file, explicit data flags win and sessions are kept
  // under the working directory.
  if (!paths.ontology.empty()) config.ontology_path = fs::absolute(paths.ontology).string();
  if (!paths.lexicon.empty()) config.lexicon_path = fs::absolute(paths.lexicon).string();
  if (!paths.prompts.empty()) config.prompts_path = fs::absolute(paths.prompts).string();
  config.persistence_path = fs::absolute(config.persistence_path).string();
  return config;
}

const char* Fmt3(double v, char* buf, std::size_t size) {
  std::snprintf(buf, size, "%.3f", v);
  return buf;
}

}  // namespace

std::string DataPaths::Ontology() const { return OrDefault(ontology, data_dir, "ontology.json"); }
std::string DataPaths::Lexicon() const { return OrDefault(lexicon, data_dir, "lexicon.json"); }
std::string DataPaths::Prompts() const { return OrDefault(prompts, data_dir, "prompts.json"); }

int RunServe(const DataPaths& paths, const ServeArgs& args) {
  // Block termination signals before any thread starts; a dedicated thread
  // waits for them and stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  EngineConfig config = ConfigFor(paths, args.config);
  if (args.host) config.host = *args.host;
  if (args.port) config.port = *args.port;
  Engine engine(config);
  SessionStore store(engine, config.Resolve(config.persistence_path),
                     std::chrono::seconds(config.session_ttl_seconds));
  HttpService service(store, config.cors_origin);
  const int port = service.Bind(config.host, config.port);
  spdlog::info("{} persisted sessions available for replay", store.ListPersisted().size());
  std::cout << "listening on http://" << config.host << ":" << port << std::endl;

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {}, shutting down", sig);
    service.Stop();
  });
  service.Run();
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

int RunChat(const DataPaths& paths, const ChatArgs& args) {
  EngineConfig config = ConfigFor(paths, args.config);
  Engine engine(config);
  Conversation conversation;
  const std::string id = NewSession(engine.ontology(), 0).session_id;
  conversation.state = NewSession(id, MixSeeds(config.seed, Fnv1a64(id)));
  std::cout << "session " << id << " (empty line or /quit to exit, /state to inspect)\n";

  std::string line;
  while (std::cout << "you> " << std::flush, std::getline(std::cin, line)) {
    if (line.empty() || line == "/quit") break;
    if (line == "/state") {
      std::cout << DialogueStateToJson(conversation.state).dump(2) << "\n";
      continue;
    }
    try {
      TurnOutcome outcome = engine.pipeline().Step(conversation, line);
      std::cout << "bot> " << outcome.event.reply << "\n"
                << "     [" << outcome.event.verdict << ", " << outcome.event.action << "]\n";
      if (outcome.result) {
        std::cout << "     sql: " << outcome.result->query.text << "\n";
      }
      if (args.show_state) {
        std::cout << DialogueStateToJson(conversation.state).dump(2) << "\n";
      }
    } catch (const Error& e) {
      std::cout << "bot> (error: " << e.what() << ")\n";
    }
  }
  return kExitOk;
}

int RunEval(const DataPaths& paths, const EvalArgs& args) {
  const Ontology ontology = LoadOntologyFile(paths.Ontology());
  const Corpus corpus = LoadCorpusFile(args.corpus, ontology);

  std::unique_ptr<NluBackend> nlu;
  if (args.nlu == "lexicon" || args.train_validator) {
    nlu = BuildLexiconBackend(LoadLexiconFile(paths.Lexicon(), ontology));
  }
  std::unique_ptr<IntentValidator> validator;
  if (args.validator == "gbt" && !args.train_validator) {
    if (args.model.empty()) throw Error(ErrorCode::kInvalidArgument, "--validator gbt needs --model");
    validator = std::make_unique<GbtValidator>(ParseGbtModel(ReadFile(args.model)));
  }
  std::unique_ptr<ChatCompletion> completion;
  std::unique_ptr<StateTracker> tracker;
  if (args.tracker == "llm-mock") {
    completion = std::make_unique<TrackerBackedCompletion>(ontology);
    tracker = std::make_unique<LlmStateTracker>(ontology, LoadPromptLibraryFile(paths.Prompts()),
                                                *completion);
  }

  EvalSetup setup;
  setup.nlu = args.nlu == "lexicon" ? nlu.get() : nullptr;
  setup.validator = validator.get();
  setup.tracker = tracker.get();
  if (args.train_validator) {
    if (args.nlu != "lexicon") {
      throw Error(ErrorCode::kInvalidArgument, "--train-validator needs --nlu lexicon");
    }
    GbtParams params;
    params.seed = args.seed;
    setup.train_validator = params;
  }
  setup.noise = args.noise;
  setup.noise_seed = args.noise_seed;
  if (!args.human.empty()) setup.human = LoadHumanAnnotations(args.human);

  const Evaluation evaluation = EvaluatePipeline(corpus, ontology, setup, args.k, args.seed);
  const MetricReport& r = evaluation.report;
  char a[32], b[32], c[32];
  std::cout << "JGA=" << Fmt3(r.jga, a, sizeof a) << " FGA=" << Fmt3(r.fga, b, sizeof b)
            << " AGA=" << Fmt3(r.aga, c, sizeof c) << "\n"
            << MetricReportTable(r);
  if (!args.report.empty()) WriteMetricReport(r, args.report);
  return kExitOk;
}

int RunTrainValidator(const DataPaths& paths, const TrainArgs& args) {
  std::vector<LabeledSample> data;
  if (args.synthetic > 0) {
    data = SyntheticValidatorDataset(args.synthetic, {0.97, 0.02, 0.01}, args.seed);
  } else {
    const Ontology ontology = LoadOntologyFile(paths.Ontology());
    const Corpus corpus = LoadCorpusFile(args.corpus, ontology);
    const auto nlu = BuildLexiconBackend(LoadLexiconFile(paths.Lexicon(), ontology));
    DatasetOptions options;
    options.label_noise = args.label_noise;
    options.seed = args.seed;
    data = BuildValidatorDataset(corpus, ontology, *nlu, options);
  }
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "no training samples");

  // Seeded Fisher-Yates split into train and dev.
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(MixSeeds(args.seed, 0x5e1ec7));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.Below(i)]);
  }
  const auto n_dev = static_cast<std::size_t>(args.dev_fraction * static_cast<double>(data.size()));
  std::vector<LabeledSample> train, dev;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_dev ? dev : train).push_back(data[order[i]]);
  }

  GbtParams params;
  params.n_trees = args.n_trees;
  params.max_depth = args.max_depth;
  params.learning_rate = args.learning_rate;
  params.seed = args.seed;
  if (!args.unweighted) params.class_weights = DefaultClassWeights(train);
  TrainingTrace trace;
  GbtModel model = TrainGbt(train, params, &trace);
  if (!args.no_tune && !dev.empty()) model.thresholds = TuneThresholds(model, dev);

  const auto counts = LabelCounts(data);
  std::cout << "samples: " << data.size() << " (confirmed " << counts[0] << ", ambiguous "
            << counts[1] << ", unclear " << counts[2] << "), train " << train.size() << ", dev "
            << dev.size() << "\n";
  std::cout << "train loss: " << trace.loss.front() << " -> " << trace.loss.back() << "\n";
  if (!dev.empty()) {
    std::vector<int> gold, pred;
    for (const LabeledSample& s : dev) {
      gold.push_back(static_cast<int>(s.label));
      pred.push_back(static_cast<int>(PredictGbt(model, s.features).label));
    }
    std::cout << "dev macro-F1: " << MacroF1(gold, pred) << "\n";
  }
  std::cout << "thresholds: " << model.thresholds[0] << " " << model.thresholds[1] << " "
            << model.thresholds[2] << "\n";
  WriteFile(args.out, SerializeGbtModel(model));
  std::cout << "wrote " << args.out << "\n";
  return kExitOk;
}

int RunValidateCorpus(const DataPaths& paths, const std::string& corpus_path) {
  const Ontology ontology = LoadOntologyFile(paths.Ontology());
  try {
    const Corpus corpus = LoadCorpusFile(corpus_path, ontology);
    std::cout << "ok: " << corpus.dialogues.size() << " dialogues, "
              << corpus.user_turn_count() << " user turns\n";
  } catch (const Error& e) {
    std::cerr << corpus_path << ": " << e.what();
    const std::string tag = "[" + e.rule() + "]";
    if (!e.rule().empty() && std::string_view(e.what()).find(tag) == std::string_view::npos) {
      std::cerr << " " << tag;
    }
    std::cerr << "\n";
    return kExitData;
  }
  return kExitOk;
}

int RunGenFixture(const DataPaths& paths, const GenArgs& args) {
  const Ontology ontology = LoadOntologyFile(paths.Ontology());
  const LexiconRules lexicon = LoadLexiconFile(paths.Lexicon(), ontology);
  const Corpus corpus = GenerateCorpus(ontology, lexicon, args.dialogues, args.seed);
  const std::string text = SerializeCorpus(corpus);
  // Round-trip through the validator so a generator bug cannot ship.
  LoadCorpus(text, ontology);
  if (args.out.empty()) {
    std::cout << text;
  } else {
    WriteFile(args.out, text);
  }
  return kExitOk;
}

}  // namespace hdst::cli
