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

#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.h"
#include "hdst/error.h"

#ifndef HDST_DATA_DIR
#define HDST_DATA_DIR "data"
#endif

namespace {

// Wraps a subcommand body: library errors map to exit codes, config and
// argument problems count as usage errors.
template <typename F>
int Guarded(F&& body) {
  try {
    return body();
  } catch (const hdst::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool usage = e.code() == hdst::ErrorCode::kConfig ||
                       e.code() == hdst::ErrorCode::kInvalidArgument;
    return usage ? hdst::cli::kExitUsage : hdst::cli::kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hdst::cli::kExitData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hdst::cli;
  CLI::App app{"Hybrid dialogue state tracking engine"};
  app.require_subcommand(1);

  DataPaths paths;
  paths.data_dir = HDST_DATA_DIR;
  std::string log_level = "warn";
  app.add_option("--data-dir", paths.data_dir, "Directory with the bundled data files")
      ->capture_default_str();
  app.add_option("--ontology", paths.ontology, "Ontology file (default: <data-dir>/ontology.json)");
  app.add_option("--lexicon", paths.lexicon, "Lexicon file (default: <data-dir>/lexicon.json)");
  app.add_option("--prompts", paths.prompts, "Prompt library (default: <data-dir>/prompts.json)");
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->capture_default_str();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP chat service");
  serve_cmd->add_option("--config", serve.config, "Engine config JSON");
  serve_cmd->add_option("--host", serve.host, "Bind address (overrides config)");
  serve_cmd->add_option("--port", serve.port, "Port, 0 for any free port (overrides config)")
      ->check(CLI::Range(0, 65535));

  ChatArgs chat;
  auto* chat_cmd = app.add_subcommand("chat", "Interactive terminal chat against a local engine");
  chat_cmd->add_option("--config", chat.config, "Engine config JSON");
  chat_cmd->add_flag("--show-state", chat.show_state, "Print the state after every turn");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "K-fold evaluation on an annotated corpus");
  eval_cmd->add_option("--corpus", eval.corpus, "Corpus JSON")->required();
  eval_cmd->add_option("--k", eval.k, "Number of folds")->check(CLI::PositiveNumber)
      ->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "Fold and session seed")->capture_default_str();
  eval_cmd->add_option("--report", eval.report, "Write <path>.json and <path>.txt");
  eval_cmd->add_option("--nlu", eval.nlu, "lexicon or gold (echo gold annotations)")
      ->check(CLI::IsMember({"lexicon", "gold"}))->capture_default_str();
  eval_cmd->add_option("--validator", eval.validator, "rule or gbt")
      ->check(CLI::IsMember({"rule", "gbt"}))->capture_default_str();
  eval_cmd->add_option("--model", eval.model, "GBT model file for --validator gbt");
  eval_cmd->add_flag("--train-validator", eval.train_validator,
                     "Train a GBT validator on each training fold");
  eval_cmd->add_option("--tracker", eval.tracker, "rule or llm-mock")
      ->check(CLI::IsMember({"rule", "llm-mock"}))->capture_default_str();
  eval_cmd->add_option("--noise", eval.noise, "Per-turn slot corruption probability")
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--noise-seed", eval.noise_seed, "Seed for corruption noise");
  eval_cmd->add_option("--human", eval.human, "Human judgement annotations JSON");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train-validator", "Train the GBT intent validator");
  auto* corpus_opt = train_cmd->add_option("--corpus", train.corpus, "Corpus JSON");
  train_cmd->add_option("--out", train.out, "Model output path")->required();
  train_cmd->add_option("--n-trees", train.n_trees, "Boosting rounds")
      ->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--max-depth", train.max_depth, "Tree depth")
      ->check(CLI::Range(1, 16))->capture_default_str();
  train_cmd->add_option("--lr", train.learning_rate, "Learning rate")
      ->check(CLI::Range(1e-6, 1.0))->capture_default_str();
  train_cmd->add_option("--seed", train.seed, "Split, noise and subsample seed");
  train_cmd->add_option("--label-noise", train.label_noise, "Label flip probability")
      ->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--dev-fraction", train.dev_fraction, "Held-out share for tuning")
      ->check(CLI::Range(0.0, 0.9))->capture_default_str();
  train_cmd->add_flag("--unweighted", train.unweighted, "All class weights 1");
  train_cmd->add_flag("--no-tune", train.no_tune, "Keep zero decision offsets");
  auto* synth_opt = train_cmd->add_option(
      "--synthetic", train.synthetic, "Train on N synthetic 97/2/1 samples instead of a corpus");
  corpus_opt->excludes(synth_opt);

  std::string validate_corpus;
  auto* validate_cmd = app.add_subcommand("validate-corpus", "Check a corpus against the ontology");
  validate_cmd->add_option("corpus,--corpus", validate_corpus, "Corpus JSON")->required();

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-fixture", "Synthesize an annotated corpus");
  gen_cmd->add_option("--dialogues", gen.dialogues, "Number of dialogues")
      ->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // Logs go to stderr so stdout stays clean for reports and corpora.
  spdlog::set_default_logger(spdlog::stderr_color_mt("hdst"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  if (*serve_cmd) return Guarded([&] { return RunServe(paths, serve); });
  if (*chat_cmd) return Guarded([&] { return RunChat(paths, chat); });
  if (*eval_cmd) return Guarded([&] { return RunEval(paths, eval); });
  if (*train_cmd) {
    if (train.corpus.empty() && train.synthetic == 0) {
      std::cerr << "error: train-validator needs --corpus or --synthetic\n";
      return kExitUsage;
    }
    return Guarded([&] { return RunTrainValidator(paths, train); });
  }
  if (*validate_cmd) return Guarded([&] { return RunValidateCorpus(paths, validate_corpus); });
  if (*gen_cmd) return Guarded([&] { return RunGenFixture(paths, gen); });
  return kExitUsage;
}
