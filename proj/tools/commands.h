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

#ifndef HDST_TOOLS_COMMANDS_H_
#define HDST_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>

namespace hdst::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

struct DataPaths {
  std::string data_dir;
  std::string ontology;
  std::string lexicon;
  std::string prompts;

  std::string Ontology() const;
  std::string Lexicon() const;
  std::string Prompts() const;
};

struct ServeArgs {
  std::string config;
  std::optional<std::string> host;
  std::optional<int> port;
};

struct ChatArgs {
  std::string config;
  bool show_state = false;
};

struct EvalArgs {
  std::string corpus;
  int k = 5;
  std::uint64_t seed = 0;
  std::string report;
  std::string nlu = "lexicon";  // lexicon | gold
  std::string validator = "rule";
  std::string model;
  bool train_validator = false;
  std::string tracker = "rule";  // rule | llm-mock
  double noise = 0.0;
  std::uint64_t noise_seed = 0;
  std::string human;
};

struct TrainArgs {
  std::string corpus;
  std::string out;
  int n_trees = 100;
  int max_depth = 3;
  double learning_rate = 0.3;
  std::uint64_t seed = 0;
  double label_noise = 0.0;
  double dev_fraction = 0.2;
  bool unweighted = false;
  bool no_tune = false;
  std::size_t synthetic = 0;  // train on a synthetic 97/2/1 set instead
};

struct GenArgs {
  std::size_t dialogues = 50;
  std::uint64_t seed = 7;
  std::string out;
};

int RunServe(const DataPaths& paths, const ServeArgs& args);
int RunChat(const DataPaths& paths, const ChatArgs& args);
int RunEval(const DataPaths& paths, const EvalArgs& args);
int RunTrainValidator(const DataPaths& paths, const TrainArgs& args);
int RunValidateCorpus(const DataPaths& paths, const std::string& corpus);
int RunGenFixture(const DataPaths& paths, const GenArgs& args);

}  // namespace hdst::cli

#endif  // HDST_TOOLS_COMMANDS_H_
