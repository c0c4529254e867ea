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

#ifndef HDST_ENGINE_H_
#define HDST_ENGINE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "hdst/gbt.h"
#include "hdst/http.h"
#include "hdst/llm_bridge.h"
#include "hdst/nlu.h"
#include "hdst/ontology.h"
#include "hdst/pipeline.h"
#include "hdst/validator.h"

namespace hdst {

// Flat JSON document; every key can be overridden by an environment
// variable DST_<KEY> (upper case). Relative paths resolve against
// `base_dir`, which LoadEngineConfig sets to the config file's directory.
struct EngineConfig {
  std::string ontology_path = "ontology.json";
  std::string lexicon_path = "lexicon.json";
  std::string prompts_path = "prompts.json";
  std::string retrieval_path = "retrieval.json";
  std::string validator = "rule";        // rule | gbt
  std::string validator_model;           // model file for gbt
  std::string tracker = "rule";          // rule | llm | llm_mock | llm_canned
  std::string canned_responses;          // prompt-hash map for llm_canned
  std::string nlu = "lexicon";           // lexicon | remote
  std::string answers = "template";      // template | llm | none
  Endpoint llm;
  Endpoint nlu_remote;
  std::uint64_t seed = 0;
  std::string persistence_path = "sessions";
  std::string host = "127.0.0.1";
  int port = 8080;
  int session_ttl_seconds = 1800;
  std::string cors_origin = "*";
  RuleThresholds thresholds;
  bool sql_mandatory_only = false;
  std::string base_dir = ".";

  std::string Resolve(const std::string& path) const;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
std::optional<std::string> ProcessEnv(const std::string& name);

// Throws kConfig for unknown keys, bad types and bad enum values.
EngineConfig ParseEngineConfig(std::string_view text, const EnvLookup& env = ProcessEnv);
EngineConfig LoadEngineConfig(const std::string& path, const EnvLookup& env = ProcessEnv);
// Defaults with only environment overrides applied.
EngineConfig DefaultEngineConfig(const std::string& base_dir, const EnvLookup& env = ProcessEnv);
nlohmann::ordered_json EngineConfigToJson(const EngineConfig& config);

// Loads and validates everything the config references. Throws kConfig
// naming the offending field.
class Engine {
 public:
  explicit Engine(EngineConfig config);
  ~Engine();

  const EngineConfig& config() const { return config_; }
  const Ontology& ontology() const { return ontology_; }
  const Pipeline& pipeline() const { return *pipeline_; }
  TrackerOptions tracker_options() const;

 private:
  EngineConfig config_;
  Ontology ontology_;
  std::unique_ptr<NluBackend> nlu_;
  std::unique_ptr<IntentValidator> validator_;
  std::unique_ptr<ChatCompletion> completion_;
  std::unique_ptr<StateTracker> tracker_;
  std::unique_ptr<Retriever> retriever_;
  std::unique_ptr<AnswerGenerator> answers_;
  std::unique_ptr<Pipeline> pipeline_;
};

}  // namespace hdst

#endif  // HDST_ENGINE_H_
