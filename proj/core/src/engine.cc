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

#include "hdst/engine.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <utility>
#include <variant>
#include <vector>

#include <spdlog/spdlog.h>

#include "hdst/error.h"
#include "hdst/text.h"

namespace hdst {
namespace {

using json = nlohmann::json;

// One flat config key bound to a member of EngineConfig.
struct Field {
  const char* name;
  std::variant<std::string EngineConfig::*, int EngineConfig::*,
               double EngineConfig::*, bool EngineConfig::*,
               std::uint64_t EngineConfig::*>
      member;
};

// Endpoint and threshold members live in nested structs; they get their own
// accessors below.
struct NestedField {
  std::string name;
  enum Kind { kString, kInt, kDouble } kind;
  std::string* (*str)(EngineConfig&);
  double* (*dbl)(EngineConfig&);
  void (*set_int)(EngineConfig&, long long);
};

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      {"ontology_path", &EngineConfig::ontology_path},
      {"lexicon_path", &EngineConfig::lexicon_path},
      {"prompts_path", &EngineConfig::prompts_path},
      {"retrieval_path", &EngineConfig::retrieval_path},
      {"validator", &EngineConfig::validator},
      {"validator_model", &EngineConfig::validator_model},
      {"tracker", &EngineConfig::tracker},
      {"canned_responses", &EngineConfig::canned_responses},
      {"nlu", &EngineConfig::nlu},
      {"answers", &EngineConfig::answers},
      {"seed", &EngineConfig::seed},
      {"persistence_path", &EngineConfig::persistence_path},
      {"host", &EngineConfig::host},
      {"port", &EngineConfig::port},
      {"session_ttl_seconds", &EngineConfig::session_ttl_seconds},
      {"cors_origin", &EngineConfig::cors_origin},
      {"sql_mandatory_only", &EngineConfig::sql_mandatory_only},
  };
  return fields;
}

template <Endpoint EngineConfig::*E>
std::vector<NestedField> EndpointFields(const char* prefix) {
  auto name = [prefix](const char* suffix) { return std::string(prefix) + suffix; };
  return {
      {name("base_url"), NestedField::kString,
       [](EngineConfig& c) { return &(c.*E).base_url; }, nullptr, nullptr},
      {name("model"), NestedField::kString,
       [](EngineConfig& c) { return &(c.*E).model_name; }, nullptr, nullptr},
      {name("api_key_env"), NestedField::kString,
       [](EngineConfig& c) { return &(c.*E).api_key_env; }, nullptr, nullptr},
      {name("timeout_ms"), NestedField::kInt, nullptr, nullptr,
       [](EngineConfig& c, long long v) {
         (c.*E).timeout = std::chrono::milliseconds(v);
       }},
      {name("max_retries"), NestedField::kInt, nullptr, nullptr,
       [](EngineConfig& c, long long v) { (c.*E).max_retries = static_cast<int>(v); }},
      {name("backoff_ms"), NestedField::kInt, nullptr, nullptr,
       [](EngineConfig& c, long long v) {
         (c.*E).backoff_base = std::chrono::milliseconds(v);
       }},
  };
}

const std::vector<NestedField>& NestedFields() {
  static const std::vector<NestedField> fields = [] {
    std::vector<NestedField> out = EndpointFields<&EngineConfig::llm>("llm_");
    auto nlu = EndpointFields<&EngineConfig::nlu_remote>("nlu_");
    out.insert(out.end(), nlu.begin(), nlu.end());
    out.push_back({"threshold_min", NestedField::kDouble, nullptr,
                   [](EngineConfig& c) { return &c.thresholds.min; }, nullptr});
    out.push_back({"threshold_margin", NestedField::kDouble, nullptr,
                   [](EngineConfig& c) { return &c.thresholds.margin; }, nullptr});
    out.push_back({"threshold_high", NestedField::kDouble, nullptr,
                   [](EngineConfig& c) { return &c.thresholds.high; }, nullptr});
    return out;
  }();
  return fields;
}

[[noreturn]] void Fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kConfig, field + ": " + what, field);
}

std::string EnvName(const std::string& field) {
  std::string out = "DST_";
  for (char c : field) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Values from JSON and from the environment both funnel through here; the
// environment supplies strings, which are parsed per target type.
long long AsInt(const std::string& field, const json& v) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    try {
      long long out = std::stoll(s, &used);
      if (used == s.size()) return out;
    } catch (const std::exception&) {
    }
  }
  Fail(field, "expected an integer");
}

std::uint64_t AsU64(const std::string& field, const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    try {
      if (!s.empty() && s[0] != '-') {
        std::uint64_t out = std::stoull(s, &used);
        if (used == s.size()) return out;
      }
    } catch (const std::exception&) {
    }
  }
  Fail(field, "expected a non-negative integer");
}

double AsDouble(const std::string& field, const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    try {
      double out = std::stod(s, &used);
      if (used == s.size()) return out;
    } catch (const std::exception&) {
    }
  }
  Fail(field, "expected a number");
}

bool AsBool(const std::string& field, const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
  }
  Fail(field, "expected a boolean");
}

std::string AsString(const std::string& field, const json& v) {
  if (!v.is_string()) Fail(field, "expected a string");
  return v.get<std::string>();
}

bool Assign(EngineConfig& config, const std::string& key, const json& v) {
  for (const Field& f : Fields()) {
    if (key != f.name) continue;
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(config.*member)>;
          if constexpr (std::is_same_v<T, std::string>) {
            config.*member = AsString(key, v);
          } else if constexpr (std::is_same_v<T, int>) {
            long long n = AsInt(key, v);
            if (n < INT32_MIN || n > INT32_MAX) Fail(key, "out of range");
            config.*member = static_cast<int>(n);
          } else if constexpr (std::is_same_v<T, double>) {
            config.*member = AsDouble(key, v);
          } else if constexpr (std::is_same_v<T, bool>) {
            config.*member = AsBool(key, v);
          } else {
            config.*member = AsU64(key, v);
          }
        },
        f.member);
    return true;
  }
  for (const NestedField& f : NestedFields()) {
    if (key != f.name) continue;
    switch (f.kind) {
      case NestedField::kString: *f.str(config) = AsString(key, v); break;
      case NestedField::kDouble: *f.dbl(config) = AsDouble(key, v); break;
      case NestedField::kInt: f.set_int(config, AsInt(key, v)); break;
    }
    return true;
  }
  return false;
}

std::vector<std::string> AllKeys() {
  std::vector<std::string> out;
  for (const Field& f : Fields()) out.emplace_back(f.name);
  for (const NestedField& f : NestedFields()) out.emplace_back(f.name);
  return out;
}

void ApplyEnv(EngineConfig& config, const EnvLookup& env) {
  for (const std::string& key : AllKeys()) {
    if (auto value = env(EnvName(key))) Assign(config, key, json(*value));
  }
}

void CheckOneOf(const std::string& field, const std::string& value,
                std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  Fail(field, "\"" + value + "\" is not one of " + list);
}

void CheckEndpoint(const std::string& prefix, const Endpoint& endpoint) {
  if (endpoint.base_url.empty()) Fail(prefix + "base_url", "required");
  try {
    ValidateEndpoint(endpoint);
  } catch (const Error& e) {
    Fail(prefix + "base_url", e.what());
  }
}

void Validate(const EngineConfig& c) {
  CheckOneOf("validator", c.validator, {"rule", "gbt"});
  CheckOneOf("tracker", c.tracker, {"rule", "llm", "llm_mock", "llm_canned"});
  CheckOneOf("nlu", c.nlu, {"lexicon", "remote"});
  CheckOneOf("answers", c.answers, {"template", "llm", "none"});
  if (c.validator == "gbt" && c.validator_model.empty()) {
    Fail("validator_model", "required when validator is gbt");
  }
  if (c.tracker == "llm_canned" && c.canned_responses.empty()) {
    Fail("canned_responses", "required when tracker is llm_canned");
  }
  if (c.tracker == "llm" || c.answers == "llm") CheckEndpoint("llm_", c.llm);
  if (c.nlu == "remote") CheckEndpoint("nlu_", c.nlu_remote);
  if (c.port < 0 || c.port > 65535) Fail("port", "must be in [0, 65535]");
  if (c.session_ttl_seconds <= 0) Fail("session_ttl_seconds", "must be positive");
  if (c.persistence_path.empty()) Fail("persistence_path", "required");
  for (auto [name, v] : {std::pair{"threshold_min", c.thresholds.min},
                         std::pair{"threshold_margin", c.thresholds.margin},
                         std::pair{"threshold_high", c.thresholds.high}}) {
    if (!(v >= 0.0 && v <= 1.0)) Fail(name, "must be in [0, 1]");
  }
}

}  // namespace

std::optional<std::string> ProcessEnv(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (v == nullptr) return std::nullopt;
  return std::string(v);
}

std::string EngineConfig::Resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

EngineConfig ParseEngineConfig(std::string_view text, const EnvLookup& env) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what(),
                "syntax");
  }
  if (!doc.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object", "syntax");
  EngineConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key.find("api_key") != std::string::npos && key.size() >= 7 &&
        key.compare(key.size() - 4, 4, "_env") != 0) {
      Fail(key, "API keys are read from the environment; name the variable in "
                "llm_api_key_env instead");
    }
    if (!Assign(config, key, value)) Fail(key, "unknown config key");
  }
  ApplyEnv(config, env);
  Validate(config);
  return config;
}

EngineConfig LoadEngineConfig(const std::string& path, const EnvLookup& env) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what(), "config");
  }
  EngineConfig config = ParseEngineConfig(text, env);
  config.base_dir = std::filesystem::path(path).parent_path().string();
  if (config.base_dir.empty()) config.base_dir = ".";
  return config;
}

EngineConfig DefaultEngineConfig(const std::string& base_dir, const EnvLookup& env) {
  EngineConfig config = ParseEngineConfig("{}", env);
  config.base_dir = base_dir;
  return config;
}

nlohmann::ordered_json EngineConfigToJson(const EngineConfig& c) {
  nlohmann::ordered_json out;
  for (const Field& f : Fields()) {
    std::visit([&](auto member) { out[f.name] = c.*member; }, f.member);
  }
  EngineConfig copy = c;
  for (const NestedField& f : NestedFields()) {
    switch (f.kind) {
      case NestedField::kString: out[f.name] = *f.str(copy); break;
      case NestedField::kDouble: out[f.name] = *f.dbl(copy); break;
      case NestedField::kInt: break;
    }
  }
  out["llm_timeout_ms"] = c.llm.timeout.count();
  out["llm_max_retries"] = c.llm.max_retries;
  out["llm_backoff_ms"] = c.llm.backoff_base.count();
  out["nlu_timeout_ms"] = c.nlu_remote.timeout.count();
  out["nlu_max_retries"] = c.nlu_remote.max_retries;
  out["nlu_backoff_ms"] = c.nlu_remote.backoff_base.count();
  return out;
}

namespace {

template <typename F>
auto Loading(const char* field, F&& load) {
  try {
    return load();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string(field) + ": " + e.what(), field);
  }
}

}  // namespace

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  const EngineConfig& c = config_;
  ontology_ = Loading("ontology_path",
                      [&] { return LoadOntologyFile(c.Resolve(c.ontology_path)); });

  if (c.nlu == "remote") {
    nlu_ = std::make_unique<RemoteNluBackend>(c.nlu_remote);
  } else {
    nlu_ = Loading("lexicon_path", [&] {
      return BuildLexiconBackend(LoadLexiconFile(c.Resolve(c.lexicon_path), ontology_));
    });
  }

  if (c.validator == "gbt") {
    validator_ = Loading("validator_model", [&]() -> std::unique_ptr<IntentValidator> {
      return std::make_unique<GbtValidator>(
          ParseGbtModel(ReadFile(c.Resolve(c.validator_model))));
    });
  } else {
    validator_ = std::make_unique<RuleValidator>(c.thresholds);
  }

  if (c.tracker == "llm" || c.answers == "llm") {
    completion_ = std::make_unique<HttpChatCompletion>(c.llm);
  }
  if (c.tracker == "rule") {
    tracker_ = std::make_unique<RuleStateTracker>(ontology_, tracker_options());
  } else {
    auto library = Loading("prompts_path",
                           [&] { return LoadPromptLibraryFile(c.Resolve(c.prompts_path)); });
    if (c.tracker == "llm_mock") {
      completion_ = std::make_unique<TrackerBackedCompletion>(ontology_, tracker_options());
    } else if (c.tracker == "llm_canned") {
      completion_ = Loading("canned_responses", [&] {
        return std::make_unique<CannedCompletion>(
            CannedCompletion::FromFile(c.Resolve(c.canned_responses)));
      });
    }
    tracker_ = std::make_unique<LlmStateTracker>(ontology_, std::move(library), *completion_,
                                                 tracker_options());
  }

  pipeline_ = std::make_unique<Pipeline>(ontology_, *nlu_, *validator_, *tracker_,
                                         tracker_options());
  if (c.answers != "none") {
    retriever_ = Loading("retrieval_path", [&] {
      return std::make_unique<FixtureRetriever>(
          FixtureRetriever::FromFile(c.Resolve(c.retrieval_path)));
    });
    if (c.answers == "llm") {
      answers_ = std::make_unique<LlmAnswerGenerator>(*completion_);
    } else {
      answers_ = std::make_unique<TemplateAnswerGenerator>();
    }
    pipeline_->SetAnswerAgent(retriever_.get(), answers_.get());
  }
  spdlog::info("engine ready: {} intents, validator={}, tracker={}, nlu={}, answers={}",
               ontology_.intents().size(), c.validator, c.tracker, c.nlu, c.answers);
}

Engine::~Engine() = default;

TrackerOptions Engine::tracker_options() const {
  TrackerOptions options;
  options.query.mandatory_only = config_.sql_mandatory_only;
  return options;
}

}  // namespace hdst
