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

#include "hdst/llm_bridge.h"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "hdst/error.h"
#include "hdst/rng.h"
#include "hdst/text.h"

namespace hdst {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::string_view kPlaceholders[] = {"schedule", "state",        "schema",
                                              "output_spec", "state_detail", "nlu"};

bool IsPlaceholderChar(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

// Calls `on_name` for every {name} token with a lowercase identifier inside
// and copies the rest of `text` verbatim through `on_text`.
template <typename OnText, typename OnName>
void ScanPlaceholders(std::string_view text, OnText on_text, OnName on_name) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find('{', pos);
    if (open == std::string_view::npos) break;
    std::size_t end = open + 1;
    while (end < text.size() && IsPlaceholderChar(text[end])) ++end;
    if (end < text.size() && text[end] == '}' && end > open + 1) {
      on_text(text.substr(pos, open - pos));
      on_name(text.substr(open + 1, end - open - 1));
      pos = end + 1;
    } else {
      on_text(text.substr(pos, open + 1 - pos));
      pos = open + 1;
    }
  }
  on_text(text.substr(pos));
}

void CheckPlaceholders(std::string_view text, std::string_view where) {
  ScanPlaceholders(
      text, [](std::string_view) {},
      [&](std::string_view name) {
        if (!IsKnownPlaceholder(name)) {
          throw Error(ErrorCode::kSemantic, std::string(where) +
                                                ": unknown placeholder {" +
                                                std::string(name) + "}");
        }
      });
}

std::string Substitute(std::string_view text,
                       const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  ScanPlaceholders(
      text, [&](std::string_view chunk) { out.append(chunk); },
      [&](std::string_view name) {
        auto it = values.find(name);
        if (it == values.end()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "unresolved placeholder {" + std::string(name) + "}");
        }
        out += it->second;
      });
  return out;
}

std::string SchemaJson(const IntentSchema& schema) {
  ordered_json j;
  j["intent"] = schema.id;
  j["domain"] = schema.domain;
  ordered_json slots = ordered_json::array();
  for (const SlotDef& slot : schema.slots) {
    ordered_json s;
    s["id"] = slot.id;
    s["mandatory"] = slot.mandatory;
    s["values"] = slot.values;
    if (!slot.free_text()) s["default"] = slot.values[slot.default_index];
    slots.push_back(std::move(s));
  }
  j["slots"] = std::move(slots);
  return j.dump();
}

std::string Humanize(std::string_view id) {
  std::string out(id);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

// Removes ``` fence lines and cuts to the outermost braces.
std::string Repair(std::string_view raw) {
  std::string text;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) nl = raw.size();
    std::string_view line = raw.substr(pos, nl - pos);
    const std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string_view::npos || line.substr(start, 3) != "```") {
      text.append(line);
      text.push_back('\n');
    }
    pos = nl + 1;
  }
  const std::size_t first = text.find('{');
  const std::size_t last = text.rfind('}');
  if (first == std::string::npos || last == std::string::npos || last < first) {
    throw Error(ErrorCode::kParse, "model output contains no JSON object");
  }
  return text.substr(first, last - first + 1);
}

const json& Require(const json& node, const char* key, const std::string& prefix = "") {
  auto it = node.find(key);
  if (it == node.end()) {
    throw Error(ErrorCode::kMissingKey, "missing key: " + prefix + key);
  }
  return *it;
}

std::string RequireString(const json& node, const char* key, const std::string& prefix = "") {
  const json& v = Require(node, key, prefix);
  if (!v.is_string()) {
    throw Error(ErrorCode::kParse, "key " + prefix + key + " must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

bool IsKnownPlaceholder(std::string_view name) {
  return std::find(std::begin(kPlaceholders), std::end(kPlaceholders), name) !=
         std::end(kPlaceholders);
}

std::vector<PromptTemplate> ParsePromptLibrary(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, std::string("prompt library: ") + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::kSemantic, "prompt library must be a JSON array");
  }
  std::vector<PromptTemplate> library;
  std::set<std::string> seen;
  int wildcards = 0;
  try {
    for (const json& node : doc) {
      PromptTemplate t;
      t.intent = node.at("intent").get<std::string>();
      t.system_text = node.at("system").get<std::string>();
      t.user_text = node.at("user").get<std::string>();
      for (const json& ex : node.value("exemplars", json::array())) {
        t.exemplars.push_back(
            {ex.at("input").get<std::string>(), ex.at("output").get<std::string>()});
      }
      if (!seen.insert(t.intent).second) {
        throw Error(ErrorCode::kSemantic, "duplicate prompt template for intent " + t.intent);
      }
      if (t.is_wildcard()) ++wildcards;
      CheckPlaceholders(t.system_text, "template " + t.intent);
      CheckPlaceholders(t.user_text, "template " + t.intent);
      library.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSemantic, std::string("prompt library: ") + e.what());
  }
  if (wildcards != 1) {
    throw Error(ErrorCode::kSemantic, "prompt library needs exactly one \"*\" template");
  }
  return library;
}

std::vector<PromptTemplate> LoadPromptLibraryFile(const std::string& path) {
  return ParsePromptLibrary(ReadFile(path));
}

const PromptTemplate& SelectPrompt(const std::vector<PromptTemplate>& library,
                                   std::string_view intent) {
  const PromptTemplate* wildcard = nullptr;
  for (const PromptTemplate& t : library) {
    if (t.intent == intent) return t;
    if (t.is_wildcard()) wildcard = &t;
  }
  if (!wildcard) throw Error(ErrorCode::kPrecondition, "prompt library has no wildcard");
  return *wildcard;
}

RenderedPrompt RenderPrompt(const PromptTemplate& tmpl, const ScheduleInput& schedule,
                            const DialogueState& state, const IntentSchema& schema,
                            const PromptContext& context) {
  std::map<std::string, std::string, std::less<>> values;
  values["schedule"] = RenderSchedule(schedule);
  json plain = json::object();
  for (const auto& [slot, fill] : state.fills) plain[slot] = fill.value;
  values["state"] = plain.dump();
  values["schema"] = SchemaJson(schema);
  values["output_spec"] = DstOutputSpec();
  values["state_detail"] = DialogueStateToJson(state).dump();
  if (context.nlu) {
    ordered_json nlu;
    nlu["output"] = NluOutputToJson(*context.nlu);
    nlu["chosen_intent"] = context.chosen_intent;
    values["nlu"] = nlu.dump();
  }
  RenderedPrompt prompt;
  prompt.system = Substitute(tmpl.system_text, values);
  for (std::size_t i = 0; i < tmpl.exemplars.size(); ++i) {
    prompt.user += "Example " + std::to_string(i + 1) + "\nInput:\n" +
                   tmpl.exemplars[i].input + "\nOutput:\n" + tmpl.exemplars[i].output +
                   "\n\n";
  }
  prompt.user += Substitute(tmpl.user_text, values);
  return prompt;
}

const std::string& DstOutputSpec() {
  static const std::string spec =
      R"({"dialogue_status":"in_progress"|"complete","intent":string,)"
      R"("state":{slot_id:value,...},"sql":{"text":string,"params":[string,...]},)"
      R"("followup":string|null,"dont_care":[slot_id,...]})";
  return spec;
}

std::string PromptHash(const RenderedPrompt& prompt) {
  return Fnv1a64Hex(prompt.system + "\n\n" + prompt.user);
}

DstResult ParseStructuredOutput(std::string_view raw, const Ontology* ontology) {
  const std::string body = Repair(raw);
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("model output is not JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "model output is not an object");

  DstResult result;
  result.intent = RequireString(doc, "intent");
  const json& state = Require(doc, "state");
  const json& sql = Require(doc, "sql");
  const std::string status = RequireString(doc, "dialogue_status");
  const json& followup = Require(doc, "followup");

  if (!state.is_object()) throw Error(ErrorCode::kParse, "state must be an object");
  for (const auto& [slot, value] : state.items()) {
    if (!value.is_string()) {
      throw Error(ErrorCode::kParse, "state value for " + slot + " must be a string");
    }
    result.state[slot] = value.get<std::string>();
  }
  if (!sql.is_object()) throw Error(ErrorCode::kParse, "sql must be an object");
  result.query.text = RequireString(sql, "text", "sql.");
  const json& params = Require(sql, "params", "sql.");
  if (!params.is_array()) throw Error(ErrorCode::kParse, "sql.params must be an array");
  for (const json& p : params) {
    if (!p.is_string()) throw Error(ErrorCode::kParse, "sql.params entries must be strings");
    result.query.params.push_back(p.get<std::string>());
  }
  if (status == "complete") {
    result.status = DialogueStatus::kComplete;
  } else if (status == "in_progress") {
    result.status = DialogueStatus::kInProgress;
  } else {
    throw Error(ErrorCode::kParse, "unknown dialogue_status: " + status);
  }
  if (followup.is_string()) {
    result.followup = followup.get<std::string>();
  } else if (!followup.is_null()) {
    throw Error(ErrorCode::kParse, "followup must be a string or null");
  }
  if (auto it = doc.find("dont_care"); it != doc.end()) {
    if (!it->is_array()) throw Error(ErrorCode::kParse, "dont_care must be an array");
    for (const json& s : *it) {
      if (!s.is_string()) throw Error(ErrorCode::kParse, "dont_care entries must be strings");
      result.dont_care.insert(s.get<std::string>());
    }
  }

  if (result.status == DialogueStatus::kComplete && result.followup) {
    throw Error(ErrorCode::kInvariant, "complete result carries a followup");
  }
  if (CountPlaceholders(result.query.text) != result.query.params.size()) {
    throw Error(ErrorCode::kInvariant, "sql placeholder count differs from params");
  }
  for (const std::string& slot : result.dont_care) {
    if (!result.state.count(slot)) {
      throw Error(ErrorCode::kInvariant, "dont_care slot " + slot + " is not in state");
    }
  }
  if (ontology) {
    const IntentSchema* schema = ontology->FindIntent(result.intent);
    if (!schema || schema->kind != IntentKind::kNormal) {
      throw Error(ErrorCode::kInvariant, "result intent is not a normal intent: " +
                                             result.intent);
    }
    std::set<std::string> filled;
    for (const auto& [slot, value] : result.state) {
      if (!schema->HasSlot(slot)) {
        throw Error(ErrorCode::kInvariant,
                    "slot " + slot + " is not part of intent " + result.intent);
      }
      filled.insert(slot);
    }
    if (result.status == DialogueStatus::kComplete &&
        !MissingMandatory(*schema, filled).empty()) {
      throw Error(ErrorCode::kInvariant, "complete result misses mandatory slots");
    }
  }
  return result;
}

// --- completion backends ---------------------------------------------------

HttpChatCompletion::HttpChatCompletion(Endpoint endpoint, Sleeper sleep)
    : endpoint_(std::move(endpoint)), sleep_(std::move(sleep)) {
  ValidateEndpoint(endpoint_);
}

CompletionReply HttpChatCompletion::Complete(const RenderedPrompt& prompt) const {
  ordered_json body;
  body["model"] = endpoint_.model_name;
  body["messages"] = ordered_json::array(
      {{{"role", "system"}, {"content", prompt.system}},
       {{"role", "user"}, {"content", prompt.user}}});
  body["temperature"] = 0;
  HttpReply reply = PostJson(endpoint_, "/v1/chat/completions", body.dump(), sleep_);
  CompletionReply out;
  out.attempts = std::move(reply.attempts);
  try {
    const json doc = json::parse(reply.body);
    out.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse,
                std::string("chat completion envelope: ") + e.what());
  }
  return out;
}

CannedCompletion::CannedCompletion(std::map<std::string, std::string> responses)
    : responses_(std::move(responses)) {}

CannedCompletion CannedCompletion::FromFile(const std::string& path) {
  try {
    return CannedCompletion(
        json::parse(ReadFile(path)).get<std::map<std::string, std::string>>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSemantic, "canned responses " + path + ": " + e.what());
  }
}

CompletionReply CannedCompletion::Complete(const RenderedPrompt& prompt) const {
  const std::string key = PromptHash(prompt);
  auto it = responses_.find(key);
  if (it == responses_.end()) {
    throw Error(ErrorCode::kNotFound, "no canned response for prompt " + key);
  }
  return {it->second, {}};
}

std::string ExtractTaggedBlock(std::string_view text, std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  const std::size_t start = text.rfind(open);
  if (start == std::string_view::npos) {
    throw Error(ErrorCode::kMalformedResponse, "prompt has no <" + std::string(tag) + "> block");
  }
  const std::size_t body = start + open.size();
  const std::size_t end = text.find(close, body);
  if (end == std::string_view::npos) {
    throw Error(ErrorCode::kMalformedResponse, "unterminated <" + std::string(tag) + "> block");
  }
  std::string_view inner = text.substr(body, end - body);
  while (!inner.empty() && std::isspace(static_cast<unsigned char>(inner.front()))) {
    inner.remove_prefix(1);
  }
  while (!inner.empty() && std::isspace(static_cast<unsigned char>(inner.back()))) {
    inner.remove_suffix(1);
  }
  return std::string(inner);
}

TrackerBackedCompletion::TrackerBackedCompletion(const Ontology& ontology,
                                                 TrackerOptions options)
    : ontology_(ontology), options_(options) {}

CompletionReply TrackerBackedCompletion::Complete(const RenderedPrompt& prompt) const {
  DialogueState state;
  NluOutput nlu;
  ValidationVerdict verdict;
  try {
    state = DialogueStateFromJson(json::parse(ExtractTaggedBlock(prompt.user, "state_detail")));
    const json block = json::parse(ExtractTaggedBlock(prompt.user, "nlu"));
    nlu = NluOutputFromJson(block.at("output"));
    verdict.label = Verdict::kConfirmed;
    verdict.chosen_intent = block.at("chosen_intent").get<std::string>();
    verdict.probabilities = {1.0, 0.0, 0.0};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedResponse, std::string("mock model input: ") + e.what());
  }
  Update(state, nlu, verdict, ontology_, options_);
  return {"```json\n" + SerializeDstResult(EmitResult(state, ontology_, options_)) + "\n```\n",
          {}};
}

// --- answers ---------------------------------------------------------------

std::string RetrievalKey(std::string_view intent, const SlotValues& state) {
  std::string key(intent);
  char sep = '?';
  for (const auto& [slot, value] : state) {
    if (value == kAnyValue) continue;
    key += sep;
    key += slot + "=" + value;
    sep = '&';
  }
  return key;
}

FixtureRetriever::FixtureRetriever(std::map<std::string, std::vector<RetrievalRow>> rows)
    : rows_(std::move(rows)) {}

FixtureRetriever FixtureRetriever::FromFile(const std::string& path) {
  std::map<std::string, std::vector<RetrievalRow>> rows;
  try {
    const json doc = json::parse(ReadFile(path));
    for (const json& entry : doc.at("entries")) {
      const std::string key = RetrievalKey(entry.at("intent").get<std::string>(),
                                           entry.at("state").get<SlotValues>());
      auto& list = rows[key];
      for (const json& row : entry.at("rows")) list.push_back(row.get<RetrievalRow>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSemantic, "retrieval fixture " + path + ": " + e.what());
  }
  return FixtureRetriever(std::move(rows));
}

std::vector<RetrievalRow> FixtureRetriever::Retrieve(const std::string& key) const {
  auto it = rows_.find(key);
  return it == rows_.end() ? std::vector<RetrievalRow>{} : it->second;
}

std::string TemplateAnswerGenerator::Answer(const DstResult& result,
                                            const std::vector<RetrievalRow>& rows) const {
  std::string text = "Here is what I found for " + Humanize(result.intent);
  std::string constraints;
  for (const auto& [slot, value] : result.state) {
    if (value == kAnyValue) continue;
    constraints += (constraints.empty() ? "" : ", ") + slot + " " + value;
  }
  if (!constraints.empty()) text += " (" + constraints + ")";
  text += ":";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    text += i == 0 ? " " : "; ";
    bool first = true;
    for (const auto& [field, value] : rows[i]) {
      text += (first ? "" : ", ") + field + " " + value;
      first = false;
    }
  }
  return text + ".";
}

LlmAnswerGenerator::LlmAnswerGenerator(const ChatCompletion& completion)
    : completion_(completion) {}

RenderedPrompt LlmAnswerGenerator::BuildPrompt(const DstResult& result,
                                               const std::vector<RetrievalRow>& rows) {
  RenderedPrompt prompt;
  prompt.system =
      "You answer a user's request using only the rows given. Reply in the "
      "language of the request values, in one or two sentences.";
  prompt.user = "Request:\n" + SerializeDstResult(result) + "\nRows:\n" + json(rows).dump();
  return prompt;
}

std::string LlmAnswerGenerator::Answer(const DstResult& result,
                                       const std::vector<RetrievalRow>& rows) const {
  return completion_.Complete(BuildPrompt(result, rows)).text;
}

std::string NoDataAnswer() {
  return "Sorry, I could not find any data for that request.";
}

AgentAnswer GenerateAnswer(const DstResult& result, const Retriever& retriever,
                           const AnswerGenerator& generator) {
  if (result.status != DialogueStatus::kComplete) {
    throw Error(ErrorCode::kPrecondition, "answers need a complete dialogue state");
  }
  const std::string key = RetrievalKey(result.intent, result.state);
  std::vector<RetrievalRow> rows;
  try {
    rows = retriever.Retrieve(key);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kUnavailable, std::string("retrieval failed: ") + e.what());
  }
  if (rows.empty()) return {NoDataAnswer(), {}};
  return {generator.Answer(result, rows), {key}};
}

}  // namespace hdst
