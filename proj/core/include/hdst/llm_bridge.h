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

#ifndef HDST_LLM_BRIDGE_H_
#define HDST_LLM_BRIDGE_H_

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hdst/http.h"
#include "hdst/nlu.h"
#include "hdst/ontology.h"
#include "hdst/tracker.h"

namespace hdst {

// --- prompts ---------------------------------------------------------------

inline constexpr std::string_view kWildcardIntent = "*";

struct Exemplar {
  std::string input;
  std::string output;
  bool operator==(const Exemplar&) const = default;
};

struct PromptTemplate {
  std::string intent;  // "*" for the fallback template
  std::string system_text;
  std::string user_text;
  std::vector<Exemplar> exemplars;

  bool is_wildcard() const { return intent == kWildcardIntent; }
  bool operator==(const PromptTemplate&) const = default;
};

// Placeholders a template may use:
//   {schedule}      rendered schedule lines
//   {state}         slot -> value JSON map, "{}" when empty
//   {schema}        the active intent's schema as JSON
//   {output_spec}   the DstResult JSON shape
//   {state_detail}  full dialogue state JSON (fills, sources, history)
//   {nlu}           this turn's NLU output and the validated intent
bool IsKnownPlaceholder(std::string_view name);

// Parses a JSON array of templates. Rejects duplicate intents, unknown
// placeholders, and libraries without exactly one wildcard template.
std::vector<PromptTemplate> ParsePromptLibrary(std::string_view text);
std::vector<PromptTemplate> LoadPromptLibraryFile(const std::string& path);

// Exact intent match, else the wildcard template.
const PromptTemplate& SelectPrompt(const std::vector<PromptTemplate>& library,
                                   std::string_view intent);

struct RenderedPrompt {
  std::string system;
  std::string user;
  bool operator==(const RenderedPrompt&) const = default;
};

// Values for the turn-specific placeholders. Absent values make templates
// that use them fail to render.
struct PromptContext {
  const NluOutput* nlu = nullptr;
  std::string chosen_intent;
};

// Pure substitution. Exemplars are rendered ahead of the live input.
RenderedPrompt RenderPrompt(const PromptTemplate& tmpl, const ScheduleInput& schedule,
                            const DialogueState& state, const IntentSchema& schema,
                            const PromptContext& context = {});

// JSON description of the DstResult shape, substituted for {output_spec}.
const std::string& DstOutputSpec();

// Key of a rendered prompt in canned-response maps.
std::string PromptHash(const RenderedPrompt& prompt);

// Strict parse of a DstResult, after one repair pass that strips code
// fences and text outside the outermost braces. With an ontology, the result
// is also checked against the schema (known normal intent, state keys in
// the schema, complete only when every mandatory slot is filled).
DstResult ParseStructuredOutput(std::string_view raw, const Ontology* ontology = nullptr);

// --- completion backends ---------------------------------------------------

struct CompletionReply {
  std::string text;
  std::vector<HttpAttempt> attempts;
};

class ChatCompletion {
 public:
  virtual ~ChatCompletion() = default;
  virtual CompletionReply Complete(const RenderedPrompt& prompt) const = 0;
};

// POST {base_url}/v1/chat/completions with temperature 0.
class HttpChatCompletion : public ChatCompletion {
 public:
  explicit HttpChatCompletion(Endpoint endpoint, Sleeper sleep = RealSleep);
  CompletionReply Complete(const RenderedPrompt& prompt) const override;

 private:
  Endpoint endpoint_;
  Sleeper sleep_;
};

// Prompt-hash -> response map. Unknown prompts are kNotFound.
class CannedCompletion : public ChatCompletion {
 public:
  explicit CannedCompletion(std::map<std::string, std::string> responses);
  static CannedCompletion FromFile(const std::string& path);
  CompletionReply Complete(const RenderedPrompt& prompt) const override;

 private:
  std::map<std::string, std::string> responses_;
};

// Mock model that reads the <state_detail> and <nlu> blocks of the prompt,
// runs the rule tracker on them and answers with the resulting DstResult in
// a fenced JSON block.
class TrackerBackedCompletion : public ChatCompletion {
 public:
  TrackerBackedCompletion(const Ontology& ontology, TrackerOptions options = {});
  CompletionReply Complete(const RenderedPrompt& prompt) const override;

 private:
  const Ontology& ontology_;
  TrackerOptions options_;
};

// Text between <tag> and </tag>, trimmed. Throws kMalformedResponse when the
// block is missing.
std::string ExtractTaggedBlock(std::string_view text, std::string_view tag);

// --- answers ---------------------------------------------------------------

using RetrievalRow = std::map<std::string, std::string>;

// "<intent>?slot=value&..." over constrained slots in key order.
std::string RetrievalKey(std::string_view intent, const SlotValues& state);

class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual std::vector<RetrievalRow> Retrieve(const std::string& key) const = 0;
};

// Rows from a JSON document {"entries":[{"intent","state","rows"}]}.
class FixtureRetriever : public Retriever {
 public:
  explicit FixtureRetriever(std::map<std::string, std::vector<RetrievalRow>> rows);
  static FixtureRetriever FromFile(const std::string& path);
  std::vector<RetrievalRow> Retrieve(const std::string& key) const override;
  std::size_t size() const { return rows_.size(); }

 private:
  std::map<std::string, std::vector<RetrievalRow>> rows_;
};

struct AgentAnswer {
  std::string text;
  std::vector<std::string> sources;
};

class AnswerGenerator {
 public:
  virtual ~AnswerGenerator() = default;
  // `rows` is nonempty.
  virtual std::string Answer(const DstResult& result,
                             const std::vector<RetrievalRow>& rows) const = 0;
};

class TemplateAnswerGenerator : public AnswerGenerator {
 public:
  std::string Answer(const DstResult& result,
                     const std::vector<RetrievalRow>& rows) const override;
};

// Second completion call with the retrieved rows inlined.
class LlmAnswerGenerator : public AnswerGenerator {
 public:
  explicit LlmAnswerGenerator(const ChatCompletion& completion);
  std::string Answer(const DstResult& result,
                     const std::vector<RetrievalRow>& rows) const override;
  static RenderedPrompt BuildPrompt(const DstResult& result,
                                    const std::vector<RetrievalRow>& rows);

 private:
  const ChatCompletion& completion_;
};

std::string NoDataAnswer();

// Requires a complete result (kPrecondition otherwise).
AgentAnswer GenerateAnswer(const DstResult& result, const Retriever& retriever,
                           const AnswerGenerator& generator);

}  // namespace hdst

#endif  // HDST_LLM_BRIDGE_H_
