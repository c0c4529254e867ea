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

#ifndef HDST_PIPELINE_H_
#define HDST_PIPELINE_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdst/gbt.h"
#include "hdst/llm_bridge.h"
#include "hdst/nlu.h"
#include "hdst/ontology.h"
#include "hdst/tracker.h"
#include "hdst/validator.h"

namespace hdst {

class IntentValidator {
 public:
  virtual ~IntentValidator() = default;
  // `history` is every NLU output of the dialogue, current turn last.
  virtual ValidationVerdict Validate(std::span<const NluOutput> history) const = 0;
};

class RuleValidator : public IntentValidator {
 public:
  explicit RuleValidator(RuleThresholds thresholds = {}) : thresholds_(thresholds) {}
  ValidationVerdict Validate(std::span<const NluOutput> history) const override;

 private:
  RuleThresholds thresholds_;
};

class GbtValidator : public IntentValidator {
 public:
  explicit GbtValidator(GbtModel model);
  ValidationVerdict Validate(std::span<const NluOutput> history) const override;
  const GbtModel& model() const { return model_; }

 private:
  GbtModel model_;
};

class StateTracker {
 public:
  virtual ~StateTracker() = default;
  virtual TrackerAction Track(DialogueState& state, const ScheduleInput& schedule,
                              const NluOutput& nlu,
                              const ValidationVerdict& verdict) const = 0;
};

class RuleStateTracker : public StateTracker {
 public:
  RuleStateTracker(const Ontology& ontology, TrackerOptions options = {})
      : ontology_(ontology), options_(options) {}
  TrackerAction Track(DialogueState& state, const ScheduleInput& schedule,
                      const NluOutput& nlu,
                      const ValidationVerdict& verdict) const override;

 private:
  const Ontology& ontology_;
  TrackerOptions options_;
};

// Sends confirmed turns on normal intents to a chat model and folds its
// DstResult into the state; every other turn goes to the rule tracker. The
// follow-up question and SQL always come from the question bank and query
// builder, whatever the model proposed.
class LlmStateTracker : public StateTracker {
 public:
  LlmStateTracker(const Ontology& ontology, std::vector<PromptTemplate> library,
                  const ChatCompletion& completion, TrackerOptions options = {});
  TrackerAction Track(DialogueState& state, const ScheduleInput& schedule,
                      const NluOutput& nlu,
                      const ValidationVerdict& verdict) const override;

 private:
  const Ontology& ontology_;
  std::vector<PromptTemplate> library_;
  const ChatCompletion& completion_;
  TrackerOptions options_;
};

// Writes the records that take `state` to the model's result on a new turn.
// On error `state` is left unchanged.
TrackerAction ApplyResult(DialogueState& state, const DstResult& result,
                          const Ontology& ontology, const TrackerOptions& options = {});

// Everything one user turn changed. Persisted and replayed by the service.
struct TurnEvent {
  std::string text;
  NluOutput nlu;
  std::string verdict;
  std::string action;
  std::optional<std::string> resolved_intent;  // schedule annotation
  std::optional<std::string> pending_slot;     // slot asked about, if any
  std::string reply;
  std::vector<StateRecord> records;
};

nlohmann::ordered_json TurnEventToJson(const TurnEvent& event);
TurnEvent TurnEventFromJson(const nlohmann::json& node);

struct Conversation {
  DialogueState state;
  std::vector<NluOutput> nlu_history;
  ScheduleHistory schedule_history;
  std::optional<std::string> pending_slot;
};

void ApplyTurnEvent(Conversation& conversation, const TurnEvent& event);

struct TurnOutcome {
  ValidationVerdict verdict;
  TrackerAction action;
  std::optional<DstResult> result;  // current result when an intent is active
  std::optional<AgentAnswer> answer;
  TurnEvent event;
};

class Pipeline {
 public:
  Pipeline(const Ontology& ontology, const NluBackend& nlu,
           const IntentValidator& validator, const StateTracker& tracker,
           TrackerOptions options = {});

  // Optional answer agent used when a turn completes the dialogue.
  void SetAnswerAgent(const Retriever* retriever, const AnswerGenerator* generator);

  // Runs one user turn and applies it to `conversation`.
  TurnOutcome Step(Conversation& conversation, const std::string& text) const;

  const Ontology& ontology() const { return ontology_; }

 private:
  const Ontology& ontology_;
  const NluBackend& nlu_;
  const IntentValidator& validator_;
  const StateTracker& tracker_;
  TrackerOptions options_;
  const Retriever* retriever_ = nullptr;
  const AnswerGenerator* generator_ = nullptr;
};

std::string CompletionReplyText();

}  // namespace hdst

#endif  // HDST_PIPELINE_H_
