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

#include "hdst/pipeline.h"

#include <utility>

#include "hdst/error.h"

namespace hdst {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json OptionalString(const std::optional<std::string>& value) {
  return value ? ordered_json(*value) : ordered_json(nullptr);
}

std::optional<std::string> ReadOptional(const json& node, const char* key) {
  auto it = node.find(key);
  if (it == node.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

ValidationVerdict RuleValidator::Validate(std::span<const NluOutput> history) const {
  return ClassifyRule(ExtractFeatures(history), thresholds_);
}

GbtValidator::GbtValidator(GbtModel model) : model_(std::move(model)) {
  if (model_.n_features != static_cast<int>(kFeatureCount)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "validator model expects " + std::to_string(model_.n_features) +
                    " features, extractor yields " + std::to_string(kFeatureCount));
  }
}

ValidationVerdict GbtValidator::Validate(std::span<const NluOutput> history) const {
  return PredictGbt(model_, ExtractFeatures(history));
}

TrackerAction RuleStateTracker::Track(DialogueState& state, const ScheduleInput&,
                                      const NluOutput& nlu,
                                      const ValidationVerdict& verdict) const {
  return Update(state, nlu, verdict, ontology_, options_);
}

LlmStateTracker::LlmStateTracker(const Ontology& ontology,
                                 std::vector<PromptTemplate> library,
                                 const ChatCompletion& completion, TrackerOptions options)
    : ontology_(ontology),
      library_(std::move(library)),
      completion_(completion),
      options_(options) {
  SelectPrompt(library_, kWildcardIntent);
}

TrackerAction LlmStateTracker::Track(DialogueState& state, const ScheduleInput& schedule,
                                     const NluOutput& nlu,
                                     const ValidationVerdict& verdict) const {
  const IntentSchema* chosen = verdict.label == Verdict::kConfirmed
                                   ? ontology_.FindIntent(verdict.chosen_intent)
                                   : nullptr;
  if (!chosen || chosen->kind != IntentKind::kNormal) {
    return Update(state, nlu, verdict, ontology_, options_);
  }
  const PromptTemplate& tmpl = SelectPrompt(library_, chosen->id);
  const RenderedPrompt prompt =
      RenderPrompt(tmpl, schedule, state, *chosen, PromptContext{&nlu, chosen->id});
  const CompletionReply reply = completion_.Complete(prompt);
  const DstResult result = ParseStructuredOutput(reply.text, &ontology_);
  return ApplyResult(state, result, ontology_, options_);
}

TrackerAction ApplyResult(DialogueState& state, const DstResult& result,
                          const Ontology& ontology, const TrackerOptions& options) {
  const IntentSchema& schema = ontology.Intent(result.intent);
  if (schema.kind != IntentKind::kNormal) {
    throw Error(ErrorCode::kInvariant, "model result names a special intent");
  }
  auto record = [](const DialogueState& s, RecordKind kind, const std::string& intent,
                   std::optional<std::string> slot = {},
                   std::optional<std::string> value = {}) {
    return StateRecord{s.turn_no, kind, intent, std::move(slot), std::move(value)};
  };

  DialogueState next = state;
  ApplyRecord(next, StateRecord{next.turn_no + 1, RecordKind::kTurn,
                                next.active_intent.value_or(""), {}, {}});
  if (next.pending != Pending::kNone) {
    ApplyRecord(next, record(next, RecordKind::kResume, next.active_intent.value_or("")));
  }
  if (!next.active_intent) {
    ApplyRecord(next, record(next, RecordKind::kAdoptIntent, schema.id));
  } else if (*next.active_intent != schema.id) {
    const std::map<std::string, SlotFill> old = next.fills;
    ApplyRecord(next, record(next, RecordKind::kShiftIntent, schema.id));
    for (const auto& [slot, fill] : old) {
      if (schema.HasSlot(slot)) {
        ApplyRecord(next, record(next, RecordKind::kCarryOver, schema.id, slot, fill.value));
      } else {
        ApplyRecord(next, record(next, RecordKind::kDropSlot, schema.id, slot));
      }
    }
  }
  const std::map<std::string, SlotFill> current = next.fills;
  for (const auto& [slot, fill] : current) {
    if (!result.state.count(slot)) {
      ApplyRecord(next, record(next, RecordKind::kDropSlot, schema.id, slot));
    }
  }
  for (const auto& [slot, value] : result.state) {
    if (!schema.HasSlot(slot)) {
      throw Error(ErrorCode::kInvariant, "slot " + slot + " is not part of " + schema.id);
    }
    if (result.dont_care.count(slot)) {
      ApplyRecord(next, record(next, RecordKind::kDontCare, schema.id, slot, value));
      continue;
    }
    auto it = next.fills.find(slot);
    if (it == next.fills.end() || it->second.value != value) {
      ApplyRecord(next, record(next, RecordKind::kFill, schema.id, slot, value));
    }
  }

  const DstResult emitted = EmitResult(next, ontology, options);
  TrackerAction action;
  if (emitted.status == DialogueStatus::kComplete) {
    ApplyRecord(next, record(next, RecordKind::kComplete, schema.id));
    action.kind = ActionKind::kComplete;
    action.result = emitted;
  } else {
    std::set<std::string> filled;
    for (const auto& [slot, fill] : next.fills) filled.insert(slot);
    const std::string slot = MissingMandatory(schema, filled).front();
    ApplyRecord(next, record(next, RecordKind::kAskFollowup, schema.id, slot,
                             *emitted.followup));
    action.kind = ActionKind::kAskFollowup;
    action.question = emitted.followup;
    action.slot = slot;
  }
  state = std::move(next);
  return action;
}

ordered_json TurnEventToJson(const TurnEvent& event) {
  ordered_json j;
  j["text"] = event.text;
  j["nlu"] = NluOutputToJson(event.nlu);
  j["verdict"] = event.verdict;
  j["action"] = event.action;
  j["resolved_intent"] = OptionalString(event.resolved_intent);
  j["pending_slot"] = OptionalString(event.pending_slot);
  j["reply"] = event.reply;
  ordered_json records = ordered_json::array();
  for (const StateRecord& r : event.records) records.push_back(StateRecordToJson(r));
  j["records"] = std::move(records);
  return j;
}

TurnEvent TurnEventFromJson(const json& node) {
  try {
    TurnEvent event;
    event.text = node.at("text").get<std::string>();
    event.nlu = NluOutputFromJson(node.at("nlu"));
    event.verdict = node.at("verdict").get<std::string>();
    event.action = node.at("action").get<std::string>();
    event.resolved_intent = ReadOptional(node, "resolved_intent");
    event.pending_slot = ReadOptional(node, "pending_slot");
    event.reply = node.at("reply").get<std::string>();
    for (const json& r : node.at("records")) event.records.push_back(StateRecordFromJson(r));
    return event;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSemantic, std::string("bad turn event: ") + e.what());
  }
}

void ApplyTurnEvent(Conversation& conversation, const TurnEvent& event) {
  for (const StateRecord& r : event.records) ApplyRecord(conversation.state, r);
  conversation.nlu_history.push_back(event.nlu);
  conversation.schedule_history.emplace_back(event.text, event.resolved_intent);
  conversation.pending_slot = event.pending_slot;
}

Pipeline::Pipeline(const Ontology& ontology, const NluBackend& nlu,
                   const IntentValidator& validator, const StateTracker& tracker,
                   TrackerOptions options)
    : ontology_(ontology),
      nlu_(nlu),
      validator_(validator),
      tracker_(tracker),
      options_(options) {}

void Pipeline::SetAnswerAgent(const Retriever* retriever, const AnswerGenerator* generator) {
  retriever_ = retriever;
  generator_ = generator;
}

std::string CompletionReplyText() { return "Thanks, I have everything I need."; }

TurnOutcome Pipeline::Step(Conversation& conversation, const std::string& text) const {
  if (text.empty()) throw Error(ErrorCode::kInvalidArgument, "empty utterance");
  const ScheduleInput schedule =
      BuildSchedule(conversation.schedule_history, text, conversation.pending_slot);
  TurnOutcome out;
  out.event.text = text;
  out.event.nlu = Predict(nlu_, ontology_, schedule);

  std::vector<NluOutput> history = conversation.nlu_history;
  history.push_back(out.event.nlu);
  out.verdict = validator_.Validate(history);

  DialogueState next = conversation.state;
  const std::size_t before = next.history.size();
  out.action = tracker_.Track(next, schedule, out.event.nlu, out.verdict);
  out.event.records.assign(next.history.begin() + static_cast<std::ptrdiff_t>(before),
                           next.history.end());
  if (next.active_intent) out.result = EmitResult(next, ontology_, options_);

  out.event.verdict = VerdictName(out.verdict.label);
  out.event.action = ActionKindName(out.action.kind);
  if (out.verdict.label == Verdict::kConfirmed && next.pending == Pending::kNone) {
    out.event.resolved_intent = next.active_intent;
  }
  if (out.action.kind == ActionKind::kAskFollowup) out.event.pending_slot = out.action.slot;

  if (out.action.kind == ActionKind::kComplete) {
    if (retriever_ && generator_) {
      out.answer = GenerateAnswer(*out.action.result, *retriever_, *generator_);
      out.event.reply = out.answer->text;
    } else {
      out.event.reply = CompletionReplyText();
    }
  } else {
    out.event.reply = out.action.question.value_or("");
  }
  ApplyTurnEvent(conversation, out.event);
  return out;
}

}  // namespace hdst
