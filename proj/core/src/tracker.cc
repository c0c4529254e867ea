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

#include "hdst/tracker.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <random>
#include <utility>

#include "hdst/error.h"
#include "hdst/rng.h"

namespace hdst {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::pair<RecordKind, std::string_view> kRecordNames[] = {
    {RecordKind::kTurn, "turn"},
    {RecordKind::kPendingUnclear, "pending_unclear"},
    {RecordKind::kPendingAmbiguous, "pending_ambiguous"},
    {RecordKind::kResume, "resume"},
    {RecordKind::kAdoptIntent, "adopt_intent"},
    {RecordKind::kShiftIntent, "shift_intent"},
    {RecordKind::kFill, "fill"},
    {RecordKind::kDontCare, "dont_care"},
    {RecordKind::kCarryOver, "carry_over"},
    {RecordKind::kDropSlot, "drop_slot"},
    {RecordKind::kAskFollowup, "ask_followup"},
    {RecordKind::kComplete, "complete"},
};

std::string Humanize(std::string_view id) {
  std::string out(id);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

StateRecord Record(const DialogueState& state, RecordKind kind,
                   std::string intent, std::optional<std::string> slot = {},
                   std::optional<std::string> value = {}) {
  return StateRecord{state.turn_no, kind, std::move(intent), std::move(slot),
                     std::move(value)};
}

SlotValues FillValues(const DialogueState& state) {
  SlotValues values;
  for (const auto& [slot, fill] : state.fills) values[slot] = fill.value;
  return values;
}

void RequireFill(const StateRecord& r) {
  if (!r.slot || !r.value) {
    throw Error(ErrorCode::kInvariant,
                std::string(RecordKindName(r.kind)) + " record needs slot and value");
  }
}

// Rules 5-8 once the active intent is settled.
TrackerAction FillAndDecide(DialogueState& state, const NluOutput& nlu,
                            const IntentSchema& schema, const Ontology& ontology,
                            const TrackerOptions& options) {
  for (const auto& [slot, value] : nlu.slots) {
    if (!schema.HasSlot(slot)) continue;
    ApplyRecord(state, Record(state, RecordKind::kFill, schema.id, slot, value));
  }
  for (const std::string& slot : nlu.dont_care_slots) {
    const SlotDef* def = schema.FindSlot(slot);
    if (!def) continue;
    ApplyRecord(state, Record(state, RecordKind::kDontCare, schema.id, slot,
                              DontCareValue(*def)));
  }
  const DstResult result = EmitResult(state, ontology, options);
  TrackerAction action;
  if (result.status == DialogueStatus::kComplete) {
    ApplyRecord(state, Record(state, RecordKind::kComplete, schema.id));
    action.kind = ActionKind::kComplete;
    action.result = result;
    return action;
  }
  std::set<std::string> filled;
  for (const auto& [slot, fill] : state.fills) filled.insert(slot);
  const std::string first = MissingMandatory(schema, filled).front();
  action.kind = ActionKind::kAskFollowup;
  action.question = result.followup;
  action.slot = first;
  ApplyRecord(state, Record(state, RecordKind::kAskFollowup, schema.id, first,
                            *result.followup));
  return action;
}

TrackerAction PauseUnclear(DialogueState& state) {
  ApplyRecord(state, Record(state, RecordKind::kPendingUnclear,
                            state.active_intent.value_or("")));
  return TrackerAction{ActionKind::kAskClarifyUnclear, ClarifyUnclearQuestion(),
                       std::nullopt, std::nullopt};
}

}  // namespace

std::string_view FillSourceName(FillSource source) {
  switch (source) {
    case FillSource::kExtracted: return "extracted";
    case FillSource::kDontCareDefault: return "dont_care_default";
    case FillSource::kCarriedOver: return "carried_over";
  }
  return "extracted";
}

std::string_view RecordKindName(RecordKind kind) {
  for (const auto& [k, name] : kRecordNames) {
    if (k == kind) return name;
  }
  return "turn";
}

RecordKind ParseRecordKind(std::string_view name) {
  for (const auto& [k, n] : kRecordNames) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::kSemantic, "unknown record kind: " + std::string(name));
}

std::string_view PendingName(Pending pending) {
  switch (pending) {
    case Pending::kNone: return "none";
    case Pending::kUnclear: return "awaiting_clarification_unclear";
    case Pending::kAmbiguous: return "awaiting_clarification_ambiguous";
  }
  return "none";
}

std::string_view ActionKindName(ActionKind kind) {
  switch (kind) {
    case ActionKind::kAskFollowup: return "ask_followup";
    case ActionKind::kAskClarifyIntent: return "ask_clarify_intent";
    case ActionKind::kAskClarifyUnclear: return "ask_clarify_unclear";
    case ActionKind::kComplete: return "complete";
  }
  return "complete";
}

DialogueState NewSession(std::string session_id, std::uint64_t seed) {
  DialogueState state;
  state.session_id = std::move(session_id);
  state.rng_seed = seed;
  return state;
}

DialogueState NewSession(const Ontology&, std::uint64_t seed) {
  // Mix64 is a bijection, so distinct counter values give distinct ids.
  static const std::uint64_t nonce = [] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }();
  static std::atomic<std::uint64_t> counter{0};
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Mix64(nonce + counter++)));
  return NewSession(std::string("s") + buf, seed);
}

bool DetectIntentShift(const DialogueState& state, const NluOutput& nlu) {
  if (!state.active_intent) return false;
  return nlu.turn_local_intent != *state.active_intent &&
         nlu.context_intent != *state.active_intent &&
         nlu.turn_local_intent == nlu.context_intent;
}

std::uint64_t FollowupSeed(const DialogueState& state) {
  return MixSeeds(state.rng_seed, static_cast<std::uint64_t>(state.turn_no));
}

void ApplyRecord(DialogueState& state, StateRecord r) {
  switch (r.kind) {
    case RecordKind::kTurn:
      state.turn_no = r.turn_no;
      break;
    case RecordKind::kPendingUnclear:
      state.pending = Pending::kUnclear;
      break;
    case RecordKind::kPendingAmbiguous:
      state.pending = Pending::kAmbiguous;
      break;
    case RecordKind::kResume:
      state.pending = Pending::kNone;
      break;
    case RecordKind::kAdoptIntent:
      state.active_intent = r.intent;
      state.fills.clear();
      break;
    case RecordKind::kShiftIntent:
      state.active_intent = r.intent;
      break;
    case RecordKind::kFill:
      RequireFill(r);
      state.fills[*r.slot] = {*r.value, FillSource::kExtracted, r.turn_no};
      break;
    case RecordKind::kDontCare:
      RequireFill(r);
      state.fills[*r.slot] = {*r.value, FillSource::kDontCareDefault, r.turn_no};
      break;
    case RecordKind::kCarryOver:
      RequireFill(r);
      state.fills[*r.slot] = {*r.value, FillSource::kCarriedOver, r.turn_no};
      break;
    case RecordKind::kDropSlot:
      if (!r.slot) throw Error(ErrorCode::kInvariant, "drop_slot record needs a slot");
      state.fills.erase(*r.slot);
      break;
    case RecordKind::kAskFollowup:
    case RecordKind::kComplete:
      break;
  }
  state.history.push_back(std::move(r));
}

DialogueState Replay(std::string session_id, std::uint64_t seed,
                     std::span<const StateRecord> records) {
  DialogueState state = NewSession(std::move(session_id), seed);
  for (const StateRecord& r : records) ApplyRecord(state, r);
  return state;
}

TrackerAction Update(DialogueState& state, const NluOutput& nlu,
                     const ValidationVerdict& verdict, const Ontology& ontology,
                     const TrackerOptions& options) {
  DialogueState next = state;
  ApplyRecord(next, StateRecord{next.turn_no + 1, RecordKind::kTurn,
                                next.active_intent.value_or(""), {}, {}});
  TrackerAction action;

  if (verdict.label == Verdict::kUnclear) {
    action = PauseUnclear(next);
  } else if (verdict.label == Verdict::kAmbiguous) {
    const auto [first, second] = TopTwoIntents(nlu.scores);
    ApplyRecord(next, Record(next, RecordKind::kPendingAmbiguous,
                             next.active_intent.value_or("")));
    action = TrackerAction{ActionKind::kAskClarifyIntent,
                           ClarifyIntentQuestion(first, second), std::nullopt,
                           std::nullopt};
  } else {
    if (verdict.chosen_intent.empty() || !nlu.scores.count(verdict.chosen_intent)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "confirmed verdict does not name an intent of this NLU output");
    }
    const IntentSchema* chosen = ontology.FindIntent(verdict.chosen_intent);
    if (!chosen) {
      throw Error(ErrorCode::kNotFound, "unknown intent: " + verdict.chosen_intent);
    }
    if (next.pending != Pending::kNone) {
      ApplyRecord(next, Record(next, RecordKind::kResume,
                               next.active_intent.value_or("")));
    }
    if (chosen->kind == IntentKind::kOutOfDomain ||
        (chosen->kind == IntentKind::kDontCare && !next.active_intent)) {
      action = PauseUnclear(next);
    } else {
      if (chosen->kind == IntentKind::kNormal) {
        if (!next.active_intent) {
          ApplyRecord(next, Record(next, RecordKind::kAdoptIntent, chosen->id));
        } else if (const IntentSchema* shifted = ontology.FindIntent(nlu.context_intent);
                   shifted && shifted->kind == IntentKind::kNormal &&
                   DetectIntentShift(next, nlu)) {
          // The new intent is the one both runs agree on.
          const IntentSchema& target = *shifted;
          const std::map<std::string, SlotFill> old = next.fills;
          ApplyRecord(next, Record(next, RecordKind::kShiftIntent, target.id));
          for (const auto& [slot, fill] : old) {
            if (target.HasSlot(slot)) {
              ApplyRecord(next, Record(next, RecordKind::kCarryOver, target.id,
                                       slot, fill.value));
            } else {
              ApplyRecord(next, Record(next, RecordKind::kDropSlot, target.id, slot));
            }
          }
        }
      }
      const IntentSchema& schema = ontology.Intent(*next.active_intent);
      action = FillAndDecide(next, nlu, schema, ontology, options);
    }
  }
  state = std::move(next);
  return action;
}

DstResult EmitResult(const DialogueState& state, const Ontology& ontology,
                     const TrackerOptions& options) {
  if (!state.active_intent) {
    throw Error(ErrorCode::kPrecondition, "no active intent");
  }
  const IntentSchema& schema = ontology.Intent(*state.active_intent);
  DstResult result;
  result.intent = schema.id;
  result.state = FillValues(state);
  result.query = BuildQuery(schema, result.state, options.query);
  std::set<std::string> filled;
  for (const auto& [slot, fill] : state.fills) {
    filled.insert(slot);
    if (fill.source == FillSource::kDontCareDefault && fill.turn_no == state.turn_no) {
      result.dont_care.insert(slot);
    }
  }
  const std::vector<std::string> missing = MissingMandatory(schema, filled);
  if (missing.empty()) {
    result.status = DialogueStatus::kComplete;
  } else {
    result.status = DialogueStatus::kInProgress;
    result.followup =
        PickFollowupQuestion(ontology, schema.id, missing.front(), FollowupSeed(state));
  }
  return result;
}

std::string ClarifyUnclearQuestion() {
  return "Sorry, I did not catch what you need. Could you say it another way?";
}

std::string ClarifyIntentQuestion(std::string_view first, std::string_view second) {
  return "Do you want to " + Humanize(first) + " or to " + Humanize(second) + "?";
}

std::pair<std::string, std::string> TopTwoIntents(const IntentScores& scores) {
  std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::pair<std::string, std::string> top;
  if (!ranked.empty()) top.first = ranked[0].first;
  if (ranked.size() > 1) top.second = ranked[1].first;
  return top;
}

ordered_json DstResultToJson(const DstResult& result) {
  ordered_json j;
  j["dialogue_status"] =
      result.status == DialogueStatus::kComplete ? "complete" : "in_progress";
  j["intent"] = result.intent;
  ordered_json state = ordered_json::object();
  for (const auto& [slot, value] : result.state) state[slot] = value;
  j["state"] = std::move(state);
  j["sql"] = {{"text", result.query.text}, {"params", result.query.params}};
  j["followup"] = result.followup ? ordered_json(*result.followup) : ordered_json(nullptr);
  j["dont_care"] = result.dont_care;
  return j;
}

std::string SerializeDstResult(const DstResult& result) {
  return DstResultToJson(result).dump();
}

ordered_json StateRecordToJson(const StateRecord& r) {
  ordered_json j;
  j["turn_no"] = r.turn_no;
  j["kind"] = RecordKindName(r.kind);
  j["intent"] = r.intent;
  j["slot"] = r.slot ? ordered_json(*r.slot) : ordered_json(nullptr);
  j["value"] = r.value ? ordered_json(*r.value) : ordered_json(nullptr);
  return j;
}

StateRecord StateRecordFromJson(const json& node) {
  try {
    StateRecord r;
    r.turn_no = node.at("turn_no").get<int>();
    r.kind = ParseRecordKind(node.at("kind").get<std::string>());
    r.intent = node.at("intent").get<std::string>();
    if (node.contains("slot") && !node.at("slot").is_null()) {
      r.slot = node.at("slot").get<std::string>();
    }
    if (node.contains("value") && !node.at("value").is_null()) {
      r.value = node.at("value").get<std::string>();
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSemantic, std::string("bad state record: ") + e.what());
  }
}

ordered_json DialogueStateToJson(const DialogueState& state) {
  ordered_json j;
  j["session_id"] = state.session_id;
  j["active_intent"] =
      state.active_intent ? ordered_json(*state.active_intent) : ordered_json(nullptr);
  j["pending"] = PendingName(state.pending);
  j["turn_no"] = state.turn_no;
  j["rng_seed"] = state.rng_seed;
  ordered_json fills = ordered_json::object();
  for (const auto& [slot, fill] : state.fills) {
    fills[slot] = {{"value", fill.value},
                   {"source", FillSourceName(fill.source)},
                   {"turn_no", fill.turn_no}};
  }
  j["fills"] = std::move(fills);
  ordered_json history = ordered_json::array();
  for (const StateRecord& r : state.history) history.push_back(StateRecordToJson(r));
  j["history"] = std::move(history);
  return j;
}

DialogueState DialogueStateFromJson(const json& node) {
  try {
    DialogueState state;
    state.session_id = node.at("session_id").get<std::string>();
    if (!node.at("active_intent").is_null()) {
      state.active_intent = node.at("active_intent").get<std::string>();
    }
    const std::string pending = node.at("pending").get<std::string>();
    if (pending == PendingName(Pending::kUnclear)) {
      state.pending = Pending::kUnclear;
    } else if (pending == PendingName(Pending::kAmbiguous)) {
      state.pending = Pending::kAmbiguous;
    } else if (pending != PendingName(Pending::kNone)) {
      throw Error(ErrorCode::kSemantic, "unknown pending state: " + pending);
    }
    state.turn_no = node.at("turn_no").get<int>();
    state.rng_seed = node.at("rng_seed").get<std::uint64_t>();
    for (const auto& [slot, f] : node.at("fills").items()) {
      SlotFill fill;
      fill.value = f.at("value").get<std::string>();
      const std::string source = f.at("source").get<std::string>();
      if (source == "extracted") {
        fill.source = FillSource::kExtracted;
      } else if (source == "dont_care_default") {
        fill.source = FillSource::kDontCareDefault;
      } else if (source == "carried_over") {
        fill.source = FillSource::kCarriedOver;
      } else {
        throw Error(ErrorCode::kSemantic, "unknown fill source: " + source);
      }
      fill.turn_no = f.at("turn_no").get<int>();
      state.fills[slot] = std::move(fill);
    }
    for (const auto& r : node.at("history")) {
      state.history.push_back(StateRecordFromJson(r));
    }
    return state;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSemantic, std::string("bad dialogue state: ") + e.what());
  }
}

}  // namespace hdst
