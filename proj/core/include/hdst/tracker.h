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

#ifndef HDST_TRACKER_H_
#define HDST_TRACKER_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdst/nlu.h"
#include "hdst/ontology.h"
#include "hdst/querygen.h"
#include "hdst/validator.h"

namespace hdst {

enum class FillSource { kExtracted, kDontCareDefault, kCarriedOver };
std::string_view FillSourceName(FillSource source);

struct SlotFill {
  std::string value;
  FillSource source = FillSource::kExtracted;
  int turn_no = 1;
  bool operator==(const SlotFill&) const = default;
};

enum class RecordKind {
  kTurn,              // a user turn started
  kPendingUnclear,
  kPendingAmbiguous,
  kResume,            // a confirmed turn cleared a pending clarification
  kAdoptIntent,
  kShiftIntent,
  kFill,
  kDontCare,
  kCarryOver,
  kDropSlot,
  kAskFollowup,       // value holds the question
  kComplete,
};
std::string_view RecordKindName(RecordKind kind);
RecordKind ParseRecordKind(std::string_view name);

// One history entry. The log is the source of truth: applying the records
// in order to a fresh session rebuilds the state.
struct StateRecord {
  int turn_no = 0;
  RecordKind kind = RecordKind::kTurn;
  std::string intent;
  std::optional<std::string> slot;
  std::optional<std::string> value;
  bool operator==(const StateRecord&) const = default;
};

enum class Pending { kNone, kUnclear, kAmbiguous };
std::string_view PendingName(Pending pending);

struct DialogueState {
  std::string session_id;
  std::optional<std::string> active_intent;
  std::map<std::string, SlotFill> fills;
  std::vector<StateRecord> history;
  Pending pending = Pending::kNone;
  int turn_no = 0;
  std::uint64_t rng_seed = 0;
  bool operator==(const DialogueState&) const = default;
};

enum class DialogueStatus { kInProgress, kComplete };

struct DstResult {
  DialogueStatus status = DialogueStatus::kInProgress;
  std::string intent;
  SlotValues state;
  SqlQuery query;
  std::optional<std::string> followup;
  // Slots resolved as don't-care on the turn that produced this result.
  std::set<std::string> dont_care;
  bool operator==(const DstResult&) const = default;
};

enum class ActionKind { kAskFollowup, kAskClarifyIntent, kAskClarifyUnclear, kComplete };
std::string_view ActionKindName(ActionKind kind);

struct TrackerAction {
  ActionKind kind = ActionKind::kAskClarifyUnclear;
  std::optional<std::string> question;
  std::optional<DstResult> result;      // present iff kind == kComplete
  std::optional<std::string> slot;      // slot asked about by a follow-up
};

struct TrackerOptions {
  QueryOptions query;
};

// Fresh session with a process-unique id.
DialogueState NewSession(const Ontology& ontology, std::uint64_t seed);
DialogueState NewSession(std::string session_id, std::uint64_t seed);

// True when both NLU runs agree on an intent other than the active one.
bool DetectIntentShift(const DialogueState& state, const NluOutput& nlu);

// Advances `state` by one user turn. On error `state` is left unchanged.
TrackerAction Update(DialogueState& state, const NluOutput& nlu,
                     const ValidationVerdict& verdict, const Ontology& ontology,
                     const TrackerOptions& options = {});

DstResult EmitResult(const DialogueState& state, const Ontology& ontology,
                     const TrackerOptions& options = {});

// Seed used for the follow-up question on the state's current turn.
std::uint64_t FollowupSeed(const DialogueState& state);

// Appends `record` to the history and applies it to the state.
void ApplyRecord(DialogueState& state, StateRecord record);

DialogueState Replay(std::string session_id, std::uint64_t seed,
                     std::span<const StateRecord> records);

// Fixed clarification templates.
std::string ClarifyUnclearQuestion();
std::string ClarifyIntentQuestion(std::string_view first, std::string_view second);

// The two best-scored intents, ties in key order.
std::pair<std::string, std::string> TopTwoIntents(const IntentScores& scores);

nlohmann::ordered_json DstResultToJson(const DstResult& result);
std::string SerializeDstResult(const DstResult& result);
nlohmann::ordered_json StateRecordToJson(const StateRecord& record);
StateRecord StateRecordFromJson(const nlohmann::json& node);
nlohmann::ordered_json DialogueStateToJson(const DialogueState& state);
DialogueState DialogueStateFromJson(const nlohmann::json& node);

}  // namespace hdst

#endif  // HDST_TRACKER_H_
