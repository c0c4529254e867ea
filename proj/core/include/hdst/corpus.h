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

#ifndef HDST_CORPUS_H_
#define HDST_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hdst/ontology.h"

namespace hdst {

using SlotValues = std::map<std::string, std::string>;

enum class Speaker { kUser, kSystem };

struct Turn {
  Speaker speaker = Speaker::kUser;
  std::string text;
  // Gold annotations; user turns only.
  std::optional<std::string> gold_intent;
  SlotValues gold_slots;                  // values mentioned in this turn
  std::set<std::string> gold_dont_care;   // slots declared "any" in this turn
  SlotValues gold_state;                  // cumulative state after this turn
  bool shift = false;                     // this turn changes the intent

  bool is_user() const { return speaker == Speaker::kUser; }
  bool operator==(const Turn&) const = default;
};

struct Dialogue {
  std::string id;
  std::vector<Turn> turns;
  std::optional<std::string> domain_hint;

  std::size_t user_turn_count() const;
  bool operator==(const Dialogue&) const = default;
};

struct Corpus {
  std::vector<Dialogue> dialogues;
  std::string ontology_checksum;

  std::size_t user_turn_count() const;
  bool operator==(const Corpus&) const = default;
};

// Stable identifiers carried in Error::rule() for annotation failures.
namespace corpus_rule {
inline constexpr std::string_view kSchema = "schema";
inline constexpr std::string_view kChecksumMismatch = "checksum_mismatch";
inline constexpr std::string_view kDuplicateDialogueId = "duplicate_dialogue_id";
inline constexpr std::string_view kNoUserTurn = "no_user_turn";
inline constexpr std::string_view kTurnOrder = "turn_order";
inline constexpr std::string_view kSystemTurnAnnotated = "system_turn_annotated";
inline constexpr std::string_view kMissingAnnotation = "missing_annotation";
inline constexpr std::string_view kUnknownIntent = "unknown_intent";
inline constexpr std::string_view kSpecialGoldIntent = "special_gold_intent";
inline constexpr std::string_view kUnknownSlot = "unknown_slot";
inline constexpr std::string_view kValueNotInOntology = "value_not_in_ontology";
inline constexpr std::string_view kDontCareOverlap = "dont_care_overlap";
inline constexpr std::string_view kSlotsNotInState = "slots_not_in_state";
inline constexpr std::string_view kIntentChangeWithoutShift =
    "intent_change_without_shift";
inline constexpr std::string_view kNonMonotoneState = "non_monotone_state";
inline constexpr std::string_view kInconsistentState = "inconsistent_state";
}  // namespace corpus_rule

// Value a don't-care resolution writes for `slot`: the slot's default value,
// or "*" for free-text slots.
std::string DontCareValue(const SlotDef& slot);
inline constexpr std::string_view kAnyValue = "*";

// Parses and validates a corpus against `ontology`. Annotation errors name
// the dialogue id, turn index and violated rule (also in Error::rule()). An
// empty ontology_checksum in the document skips the checksum comparison.
Corpus LoadCorpus(std::string_view text, const Ontology& ontology);
Corpus LoadCorpusFile(const std::string& path, const Ontology& ontology);

std::string SerializeCorpus(const Corpus& corpus);

struct Fold {
  Corpus train;
  Corpus test;
};

// Splits by dialogue into k folds; test folds partition the corpus and their
// sizes differ by at most one. Deterministic under seed.
std::vector<Fold> SplitKFold(const Corpus& corpus, int k, std::uint64_t seed);

}  // namespace hdst

#endif  // HDST_CORPUS_H_
