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

#include "hdst/corpus.h"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "hdst/error.h"
#include "hdst/rng.h"
#include "hdst/text.h"

namespace hdst {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class AnnotationChecker {
 public:
  AnnotationChecker(const Ontology& ontology, const std::string& dialogue_id)
      : ontology_(ontology), dialogue_id_(dialogue_id) {}

  [[noreturn]] void Fail(std::string_view rule, std::size_t turn,
                         const std::string& what) const {
    throw Error(ErrorCode::kAnnotation,
                "dialogue \"" + dialogue_id_ + "\" turn " +
                    std::to_string(turn) + ": " + what + " [" +
                    std::string(rule) + "]",
                std::string(rule));
  }

  void Check(const Dialogue& dialogue) {
    if (dialogue.user_turn_count() == 0) {
      Fail(corpus_rule::kNoUserTurn, 0, "dialogue has no user turn");
    }
    for (std::size_t i = 0; i < dialogue.turns.size(); ++i) {
      const Turn& turn = dialogue.turns[i];
      const Speaker expected = i % 2 == 0 ? Speaker::kUser : Speaker::kSystem;
      if (turn.speaker != expected) {
        Fail(corpus_rule::kTurnOrder, i,
             "turns must alternate starting with the user");
      }
      if (turn.is_user()) {
        CheckUserTurn(turn, i);
      } else if (turn.gold_intent || !turn.gold_slots.empty() ||
                 !turn.gold_dont_care.empty() || !turn.gold_state.empty() ||
                 turn.shift) {
        Fail(corpus_rule::kSystemTurnAnnotated, i,
             "system turn carries gold annotations");
      }
    }
  }

 private:
  void CheckUserTurn(const Turn& turn, std::size_t i) {
    if (!turn.gold_intent) {
      Fail(corpus_rule::kMissingAnnotation, i, "user turn has no intent");
    }
    const IntentSchema* schema = ontology_.FindIntent(*turn.gold_intent);
    if (!schema) {
      Fail(corpus_rule::kUnknownIntent, i,
           "unknown intent \"" + *turn.gold_intent + "\"");
    }
    if (schema->kind != IntentKind::kNormal) {
      Fail(corpus_rule::kSpecialGoldIntent, i,
           "gold intent must be a normal intent, got \"" + schema->id + "\"");
    }
    auto check_slot = [&](const std::string& slot_id) -> const SlotDef& {
      const SlotDef* slot = schema->FindSlot(slot_id);
      if (!slot) {
        Fail(corpus_rule::kUnknownSlot, i,
             "slot \"" + slot_id + "\" not in intent \"" + schema->id + "\"");
      }
      return *slot;
    };
    auto check_value = [&](const SlotDef& slot, const std::string& value) {
      if (!slot.free_text() && value != kAnyValue &&
          std::find(slot.values.begin(), slot.values.end(), value) ==
              slot.values.end()) {
        Fail(corpus_rule::kValueNotInOntology, i,
             "value \"" + value + "\" not listed for slot \"" + slot.id +
                 "\"");
      }
    };
    for (const auto& [slot_id, value] : turn.gold_slots) {
      check_value(check_slot(slot_id), value);
    }
    for (const std::string& slot_id : turn.gold_dont_care) check_slot(slot_id);
    for (const auto& [slot_id, value] : turn.gold_state) {
      check_value(check_slot(slot_id), value);
    }
    for (const std::string& slot_id : turn.gold_dont_care) {
      if (turn.gold_slots.count(slot_id)) {
        Fail(corpus_rule::kDontCareOverlap, i,
             "slot \"" + slot_id + "\" is both filled and don't-care");
      }
    }
    for (const auto& [slot_id, value] : turn.gold_slots) {
      auto it = turn.gold_state.find(slot_id);
      if (it == turn.gold_state.end() || it->second != value) {
        Fail(corpus_rule::kSlotsNotInState, i,
             "turn slot \"" + slot_id + "\" missing from state");
      }
    }

    SlotValues expected;
    if (turn.shift || !previous_intent_) {
      for (const auto& [slot_id, value] : previous_state_) {
        if (schema->HasSlot(slot_id)) expected.emplace(slot_id, value);
      }
    } else {
      if (*previous_intent_ != schema->id) {
        Fail(corpus_rule::kIntentChangeWithoutShift, i,
             "intent changes from \"" + *previous_intent_ + "\" to \"" +
                 schema->id + "\" without shift annotation");
      }
      for (const auto& [slot_id, value] : previous_state_) {
        if (!turn.gold_state.count(slot_id)) {
          Fail(corpus_rule::kNonMonotoneState, i,
               "non-monotone state without intent shift (slot \"" + slot_id +
                   "\" dropped)");
        }
      }
      expected = previous_state_;
    }
    for (const auto& [slot_id, value] : turn.gold_slots) {
      expected[slot_id] = value;
    }
    for (const std::string& slot_id : turn.gold_dont_care) {
      expected[slot_id] = DontCareValue(*schema->FindSlot(slot_id));
    }
    if (expected != turn.gold_state) {
      Fail(corpus_rule::kInconsistentState, i,
           "state is not the previous state overlaid with this turn's "
           "slots and don't-care resolutions");
    }
    previous_state_ = turn.gold_state;
    previous_intent_ = schema->id;
  }

  const Ontology& ontology_;
  const std::string& dialogue_id_;
  SlotValues previous_state_;
  std::optional<std::string> previous_intent_;
};

[[noreturn]] void SchemaError(const std::string& what) {
  throw Error(ErrorCode::kAnnotation, "corpus: " + what,
              std::string(corpus_rule::kSchema));
}

SlotValues ParseSlotValues(const json& node, const std::string& where) {
  if (!node.is_object()) SchemaError(where + " must be an object");
  SlotValues out;
  for (const auto& [key, value] : node.items()) {
    if (!value.is_string()) SchemaError(where + " values must be strings");
    out.emplace(key, value.get<std::string>());
  }
  return out;
}

Turn ParseTurn(const json& node, const std::string& where) {
  if (!node.is_object()) SchemaError(where + " must be an object");
  Turn turn;
  if (!node.contains("speaker") || !node["speaker"].is_string()) {
    SchemaError(where + " needs a speaker");
  }
  const std::string speaker = node["speaker"].get<std::string>();
  if (speaker == "user") {
    turn.speaker = Speaker::kUser;
  } else if (speaker == "system") {
    turn.speaker = Speaker::kSystem;
  } else {
    SchemaError(where + " has unknown speaker \"" + speaker + "\"");
  }
  if (!node.contains("text") || !node["text"].is_string()) {
    SchemaError(where + " needs a text string");
  }
  turn.text = node["text"].get<std::string>();
  if (node.contains("intent") && !node["intent"].is_null()) {
    if (!node["intent"].is_string()) SchemaError(where + " intent not a string");
    turn.gold_intent = node["intent"].get<std::string>();
  }
  if (node.contains("slots")) {
    turn.gold_slots = ParseSlotValues(node["slots"], where + " slots");
  }
  if (node.contains("dont_care")) {
    if (!node["dont_care"].is_array()) SchemaError(where + " dont_care");
    for (const json& s : node["dont_care"]) {
      if (!s.is_string()) SchemaError(where + " dont_care entries");
      turn.gold_dont_care.insert(s.get<std::string>());
    }
  }
  if (node.contains("state")) {
    turn.gold_state = ParseSlotValues(node["state"], where + " state");
  }
  if (node.contains("shift")) {
    if (!node["shift"].is_boolean()) SchemaError(where + " shift not boolean");
    turn.shift = node["shift"].get<bool>();
  }
  return turn;
}

}  // namespace

std::size_t Dialogue::user_turn_count() const {
  return static_cast<std::size_t>(
      std::count_if(turns.begin(), turns.end(),
                    [](const Turn& t) { return t.is_user(); }));
}

std::size_t Corpus::user_turn_count() const {
  std::size_t n = 0;
  for (const Dialogue& d : dialogues) n += d.user_turn_count();
  return n;
}

std::string DontCareValue(const SlotDef& slot) {
  if (slot.free_text()) return std::string(kAnyValue);
  return slot.values[static_cast<std::size_t>(slot.default_index)];
}

Corpus LoadCorpus(std::string_view text, const Ontology& ontology) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax,
                "corpus syntax error at byte " + std::to_string(e.byte) +
                    ": " + e.what(),
                "syntax");
  }
  if (!doc.is_object()) SchemaError("top level must be an object");
  Corpus corpus;
  if (doc.contains("ontology_checksum")) {
    if (!doc["ontology_checksum"].is_string()) {
      SchemaError("ontology_checksum must be a string");
    }
    corpus.ontology_checksum = doc["ontology_checksum"].get<std::string>();
  }
  if (!corpus.ontology_checksum.empty() &&
      corpus.ontology_checksum != ontology.Checksum()) {
    throw Error(ErrorCode::kAnnotation,
                "corpus was annotated against a different ontology "
                "(checksum " + corpus.ontology_checksum + ", expected " +
                    ontology.Checksum() + ") [checksum_mismatch]",
                std::string(corpus_rule::kChecksumMismatch));
  }
  if (!doc.contains("dialogues") || !doc["dialogues"].is_array()) {
    SchemaError("missing dialogues array");
  }
  std::set<std::string> seen;
  for (const json& node : doc["dialogues"]) {
    if (!node.is_object() || !node.contains("id") || !node["id"].is_string()) {
      SchemaError("dialogue needs a string id");
    }
    Dialogue dialogue;
    dialogue.id = node["id"].get<std::string>();
    if (!seen.insert(dialogue.id).second) {
      throw Error(ErrorCode::kAnnotation,
                  "dialogue \"" + dialogue.id + "\": duplicate dialogue id " +
                      "[duplicate_dialogue_id]",
                  std::string(corpus_rule::kDuplicateDialogueId));
    }
    if (node.contains("domain") && node["domain"].is_string()) {
      dialogue.domain_hint = node["domain"].get<std::string>();
    }
    if (!node.contains("turns") || !node["turns"].is_array()) {
      SchemaError("dialogue \"" + dialogue.id + "\" needs a turns array");
    }
    for (const json& t : node["turns"]) {
      dialogue.turns.push_back(ParseTurn(
          t, "dialogue \"" + dialogue.id + "\" turn " +
                 std::to_string(dialogue.turns.size())));
    }
    AnnotationChecker(ontology, dialogue.id).Check(dialogue);
    corpus.dialogues.push_back(std::move(dialogue));
  }
  return corpus;
}

Corpus LoadCorpusFile(const std::string& path, const Ontology& ontology) {
  return LoadCorpus(ReadFile(path), ontology);
}

std::string SerializeCorpus(const Corpus& corpus) {
  ordered_json dialogues = ordered_json::array();
  for (const Dialogue& dialogue : corpus.dialogues) {
    ordered_json turns = ordered_json::array();
    for (const Turn& turn : dialogue.turns) {
      ordered_json t;
      t["speaker"] = turn.is_user() ? "user" : "system";
      t["text"] = turn.text;
      if (turn.is_user()) {
        if (turn.gold_intent) t["intent"] = *turn.gold_intent;
        t["slots"] = turn.gold_slots;
        t["dont_care"] = turn.gold_dont_care;
        t["state"] = turn.gold_state;
        if (turn.shift) t["shift"] = true;
      }
      turns.push_back(std::move(t));
    }
    ordered_json d;
    d["id"] = dialogue.id;
    if (dialogue.domain_hint) d["domain"] = *dialogue.domain_hint;
    d["turns"] = std::move(turns);
    dialogues.push_back(std::move(d));
  }
  ordered_json doc;
  doc["ontology_checksum"] = corpus.ontology_checksum;
  doc["dialogues"] = std::move(dialogues);
  return doc.dump(1, ' ', false) + "\n";
}

std::vector<Fold> SplitKFold(const Corpus& corpus, int k, std::uint64_t seed) {
  const std::size_t n = corpus.dialogues.size();
  if (k < 2 || static_cast<std::size_t>(k) > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "k must be in [2, " + std::to_string(n) + "], got " +
                    std::to_string(k));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.Below(i)]);
  }
  std::vector<int> fold_of(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    fold_of[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (Fold& fold : folds) {
    fold.train.ontology_checksum = corpus.ontology_checksum;
    fold.test.ontology_checksum = corpus.ontology_checksum;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < k; ++f) {
      Corpus& target = fold_of[i] == f ? folds[f].test : folds[f].train;
      target.dialogues.push_back(corpus.dialogues[i]);
    }
  }
  return folds;
}

}  // namespace hdst
