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

#include "hdst/ontology.h"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "hdst/error.h"
#include "hdst/rng.h"
#include "hdst/text.h"

namespace hdst {
namespace {

using nlohmann::json;

[[noreturn]] void Semantic(const std::string& message) {
  throw Error(ErrorCode::kSemantic, message);
}

bool IsIdentifier(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

const json& Require(const json& object, const char* key,
                    const std::string& where) {
  auto it = object.find(key);
  if (it == object.end()) {
    Semantic(where + ": missing key \"" + key + "\"");
  }
  return *it;
}

std::string RequireString(const json& object, const char* key,
                          const std::string& where) {
  const json& value = Require(object, key, where);
  if (!value.is_string()) {
    Semantic(where + ": \"" + key + "\" must be a string");
  }
  return value.get<std::string>();
}

const json& RequireArray(const json& object, const char* key,
                         const std::string& where) {
  const json& value = Require(object, key, where);
  if (!value.is_array()) {
    Semantic(where + ": \"" + key + "\" must be an array");
  }
  return value;
}

IntentKind ParseKind(const std::string& text, const std::string& where) {
  if (text == "normal") return IntentKind::kNormal;
  if (text == "dont_care") return IntentKind::kDontCare;
  if (text == "out_of_domain") return IntentKind::kOutOfDomain;
  Semantic(where + ": unknown special kind \"" + text + "\"");
}

SlotDef ParseSlot(const json& node, const std::string& where) {
  if (!node.is_object()) Semantic(where + ": slot must be an object");
  SlotDef slot;
  slot.id = RequireString(node, "id", where);
  if (!IsIdentifier(slot.id)) {
    Semantic(where + ": slot id \"" + slot.id + "\" must match [a-z0-9_]+");
  }
  const std::string at = where + " slot \"" + slot.id + "\"";
  slot.name = node.contains("name") ? RequireString(node, "name", at) : slot.id;
  if (node.contains("mandatory")) {
    if (!node["mandatory"].is_boolean()) {
      Semantic(at + ": \"mandatory\" must be a boolean");
    }
    slot.mandatory = node["mandatory"].get<bool>();
  }
  if (node.contains("values")) {
    for (const json& v : RequireArray(node, "values", at)) {
      if (!v.is_string()) Semantic(at + ": values must be strings");
      std::string value = v.get<std::string>();
      if (std::find(slot.values.begin(), slot.values.end(), value) !=
          slot.values.end()) {
        Semantic(at + ": duplicate value \"" + value + "\"");
      }
      slot.values.push_back(std::move(value));
    }
  }
  if (node.contains("default_index")) {
    if (!node["default_index"].is_number_integer()) {
      Semantic(at + ": \"default_index\" must be an integer");
    }
    slot.default_index = node["default_index"].get<int>();
  }
  const bool index_ok =
      slot.values.empty()
          ? slot.default_index == 0
          : slot.default_index >= 0 &&
                slot.default_index < static_cast<int>(slot.values.size());
  if (!index_ok) Semantic(at + ": default_index out of range");
  return slot;
}

json SlotToJson(const SlotDef& slot) {
  return json{{"id", slot.id},
              {"name", slot.name},
              {"mandatory", slot.mandatory},
              {"values", slot.values},
              {"default_index", slot.default_index}};
}

}  // namespace

std::string_view IntentKindName(IntentKind kind) {
  switch (kind) {
    case IntentKind::kNormal: return "normal";
    case IntentKind::kDontCare: return "dont_care";
    case IntentKind::kOutOfDomain: return "out_of_domain";
  }
  return "normal";
}

const SlotDef* IntentSchema::FindSlot(std::string_view slot_id) const {
  for (const SlotDef& slot : slots) {
    if (slot.id == slot_id) return &slot;
  }
  return nullptr;
}

const IntentSchema* Ontology::FindIntent(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &intents_[it->second];
}

const IntentSchema& Ontology::Intent(std::string_view id) const {
  const IntentSchema* schema = FindIntent(id);
  if (!schema) {
    throw Error(ErrorCode::kNotFound, "unknown intent: " + std::string(id));
  }
  return *schema;
}

const IntentSchema& Ontology::DontCareIntent() const {
  for (const IntentSchema& intent : intents_) {
    if (intent.kind == IntentKind::kDontCare) return intent;
  }
  throw Error(ErrorCode::kInvariant, "ontology has no dont_care intent");
}

const std::vector<std::string>* Ontology::Questions(
    std::string_view intent_id, std::string_view slot_id) const {
  auto it = questions_.find({std::string(intent_id), std::string(slot_id)});
  return it == questions_.end() ? nullptr : &it->second;
}

std::string Ontology::Checksum() const {
  return Fnv1a64Hex(SerializeOntology(*this));
}

Ontology ParseOntology(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, "ontology syntax error at byte " +
                                        std::to_string(e.byte) + ": " +
                                        e.what());
  }
  if (!doc.is_object()) Semantic("ontology: top level must be an object");

  Ontology ontology;
  for (const json& d : RequireArray(doc, "domains", "ontology")) {
    if (!d.is_string()) Semantic("ontology: domains must be strings");
    std::string domain = d.get<std::string>();
    if (std::find(ontology.domains_.begin(), ontology.domains_.end(),
                  domain) != ontology.domains_.end()) {
      Semantic("ontology: duplicate domain \"" + domain + "\"");
    }
    ontology.domains_.push_back(std::move(domain));
  }

  int dont_care_count = 0;
  for (const json& node : RequireArray(doc, "intents", "ontology")) {
    if (!node.is_object()) Semantic("ontology: intent must be an object");
    IntentSchema intent;
    intent.id = RequireString(node, "id", "intent");
    const std::string where = "intent \"" + intent.id + "\"";
    if (!IsIdentifier(intent.id)) {
      Semantic(where + ": id must match [a-z0-9_]+");
    }
    if (ontology.index_.count(intent.id)) {
      Semantic(where + ": duplicate intent id");
    }
    intent.domain = RequireString(node, "domain", where);
    if (std::find(ontology.domains_.begin(), ontology.domains_.end(),
                  intent.domain) == ontology.domains_.end()) {
      Semantic(where + ": unknown domain \"" + intent.domain + "\"");
    }
    intent.kind = node.contains("special")
                      ? ParseKind(RequireString(node, "special", where), where)
                      : IntentKind::kNormal;
    if (node.contains("slots")) {
      for (const json& s : RequireArray(node, "slots", where)) {
        SlotDef slot = ParseSlot(s, where);
        if (intent.HasSlot(slot.id)) {
          Semantic(where + ": duplicate slot id \"" + slot.id + "\"");
        }
        intent.slots.push_back(std::move(slot));
      }
    }
    if (intent.kind == IntentKind::kNormal && intent.slots.size() > 4) {
      Semantic(where + ": slot count exceeds 4");
    }
    if (intent.kind != IntentKind::kNormal && !intent.slots.empty()) {
      Semantic(where + ": special intent must not declare slots");
    }
    if (intent.kind == IntentKind::kDontCare) ++dont_care_count;
    ontology.index_.emplace(intent.id, ontology.intents_.size());
    ontology.intents_.push_back(std::move(intent));
  }
  if (dont_care_count == 0) Semantic("ontology: missing dont_care intent");
  if (dont_care_count > 1) Semantic("ontology: more than one dont_care intent");

  if (doc.contains("questions")) {
    for (const json& node : RequireArray(doc, "questions", "ontology")) {
      if (!node.is_object()) Semantic("ontology: question must be an object");
      const std::string intent_id = RequireString(node, "intent", "question");
      const std::string slot_id = RequireString(node, "slot", "question");
      const std::string where =
          "question (" + intent_id + ", " + slot_id + ")";
      const IntentSchema* intent = ontology.FindIntent(intent_id);
      if (!intent) Semantic(where + ": unknown intent");
      const SlotDef* slot = intent->FindSlot(slot_id);
      if (!slot) Semantic(where + ": unknown slot");
      if (!slot->mandatory) {
        Semantic(where + ": question bound to non-mandatory slot");
      }
      std::vector<std::string> texts;
      for (const json& t : RequireArray(node, "texts", where)) {
        if (!t.is_string()) Semantic(where + ": texts must be strings");
        texts.push_back(t.get<std::string>());
      }
      if (texts.empty()) Semantic(where + ": empty question list");
      if (!ontology.questions_.emplace(Ontology::QuestionKey{intent_id, slot_id},
                                       std::move(texts))
               .second) {
        Semantic(where + ": duplicate question key");
      }
    }
  }

  for (const IntentSchema& intent : ontology.intents_) {
    for (const SlotDef& slot : intent.slots) {
      if (slot.mandatory && !ontology.Questions(intent.id, slot.id)) {
        Semantic("intent \"" + intent.id + "\" slot \"" + slot.id +
                 "\": mandatory slot without questions");
      }
    }
  }
  return ontology;
}

Ontology LoadOntologyFile(const std::string& path) {
  return ParseOntology(ReadFile(path));
}

std::string SerializeOntology(const Ontology& ontology) {
  json intents = json::array();
  for (const IntentSchema& intent : ontology.intents()) {
    json slots = json::array();
    for (const SlotDef& slot : intent.slots) slots.push_back(SlotToJson(slot));
    intents.push_back(json{{"id", intent.id},
                           {"domain", intent.domain},
                           {"special", IntentKindName(intent.kind)},
                           {"slots", std::move(slots)}});
  }
  json questions = json::array();
  for (const auto& [key, texts] : ontology.questions()) {
    questions.push_back(
        json{{"intent", key.first}, {"slot", key.second}, {"texts", texts}});
  }
  json doc{{"domains", ontology.domains()},
           {"intents", std::move(intents)},
           {"questions", std::move(questions)}};
  return doc.dump(2, ' ', false) + "\n";
}

std::vector<std::string> MissingMandatory(const IntentSchema& schema,
                                          const std::set<std::string>& filled) {
  for (const std::string& id : filled) {
    if (!schema.HasSlot(id)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "slot \"" + id + "\" not in intent \"" + schema.id + "\"");
    }
  }
  std::vector<std::string> missing;
  for (const SlotDef& slot : schema.slots) {
    if (slot.mandatory && !filled.count(slot.id)) missing.push_back(slot.id);
  }
  return missing;
}

std::size_t FollowupIndex(std::uint64_t seed, std::size_t list_size) {
  return static_cast<std::size_t>(Mix64(seed) % list_size);
}

const std::string& PickFollowupQuestion(const Ontology& ontology,
                                        std::string_view intent_id,
                                        std::string_view slot_id,
                                        std::uint64_t seed) {
  const std::vector<std::string>* texts =
      ontology.Questions(intent_id, slot_id);
  if (!texts) {
    throw Error(ErrorCode::kNotFound, "no questions for (" +
                                          std::string(intent_id) + ", " +
                                          std::string(slot_id) + ")");
  }
  return (*texts)[FollowupIndex(seed, texts->size())];
}

}  // namespace hdst
