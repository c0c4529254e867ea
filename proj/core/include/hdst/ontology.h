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

#ifndef HDST_ONTOLOGY_H_
#define HDST_ONTOLOGY_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hdst {

struct SlotDef {
  std::string id;
  std::string name;  // display name, may be right-to-left text
  bool mandatory = false;
  // Canonical values; empty means a free-text slot.
  std::vector<std::string> values;
  int default_index = 0;

  bool free_text() const { return values.empty(); }
  bool operator==(const SlotDef&) const = default;
};

enum class IntentKind { kNormal, kDontCare, kOutOfDomain };

std::string_view IntentKindName(IntentKind kind);

struct IntentSchema {
  std::string id;
  std::string domain;
  std::vector<SlotDef> slots;  // declaration order is significant
  IntentKind kind = IntentKind::kNormal;

  const SlotDef* FindSlot(std::string_view slot_id) const;
  bool HasSlot(std::string_view slot_id) const { return FindSlot(slot_id); }
  bool operator==(const IntentSchema&) const = default;
};

// Immutable after parsing. Intents keep document order; lookup by id is
// through an index.
class Ontology {
 public:
  using QuestionKey = std::pair<std::string, std::string>;  // (intent, slot)

  Ontology() = default;

  const std::vector<std::string>& domains() const { return domains_; }
  const std::vector<IntentSchema>& intents() const { return intents_; }
  const std::map<QuestionKey, std::vector<std::string>>& questions() const {
    return questions_;
  }

  // Null when the id is unknown.
  const IntentSchema* FindIntent(std::string_view id) const;
  // Throws kNotFound when the id is unknown.
  const IntentSchema& Intent(std::string_view id) const;
  const IntentSchema& DontCareIntent() const;
  const std::vector<std::string>* Questions(std::string_view intent_id,
                                            std::string_view slot_id) const;

  // FNV-1a over the canonical serialization; corpora reference it.
  std::string Checksum() const;

  bool operator==(const Ontology& other) const {
    return domains_ == other.domains_ && intents_ == other.intents_ &&
           questions_ == other.questions_;
  }

 private:
  friend Ontology ParseOntology(std::string_view text);

  std::vector<std::string> domains_;
  std::vector<IntentSchema> intents_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<QuestionKey, std::vector<std::string>> questions_;
};

// Parses and validates an ontology JSON document. Throws Error with kSyntax
// (byte position in the message) or kSemantic (offending element named).
Ontology ParseOntology(std::string_view text);
Ontology LoadOntologyFile(const std::string& path);

// Canonical JSON rendering; ParseOntology(SerializeOntology(o)) == o.
std::string SerializeOntology(const Ontology& ontology);

// Mandatory slots of `schema` that are not in `filled`, in declaration order.
// Throws kInvalidArgument if `filled` names a slot the schema lacks.
std::vector<std::string> MissingMandatory(const IntentSchema& schema,
                                          const std::set<std::string>& filled);

// Picks one question for (intent, slot). The choice depends only on the
// seed and the length of the question list.
const std::string& PickFollowupQuestion(const Ontology& ontology,
                                        std::string_view intent_id,
                                        std::string_view slot_id,
                                        std::uint64_t seed);

// Index used by PickFollowupQuestion; exposed for tests.
std::size_t FollowupIndex(std::uint64_t seed, std::size_t list_size);

}  // namespace hdst

#endif  // HDST_ONTOLOGY_H_
