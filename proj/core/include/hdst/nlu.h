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

#ifndef HDST_NLU_H_
#define HDST_NLU_H_

#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdst/corpus.h"
#include "hdst/http.h"
#include "hdst/ontology.h"

namespace hdst {

struct ScheduleLine {
  std::string utterance;
  std::optional<std::string> intent;  // intent resolved for that turn
  bool operator==(const ScheduleLine&) const = default;
};

// What the NLU sees on one turn: prior user turns with their resolved
// intents, then the current utterance. System turns are never included.
struct ScheduleInput {
  std::vector<ScheduleLine> lines;
  std::string current;
  // Slot the system asked about on the previous turn, if any. A don't-care
  // reply resolves against it.
  std::optional<std::string> pending_slot;
};

using ScheduleHistory =
    std::vector<std::pair<std::string, std::optional<std::string>>>;

ScheduleInput BuildSchedule(const ScheduleHistory& history,
                            std::string current,
                            std::optional<std::string> pending_slot = {});

// Remote wire rendering: one "<utterance> ⟨intent=<id>⟩" line per prior
// turn, current utterance last without annotation.
std::vector<std::string> RenderScheduleLines(const ScheduleInput& schedule);
std::string RenderSchedule(const ScheduleInput& schedule);

using IntentScores = std::map<std::string, double>;

struct NluOutput {
  IntentScores scores;  // context-run distribution
  SlotValues slots;
  std::set<std::string> dont_care_slots;
  std::string turn_local_intent;  // argmax of the current-utterance run
  std::string context_intent;     // argmax of the full-schedule run

  bool operator==(const NluOutput&) const = default;
};

// First maximal entry in key order; empty string for an empty map.
std::string ArgmaxIntent(const IntentScores& scores);

// Checks the NluOutput invariants against the ontology; throws
// kMalformedResponse naming the violation.
void ValidateNluOutput(const NluOutput& output, const Ontology& ontology);

nlohmann::json NluOutputToJson(const NluOutput& output);
NluOutput NluOutputFromJson(const nlohmann::json& node);

class NluBackend {
 public:
  virtual ~NluBackend() = default;
  virtual NluOutput Predict(const Ontology& ontology,
                            const ScheduleInput& schedule) const = 0;
};

// Runs the backend and validates its output.
NluOutput Predict(const NluBackend& backend, const Ontology& ontology,
                  const ScheduleInput& schedule);

// ---------------------------------------------------------------------------
// Lexicon backend: weighted trigger phrases per intent and gazetteers or
// patterns per slot. score(intent) is a softmax over summed trigger weights.

struct TriggerRule {
  std::string phrase;
  double weight = 1.0;
};

struct IntentRule {
  std::string intent;
  std::vector<TriggerRule> triggers;
};

struct SlotRule {
  std::string slot;
  std::vector<std::string> gazetteer;
  std::optional<std::string> pattern;  // ECMAScript regex, group 1 if present
  // Phrases that mark this slot as don't-care wherever they occur.
  std::vector<std::string> dont_care_phrases;
};

struct LexiconRules {
  std::vector<IntentRule> intents;
  std::vector<SlotRule> slots;
  double temperature = 0.5;
  // Context run: the most recent schedule line annotated with an intent adds
  // history_weight * history_decay^(distance-1) to that intent.
  double history_weight = 3.0;
  double history_decay = 0.5;
};

// Parses the lexicon document. Dangling intent or slot references (relative
// to `ontology`) are kSemantic errors.
LexiconRules ParseLexicon(std::string_view text, const Ontology& ontology);
LexiconRules LoadLexiconFile(const std::string& path, const Ontology& ontology);

class LexiconBackend : public NluBackend {
 public:
  explicit LexiconBackend(LexiconRules rules);

  NluOutput Predict(const Ontology& ontology,
                    const ScheduleInput& schedule) const override;

  const LexiconRules& rules() const { return rules_; }

  // Unnormalized scores of the current-utterance run.
  std::map<std::string, double> RawScores(const Ontology& ontology,
                                          std::string_view utterance) const;

 private:
  struct CompiledSlot {
    std::string slot;
    std::vector<std::pair<std::string, std::string>> gazetteer;  // norm, canon
    std::optional<std::regex> pattern;
    std::vector<std::string> dont_care_phrases;  // normalized
  };

  LexiconRules rules_;
  std::map<std::string, std::vector<std::pair<std::string, double>>> triggers_;
  std::vector<CompiledSlot> slots_;
};

std::unique_ptr<NluBackend> BuildLexiconBackend(LexiconRules rules);

// Softmax of raw / temperature; numerically stable.
IntentScores SoftmaxScores(const std::map<std::string, double>& raw,
                           double temperature);

// ---------------------------------------------------------------------------
// Remote backend: POST {base_url}/v1/nlu, once with the current utterance
// alone and once with the full schedule.

class RemoteNluBackend : public NluBackend {
 public:
  explicit RemoteNluBackend(Endpoint endpoint, Sleeper sleep = RealSleep);

  NluOutput Predict(const Ontology& ontology,
                    const ScheduleInput& schedule) const override;

 private:
  nlohmann::json Call(const ScheduleInput& schedule) const;

  Endpoint endpoint_;
  Sleeper sleep_;
};

// ---------------------------------------------------------------------------
// Evaluation backend that echoes gold annotations of a primed turn. Not
// thread-safe; one instance per evaluation run.

class GoldEchoNlu : public NluBackend {
 public:
  void Prime(const Turn& gold) { gold_ = &gold; }

  NluOutput Predict(const Ontology& ontology,
                    const ScheduleInput& schedule) const override;

 private:
  const Turn* gold_ = nullptr;
};

}  // namespace hdst

#endif  // HDST_NLU_H_
