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

#include "hdst/fixture_gen.h"

#include <algorithm>
#include <cstdio>

#include "hdst/error.h"
#include "hdst/rng.h"

namespace hdst {
namespace {

constexpr double kDontCareRate = 0.2;
constexpr double kMentionRate = 0.45;
constexpr double kCorrectionRate = 0.2;
constexpr double kShiftRate = 0.4;

const char* const kConnectors[] = {"please", "in", "for", "with", "maybe"};
const char* const kWrapUps[] = {"Anything else?", "Can I help with something else?",
                                "Is there anything more?"};

class DialogueWriter {
 public:
  DialogueWriter(const Ontology& ontology, const LexiconRules& lexicon, Rng rng)
      : ontology_(ontology), lexicon_(lexicon), rng_(std::move(rng)) {
    for (const IntentSchema& intent : ontology.intents()) {
      if (intent.kind == IntentKind::kNormal) normal_.push_back(&intent);
    }
  }

  Dialogue Write(std::string id) {
    dialogue_.id = std::move(id);
    const IntentSchema* intent = normal_[rng_.Below(normal_.size())];
    dialogue_.domain_hint = intent->domain;
    Open(*intent, false);
    FollowUps(*intent);
    if (rng_.Bernoulli(kCorrectionRate)) Correct(*intent);
    if (rng_.Bernoulli(kShiftRate)) {
      const IntentSchema& next = PickShiftTarget(*intent);
      System(kWrapUps[rng_.Below(std::size(kWrapUps))]);
      Open(next, true);
      FollowUps(next);
    }
    return std::move(dialogue_);
  }

 private:
  const std::vector<TriggerRule>& Triggers(const std::string& intent) const {
    for (const IntentRule& rule : lexicon_.intents) {
      if (rule.intent == intent && !rule.triggers.empty()) return rule.triggers;
    }
    throw Error(ErrorCode::kPrecondition, "lexicon has no trigger for intent " + intent);
  }

  std::string Value(const SlotDef& slot) {
    if (!slot.free_text()) return slot.values[rng_.Below(slot.values.size())];
    for (const SlotRule& rule : lexicon_.slots) {
      if (rule.slot == slot.id && !rule.gazetteer.empty()) {
        return rule.gazetteer[rng_.Below(rule.gazetteer.size())];
      }
    }
    throw Error(ErrorCode::kPrecondition, "free-text slot " + slot.id + " has no gazetteer");
  }

  std::string Connector() { return kConnectors[rng_.Below(std::size(kConnectors))]; }

  void System(std::string text) {
    Turn turn;
    turn.speaker = Speaker::kSystem;
    turn.text = std::move(text);
    dialogue_.turns.push_back(std::move(turn));
  }

  void User(std::string text, const IntentSchema& intent, SlotValues slots,
            std::set<std::string> dont_care, bool shift) {
    if (shift) {
      SlotValues kept;
      for (const auto& [slot, value] : state_) {
        if (intent.HasSlot(slot)) kept.emplace(slot, value);
      }
      state_ = std::move(kept);
    }
    for (const auto& [slot, value] : slots) state_[slot] = value;
    for (const std::string& slot : dont_care) {
      state_[slot] = DontCareValue(*intent.FindSlot(slot));
    }
    Turn turn;
    turn.text = std::move(text);
    turn.gold_intent = intent.id;
    turn.gold_slots = std::move(slots);
    turn.gold_dont_care = std::move(dont_care);
    turn.gold_state = state_;
    turn.shift = shift;
    dialogue_.turns.push_back(std::move(turn));
  }

  void Open(const IntentSchema& intent, bool shift) {
    const auto& triggers = Triggers(intent.id);
    std::string text = triggers[rng_.Below(triggers.size())].phrase;
    std::vector<const SlotDef*> open;
    bool carried = false;
    for (const SlotDef& slot : intent.slots) {
      if (shift && state_.count(slot.id)) {
        carried = true;
      } else {
        open.push_back(&slot);
      }
    }
    std::vector<const SlotDef*> chosen;
    for (const SlotDef* slot : open) {
      if (rng_.Bernoulli(kMentionRate)) chosen.push_back(slot);
    }
    // Every user turn carries at least one value, so a corrupted prediction
    // is always observable in the state.
    if (chosen.empty() && !carried && !open.empty()) {
      chosen.push_back(open[rng_.Below(open.size())]);
    }
    SlotValues mentioned;
    for (const SlotDef* slot : chosen) {
      const std::string value = Value(*slot);
      text += " " + Connector() + " " + value;
      mentioned[slot->id] = value;
    }
    User(std::move(text), intent, std::move(mentioned), {}, shift);
  }

  std::vector<std::string> Missing(const IntentSchema& intent) const {
    std::set<std::string> filled;
    for (const auto& [slot, value] : state_) filled.insert(slot);
    return MissingMandatory(intent, filled);
  }

  void FollowUps(const IntentSchema& intent) {
    for (std::vector<std::string> missing = Missing(intent); !missing.empty();
         missing = Missing(intent)) {
      const SlotDef& slot = *intent.FindSlot(missing.front());
      System(PickFollowupQuestion(ontology_, intent.id, slot.id, rng_.NextU64()));
      if (rng_.Bernoulli(kDontCareRate)) {
        const auto& phrases = Triggers(ontology_.DontCareIntent().id);
        User(phrases[rng_.Below(phrases.size())].phrase, intent, {}, {slot.id}, false);
        continue;
      }
      SlotValues slots;
      std::string value = Value(slot);
      std::string text = rng_.Bernoulli(0.5) ? Connector() + " " + value : value;
      slots[slot.id] = std::move(value);
      // Sometimes an unfilled optional slot rides along.
      for (const SlotDef& other : intent.slots) {
        if (other.mandatory || state_.count(other.id) || !rng_.Bernoulli(0.25)) continue;
        std::string extra = Value(other);
        text += " " + Connector() + " " + extra;
        slots[other.id] = std::move(extra);
        break;
      }
      User(std::move(text), intent, std::move(slots), {}, false);
    }
  }

  void Correct(const IntentSchema& intent) {
    std::vector<const SlotDef*> candidates;
    for (const SlotDef& slot : intent.slots) {
      if (!slot.free_text() && slot.values.size() > 1) candidates.push_back(&slot);
    }
    if (candidates.empty()) return;
    const SlotDef& slot = *candidates[rng_.Below(candidates.size())];
    std::string value = Value(slot);
    auto it = state_.find(slot.id);
    while (it != state_.end() && it->second == value) value = Value(slot);
    System(kWrapUps[rng_.Below(std::size(kWrapUps))]);
    User("actually " + value, intent, {{slot.id, value}}, {}, false);
  }

  const IntentSchema& PickShiftTarget(const IntentSchema& current) {
    std::vector<const IntentSchema*> sharing, other;
    for (const IntentSchema* intent : normal_) {
      if (intent->id == current.id) continue;
      const bool shares = std::any_of(state_.begin(), state_.end(), [&](const auto& kv) {
        return intent->HasSlot(kv.first);
      });
      (shares ? sharing : other).push_back(intent);
    }
    if (!sharing.empty() && rng_.Bernoulli(0.6)) return *sharing[rng_.Below(sharing.size())];
    return *other[rng_.Below(other.size())];
  }

  const Ontology& ontology_;
  const LexiconRules& lexicon_;
  Rng rng_;
  std::vector<const IntentSchema*> normal_;
  Dialogue dialogue_;
  SlotValues state_;
};

}  // namespace

Corpus GenerateCorpus(const Ontology& ontology, const LexiconRules& lexicon,
                      std::size_t dialogues, std::uint64_t seed) {
  std::size_t normal = 0;
  for (const IntentSchema& intent : ontology.intents()) {
    normal += intent.kind == IntentKind::kNormal;
  }
  if (normal < 2) {
    throw Error(ErrorCode::kPrecondition, "fixture generation needs two normal intents");
  }
  Corpus corpus;
  corpus.ontology_checksum = ontology.Checksum();
  for (std::size_t d = 0; d < dialogues; ++d) {
    char id[32];
    std::snprintf(id, sizeof(id), "gen-%05zu", d);
    DialogueWriter writer(ontology, lexicon, Rng(MixSeeds(seed, d)));
    corpus.dialogues.push_back(writer.Write(id));
  }
  return corpus;
}

}  // namespace hdst
