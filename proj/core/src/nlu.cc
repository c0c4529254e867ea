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

#include "hdst/nlu.h"

#include <algorithm>
#include <cmath>

#include "hdst/error.h"
#include "hdst/text.h"

namespace hdst {
namespace {

using nlohmann::json;

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedResponse, "NLU output: " + what);
}

[[noreturn]] void BadLexicon(const std::string& what) {
  throw Error(ErrorCode::kSemantic, "lexicon: " + what);
}

bool SlotIdKnown(const Ontology& ontology, const std::string& slot_id) {
  for (const IntentSchema& intent : ontology.intents()) {
    if (intent.HasSlot(slot_id)) return true;
  }
  return false;
}

}  // namespace

ScheduleInput BuildSchedule(const ScheduleHistory& history,
                            std::string current,
                            std::optional<std::string> pending_slot) {
  ScheduleInput schedule;
  schedule.lines.reserve(history.size());
  for (const auto& [utterance, intent] : history) {
    schedule.lines.push_back({utterance, intent});
  }
  schedule.current = std::move(current);
  schedule.pending_slot = std::move(pending_slot);
  return schedule;
}

std::vector<std::string> RenderScheduleLines(const ScheduleInput& schedule) {
  std::vector<std::string> lines;
  for (const ScheduleLine& line : schedule.lines) {
    lines.push_back(line.utterance + " ⟨intent=" +
                    line.intent.value_or("none") + "⟩");
  }
  lines.push_back(schedule.current);
  return lines;
}

std::string RenderSchedule(const ScheduleInput& schedule) {
  std::string out;
  for (const std::string& line : RenderScheduleLines(schedule)) {
    if (!out.empty()) out.push_back('\n');
    out += line;
  }
  return out;
}

std::string ArgmaxIntent(const IntentScores& scores) {
  std::string best;
  double best_score = -1.0;
  for (const auto& [intent, score] : scores) {
    if (score > best_score) {
      best = intent;
      best_score = score;
    }
  }
  return best;
}

void ValidateNluOutput(const NluOutput& output, const Ontology& ontology) {
  if (output.scores.empty()) Malformed("empty score distribution");
  double sum = 0.0;
  double max_score = 0.0;
  for (const auto& [intent, score] : output.scores) {
    if (!ontology.FindIntent(intent)) Malformed("unknown intent " + intent);
    if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
      Malformed("score out of [0,1] for " + intent);
    }
    sum += score;
    max_score = std::max(max_score, score);
  }
  if (std::fabs(sum - 1.0) > 1e-9) Malformed("scores do not sum to 1");
  for (const std::string& slot : output.dont_care_slots) {
    if (output.slots.count(slot)) {
      Malformed("slot " + slot + " both extracted and don't-care");
    }
  }
  if (!ontology.FindIntent(output.turn_local_intent)) {
    Malformed("unknown turn-local intent " + output.turn_local_intent);
  }
  auto it = output.scores.find(output.context_intent);
  if (it == output.scores.end() || it->second != max_score) {
    Malformed("context intent is not an argmax of the scores");
  }
}

json NluOutputToJson(const NluOutput& output) {
  return json{{"scores", output.scores},
              {"slots", output.slots},
              {"dont_care", output.dont_care_slots},
              {"turn_local_intent", output.turn_local_intent},
              {"context_intent", output.context_intent}};
}

NluOutput NluOutputFromJson(const json& node) {
  try {
    NluOutput output;
    output.scores = node.at("scores").get<IntentScores>();
    output.slots = node.at("slots").get<SlotValues>();
    output.dont_care_slots = node.at("dont_care").get<std::set<std::string>>();
    output.turn_local_intent = node.at("turn_local_intent").get<std::string>();
    output.context_intent = node.at("context_intent").get<std::string>();
    return output;
  } catch (const json::exception& e) {
    Malformed(e.what());
  }
}

NluOutput Predict(const NluBackend& backend, const Ontology& ontology,
                  const ScheduleInput& schedule) {
  NluOutput output = backend.Predict(ontology, schedule);
  ValidateNluOutput(output, ontology);
  return output;
}

// --- lexicon ---------------------------------------------------------------

LexiconRules ParseLexicon(std::string_view text, const Ontology& ontology) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kSyntax, "lexicon syntax error at byte " +
                                        std::to_string(e.byte) + ": " +
                                        e.what());
  }
  LexiconRules rules;
  try {
    std::set<std::string> seen_intents;
    for (const json& node : doc.at("intents")) {
      IntentRule rule;
      rule.intent = node.at("id").get<std::string>();
      if (!ontology.FindIntent(rule.intent)) {
        BadLexicon("dangling intent reference \"" + rule.intent + "\"");
      }
      if (!seen_intents.insert(rule.intent).second) {
        BadLexicon("duplicate intent rule \"" + rule.intent + "\"");
      }
      for (const json& t : node.at("triggers")) {
        TriggerRule trigger{t.at("phrase").get<std::string>(),
                            t.value("weight", 1.0)};
        if (!std::isfinite(trigger.weight) || trigger.weight < 0.0) {
          BadLexicon("trigger weight must be finite and >= 0");
        }
        if (NormalizeText(trigger.phrase).empty()) {
          BadLexicon("empty trigger phrase for \"" + rule.intent + "\"");
        }
        rule.triggers.push_back(std::move(trigger));
      }
      rules.intents.push_back(std::move(rule));
    }
    std::set<std::string> seen_slots;
    for (const json& node : doc.value("slots", json::array())) {
      SlotRule rule;
      rule.slot = node.at("id").get<std::string>();
      if (!SlotIdKnown(ontology, rule.slot)) {
        BadLexicon("dangling slot reference \"" + rule.slot + "\"");
      }
      if (!seen_slots.insert(rule.slot).second) {
        BadLexicon("duplicate slot rule \"" + rule.slot + "\"");
      }
      rule.gazetteer =
          node.value("gazetteer", std::vector<std::string>{});
      if (node.contains("pattern") && !node["pattern"].is_null()) {
        rule.pattern = node["pattern"].get<std::string>();
      }
      rule.dont_care_phrases =
          node.value("dont_care_phrases", std::vector<std::string>{});
      rules.slots.push_back(std::move(rule));
    }
    rules.temperature = doc.value("temperature", 0.5);
    rules.history_weight = doc.value("history_weight", 3.0);
    rules.history_decay = doc.value("history_decay", 0.5);
  } catch (const json::exception& e) {
    BadLexicon(e.what());
  }
  if (!(rules.temperature > 0.0) || !std::isfinite(rules.temperature)) {
    BadLexicon("temperature must be positive");
  }
  if (rules.history_weight < 0.0 || rules.history_decay < 0.0 ||
      rules.history_decay > 1.0) {
    BadLexicon("history_weight must be >= 0 and history_decay in [0,1]");
  }
  // Compile once here so malformed patterns surface as lexicon errors.
  LexiconBackend probe(rules);
  (void)probe;
  return rules;
}

LexiconRules LoadLexiconFile(const std::string& path,
                             const Ontology& ontology) {
  return ParseLexicon(ReadFile(path), ontology);
}

LexiconBackend::LexiconBackend(LexiconRules rules) : rules_(std::move(rules)) {
  for (const IntentRule& rule : rules_.intents) {
    auto& list = triggers_[rule.intent];
    for (const TriggerRule& trigger : rule.triggers) {
      list.emplace_back(NormalizeText(trigger.phrase), trigger.weight);
    }
  }
  for (const SlotRule& rule : rules_.slots) {
    CompiledSlot slot;
    slot.slot = rule.slot;
    for (const std::string& entry : rule.gazetteer) {
      std::string norm = NormalizeText(entry);
      if (!norm.empty()) slot.gazetteer.emplace_back(std::move(norm), entry);
    }
    if (rule.pattern) {
      try {
        slot.pattern.emplace(*rule.pattern, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        BadLexicon("bad pattern for slot \"" + rule.slot + "\": " + e.what());
      }
    }
    for (const std::string& phrase : rule.dont_care_phrases) {
      std::string norm = NormalizeText(phrase);
      if (!norm.empty()) slot.dont_care_phrases.push_back(std::move(norm));
    }
    slots_.push_back(std::move(slot));
  }
}

std::map<std::string, double> LexiconBackend::RawScores(
    const Ontology& ontology, std::string_view utterance) const {
  const std::string text = NormalizeText(utterance);
  std::map<std::string, double> raw;
  for (const IntentSchema& intent : ontology.intents()) {
    double score = 0.0;
    auto it = triggers_.find(intent.id);
    if (it != triggers_.end()) {
      for (const auto& [phrase, weight] : it->second) {
        if (FindPhrase(text, phrase)) score += weight;
      }
    }
    raw.emplace(intent.id, score);
  }
  return raw;
}

IntentScores SoftmaxScores(const std::map<std::string, double>& raw,
                           double temperature) {
  IntentScores scores;
  if (raw.empty()) return scores;
  double max_raw = raw.begin()->second;
  for (const auto& [intent, value] : raw) max_raw = std::max(max_raw, value);
  double total = 0.0;
  for (const auto& [intent, value] : raw) {
    const double e = std::exp((value - max_raw) / temperature);
    scores.emplace(intent, e);
    total += e;
  }
  for (auto& [intent, value] : scores) value /= total;
  return scores;
}

NluOutput LexiconBackend::Predict(const Ontology& ontology,
                                  const ScheduleInput& schedule) const {
  const std::map<std::string, double> local =
      RawScores(ontology, schedule.current);
  std::map<std::string, double> context = local;
  std::set<std::string> seen;
  double factor = rules_.history_weight;
  for (auto it = schedule.lines.rbegin(); it != schedule.lines.rend(); ++it) {
    if (it->intent && seen.insert(*it->intent).second) {
      auto target = context.find(*it->intent);
      if (target != context.end()) target->second += factor;
    }
    factor *= rules_.history_decay;
  }

  NluOutput output;
  const IntentScores local_scores = SoftmaxScores(local, rules_.temperature);
  output.scores = SoftmaxScores(context, rules_.temperature);
  output.turn_local_intent = ArgmaxIntent(local_scores);
  output.context_intent = ArgmaxIntent(output.scores);

  const std::string text = NormalizeText(schedule.current);
  for (const CompiledSlot& slot : slots_) {
    for (const std::string& phrase : slot.dont_care_phrases) {
      if (FindPhrase(text, phrase)) {
        output.dont_care_slots.insert(slot.slot);
        break;
      }
    }
    std::size_t best_len = 0;
    std::size_t best_pos = 0;
    const std::string* best = nullptr;
    for (const auto& [norm, canonical] : slot.gazetteer) {
      const auto pos = FindPhrase(text, norm);
      if (!pos) continue;
      if (!best || norm.size() > best_len ||
          (norm.size() == best_len && *pos < best_pos)) {
        best = &canonical;
        best_len = norm.size();
        best_pos = *pos;
      }
    }
    if (best) {
      output.slots[slot.slot] = *best;
    } else if (slot.pattern) {
      std::smatch match;
      if (std::regex_search(text, match, *slot.pattern)) {
        const std::size_t group = match.size() > 1 && match[1].matched ? 1 : 0;
        std::string value = match[group].str();
        if (!value.empty()) output.slots[slot.slot] = std::move(value);
      }
    }
  }

  if (schedule.pending_slot) {
    const IntentSchema* local_intent =
        ontology.FindIntent(output.turn_local_intent);
    if (local_intent && local_intent->kind == IntentKind::kDontCare &&
        local.at(local_intent->id) > 0.0) {
      output.dont_care_slots.insert(*schedule.pending_slot);
    }
  }
  for (const std::string& slot : output.dont_care_slots) {
    output.slots.erase(slot);
  }
  return output;
}

std::unique_ptr<NluBackend> BuildLexiconBackend(LexiconRules rules) {
  return std::make_unique<LexiconBackend>(std::move(rules));
}

// --- remote ----------------------------------------------------------------

RemoteNluBackend::RemoteNluBackend(Endpoint endpoint, Sleeper sleep)
    : endpoint_(std::move(endpoint)), sleep_(std::move(sleep)) {
  ValidateEndpoint(endpoint_);
}

json RemoteNluBackend::Call(const ScheduleInput& schedule) const {
  std::vector<std::string> lines = RenderScheduleLines(schedule);
  lines.pop_back();  // the current utterance travels separately
  json body{{"schedule", lines}, {"current", schedule.current}};
  body["pending_slot"] =
      schedule.pending_slot ? json(*schedule.pending_slot) : json(nullptr);
  const HttpReply reply = PostJson(endpoint_, "/v1/nlu", body.dump(), sleep_);
  json doc = json::parse(reply.body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) Malformed("body is not JSON");
  return doc;
}

NluOutput RemoteNluBackend::Predict(const Ontology& ontology,
                                    const ScheduleInput& schedule) const {
  ScheduleInput alone;
  alone.current = schedule.current;
  alone.pending_slot = schedule.pending_slot;
  const json local = Call(alone);
  const json context = Call(schedule);
  NluOutput output;
  try {
    output.scores = context.at("scores").get<IntentScores>();
    output.slots = context.value("slots", SlotValues{});
    output.dont_care_slots =
        context.value("dont_care", std::set<std::string>{});
    output.turn_local_intent =
        ArgmaxIntent(local.at("scores").get<IntentScores>());
  } catch (const json::exception& e) {
    Malformed(std::string("unexpected response shape: ") + e.what());
  }
  output.context_intent = ArgmaxIntent(output.scores);
  ValidateNluOutput(output, ontology);
  return output;
}

// --- gold echo -------------------------------------------------------------

NluOutput GoldEchoNlu::Predict(const Ontology& ontology,
                               const ScheduleInput&) const {
  if (!gold_ || !gold_->gold_intent) {
    throw Error(ErrorCode::kPrecondition, "gold echo NLU was not primed");
  }
  NluOutput output;
  for (const IntentSchema& intent : ontology.intents()) {
    output.scores[intent.id] = intent.id == *gold_->gold_intent ? 1.0 : 0.0;
  }
  output.slots = gold_->gold_slots;
  output.dont_care_slots = gold_->gold_dont_care;
  output.turn_local_intent = *gold_->gold_intent;
  output.context_intent = *gold_->gold_intent;
  return output;
}

}  // namespace hdst
