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

#include "hdst/session_store.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <utility>

#include <spdlog/spdlog.h>

#include "hdst/error.h"
#include "hdst/rng.h"
#include "hdst/text.h"

namespace hdst {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::int64_t WallMillis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::uint64_t SessionSeed(std::uint64_t engine_seed, const std::string& id) {
  return MixSeeds(engine_seed, Fnv1a64(id));
}

}  // namespace

bool IsValidSessionId(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

nlohmann::ordered_json MessageReplyToJson(const MessageReply& reply) {
  nlohmann::ordered_json out;
  out["session_id"] = reply.session_id;
  out["reply"] = reply.reply;
  out["action"] = reply.action;
  out["verdict"] = reply.verdict;
  out["turn_no"] = reply.turn_no;
  out["result"] = reply.result ? DstResultToJson(*reply.result) : nlohmann::ordered_json();
  out["sources"] = reply.sources;
  return out;
}

SessionStore::SessionStore(const Engine& engine, std::string directory,
                           std::chrono::seconds ttl, Clock clock)
    : engine_(engine), directory_(std::move(directory)), ttl_(ttl), clock_(std::move(clock)) {
  std::error_code ec;
  fs::create_directories(directory_, ec);
  if (ec) {
    throw Error(ErrorCode::kConfig,
                "persistence_path: cannot create " + directory_ + ": " + ec.message(),
                "persistence_path");
  }
}

std::string SessionStore::LogPath(const std::string& id) const {
  return (fs::path(directory_) / (id + ".jsonl")).string();
}

void SessionStore::Append(const std::string& path, const nlohmann::ordered_json& line) {
  std::ofstream out(path, std::ios::app | std::ios::binary);
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + path);
}

std::string SessionStore::Create() {
  std::string id;
  do {
    id = NewSession(engine_.ontology(), 0).session_id;
  } while (fs::exists(LogPath(id)));
  const std::uint64_t seed = SessionSeed(engine_.config().seed, id);

  auto session = std::make_shared<Session>();
  session->conversation.state = NewSession(id, seed);
  session->last_used = clock_();

  nlohmann::ordered_json head;
  head["event"] = "session";
  head["session_id"] = id;
  head["seed"] = seed;
  head["created_at_ms"] = WallMillis();
  Append(LogPath(id), head);

  std::lock_guard lock(mu_);
  sessions_[id] = std::move(session);
  return id;
}

std::shared_ptr<SessionStore::Session> SessionStore::Replay(const std::string& id) const {
  std::ifstream in(LogPath(id), std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "unknown session: " + id);
  auto session = std::make_shared<Session>();
  std::string line;
  std::size_t line_no = 0;
  bool have_head = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json node;
    try {
      node = json::parse(line);
    } catch (const json::parse_error&) {
      // A kill mid-write leaves at most a torn last line; it was never
      // acknowledged, so dropping it is safe.
      if (in.peek() == std::char_traits<char>::eof()) {
        spdlog::warn("session {}: ignoring torn final line {}", id, line_no);
        break;
      }
      throw Error(ErrorCode::kIo, LogPath(id) + ":" + std::to_string(line_no) +
                                      ": corrupt session log line");
    }
    const std::string event = node.value("event", "");
    if (event == "session") {
      session->conversation.state =
          NewSession(node.at("session_id").get<std::string>(), node.at("seed").get<std::uint64_t>());
      have_head = true;
    } else if (event == "turn" && have_head) {
      TurnEvent turn = TurnEventFromJson(node.at("turn"));
      ApplyTurnEvent(session->conversation, turn);
      session->transcript.push_back({"user", turn.text});
      session->transcript.push_back({"system", turn.reply});
    } else {
      throw Error(ErrorCode::kIo, LogPath(id) + ":" + std::to_string(line_no) +
                                      ": unexpected event '" + event + "'");
    }
  }
  if (!have_head) throw Error(ErrorCode::kIo, LogPath(id) + ": missing session header");
  return session;
}

std::shared_ptr<SessionStore::Session> SessionStore::Acquire(const std::string& id) {
  if (!IsValidSessionId(id)) throw Error(ErrorCode::kNotFound, "unknown session: " + id);
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    it = sessions_.emplace(id, Replay(id)).first;
    spdlog::info("session {} restored from log ({} turns)", id,
                 it->second->conversation.state.turn_no);
  }
  it->second->last_used = clock_();
  return it->second;
}

MessageReply SessionStore::Post(const std::string& id, const std::string& text) {
  if (!IsValidUtf8(text)) throw Error(ErrorCode::kInvalidArgument, "text is not valid UTF-8");
  if (NormalizeText(text).empty()) throw Error(ErrorCode::kInvalidArgument, "text is empty");
  std::shared_ptr<Session> session = Acquire(id);
  std::lock_guard lock(session->mu);

  // Run on a copy so a failed turn or a failed write leaves no trace.
  Conversation next = session->conversation;
  TurnOutcome outcome = engine_.pipeline().Step(next, text);

  nlohmann::ordered_json line;
  line["event"] = "turn";
  line["at_ms"] = WallMillis();
  line["turn"] = TurnEventToJson(outcome.event);
  Append(LogPath(id), line);

  session->conversation = std::move(next);
  session->transcript.push_back({"user", text});
  session->transcript.push_back({"system", outcome.event.reply});
  session->last_used = clock_();

  MessageReply reply;
  reply.session_id = id;
  reply.reply = outcome.event.reply;
  reply.action = outcome.event.action;
  reply.verdict = outcome.event.verdict;
  reply.turn_no = session->conversation.state.turn_no;
  reply.result = outcome.result;
  if (outcome.answer) reply.sources = outcome.answer->sources;
  return reply;
}

nlohmann::ordered_json SessionStore::StateView(const std::string& id) {
  std::shared_ptr<Session> session = Acquire(id);
  std::lock_guard lock(session->mu);
  const DialogueState& state = session->conversation.state;
  nlohmann::ordered_json out = DialogueStateToJson(state);
  out["pending_slot"] = session->conversation.pending_slot
                            ? nlohmann::ordered_json(*session->conversation.pending_slot)
                            : nlohmann::ordered_json();
  nlohmann::ordered_json missing = nlohmann::ordered_json::array();
  nlohmann::ordered_json result;
  if (state.active_intent) {
    const IntentSchema& schema = engine_.ontology().Intent(*state.active_intent);
    std::set<std::string> filled;
    for (const auto& [slot, fill] : state.fills) filled.insert(slot);
    for (const std::string& slot : MissingMandatory(schema, filled)) missing.push_back(slot);
    result = DstResultToJson(EmitResult(state, engine_.ontology(), engine_.tracker_options()));
  }
  out["missing_mandatory"] = std::move(missing);
  out["result"] = std::move(result);
  return out;
}

std::vector<TranscriptEntry> SessionStore::Transcript(const std::string& id) {
  std::shared_ptr<Session> session = Acquire(id);
  std::lock_guard lock(session->mu);
  return session->transcript;
}

std::size_t SessionStore::EvictIdle() {
  const auto now = clock_();
  std::lock_guard lock(mu_);
  std::size_t evicted = 0;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    std::unique_lock session_lock(it->second->mu, std::try_to_lock);
    if (session_lock.owns_lock() && now - it->second->last_used > ttl_) {
      session_lock.unlock();
      it = sessions_.erase(it);
      ++evicted;
    } else {
      ++it;
    }
  }
  if (evicted > 0) spdlog::info("evicted {} idle sessions", evicted);
  return evicted;
}

std::size_t SessionStore::resident() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::vector<std::string> SessionStore::ListPersisted() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(directory_)) {
    if (entry.path().extension() == ".jsonl") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hdst
