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

#ifndef HDST_SESSION_STORE_H_
#define HDST_SESSION_STORE_H_

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdst/engine.h"
#include "hdst/pipeline.h"

namespace hdst {

struct TranscriptEntry {
  std::string speaker;  // "user" | "system"
  std::string text;
};

struct MessageReply {
  std::string session_id;
  std::string reply;
  std::string action;
  std::string verdict;
  int turn_no = 0;
  std::optional<DstResult> result;
  std::vector<std::string> sources;
};

nlohmann::ordered_json MessageReplyToJson(const MessageReply& reply);

using Clock = std::function<std::chrono::steady_clock::time_point()>;

// Sessions live in memory and in an append-only log <dir>/<id>.jsonl:
// a "session" line with the seed, then one "turn" line per user turn. Every
// line is flushed before the call returns. A session missing from memory
// (evicted or after a restart) is rebuilt by replaying its log.
class SessionStore {
 public:
  SessionStore(const Engine& engine, std::string directory,
               std::chrono::seconds ttl,
               Clock clock = std::chrono::steady_clock::now);

  std::string Create();
  // Throws kNotFound for unknown sessions, kInvalidArgument for bad text.
  MessageReply Post(const std::string& id, const std::string& text);
  nlohmann::ordered_json StateView(const std::string& id);
  std::vector<TranscriptEntry> Transcript(const std::string& id);

  // Drops idle sessions from memory; their logs stay on disk.
  std::size_t EvictIdle();
  std::size_t resident() const;
  // Ids of every session log in the directory.
  std::vector<std::string> ListPersisted() const;

 private:
  struct Session {
    std::mutex mu;
    Conversation conversation;
    std::vector<TranscriptEntry> transcript;
    std::chrono::steady_clock::time_point last_used;
  };

  std::shared_ptr<Session> Acquire(const std::string& id);
  std::shared_ptr<Session> Replay(const std::string& id) const;
  std::string LogPath(const std::string& id) const;
  static void Append(const std::string& path, const nlohmann::ordered_json& line);

  const Engine& engine_;
  std::string directory_;
  std::chrono::seconds ttl_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

bool IsValidSessionId(const std::string& id);

}  // namespace hdst

#endif  // HDST_SESSION_STORE_H_
