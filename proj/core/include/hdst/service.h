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

#ifndef HDST_SERVICE_H_
#define HDST_SERVICE_H_

#include <chrono>
#include <memory>
#include <string>

#include "hdst/error.h"
#include "hdst/session_store.h"

namespace hdst {

// HTTP status used for a library error surfaced through the API.
int HttpStatusFor(ErrorCode code);
// Stable error code string in {"error":{"code","message"}} bodies.
std::string ApiErrorCode(ErrorCode code);

// JSON API over a SessionStore:
//   POST /v1/sessions                  -> 201 {"session_id"}
//   POST /v1/sessions/{id}/messages    {"text"} -> reply, action, verdict, result
//   GET  /v1/sessions/{id}/state
//   GET  /v1/sessions/{id}/transcript
//   GET  /healthz
class HttpService {
 public:
  HttpService(SessionStore& store, std::string cors_origin,
              std::chrono::seconds sweep_interval = std::chrono::seconds(60));
  ~HttpService();

  // Port 0 picks a free port. Returns the bound port; throws kConfig.
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Runs the idle-session sweep alongside.
  void Run();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hdst

#endif  // HDST_SERVICE_H_
