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

#ifndef HDST_HTTP_H_
#define HDST_HTTP_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hdst {

// A remote JSON-over-HTTP service (chat completion or NLU).
struct Endpoint {
  std::string base_url;  // e.g. "http://127.0.0.1:8080" or with a path prefix
  std::string model_name;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;
  // Name of the environment variable holding the API key. The key itself is
  // read at request time and never stored.
  std::string api_key_env;
  std::chrono::milliseconds backoff_base{250};
};

void ValidateEndpoint(const Endpoint& endpoint);

struct HttpAttempt {
  int status = 0;     // 0 when no response was received
  std::string error;  // transport error description, empty on response
};

struct HttpReply {
  int status = 0;
  std::string body;
  std::vector<HttpAttempt> attempts;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
void RealSleep(std::chrono::milliseconds delay);

// Delay before retry number `retry` (0-based): base * 2^retry scaled by a
// jitter factor in [0.5, 1.5).
std::chrono::milliseconds BackoffDelay(std::chrono::milliseconds base,
                                       int retry, std::uint64_t jitter_seed);

// POSTs a JSON body to base_url + path. Transport failures, 429 and 5xx are
// retried with exponential backoff, at most max_retries times. Throws
// kTimeout, kUnavailable or kHttpStatus when no 2xx reply arrives.
HttpReply PostJson(const Endpoint& endpoint, const std::string& path,
                   const std::string& body, const Sleeper& sleep = RealSleep);

}  // namespace hdst

#endif  // HDST_HTTP_H_
