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

#include "hdst/http.h"

#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "hdst/error.h"
#include "hdst/rng.h"

namespace hdst {
namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

ParsedUrl ParseBaseUrl(const std::string& base_url) {
  const std::size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfig, "base_url needs a scheme: " + base_url);
  }
  const std::size_t path_start = base_url.find('/', scheme_end + 3);
  ParsedUrl url;
  url.origin = base_url.substr(0, path_start);
  if (path_start != std::string::npos) {
    url.prefix = base_url.substr(path_start);
    while (!url.prefix.empty() && url.prefix.back() == '/') {
      url.prefix.pop_back();
    }
  }
  return url;
}

bool Transient(int status) { return status == 429 || status >= 500; }

}  // namespace

void ValidateEndpoint(const Endpoint& endpoint) {
  ParseBaseUrl(endpoint.base_url);
  if (endpoint.timeout.count() <= 0) {
    throw Error(ErrorCode::kConfig, "endpoint timeout must be positive");
  }
  if (endpoint.max_retries < 0) {
    throw Error(ErrorCode::kConfig, "endpoint max_retries must be >= 0");
  }
}

void RealSleep(std::chrono::milliseconds delay) {
  std::this_thread::sleep_for(delay);
}

std::chrono::milliseconds BackoffDelay(std::chrono::milliseconds base,
                                       int retry, std::uint64_t jitter_seed) {
  Rng rng(MixSeeds(jitter_seed, static_cast<std::uint64_t>(retry)));
  const double factor = 0.5 + rng.Uniform();
  const double ms = static_cast<double>(base.count()) * std::ldexp(1.0, retry);
  return std::chrono::milliseconds(static_cast<long long>(ms * factor));
}

HttpReply PostJson(const Endpoint& endpoint, const std::string& path,
                   const std::string& body, const Sleeper& sleep) {
  ValidateEndpoint(endpoint);
  const ParsedUrl url = ParseBaseUrl(endpoint.base_url);
  httplib::Client client(url.origin);
  const auto seconds = endpoint.timeout.count() / 1000;
  const auto micros = (endpoint.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Headers headers;
  if (!endpoint.api_key_env.empty()) {
    if (const char* key = std::getenv(endpoint.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  HttpReply reply;
  const std::uint64_t jitter_seed = Fnv1a64(body);
  ErrorCode last_code = ErrorCode::kUnavailable;
  std::string last_message;
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto delay =
          BackoffDelay(endpoint.backoff_base, attempt - 1, jitter_seed);
      spdlog::warn("POST {}{} attempt {} failed ({}); retrying in {} ms",
                   url.prefix, path, attempt, last_message, delay.count());
      sleep(delay);
    }
    auto result = client.Post(url.prefix + path, headers, body,
                              "application/json");
    HttpAttempt record;
    if (!result) {
      const httplib::Error err = result.error();
      record.error = httplib::to_string(err);
      last_code = err == httplib::Error::Read || err == httplib::Error::Write ||
                          err == httplib::Error::ConnectionTimeout
                      ? ErrorCode::kTimeout
                      : ErrorCode::kUnavailable;
      last_message = record.error;
      reply.attempts.push_back(record);
      continue;
    }
    record.status = result->status;
    reply.attempts.push_back(record);
    if (result->status >= 200 && result->status < 300) {
      reply.status = result->status;
      reply.body = result->body;
      spdlog::debug("POST {}{} succeeded after {} attempt(s)", url.prefix,
                    path, reply.attempts.size());
      return reply;
    }
    last_code = ErrorCode::kHttpStatus;
    last_message = "HTTP " + std::to_string(result->status);
    if (!Transient(result->status)) break;
  }
  throw Error(last_code, "POST " + url.prefix + path + " failed after " +
                             std::to_string(reply.attempts.size()) +
                             " attempt(s): " + last_message);
}

}  // namespace hdst
