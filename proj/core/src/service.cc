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

#include "hdst/service.h"

#include <condition_variable>
#include <mutex>
#include <thread>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace hdst {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::size_t kMaxBodyBytes = 64 * 1024;

void SendJson(httplib::Response& res, int status, const ojson& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, int status, const std::string& code,
               const std::string& message) {
  ojson body;
  body["error"]["code"] = code;
  body["error"]["message"] = message;
  SendJson(res, status, body);
}

}  // namespace

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSyntax: return 400;
    case ErrorCode::kUnavailable:
    case ErrorCode::kHttpStatus:
    case ErrorCode::kMalformedResponse:
    case ErrorCode::kParse:
    case ErrorCode::kMissingKey:
    case ErrorCode::kInvariant: return 502;
    case ErrorCode::kTimeout: return 504;
    default: return 500;
  }
}

std::string ApiErrorCode(ErrorCode code) {
  switch (HttpStatusFor(code)) {
    case 404: return "not_found";
    case 400: return "bad_request";
    case 502: return "upstream_error";
    case 504: return "upstream_timeout";
    default: return "internal";
  }
}

struct HttpService::Impl {
  SessionStore& store;
  std::string cors_origin;
  std::chrono::seconds sweep_interval;
  httplib::Server server;
  std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;

  Impl(SessionStore& s, std::string origin, std::chrono::seconds sweep)
      : store(s), cors_origin(std::move(origin)), sweep_interval(sweep) {}

  // Runs `body`, mapping failures to structured error responses.
  template <typename F>
  void Guard(httplib::Response& res, F&& body) {
    try {
      body();
    } catch (const Error& e) {
      const int status = HttpStatusFor(e.code());
      if (status >= 500) spdlog::error("request failed: {}", e.what());
      SendError(res, status, ApiErrorCode(e.code()), e.what());
    } catch (const std::exception& e) {
      spdlog::error("request failed: {}", e.what());
      SendError(res, 500, "internal", "internal error");
    }
  }

  void Routes() {
    server.set_payload_max_length(kMaxBodyBytes);
    server.set_default_headers({
        {"Access-Control-Allow-Origin", cors_origin},
        {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
        {"Access-Control-Allow-Headers", "Content-Type"},
    });
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });
    server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      ojson body;
      body["status"] = "ok";
      body["sessions_resident"] = store.resident();
      SendJson(res, 200, body);
    });
    server.Post("/v1/sessions", [this](const httplib::Request&, httplib::Response& res) {
      Guard(res, [&] {
        ojson body;
        body["session_id"] = store.Create();
        SendJson(res, 201, body);
      });
    });
    server.Post(R"(/v1/sessions/([^/]+)/messages)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  Guard(res, [&] {
                    json body;
                    try {
                      body = json::parse(req.body);
                    } catch (const json::parse_error&) {
                      throw Error(ErrorCode::kInvalidArgument, "body is not valid JSON");
                    }
                    if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
                      throw Error(ErrorCode::kInvalidArgument,
                                  "body must be an object with a string \"text\"");
                    }
                    MessageReply reply = store.Post(req.matches[1], body["text"].get<std::string>());
                    SendJson(res, 200, MessageReplyToJson(reply));
                  });
                });
    server.Get(R"(/v1/sessions/([^/]+)/state)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 Guard(res, [&] { SendJson(res, 200, store.StateView(req.matches[1])); });
               });
    server.Get(R"(/v1/sessions/([^/]+)/transcript)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 Guard(res, [&] {
                   const std::string id = req.matches[1];
                   ojson body;
                   body["session_id"] = id;
                   body["turns"] = ojson::array();
                   for (const TranscriptEntry& t : store.Transcript(id)) {
                     body["turns"].push_back({{"speaker", t.speaker}, {"text", t.text}});
                   }
                   SendJson(res, 200, body);
                 });
               });
    // Unrouted paths and oversized bodies get the same error envelope.
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      const int status = res.status;
      SendError(res, status, status == 404 ? "not_found" : "bad_request",
                httplib::status_message(status));
    });
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
      spdlog::info("{} {} -> {}", req.method, req.path, res.status);
    });
  }
};

HttpService::HttpService(SessionStore& store, std::string cors_origin,
                         std::chrono::seconds sweep_interval)
    : impl_(std::make_unique<Impl>(store, std::move(cors_origin), sweep_interval)) {
  impl_->Routes();
}

HttpService::~HttpService() { Stop(); }

int HttpService::Bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::kConfig,
                "port: cannot bind " + host + ":" + std::to_string(port), "port");
  }
  return bound;
}

void HttpService::Run() {
  std::thread sweeper([this] {
    std::unique_lock lock(impl_->mu);
    while (!impl_->cv.wait_for(lock, impl_->sweep_interval, [this] { return impl_->stopping; })) {
      lock.unlock();
      impl_->store.EvictIdle();
      lock.lock();
    }
  });
  impl_->server.listen_after_bind();
  {
    std::lock_guard lock(impl_->mu);
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  sweeper.join();
}

void HttpService::Stop() {
  {
    std::lock_guard lock(impl_->mu);
    impl_->stopping = true;
  }
  impl_->cv.notify_all();
  impl_->server.stop();
}

}  // namespace hdst
