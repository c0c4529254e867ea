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

#ifndef HDST_ERROR_H_
#define HDST_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdst {

enum class ErrorCode {
  kSyntax,             // document is not well-formed
  kSemantic,           // well-formed but violates a schema rule
  kAnnotation,         // corpus annotation rule violated
  kInvalidArgument,
  kNotFound,
  kPrecondition,
  kUnavailable,        // transport failure talking to a backend
  kTimeout,
  kHttpStatus,         // backend answered with a non-success status
  kMalformedResponse,  // backend answered with an unusable body
  kParse,              // structured model output could not be parsed
  kMissingKey,
  kInvariant,
  kDimensionMismatch,
  kConfig,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported with this exception type. `rule` is a
// stable machine-readable identifier of the violated rule where one exists
// (corpus annotation errors, config checks), empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string rule = {})
      : std::runtime_error(message), code_(code), rule_(std::move(rule)) {}

  ErrorCode code() const { return code_; }
  const std::string& rule() const { return rule_; }

 private:
  ErrorCode code_;
  std::string rule_;
};

}  // namespace hdst

#endif  // HDST_ERROR_H_
