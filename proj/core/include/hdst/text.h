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

#ifndef HDST_TEXT_H_
#define HDST_TEXT_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace hdst {

// Canonical form used for lexical matching: ASCII letters lowercased,
// Arabic yeh/kaf folded to their Persian forms, ZWNJ and runs of whitespace
// collapsed to a single space, leading/trailing space removed.
std::string NormalizeText(std::string_view text);

// Finds `phrase` in `text` (both already normalized) at token boundaries.
// Returns the byte offset of the first occurrence.
std::optional<std::size_t> FindPhrase(std::string_view text,
                                      std::string_view phrase);

// True when every byte sequence in `text` is valid UTF-8.
bool IsValidUtf8(std::string_view text);

// Lowercase and replace everything outside [a-z0-9_] with '_'.
std::string SanitizeIdentifier(std::string_view text);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view content);

}  // namespace hdst

#endif  // HDST_TEXT_H_
