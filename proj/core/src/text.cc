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

#include "hdst/text.h"

#include <cstdint>
#include <fstream>
#include <sstream>

#include "hdst/error.h"

namespace hdst {
namespace {

// UTF-8 encodings of characters folded during normalization.
constexpr std::string_view kArabicYeh = "\xD9\x8A";     // U+064A
constexpr std::string_view kPersianYeh = "\xDB\x8C";    // U+06CC
constexpr std::string_view kArabicKaf = "\xD9\x83";     // U+0643
constexpr std::string_view kPersianKeheh = "\xDA\xA9";  // U+06A9
constexpr std::string_view kZwnj = "\xE2\x80\x8C";      // U+200C

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Word characters for boundary purposes: ASCII alphanumerics and any byte of
// a multi-byte UTF-8 sequence (Persian letters are separated by spaces or
// punctuation, never glued to ASCII).
bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}

}  // namespace

std::string NormalizeText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size();) {
    const std::string_view rest = text.substr(i);
    std::string_view replacement;
    std::size_t consumed = 1;
    bool space = false;
    if (rest.starts_with(kArabicYeh)) {
      replacement = kPersianYeh;
      consumed = kArabicYeh.size();
    } else if (rest.starts_with(kArabicKaf)) {
      replacement = kPersianKeheh;
      consumed = kArabicKaf.size();
    } else if (rest.starts_with(kZwnj)) {
      space = true;
      consumed = kZwnj.size();
    } else if (IsSpace(static_cast<unsigned char>(text[i]))) {
      space = true;
    }
    if (space) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      if (!replacement.empty()) {
        out.append(replacement);
      } else {
        char c = text[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        out.push_back(c);
      }
    }
    i += consumed;
  }
  return out;
}

std::optional<std::size_t> FindPhrase(std::string_view text,
                                      std::string_view phrase) {
  if (phrase.empty()) return std::nullopt;
  std::size_t pos = text.find(phrase);
  while (pos != std::string_view::npos) {
    const std::size_t end = pos + phrase.size();
    const bool left_ok =
        pos == 0 || !IsWordByte(static_cast<unsigned char>(text[pos - 1])) ||
        !IsWordByte(static_cast<unsigned char>(phrase.front()));
    const bool right_ok =
        end == text.size() ||
        !IsWordByte(static_cast<unsigned char>(text[end])) ||
        !IsWordByte(static_cast<unsigned char>(phrase.back()));
    if (left_ok && right_ok) return pos;
    pos = text.find(phrase, pos + 1);
  }
  return std::nullopt;
}

bool IsValidUtf8(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len;
    if (c < 0x80) {
      len = 1;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      len = 4;
    } else {
      return false;
    }
    if (i + len > text.size()) return false;
    std::uint32_t cp = len == 1 ? c : c & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3F);
    }
    // Overlong forms, surrogates, and values past U+10FFFF.
    if ((len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
    if ((cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) return false;
    i += len;
  }
  return true;
}

std::string SanitizeIdentifier(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    out.push_back(ok ? c : '_');
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace hdst
