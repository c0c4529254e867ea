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

#include <gtest/gtest.h>

#include <set>

#include "hdst/rng.h"
#include "hdst/text.h"

namespace hdst {
namespace {

TEST(NormalizeText, FoldsCaseArabicLettersAndSpace) {
  EXPECT_EQ(NormalizeText("  Weather   IN\tTehran "), "weather in tehran");
  // Arabic yeh and kaf fold to their Persian forms.
  EXPECT_EQ(NormalizeText("\xd9\x8a"), "\xdb\x8c");
  EXPECT_EQ(NormalizeText("\xd9\x83"), "\xda\xa9");
  // ZWNJ becomes a space.
  EXPECT_EQ(NormalizeText("می\xe2\x80\x8cخواهم"), "می خواهم");
}

TEST(FindPhrase, MatchesOnlyAtTokenBoundaries) {
  EXPECT_EQ(FindPhrase("weather in tehran", "tehran"), 11u);
  EXPECT_FALSE(FindPhrase("weathering", "weather").has_value());
  EXPECT_FALSE(FindPhrase("the rain", "rai").has_value());
  EXPECT_EQ(FindPhrase("rain", "rain"), 0u);
}

TEST(IsValidUtf8, RejectsMalformedSequences) {
  EXPECT_TRUE(IsValidUtf8("hello سلام"));
  EXPECT_FALSE(IsValidUtf8("\xc3"));
  EXPECT_FALSE(IsValidUtf8("\xc0\xaf"));      // overlong
  EXPECT_FALSE(IsValidUtf8("\xed\xa0\x80"));  // surrogate
  EXPECT_FALSE(IsValidUtf8("\xe0\x80\xaf"));  // overlong, 3 bytes
  EXPECT_FALSE(IsValidUtf8("\xf4\x90\x80\x80"));  // past U+10FFFF
  EXPECT_TRUE(IsValidUtf8("\xf0\x9f\x98\x80"));
}

TEST(SanitizeIdentifier, MapsToLowercaseIdentifierAlphabet) {
  EXPECT_EQ(SanitizeIdentifier("Find-Restaurant 2"), "find_restaurant_2");
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.NextU64();
    EXPECT_EQ(x, b.NextU64());
    differs |= x != c.NextU64();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
  Rng rng(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.Below(6);
    ASSERT_LT(v, 6u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Fnv1a64, KnownVectors) {
  // Reference values of the 64-bit FNV-1a function.
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64Hex("a"), "af63dc4c8601ec8c");
}

}  // namespace
}  // namespace hdst
