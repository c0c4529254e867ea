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

#ifndef HDST_RNG_H_
#define HDST_RNG_H_

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace hdst {

// SplitMix64 finalizer. Used to derive independent streams from a seed.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t MixSeeds(std::uint64_t a, std::uint64_t b) {
  return Mix64(a ^ Mix64(b + 0x632be59bd9b4e019ULL));
}

// 64-bit FNV-1a.
std::uint64_t Fnv1a64(std::string_view bytes);
std::string Fnv1a64Hex(std::string_view bytes);

// Seedable generator. Output is identical across platforms: only the
// engine's raw output is used, never std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(Mix64(seed)) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t Below(std::uint64_t n);

  bool Bernoulli(double p) { return Uniform() < p; }

  // Standard normal via Box-Muller.
  double Normal();

  // A child generator whose stream does not overlap ours in practice.
  Rng Split() { return Rng(MixSeeds(engine_(), 0x5851f42d4c957f2dULL)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hdst

#endif  // HDST_RNG_H_
