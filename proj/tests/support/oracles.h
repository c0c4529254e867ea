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

#ifndef HDST_TESTS_ORACLES_H_
#define HDST_TESTS_ORACLES_H_

// Reference implementations used to check library results. They favor
// obviousness over speed and share no code with the library beyond types.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hdst/gbt.h"
#include "hdst/metrics.h"
#include "hdst/rng.h"

namespace hdst::oracle {

using Rational = boost::multiprecision::cpp_rational;

// The exact value of a finite double.
Rational ExactValue(double d);

// True when `d` is the double nearest to `q`, ties to even.
bool IsCorrectlyRounded(double d, const Rational& q);

struct Vector {
  bool intent = false, slots = false, dont_care = false, state = false;
  std::optional<bool> human;
};

Vector BruteVector(const Turn& gold, const DstResult& pred, std::optional<bool> human);

struct Metrics {
  Rational jga, jga_dialogue, fga, aga;
  Rational slot_accuracy, intent_accuracy, f1_micro, f1_macro;
};

Metrics BruteMetrics(const std::vector<TurnPrediction>& turns);

// Names every field of `report` that is not the correctly rounded value of
// the oracle's; empty when all match.
std::string CompareReport(const MetricReport& report, const Metrics& oracle);

struct ClassCounts {
  std::string label;
  std::size_t tp = 0, fp = 0, fn = 0, support = 0;
};

// Per-label counts over the union of labels, sorted by label.
std::vector<ClassCounts> BruteConfusion(const std::vector<std::string>& gold,
                                        const std::vector<std::string>& pred);

// Random annotated gold turns and perturbed predictions.
std::vector<TurnPrediction> RandomPredictions(Rng& rng, std::size_t n_turns);

BenchmarkVector RandomVector(Rng& rng);

struct ThresholdChoice {
  std::array<int, 3> grid{};  // offsets in hundredths
  Rational macro_f1;
};

// Scans every offset triple on the 0.01 grid in [-0.5, 0.5]: maximum exact
// macro-F1, then minimum L1, then the lexicographically smallest triple.
ThresholdChoice ExhaustiveThresholds(const std::vector<ClassVector>& probabilities,
                                     const std::vector<int>& gold);

// Upper critical value of the chi-square distribution.
double ChiSquareCritical(double degrees_of_freedom, double alpha);

}  // namespace hdst::oracle

#endif  // HDST_TESTS_ORACLES_H_
