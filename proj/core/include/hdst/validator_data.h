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

#ifndef HDST_VALIDATOR_DATA_H_
#define HDST_VALIDATOR_DATA_H_

#include <array>
#include <cstdint>
#include <vector>

#include "hdst/corpus.h"
#include "hdst/gbt.h"
#include "hdst/nlu.h"
#include "hdst/ontology.h"
#include "hdst/validator.h"

namespace hdst {

struct DatasetOptions {
  // Probability that a label is replaced by a uniformly chosen other class.
  double label_noise = 0.0;
  std::uint64_t seed = 0;
  RuleThresholds thresholds;
};

// One sample per user turn: features from running `nlu` over the dialogue
// (schedule lines annotated with gold intents), labeled by the rule
// classifier, then perturbed by label noise.
std::vector<LabeledSample> BuildValidatorDataset(const Corpus& corpus,
                                                 const Ontology& ontology,
                                                 const NluBackend& nlu,
                                                 const DatasetOptions& options);

// Synthetic score histories with class proportions `mix` (confirmed,
// ambiguous, unclear). Each label is the rule verdict under thresholds
// jittered per sample, so classes overlap only near the rule boundaries.
std::vector<LabeledSample> SyntheticValidatorDataset(std::size_t n,
                                                     std::array<double, 3> mix,
                                                     std::uint64_t seed,
                                                     int n_intents = 8);

std::array<std::size_t, 3> LabelCounts(std::span<const LabeledSample> data);

}  // namespace hdst

#endif  // HDST_VALIDATOR_DATA_H_
