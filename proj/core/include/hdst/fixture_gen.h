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

#ifndef HDST_FIXTURE_GEN_H_
#define HDST_FIXTURE_GEN_H_

#include <cstdint>

#include "hdst/corpus.h"
#include "hdst/nlu.h"
#include "hdst/ontology.h"

namespace hdst {

// Synthesizes a corpus whose user turns are built from the lexicon's trigger
// phrases and gazetteers: an opening request, follow-up answers (some of
// them don't-care replies), value corrections and at most one intent shift
// per dialogue. Byte-identical output for identical arguments.
Corpus GenerateCorpus(const Ontology& ontology, const LexiconRules& lexicon,
                      std::size_t dialogues, std::uint64_t seed);

}  // namespace hdst

#endif  // HDST_FIXTURE_GEN_H_
