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

#ifndef HDST_QUERYGEN_H_
#define HDST_QUERYGEN_H_

#include <string>
#include <vector>

#include "hdst/corpus.h"
#include "hdst/ontology.h"

namespace hdst {

// A parameterized query. User values only ever appear in `params`; `text`
// carries one positional '?' per parameter.
struct SqlQuery {
  std::string text;
  std::vector<std::string> params;
  bool operator==(const SqlQuery&) const = default;
};

struct QueryOptions {
  // Constrain on mandatory slots only, ignoring filled optional slots.
  bool mandatory_only = false;
};

// SELECT * FROM <intent> [WHERE <slot> = ? AND ...] with clauses in schema
// declaration order. Slots holding the "*" sentinel are left unconstrained.
// Throws kInvalidArgument for a fill that is not a slot of the schema.
SqlQuery BuildQuery(const IntentSchema& schema, const SlotValues& fills,
                    QueryOptions options = {});

std::size_t CountPlaceholders(const std::string& text);

}  // namespace hdst

#endif  // HDST_QUERYGEN_H_
