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

#include "hdst/querygen.h"

#include <algorithm>

#include "hdst/error.h"
#include "hdst/text.h"

namespace hdst {

SqlQuery BuildQuery(const IntentSchema& schema, const SlotValues& fills,
                    QueryOptions options) {
  for (const auto& [slot_id, value] : fills) {
    if (!schema.HasSlot(slot_id)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "slot \"" + slot_id + "\" not in intent \"" + schema.id +
                      "\"");
    }
  }
  SqlQuery query;
  query.text = "SELECT * FROM " + SanitizeIdentifier(schema.id);
  bool first = true;
  for (const SlotDef& slot : schema.slots) {
    if (options.mandatory_only && !slot.mandatory) continue;
    auto it = fills.find(slot.id);
    if (it == fills.end() || it->second == kAnyValue) continue;
    query.text += first ? " WHERE " : " AND ";
    query.text += SanitizeIdentifier(slot.id) + " = ?";
    query.params.push_back(it->second);
    first = false;
  }
  return query;
}

std::size_t CountPlaceholders(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '?'));
}

}  // namespace hdst
