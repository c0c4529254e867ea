# Copyright 2026 The Hybrid DST Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes tests/data/negative/<rule>.json: one invalid corpus per rule code.

Each corpus is a copy of a small valid corpus with a single defect, so the
validator must report exactly that rule.
"""

import copy
import json
import pathlib
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parents[2]
OUT = ROOT / "tests" / "data" / "negative"


def checksum():
    corpus = json.loads((ROOT / "data" / "corpus_50.json").read_text(encoding="utf-8"))
    return corpus["ontology_checksum"]


def user(text, intent, slots, state, dont_care=(), shift=False):
    turn = {"speaker": "user", "text": text, "intent": intent, "slots": slots,
            "dont_care": list(dont_care), "state": state}
    if shift:
        turn["shift"] = True
    return turn


def system(text):
    return {"speaker": "system", "text": text}


def base(rule):
    turns = [
        user("place for dinner in Shiraz", "find_restaurant", {"city": "Shiraz"},
             {"city": "Shiraz"}),
        system("What kind of food would you like?"),
        user("whatever", "find_restaurant", {}, {"city": "Shiraz", "cuisine": "kebab"},
             dont_care=["cuisine"]),
        system("Anything else?"),
        user("weather tomorrow", "get_weather", {"date": "tomorrow"},
             {"city": "Shiraz", "date": "tomorrow"}, shift=True),
    ]
    return {"ontology_checksum": checksum(),
            "dialogues": [{"id": "neg-" + rule, "turns": turns}]}


def mutate(rule, corpus):
    d = corpus["dialogues"][0]
    t = d["turns"]
    if rule == "schema":
        del d["turns"]
    elif rule == "checksum_mismatch":
        corpus["ontology_checksum"] = "0000000000000000"
    elif rule == "duplicate_dialogue_id":
        corpus["dialogues"].append(copy.deepcopy(d))
    elif rule == "no_user_turn":
        d["turns"] = []
    elif rule == "turn_order":
        t.insert(1, copy.deepcopy(t[0]))
    elif rule == "system_turn_annotated":
        t[1]["intent"] = "find_restaurant"
    elif rule == "missing_annotation":
        del t[2]["intent"]
    elif rule == "unknown_intent":
        t[0]["intent"] = "order_pizza"
    elif rule == "special_gold_intent":
        t[2]["intent"] = "dont_care"
    elif rule == "unknown_slot":
        t[0]["slots"]["airline"] = "Iran Air"
    elif rule == "value_not_in_ontology":
        t[0]["slots"]["city"] = "Atlantis"
        t[0]["state"]["city"] = "Atlantis"
    elif rule == "dont_care_overlap":
        t[2]["slots"]["cuisine"] = "kebab"
    elif rule == "slots_not_in_state":
        t[0]["slots"]["price"] = "cheap"
    elif rule == "intent_change_without_shift":
        del t[4]["shift"]
    elif rule == "non_monotone_state":
        t[2]["state"] = {"cuisine": "kebab"}
    elif rule == "inconsistent_state":
        t[2]["state"]["price"] = "cheap"
    else:
        raise ValueError(rule)
    return corpus


RULES = [
    "schema", "checksum_mismatch", "duplicate_dialogue_id", "no_user_turn",
    "turn_order", "system_turn_annotated", "missing_annotation", "unknown_intent",
    "special_gold_intent", "unknown_slot", "value_not_in_ontology", "dont_care_overlap",
    "slots_not_in_state", "intent_change_without_shift", "non_monotone_state",
    "inconsistent_state",
]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for rule in RULES:
        corpus = mutate(rule, base(rule))
        path = OUT / (rule + ".json")
        path.write_text(json.dumps(corpus, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    valid = OUT.parent / "valid_small.json"
    valid.write_text(json.dumps(base("valid"), ensure_ascii=False, indent=1) + "\n",
                     encoding="utf-8")
    if len(sys.argv) > 1:  # optional path to the CLI for a quick self-check
        for rule in RULES:
            r = subprocess.run([sys.argv[1], "validate-corpus", str(OUT / (rule + ".json"))],
                               capture_output=True, text=True)
            print(rule, r.returncode, r.stderr.strip())


if __name__ == "__main__":
    main()
