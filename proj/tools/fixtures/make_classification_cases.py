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
"""Writes tests/data/classification_cases.json with scikit-learn reference values.

Each case stores gold and predicted labels plus accuracy, micro/macro F1
and per-class precision, recall, F1 and support over the union of labels
(zero_division=0).
"""

import json
import pathlib
import random

from sklearn.metrics import accuracy_score, f1_score, precision_recall_fscore_support

ROOT = pathlib.Path(__file__).resolve().parents[2]


def cases():
    yield "two_class_example", list("AABB"), list("ABBB")
    yield "perfect", ["x", "y", "z", "x"], ["x", "y", "z", "x"]
    yield "single_class_perfect", ["only"] * 5, ["only"] * 5
    yield "all_wrong", ["a", "a", "b"], ["b", "b", "a"]
    yield "pred_only_class", ["a", "a", "b", "b"], ["a", "c", "b", "c"]
    yield "gold_only_class", ["a", "b", "c", "c"], ["a", "b", "a", "b"]
    yield "verdicts_imbalanced", (["confirmed"] * 30 + ["ambiguous"] * 3 + ["unclear"] * 2), (
        ["confirmed"] * 28 + ["ambiguous", "unclear"] + ["ambiguous", "confirmed", "confirmed"]
        + ["unclear", "confirmed"])
    yield "none_label", ["get_weather", "find_hotel", "find_hotel"], ["<none>", "find_hotel",
                                                                        "get_weather"]
    rng = random.Random(20261018)
    for n, k, name in [(20, 3, "random_20x3"), (57, 5, "random_57x5"), (200, 7, "random_200x7"),
                       (1, 2, "one_sample_wrong")]:
        labels = [f"c{i}" for i in range(k)]
        gold = [rng.choice(labels) for _ in range(n)]
        pred = [g if rng.random() < 0.6 else rng.choice(labels) for g in gold]
        if name == "one_sample_wrong":
            gold, pred = ["c0"], ["c1"]
        yield name, gold, pred


def main():
    out = []
    for name, gold, pred in cases():
        labels = sorted(set(gold) | set(pred))
        p, r, f, s = precision_recall_fscore_support(gold, pred, labels=labels, zero_division=0)
        out.append({
            "name": name,
            "gold": gold,
            "pred": pred,
            "accuracy": accuracy_score(gold, pred),
            "f1_micro": f1_score(gold, pred, average="micro", zero_division=0),
            "f1_macro": f1_score(gold, pred, average="macro", zero_division=0),
            "per_class": {lab: {"precision": float(p[i]), "recall": float(r[i]),
                                "f1": float(f[i]), "support": int(s[i])}
                          for i, lab in enumerate(labels)},
        })
    path = ROOT / "tests" / "data" / "classification_cases.json"
    path.write_text(json.dumps({"cases": out}, indent=1) + "\n")
    print(f"wrote {len(out)} cases to {path}")


if __name__ == "__main__":
    main()
