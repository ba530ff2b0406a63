"""Builds cache.ndjson and expected_table.csv for the replay fixture.

Usage: python3 make_cache.py PROMPTGEN_RUN_DIR

The prompt run comes from
  annimpute promptgen --data tests/data/replay --imputed tests/data/replay/imputed.csv \
    --condition original_only combined imputed_only --skeleton orig_1 combined imputed_2 \
    --version v0.0.0.-1.1 --annotators 10 --description "Synthetic items rated 0 to 4." \
    --dataset-name replay --out RUN_DIR
The scores are computed with scikit-learn, independently of the C++ code.
"""
import hashlib
import json
import sys
from pathlib import Path

from sklearn.metrics import f1_score

MODEL = "gpt-3.5-turbo"
TEMPERATURE = 0.0
INVALID = -(2**31)

here = Path(__file__).resolve().parent
prompts = Path(sys.argv[1]) / "prompts"
index = [json.loads(line) for line in (prompts / "index.ndjson").read_text().splitlines()]


def digest(text):
    key = json.dumps([text, MODEL, TEMPERATURE], separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(key.encode("utf-8")).hexdigest()


def response(k, truth):
    kind = k % 5
    if kind in (0, 1):
        return f" {truth}\n", truth
    if kind == 2:
        wrong = (truth + 1 + k % 3) % 5
        return str(wrong), wrong
    if kind == 3:
        return "The annotator would answer 2.", INVALID
    return f"{(truth + 2) % 5}", (truth + 2) % 5


records, groups = [], {}
for k, entry in enumerate(index):
    text = (prompts / entry["file"]).read_text(encoding="utf-8")
    raw, parsed = response(k, entry["truth"])
    records.append({"prompt_hash": digest(text), "model": MODEL, "temperature": TEMPERATURE,
                    "raw_response": raw, "timestamp": "2024-01-01T00:00:00Z"})
    key = (entry["condition"], entry["skeleton"], entry["version"])
    groups.setdefault(key, ([], []))
    groups[key][0].append(parsed)
    groups[key][1].append(entry["truth"])

with open(here / "cache.ndjson", "w") as out:
    for r in records:
        out.write(json.dumps(r, separators=(",", ":"), ensure_ascii=False) + "\n")

best = {}
for (condition, skeleton, version), (pred, truth) in sorted(groups.items()):
    f1 = f1_score(truth, pred, average="weighted", zero_division=0)
    if condition not in best or f1 > best[condition][0]:
        best[condition] = (f1, skeleton, version)

with open(here / "expected_table.csv", "w") as out:
    out.write("condition,best_f1,best_skeleton,best_version\n")
    for condition in sorted(best, key=["combined", "original_only", "imputed_only"].index):
        f1, skeleton, version = best[condition]
        out.write(f"{condition},{f1!r},{skeleton},{version}\n")
