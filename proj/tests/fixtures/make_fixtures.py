#!/usr/bin/env python3
"""Regenerates the JSONL fixtures under tests/fixtures. Output is deterministic."""
import json
import math
import random
import re
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))


def dump(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def golden():
    texts = {}
    exec((HERE / "golden_texts.py").read_text(encoding="utf-8"), texts)
    rows = [
        {"id": "5a7322a25542991f9a20c634", "question": texts["q1"], "context": texts["c1"],
         "style": "extractive", "split": "dev", "supporting_fact_count": 2,
         "answers": [{"text": "The Metropolitan Life Insurance Company Tower", "answer_start": 0}]},
        {"id": "5a72bd0b5542992359bc318f", "question": texts["q2"], "context": texts["c2"],
         "style": "extractive", "split": "dev", "supporting_fact_count": 3,
         "answers": [{"text": "Mark Hoplamazian", "answer_start": texts["c2"].find("Mark Hoplamazian")}]},
    ]
    dump(HERE / "golden_hotpot.jsonl", rows)


SUBJECTS = ["The river", "A small museum", "The old bridge", "Her first novel", "The city council",
            "A local bakery", "The research team", "His younger brother", "The northern railway",
            "An early manuscript", "The orchestra", "A wooden chapel"]
VERBS = ["was built", "was founded", "was restored", "opened", "was renamed", "moved", "expanded", "closed"]
PLACES = ["near the harbor", "in the valley", "after the war", "before the flood", "beside the market",
          "north of Lisbon", "in central Ohio", "under royal charter"]
EXTRAS = ["because funding ran out", "although critics disagreed", "and therefore attracted visitors",
          "but it was not finished", "while the mayor was away", "since it had no owner", "",
          "or so the records claim", "if the dates are right"]


def sentence(rng):
    s = f"{rng.choice(SUBJECTS)} {rng.choice(VERBS)} {rng.choice(PLACES)} in {rng.randint(1700, 2020)}"
    extra = rng.choice(EXTRAS)
    if extra:
        s += ", " + extra
    if rng.random() < 0.3:
        s += f", with {rng.randint(2, 4000)} members"
    return s + "."


def pipeline():
    rng = random.Random(20240607)
    corpus, features = [], []
    for i in range(64):
        sid = f"p{i:03d}"
        ctx = " ".join(sentence(rng) for _ in range(rng.randint(2, 7)))
        first = ctx.split(".")[0]
        words = first.split()
        q = rng.choice(["When", "Where", "Why", "How often"]) + " " + " ".join(words[:rng.randint(3, len(words))]).lower() + "?"
        q = q[0].upper() + q[1:]
        ans = words[-1]
        corpus.append({"id": sid, "question": q, "context": ctx, "style": "extractive",
                       "split": "train" if i < 48 else "dev", "supporting_fact_count": rng.randint(1, 4),
                       "answers": [{"text": ans, "answer_start": ctx.find(ans)}]})
        features.append({"sample_id": sid, "values": {
            "tree_height": rng.randint(4, 18), "tree_width": rng.randint(3, 30),
            "bertscore": round(rng.uniform(0.6, 0.95), 4), "moverscore": round(rng.uniform(0.4, 0.7), 4),
            "ls_score": round(rng.uniform(0.1, 0.9), 4)}})
    perf = []
    for row in corpus[48:]:
        f1 = round(rng.choice([0.0, 0.25, 0.5, 0.8, 1.0]), 2)
        perf.append({"sample_id": row["id"], "style": "extractive", "f1": f1,
                     "slog": round(math.exp(rng.uniform(0.5, 3.0)), 4),
                     "elog": round(math.exp(rng.uniform(0.5, 3.0)), 4)})
    out = HERE / "pipeline"
    dump(out / "corpus.jsonl", corpus)
    dump(out / "features.jsonl", features)
    dump(out / "perf.jsonl", perf)
    (out / "curriculum.json").write_text(json.dumps(
        {"gamma": 1.5, "pace_iterations": 100, "k": 8, "initial_fraction": 0.125, "seed": 11,
         "value_view": "rescaled"}, indent=2) + "\n")


def distribution():
    v1 = [0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95]
    v2 = [0.5] * 10
    v3 = [0.1] * 5 + [0.9] * 5
    v4 = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 0.199, 0.399, 0.599, 0.799]
    f1 = [0.1, 0.3, 0.5, 0.7, 0.9, 0.1, 0.3, 0.5, 0.7, 1.0]
    candlog = [math.e] * 9 + [math.exp(1.5)]
    scores, perf = [], []
    for i in range(10):
        row = [v1[i], v2[i], v3[i], v4[i]]
        scores.append({"sample_id": f"d{i}", "split": "dev", "raw_v": row, "rescaled_v": row})
        perf.append({"sample_id": f"d{i}", "style": "multiple_choice", "f1": f1[i], "candlog": candlog[i]})
    dump(HERE / "distribution" / "scores.jsonl", scores)
    dump(HERE / "distribution" / "perf.jsonl", perf)


if __name__ == "__main__":
    golden()
    pipeline()
    distribution()
