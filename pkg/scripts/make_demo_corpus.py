#!/usr/bin/env python3
"""Author the small demo/fixture corpus used by the tests and smoke runs.

Spans are computed with str.find so the offsets in the emitted JSONL are
correct by construction. Repeated trigger words use successive occurrences.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

TYPES = ["Attack", "Movement", "Transport", "Meet", "Injure", "Die"]

# (doc_id, text, [(trigger, occurrence_index, type), ...])
TRAIN = [
    ("t1", "Troops fired at dawn near the border.", [("fired", 0, "Attack")]),
    (
        "t2",
        "Protesters marched through the capital before police arrived.",
        [("marched", 0, "Movement"), ("arrived", 0, "Movement")],
    ),
    ("t3", "The convoy transported supplies to the village.", [("transported", 0, "Transport")]),
    ("t4", "Leaders met in Geneva to discuss the ceasefire.", [("met", 0, "Meet")]),
    ("t5", "The blast injured three workers at the plant.", [("injured", 0, "Injure")]),
    (
        "t6",
        "Two soldiers died after the ambush; rebels fired again.",
        [("died", 0, "Die"), ("fired", 0, "Attack")],
    ),
    ("t7", "Markets were calm throughout the week.", []),
    (
        "t8",
        "The gang carried out a drive-by shooting after the meeting ended.",
        [("carried out", 0, "Attack"), ("meeting", 0, "Meet")],
    ),
]

TEST = [
    ("s1", "Rebels fired on the convoy at dusk.", [("fired", 0, "Attack")]),
    (
        "s2",
        "Families marched to the border and soldiers marched back.",
        [("marched", 0, "Movement"), ("marched", 1, "Movement")],
    ),
    ("s3", "A summit meeting was held in Vienna.", [("meeting", 0, "Meet")]),
    (
        "s4",
        "The earthquake injured dozens and many died.",
        [("injured", 0, "Injure"), ("died", 0, "Die")],
    ),
    ("s5", "The weather stayed quiet all day.", []),
]

DEV = [
    ("d1", "Guards fired warning shots.", [("fired", 0, "Attack")]),
    ("d2", "Diplomats met at noon.", [("met", 0, "Meet")]),
    ("d3", "The driver transported the cargo overnight.", [("transported", 0, "Transport")]),
    ("d4", "Nothing notable happened downtown.", []),
]


def nth_occurrence(text: str, needle: str, n: int) -> int:
    start = -1
    for _ in range(n + 1):
        start = text.find(needle, start + 1)
        if start < 0:
            raise SystemExit(f"{needle!r} occurrence {n} not found in {text!r}")
    return start


def to_record(doc_id: str, text: str, events) -> dict:
    out = []
    for trigger, occurrence, event_type in events:
        start = nth_occurrence(text, trigger, occurrence)
        out.append({"trigger": trigger, "span": [start, start + len(trigger)], "type": event_type})
    return {"doc_id": doc_id, "text": text, "events": out}


def write_split(rows, path: Path) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for doc_id, text, events in rows:
            fh.write(json.dumps(to_record(doc_id, text, events), sort_keys=True) + "\n")
    print(f"wrote {len(rows)} docs to {path}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="tests/data", type=Path)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_split(TRAIN, args.out_dir / "fixture.train.jsonl")
    write_split(TEST, args.out_dir / "fixture.test.jsonl")
    write_split(DEV, args.out_dir / "fixture.dev.jsonl")
    (args.out_dir / "types.txt").write_text("".join(f"{t}\n" for t in TYPES))
    print(f"wrote {len(TYPES)} types to {args.out_dir / 'types.txt'}")


if __name__ == "__main__":
    main()
