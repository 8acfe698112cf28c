"""Parsing of raw model responses into prediction multisets.

The canonical response grammar (the exact inverse of what dataset generation
renders) is:

    response       = "None" | line (NL line)*
    line           = pair-line | type-line
    pair-line      = "Event trigger: " trigger " ; Event type: " type
    type-line      = "Event type: " type

Responses matching this grammar parse with status ``clean``. Anything else
goes through a recovery pass that scans each line for ``trigger``/``type``
labeled segments (status ``recovered``); if nothing is extractable the result
is empty with status ``failed``. Parsing never raises — failures are data,
and scoring treats them as empty predictions.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

STATUS_CLEAN = "clean"
STATUS_RECOVERED = "recovered"
STATUS_FAILED = "failed"

EMPTY_SENTINEL = "None"

_CANONICAL_PAIR = re.compile(r"^Event trigger:\s*(.+?)\s*;\s*Event type:\s*(.+?)\s*$")
_CANONICAL_TYPE_ONLY = re.compile(r"^Event type:\s*(.+?)\s*$")

# Recovery: "trigger"/"type" label words followed by a separator. A value
# runs from its separator to the next label or fragment boundary.
_RECOVER_LABEL = re.compile(r"(?i)\b(trigger|type)s?\b\s*[:\-=]\s*")

_WS_RUN = re.compile(r"\s+")


def normalize(s: str) -> str:
    """Lowercase, trim, and collapse whitespace runs; idempotent."""
    return _WS_RUN.sub(" ", s.strip()).lower()


@dataclass(frozen=True)
class PredictionSet:
    """Parsed (trigger, type) pairs for one document.

    Either side of a pair may be empty when the response only named the
    other; the multiset accessors drop empty sides so scoring never counts
    an absent trigger or type. Types are re-cased to the inventory when they
    match it case-insensitively; the rest are kept and listed in
    ``unknown_types`` so hallucinated labels still cost precision.
    """

    doc_id: str
    pairs: tuple[tuple[str, str], ...]
    parse_status: str
    unknown_types: tuple[str, ...] = ()

    def trigger_multiset(self) -> Counter:
        return Counter(normalize(t) for t, _ in self.pairs if t)

    def type_multiset(self) -> Counter:
        return Counter(normalize(y) for _, y in self.pairs if y)

    def pair_multiset(self) -> Counter:
        return Counter(
            (normalize(t), normalize(y)) for t, y in self.pairs if t and y
        )


def _canonicalize_type(raw_type: str, inventory_map: dict[str, str]) -> tuple[str, bool]:
    key = normalize(raw_type)
    if key in inventory_map:
        return inventory_map[key], True
    return raw_type.strip(), False


def _labeled_values(line: str) -> list[tuple[str, str]]:
    """Extract (label, value) runs across a line, in order of appearance."""
    values: list[tuple[str, str]] = []
    for fragment in re.split(r"[;|]", line):
        matches = list(_RECOVER_LABEL.finditer(fragment))
        for i, m in enumerate(matches):
            end = matches[i + 1].start() if i + 1 < len(matches) else len(fragment)
            value = fragment[m.end() : end].strip()
            # Drop a dangling "event" that belongs to the next label
            # ("... fired event type: ...") and trailing punctuation.
            value = re.sub(r"(?i)[\s,]*\bevent\s*$", "", value)
            value = value.strip().strip(".,").strip()
            if value:
                values.append((m.group(1).lower(), value))
    return values


def _recover_line(line: str) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = []
    pending_trigger: str | None = None
    for label, value in _labeled_values(line):
        if label == "trigger":
            if pending_trigger is not None:
                pairs.append((pending_trigger, ""))
            pending_trigger = value
        else:
            pairs.append((pending_trigger or "", value))
            pending_trigger = None
    if pending_trigger is not None:
        pairs.append((pending_trigger, ""))
    return pairs


def parse_prediction(
    raw: str, type_inventory: Iterable[str], doc_id: str = ""
) -> PredictionSet:
    """Parse one raw model response. Never raises."""
    inventory_map = {normalize(t): t for t in type_inventory}
    stripped = raw.strip()

    if stripped == EMPTY_SENTINEL:
        return PredictionSet(doc_id, (), STATUS_CLEAN)

    lines = [ln for ln in stripped.splitlines() if ln.strip()]

    clean_pairs: list[tuple[str, str]] = []
    all_clean = bool(lines)
    for line in lines:
        m = _CANONICAL_PAIR.match(line.strip())
        if m:
            clean_pairs.append((m.group(1), m.group(2)))
            continue
        m = _CANONICAL_TYPE_ONLY.match(line.strip())
        if m:
            clean_pairs.append(("", m.group(1)))
            continue
        all_clean = False
        break

    if all_clean:
        pairs, unknown = _apply_inventory(clean_pairs, inventory_map)
        return PredictionSet(doc_id, pairs, STATUS_CLEAN, unknown)

    recovered: list[tuple[str, str]] = []
    saw_sentinel = False
    for line in lines:
        if normalize(line).rstrip(".") == "none":
            saw_sentinel = True
            continue
        recovered.extend(_recover_line(line))

    if recovered:
        pairs, unknown = _apply_inventory(recovered, inventory_map)
        return PredictionSet(doc_id, pairs, STATUS_RECOVERED, unknown)
    if saw_sentinel:
        return PredictionSet(doc_id, (), STATUS_RECOVERED)
    return PredictionSet(doc_id, (), STATUS_FAILED)


def _apply_inventory(
    pairs: list[tuple[str, str]], inventory_map: dict[str, str]
) -> tuple[tuple[tuple[str, str], ...], tuple[str, ...]]:
    out: list[tuple[str, str]] = []
    unknown: list[str] = []
    for trig, typ in pairs:
        if typ:
            typ, known = _canonicalize_type(typ, inventory_map)
            if not known:
                unknown.append(typ)
        out.append((trig.strip(), typ))
    return tuple(out), tuple(unknown)


def prediction_to_record(ps: PredictionSet) -> dict:
    return {
        "doc_id": ps.doc_id,
        "pairs": [[t, y] for t, y in ps.pairs],
        "parse_status": ps.parse_status,
        "unknown_types": list(ps.unknown_types),
    }


def prediction_from_record(record: dict) -> PredictionSet:
    return PredictionSet(
        doc_id=record["doc_id"],
        pairs=tuple((t, y) for t, y in record["pairs"]),
        parse_status=record["parse_status"],
        unknown_types=tuple(record.get("unknown_types", ())),
    )


def save_predictions(predictions: Iterable[PredictionSet], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for ps in predictions:
            fh.write(json.dumps(prediction_to_record(ps), sort_keys=True) + "\n")


def load_predictions(path: str | Path) -> dict[str, PredictionSet]:
    out: dict[str, PredictionSet] = {}
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                ps = prediction_from_record(json.loads(line))
                out[ps.doc_id] = ps
    return out
