"""Instruction-tuning record generation from corpora.

Two response modes share the same instruction and input sections:

* ``scg``      — one line per mention, trigger serialized before its type
                 (``Event trigger: T ; Event type: Y``), so the tuned model
                 must surface the causal trigger before classifying.
* ``standard`` — one line per mention carrying the type only
                 (``Event type: Y``), the direct text→type baseline.

Documents without events get the sentinel response ``None`` in both modes.
Records are deterministic for a (seed, doc_id) pair: each document draws its
template from its own rng, so generation order and parallelism cannot change
the output.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import AnnotatedDocument, Corpus, EventMention
from .parsing import EMPTY_SENTINEL
from .templates import TEMPLATE_COUNT, get_template

MODES = ("scg", "standard")

DEFAULT_DEMARCATION = ("<|instruction|>", "<|response|>")


class GenerationError(Exception):
    pass


@dataclass(frozen=True)
class SCGInstructionRecord:
    doc_id: str
    template_id: int
    instruction_text: str
    input_text: str
    response_text: str
    demarcation: tuple[str, str]
    mode: str


def render_response(events: Iterable[EventMention], mode: str) -> str:
    """Serialize gold mentions in span order (ties by type, then trigger)."""
    if mode not in MODES:
        raise GenerationError(f"unknown mode {mode!r}; expected one of {MODES}")
    ordered = sorted(events, key=lambda ev: (ev.start, ev.event_type, ev.trigger_text, ev.end))
    if not ordered:
        return EMPTY_SENTINEL
    if mode == "scg":
        lines = [
            f"Event trigger: {ev.trigger_text} ; Event type: {ev.event_type}"
            for ev in ordered
        ]
    else:
        lines = [f"Event type: {ev.event_type}" for ev in ordered]
    return "\n".join(lines)


def doc_rng(seed: int, doc_id: str) -> random.Random:
    """Per-document rng; string seeding is stable across runs and platforms."""
    return random.Random(f"{seed}:{doc_id}")


def gen_record(
    doc: AnnotatedDocument,
    mode: str,
    rng: random.Random,
    demarcation: tuple[str, str] = DEFAULT_DEMARCATION,
) -> SCGInstructionRecord:
    """Build one record: uniformly drawn template, document text, response."""
    template = get_template(rng.randint(1, TEMPLATE_COUNT))
    record = SCGInstructionRecord(
        doc_id=doc.doc_id,
        template_id=template.template_id,
        instruction_text=template.text,
        input_text=doc.text,
        response_text=render_response(doc.events, mode),
        demarcation=demarcation,
        mode=mode,
    )
    for token in demarcation:
        for section in (record.instruction_text, record.input_text, record.response_text):
            if token in section:
                raise GenerationError(
                    f"document {doc.doc_id!r}: demarcation token {token!r} occurs in "
                    f"the record body; pick different tokens"
                )
    return record


def render_training_text(record: SCGInstructionRecord) -> str:
    """One training string with each demarcation token appearing exactly once."""
    open_instruction, open_response = record.demarcation
    return (
        f"{open_instruction}{record.instruction_text}\n"
        f"{record.input_text}\n"
        f"{open_response}{record.response_text}"
    )


def record_to_json(record: SCGInstructionRecord) -> str:
    payload = {
        "instruction": record.instruction_text,
        "input": record.input_text,
        "output": record.response_text,
        "meta": {
            "doc_id": record.doc_id,
            "template_id": record.template_id,
            "mode": record.mode,
            "demarcation": list(record.demarcation),
        },
    }
    return json.dumps(payload, sort_keys=True)


def record_from_json(line: str) -> SCGInstructionRecord:
    payload = json.loads(line)
    meta = payload["meta"]
    return SCGInstructionRecord(
        doc_id=meta["doc_id"],
        template_id=meta["template_id"],
        instruction_text=payload["instruction"],
        input_text=payload["input"],
        response_text=payload["output"],
        demarcation=tuple(meta["demarcation"]),
        mode=meta["mode"],
    )


def gen_dataset(
    corpus: Corpus,
    mode: str,
    seed: int,
    out_path: str | Path,
    demarcation: tuple[str, str] = DEFAULT_DEMARCATION,
) -> dict:
    """Write one record per document plus a manifest; returns the manifest.

    Output is byte-identical for identical (corpus, mode, seed); record
    order follows corpus order.
    """
    if mode not in MODES:
        raise GenerationError(f"unknown mode {mode!r}; expected one of {MODES}")
    out_path = Path(out_path)
    count = 0
    try:
        with out_path.open("w", encoding="utf-8") as fh:
            for doc in corpus.documents:
                record = gen_record(doc, mode, doc_rng(seed, doc.doc_id), demarcation)
                fh.write(record_to_json(record) + "\n")
                count += 1
    except OSError as exc:
        raise GenerationError(f"cannot write dataset to {out_path}: {exc}") from exc

    manifest = {
        "corpus": corpus.name,
        "mode": mode,
        "seed": seed,
        "record_count": count,
        "demarcation": list(demarcation),
    }
    manifest_path = out_path.with_suffix(".manifest.json")
    try:
        manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    except OSError as exc:
        raise GenerationError(f"cannot write manifest to {manifest_path}: {exc}") from exc
    return manifest


def load_records(path: str | Path) -> list[SCGInstructionRecord]:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(record_from_json(line))
    return records
