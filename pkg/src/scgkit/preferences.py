"""Preference-pair construction from model errors on the development split.

A document yields one (prompt, chosen, rejected) pair exactly when the
model's parsed response disagrees with the gold multiset. Correctness is
judged on parsed multisets after normalization, not on raw strings, so a
response that is right in substance but sloppy in formatting never becomes
a dispreferred sample with a near-zero edit distance to the chosen one.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .corpus import AnnotatedDocument, Corpus
from .instructions import (
    DEFAULT_DEMARCATION,
    MODES,
    doc_rng,
    gen_record,
    render_response,
)
from .parsing import normalize, parse_prediction


class PreferenceError(Exception):
    pass


@dataclass(frozen=True)
class PreferencePair:
    doc_id: str
    prompt: str
    chosen: str
    rejected: str


def _gold_multiset(doc: AnnotatedDocument, mode: str) -> Counter:
    if mode == "scg":
        return Counter(
            (normalize(ev.trigger_text), normalize(ev.event_type)) for ev in doc.events
        )
    return Counter(normalize(ev.event_type) for ev in doc.events)


def _predicted_multiset(pairs: tuple[tuple[str, str], ...], mode: str) -> Counter:
    # One-sided pairs stay in the multiset with an empty component: a
    # response with hallucinated extras must not compare equal to gold.
    if mode == "scg":
        return Counter((normalize(t), normalize(y)) for t, y in pairs)
    return Counter(normalize(y) for _, y in pairs)


def build_dpo_pairs(
    dev_corpus: Corpus,
    model_outputs: Mapping[str, str],
    mode: str,
    seed: int = 0,
    demarcation: tuple[str, str] = DEFAULT_DEMARCATION,
) -> list[PreferencePair]:
    """Pairs for every dev response whose parsed multiset misses gold.

    The prompt is the record's instruction+input section, regenerated
    deterministically from (seed, doc_id) the same way dataset generation
    draws it.
    """
    if mode not in MODES:
        raise PreferenceError(f"unknown mode {mode!r}; expected one of {MODES}")
    known = set(dev_corpus.doc_ids)
    for doc_id in model_outputs:
        if doc_id not in known:
            raise PreferenceError(f"model output for unknown doc_id {doc_id!r}")

    pairs: list[PreferencePair] = []
    for doc in dev_corpus.documents:
        if doc.doc_id not in model_outputs:
            continue
        raw = model_outputs[doc.doc_id]
        parsed = parse_prediction(raw, dev_corpus.type_inventory, doc.doc_id)
        if _predicted_multiset(parsed.pairs, mode) == _gold_multiset(doc, mode):
            continue
        record = gen_record(doc, mode, doc_rng(seed, doc.doc_id), demarcation)
        prompt = (
            f"{record.demarcation[0]}{record.instruction_text}\n"
            f"{record.input_text}\n{record.demarcation[1]}"
        )
        pairs.append(
            PreferencePair(
                doc_id=doc.doc_id,
                prompt=prompt,
                chosen=render_response(doc.events, mode),
                rejected=raw,
            )
        )
    return pairs


def save_dpo_pairs(pairs: list[PreferencePair], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(
                json.dumps(
                    {
                        "doc_id": pair.doc_id,
                        "prompt": pair.prompt,
                        "chosen": pair.chosen,
                        "rejected": pair.rejected,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
