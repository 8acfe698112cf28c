"""Dataset-complexity report: four per-corpus statistics and their L2 norm.

The composite score combines average token length (document size), triggers
per document (event density), event-type count (classification breadth), and
the multi-word trigger ratio (mention complexity):

    c = sqrt(atl^2 + tpd^2 + et^2 + mtr^2)

Token counts use whitespace tokenization so the numbers are reproducible
without pinning a tokenizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import Corpus
from .parsing import normalize


class ComplexityError(Exception):
    pass


@dataclass(frozen=True)
class ComplexityReport:
    atl: float
    tpd: float
    et: int
    mtr: float
    c: float


def complexity_from_metrics(atl: float, tpd: float, et: float, mtr: float) -> float:
    for name, value in (("atl", atl), ("tpd", tpd), ("et", et), ("mtr", mtr)):
        if value < 0:
            raise ComplexityError(f"{name} must be non-negative, got {value}")
    return math.hypot(atl, tpd, et, mtr)


def _is_multiword(trigger_text: str) -> bool:
    return " " in normalize(trigger_text)


def complexity_from_corpus(corpus: Corpus) -> ComplexityReport:
    """Compute the four statistics and the composite score for a corpus."""
    if not corpus.documents:
        raise ComplexityError(f"corpus {corpus.name!r} is empty")
    doc_count = len(corpus.documents)
    token_total = sum(len(doc.text.split()) for doc in corpus.documents)
    triggers = [ev for doc in corpus.documents for ev in doc.events]
    multiword = sum(1 for ev in triggers if _is_multiword(ev.trigger_text))

    atl = token_total / doc_count
    tpd = len(triggers) / doc_count
    et = len(corpus.type_inventory)
    mtr = (multiword / len(triggers)) if triggers else 0.0
    return ComplexityReport(
        atl=atl,
        tpd=tpd,
        et=et,
        mtr=mtr,
        c=complexity_from_metrics(atl, tpd, et, mtr),
    )
