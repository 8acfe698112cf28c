"""EC / TI / TC precision, recall, and F1 over a corpus.

Matching is per document on normalized strings, by multiset min-count
intersection; totals are micro-averaged across documents. All three metrics
share the same denominators — every predicted pair counts as one prediction
and every gold mention as one gold item — so a pair true positive always
projects to a trigger and a type true positive, making TC F1 ≤ min(TI F1,
EC F1) by construction.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

from .corpus import AnnotatedDocument, Corpus
from .parsing import PredictionSet, STATUS_FAILED, normalize


class ScoringError(Exception):
    pass


@dataclass(frozen=True)
class MetricScore:
    true_positives: int
    predicted_count: int
    gold_count: int
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ScoreReport:
    ec: MetricScore
    ti: MetricScore
    tc: MetricScore
    parse_failure_count: int
    doc_count: int


def _safe_div(num: float, denom: float) -> float:
    return num / denom if denom > 0 else 0.0


def _metric(tp: int, pred: int, gold: int) -> MetricScore:
    precision = _safe_div(tp, pred)
    recall = _safe_div(tp, gold)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    return MetricScore(tp, pred, gold, precision, recall, f1)


def _gold_counters(doc: AnnotatedDocument) -> tuple[Counter, Counter, Counter]:
    triggers = Counter(normalize(ev.trigger_text) for ev in doc.events)
    types = Counter(normalize(ev.event_type) for ev in doc.events)
    pairs = Counter(
        (normalize(ev.trigger_text), normalize(ev.event_type)) for ev in doc.events
    )
    return triggers, types, pairs


def score(
    gold: Corpus,
    predictions: Mapping[str, PredictionSet],
    ec_document_level: bool = False,
) -> ScoreReport:
    """Score predictions against the gold corpus.

    Documents without a prediction count as empty predictions. A prediction
    for an unknown doc_id is an error. ``ec_document_level=True`` switches EC
    to per-document type sets (deduplicated, with its own denominators); the
    TC ≤ min(TI, EC) guarantee only holds for the default per-mention mode.
    """
    known = set(gold.doc_ids)
    for doc_id in predictions:
        if doc_id not in known:
            raise ScoringError(f"prediction for unknown doc_id {doc_id!r}")

    tp_ti = tp_ec = tp_tc = 0
    pred_total = gold_total = 0
    ec_tp = ec_pred = ec_gold = 0
    failures = 0

    empty = PredictionSet(doc_id="", pairs=(), parse_status="clean")
    for doc in gold.documents:
        ps = predictions.get(doc.doc_id, empty)
        if ps.parse_status == STATUS_FAILED:
            failures += 1
        gold_trig, gold_type, gold_pair = _gold_counters(doc)

        tp_ti += sum((gold_trig & ps.trigger_multiset()).values())
        tp_ec += sum((gold_type & ps.type_multiset()).values())
        tp_tc += sum((gold_pair & ps.pair_multiset()).values())
        pred_total += len(ps.pairs)
        gold_total += len(doc.events)

        if ec_document_level:
            gold_set = set(gold_type)
            pred_set = set(ps.type_multiset())
            ec_tp += len(gold_set & pred_set)
            ec_pred += len(pred_set)
            ec_gold += len(gold_set)

    if ec_document_level:
        ec = _metric(ec_tp, ec_pred, ec_gold)
    else:
        ec = _metric(tp_ec, pred_total, gold_total)

    return ScoreReport(
        ec=ec,
        ti=_metric(tp_ti, pred_total, gold_total),
        tc=_metric(tp_tc, pred_total, gold_total),
        parse_failure_count=failures,
        doc_count=len(gold.documents),
    )


def report_to_dict(report: ScoreReport) -> dict:
    def metric_dict(m: MetricScore) -> dict:
        return {
            "true_positives": m.true_positives,
            "predicted_count": m.predicted_count,
            "gold_count": m.gold_count,
            "precision": m.precision,
            "recall": m.recall,
            "f1": m.f1,
        }

    return {
        "ec": metric_dict(report.ec),
        "ti": metric_dict(report.ti),
        "tc": metric_dict(report.tc),
        "parse_failure_count": report.parse_failure_count,
        "doc_count": report.doc_count,
    }


def format_report_table(report: ScoreReport) -> str:
    rows = [
        ("EC", report.ec),
        ("TI", report.ti),
        ("TC", report.tc),
    ]
    lines = [
        f"{'metric':<8}{'P':>8}{'R':>8}{'F1':>8}{'TP':>7}{'pred':>7}{'gold':>7}"
    ]
    for name, m in rows:
        lines.append(
            f"{name:<8}{m.precision:>8.4f}{m.recall:>8.4f}{m.f1:>8.4f}"
            f"{m.true_positives:>7d}{m.predicted_count:>7d}{m.gold_count:>7d}"
        )
    lines.append(
        f"documents: {report.doc_count}, parse failures: {report.parse_failure_count}"
    )
    return "\n".join(lines)
