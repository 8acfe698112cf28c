"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Each criterion asserts its stated tolerance and runtime budget.
"""

import random
import time
from collections import Counter
from contextlib import contextmanager
from dataclasses import replace

import numpy as np
import pytest

from scgkit.ablation import (
    STATUS_ACCEPTED,
    STATUS_EXHAUSTED,
    ablate_corpus,
    verify_triggers_preserved,
)
from scgkit.complexity import complexity_from_metrics
from scgkit.corpus import AnnotatedDocument, Corpus, EventMention
from scgkit.embeddings import EmbeddingIndex, HashEmbedder, build_index, top_k_cosine
from scgkit.gateway import MockTransport, ProviderConfig, batch_infer
from scgkit.graph import (
    EDGE_ENDPOINT_MISMATCH,
    MISSING_TYPE_EDGE,
    MULTIPLE_TYPE_EDGES,
    NODE_CLASS_OVERLAP,
    TRIGGER_CYCLE,
    ContextNode,
    SemanticCausalGraph,
    TypeNode,
    causal_subgraph,
    validate,
)
from scgkit.instructions import gen_dataset, render_response
from scgkit.parsing import PredictionSet, parse_prediction
from scgkit.preferences import build_dpo_pairs
from scgkit.prompting import RagSelector, build_prompt, render_prompt, target_text_from_prompt
from scgkit.scoring import score

from conftest import make_random_valid_graph

MOCK_CONFIG = ProviderConfig(endpoint="mock://local", model="mock", backoff_base=0.0)

no_sleep = lambda _: None


@contextmanager
def criterion(number: int, name: str, budget_s: float):
    started = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[criterion {number}] {name}: FAIL")
        raise
    elapsed = time.perf_counter() - started
    assert elapsed < budget_s, f"criterion {number} took {elapsed:.2f}s >= {budget_s}s"
    print(f"[criterion {number}] {name}: PASS ({elapsed:.2f}s < {budget_s:.0f}s)")


def test_criterion_1_complexity_reproduction():
    rows = [
        ("M2E2", 30.33, 1.03, 8, 0.04, 31.38),
        ("FewEvent", 35.55, 1.00, 100, 0.14, 106.14),
        ("MAVEN", 29.94, 2.48, 168, 0.04, 170.67),
        ("MLEE", 301.72, 23.65, 29, 0.07, 304.03),
        ("CASIE", 316.62, 5.81, 5, 0.69, 316.71),
    ]
    with criterion(1, "complexity reproduction", 1.0):
        for name, atl, tpd, et, mtr, expected in rows:
            got = complexity_from_metrics(atl, tpd, et, mtr)
            assert abs(got - expected) <= 0.01, (name, got, expected)


TRIGGER_POOL = ("kill", "march", "meet", "leave", "crash")
TYPE_POOL = ("Attack", "Movement", "Transport", "Meet", "Injure")


def _random_scored_pair(rng: random.Random):
    docs, preds = [], {}
    for i in range(rng.randint(1, 4)):
        events, parts, pos = [], [], 0
        for _ in range(rng.randint(0, 4)):
            trigger = rng.choice(TRIGGER_POOL)
            event_type = rng.choice(TYPE_POOL)
            events.append(EventMention(trigger, pos, pos + len(trigger), event_type))
            parts.append(trigger)
            pos += len(trigger) + 1
        docs.append(
            AnnotatedDocument(f"g{i}", " ".join(parts) or "quiet", tuple(events), "test")
        )
        pairs = tuple(
            (
                rng.choice(TRIGGER_POOL + ("",)),
                rng.choice(TYPE_POOL + ("", "Bogus")),
            )
            for _ in range(rng.randint(0, 5))
        )
        preds[f"g{i}"] = PredictionSet(f"g{i}", pairs, "clean")
    return Corpus("rand", tuple(docs), TYPE_POOL + ("Bogus",)), preds


def test_criterion_2_metric_ordering_property():
    with criterion(2, "metric ordering", 30.0):
        rng = random.Random(20240501)
        for _ in range(1000):
            gold, preds = _random_scored_pair(rng)
            report = score(gold, preds)
            assert report.tc.f1 <= report.ti.f1 + 1e-12
            assert report.tc.f1 <= report.ec.f1 + 1e-12

        def corpus_of(gold_pairs):
            events, parts, pos = [], [], 0
            for trigger, event_type in gold_pairs:
                events.append(EventMention(trigger, pos, pos + len(trigger), event_type))
                parts.append(trigger)
                pos += len(trigger) + 1
            doc = AnnotatedDocument("g0", " ".join(parts) or "quiet", tuple(events), "test")
            return Corpus("hand", (doc,), TYPE_POOL)

        perfect = [("kill", "Attack"), ("march", "Movement")]
        report = score(
            corpus_of(perfect),
            {"g0": PredictionSet("g0", tuple(perfect), "clean")},
        )
        assert (report.ec.f1, report.ti.f1, report.tc.f1) == (1.0, 1.0, 1.0)

        report = score(corpus_of(perfect), {"g0": PredictionSet("g0", (), "clean")})
        assert (report.ec.f1, report.ti.f1, report.tc.f1) == (0.0, 0.0, 0.0)

        report = score(
            corpus_of(perfect),
            {"g0": PredictionSet("g0", (("kill", "Attack"), ("march", "Transport")), "clean")},
        )
        assert (report.ec.f1, report.ti.f1, report.tc.f1) == (0.5, 1.0, 0.5)


def _mutations(graph: SemanticCausalGraph):
    yield NODE_CLASS_OVERLAP, replace(
        graph,
        context_nodes=graph.context_nodes + (ContextNode("clash", "x"),),
        type_nodes=graph.type_nodes + (TypeNode("clash", "X"),),
    )
    trigger_id = graph.trigger_nodes[0].id
    type_id = graph.type_nodes[0].id
    yield EDGE_ENDPOINT_MISMATCH, replace(
        graph, edges_trigger_trigger=graph.edges_trigger_trigger + ((type_id, trigger_id),)
    )
    yield MISSING_TYPE_EDGE, replace(
        graph,
        edges_trigger_type=tuple(
            e for e in graph.edges_trigger_type if e[0] != trigger_id
        ),
    )
    yield MULTIPLE_TYPE_EDGES, replace(
        graph, edges_trigger_type=graph.edges_trigger_type + (graph.edges_trigger_type[0],)
    )
    if len(graph.trigger_nodes) >= 2:
        second = graph.trigger_nodes[1].id
        cycle = ((trigger_id, second), (second, trigger_id))
    else:
        cycle = ((trigger_id, trigger_id),)
    yield TRIGGER_CYCLE, replace(
        graph, edges_trigger_trigger=graph.edges_trigger_trigger + cycle
    )


def test_criterion_3_graph_invariants():
    with criterion(3, "graph invariant suite", 30.0):
        rng = random.Random(31)
        for _ in range(1000):
            graph = make_random_valid_graph(rng)
            assert validate(graph) == []
            assert len(graph.edges_trigger_type) == len(graph.trigger_nodes)
            sub = causal_subgraph(graph)
            stripped = SemanticCausalGraph(
                source_doc_id=graph.source_doc_id,
                context_nodes=(),
                trigger_nodes=sub.trigger_nodes,
                type_nodes=sub.type_nodes,
                edges_context_trigger=(),
                edges_trigger_trigger=sub.edges_trigger_trigger,
                edges_trigger_type=sub.edges_trigger_type,
            )
            assert causal_subgraph(stripped) == sub

        mutated_checked = 0
        for _ in range(100):
            graph = make_random_valid_graph(rng, min_triggers=1)
            for expected_rule, mutant in _mutations(graph):
                violations = validate(mutant)
                assert [v.rule for v in violations] == [expected_rule], (
                    expected_rule,
                    violations,
                )
                mutated_checked += 1
        assert mutated_checked == 500


def test_criterion_4_roundtrip_suite(train_corpus, test_corpus, dev_corpus, tmp_path):
    with criterion(4, "round-trip suite", 10.0):
        for corpus in (train_corpus, test_corpus, dev_corpus):
            for doc in corpus.documents:
                gold_pairs = Counter(
                    (ev.trigger_text.lower(), ev.event_type.lower()) for ev in doc.events
                )
                gold_types = Counter(ev.event_type.lower() for ev in doc.events)
                scg = parse_prediction(
                    render_response(doc.events, "scg"), corpus.type_inventory, doc.doc_id
                )
                assert scg.parse_status == "clean"
                assert scg.pair_multiset() == gold_pairs
                std = parse_prediction(
                    render_response(doc.events, "standard"),
                    corpus.type_inventory,
                    doc.doc_id,
                )
                assert std.parse_status == "clean"
                assert std.type_multiset() == gold_types

        out1, out2 = tmp_path / "r1.jsonl", tmp_path / "r2.jsonl"
        gen_dataset(train_corpus, "scg", 1234, out1)
        gen_dataset(train_corpus, "scg", 1234, out2)
        assert out1.read_bytes() == out2.read_bytes()
        assert (tmp_path / "r1.manifest.json").read_bytes() == (
            tmp_path / "r2.manifest.json"
        ).read_bytes()


def _oracle_top_k(query, index, k):
    import math

    def cosine(a, b):
        dot = sum(x * y for x, y in zip(a, b))
        na = math.sqrt(sum(x * x for x in a))
        nb = math.sqrt(sum(y * y for y in b))
        return dot / (na * nb)

    ranked = sorted(
        range(len(index)), key=lambda i: (-cosine(index.vectors[i], query), i)
    )
    return [index.doc_ids[i] for i in ranked[:k]]


def test_criterion_5_rag_oracle_equivalence():
    with criterion(5, "RAG oracle equivalence", 30.0):
        rng = random.Random(55)
        for _ in range(100):
            n = rng.randint(2, 10)
            dim = rng.randint(16, 384)
            vectors = np.array(
                [[float(rng.randint(-5, 5)) for _ in range(dim)] for _ in range(n)]
            )
            for row in vectors:
                if not row.any():
                    row[rng.randrange(dim)] = 1.0
            index = EmbeddingIndex(tuple(f"d{i}" for i in range(n)), vectors)
            query = np.array([float(rng.randint(-5, 5)) for _ in range(dim)])
            if not query.any():
                query[0] = 1.0
            for k in range(1, n + 2):
                assert top_k_cosine(query, index, k) == _oracle_top_k(query, index, k)
            full = top_k_cosine(query, index, n)
            for scale in (2.0, 7.0, 100.0):
                assert top_k_cosine(scale * query, index, n) == full


def test_criterion_6_ablation_verification(test_corpus):
    with criterion(6, "ablation verification", 10.0):
        def answer(messages):
            prompt = messages[-1]["content"]
            _, _, text = prompt.partition("Text:\n")
            if "marched" in text:
                return "triggers all gone"
            return text.replace("Rebels", "Militias").replace("Vienna", "Oslo")

        modified, results = ablate_corpus(
            test_corpus, MOCK_CONFIG, transport=MockTransport(answer),
            max_attempts=4, sleep=no_sleep,
        )
        accepted = {r.doc_id for r in results if r.status == STATUS_ACCEPTED}
        exhausted = {r.doc_id for r in results if r.status == STATUS_EXHAUSTED}
        assert exhausted == {"s2"}
        assert accepted == set(test_corpus.doc_ids) - exhausted
        assert set(modified.doc_ids) == accepted

        by_id = {r.doc_id: r for r in results}
        for doc in modified.documents:
            original = test_corpus.get(doc.doc_id)
            gold_triggers = [ev.trigger_text for ev in original.events]
            assert by_id[doc.doc_id].triggers_verified
            assert verify_triggers_preserved(doc.text, gold_triggers)
            for ev in doc.events:
                assert doc.text[ev.start : ev.end] == ev.trigger_text
            assert Counter((e.trigger_text, e.event_type) for e in doc.events) == Counter(
                (e.trigger_text, e.event_type) for e in original.events
            )


def test_criterion_7_dpo_pair_correctness(dev_corpus):
    with criterion(7, "DPO pair correctness", 5.0):
        outputs = {
            "d1": render_response(dev_corpus.get("d1").events, "scg"),  # correct
            "d2": "Event trigger: met ; Event type: Transport",  # wrong type
            "d3": "no events found, sorry",  # unparseable
            "d4": "None",  # correct negative
        }
        pairs = build_dpo_pairs(dev_corpus, outputs, "scg")
        assert sorted(p.doc_id for p in pairs) == ["d2", "d3"]
        for pair in pairs:
            doc = dev_corpus.get(pair.doc_id)
            parsed = parse_prediction(pair.chosen, dev_corpus.type_inventory, pair.doc_id)
            assert parsed.pair_multiset() == Counter(
                (ev.trigger_text.lower(), ev.event_type.lower()) for ev in doc.events
            )
            assert pair.chosen != pair.rejected


def test_criterion_8_end_to_end_smoke(train_corpus, test_corpus, tmp_path):
    with criterion(8, "end-to-end smoke", 30.0):
        embedder = HashEmbedder(dimension=128)
        index = build_index(
            ((doc.doc_id, doc.text) for doc in train_corpus.documents), embedder
        )
        selector = RagSelector(index=index, provider=embedder)

        def builder(doc):
            return render_prompt(
                build_prompt("six_shot_rag", doc, train_corpus, selector)
            )

        gold_by_text = {
            doc.text: render_response(doc.events, "scg")
            for doc in test_corpus.documents
        }

        def run(transport, run_id):
            manifest = batch_infer(
                test_corpus.documents, builder, MOCK_CONFIG,
                tmp_path / f"{run_id}.jsonl", run_id=run_id,
                corpus_name=test_corpus.name, mode="six_shot_rag",
                transport=transport, sleep=no_sleep,
            )
            predictions = {
                doc_id: parse_prediction(response, test_corpus.type_inventory, doc_id)
                for doc_id, response in manifest.responses().items()
            }
            return score(test_corpus, predictions)

        echo = MockTransport(
            lambda messages: gold_by_text[
                target_text_from_prompt(messages[-1]["content"])
            ]
        )
        report = run(echo, "echo")
        assert (report.ec.f1, report.ti.f1, report.tc.f1) == (1.0, 1.0, 1.0)

        silent = MockTransport(lambda messages: "None")
        report = run(silent, "silent")
        assert (report.ec.f1, report.ti.f1, report.tc.f1) == (0.0, 0.0, 0.0)
