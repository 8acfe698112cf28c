"""Shared fixtures: the demo corpus splits and a random valid-graph builder."""

from __future__ import annotations

import random
from pathlib import Path

import pytest

from scgkit.corpus import Corpus, load_corpus
from scgkit.graph import (
    ContextNode,
    SemanticCausalGraph,
    TriggerNode,
    TypeNode,
)

DATA_DIR = Path(__file__).parent / "data"
SCHEMA = DATA_DIR / "types.txt"

TYPE_POOL = ("Attack", "Movement", "Transport", "Meet", "Injure", "Die")
WORD_POOL = ("fired", "marched", "met", "died", "injured", "landed", "struck", "left")


@pytest.fixture(scope="session")
def train_corpus() -> Corpus:
    return load_corpus(DATA_DIR / "fixture.train.jsonl", "train", schema=SCHEMA)


@pytest.fixture(scope="session")
def test_corpus() -> Corpus:
    return load_corpus(DATA_DIR / "fixture.test.jsonl", "test", schema=SCHEMA)


@pytest.fixture(scope="session")
def dev_corpus() -> Corpus:
    return load_corpus(DATA_DIR / "fixture.dev.jsonl", "dev", schema=SCHEMA)


def make_random_valid_graph(
    rng: random.Random, min_triggers: int = 0, max_triggers: int = 6
) -> SemanticCausalGraph:
    """A structurally valid graph with random triggers, deduped types, and a
    random acyclic trigger chain."""
    n = rng.randint(min_triggers, max_triggers)
    triggers = []
    used: set[tuple[str, int]] = set()
    while len(triggers) < n:
        word = rng.choice(WORD_POOL)
        start = rng.randint(0, 40)
        if (word, start) in used:
            continue
        used.add((word, start))
        i = len(triggers)
        triggers.append(TriggerNode(f"et{i}", word, start, start + len(word)))

    assigned = [rng.choice(TYPE_POOL) for _ in range(n)]
    label_to_id: dict[str, str] = {}
    type_nodes = []
    for label in assigned:
        if label not in label_to_id:
            label_to_id[label] = f"ey{len(label_to_id)}"
            type_nodes.append(TypeNode(label_to_id[label], label))

    chain = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < 0.25:
                chain.append((f"et{i}", f"et{j}"))

    return SemanticCausalGraph(
        source_doc_id=f"doc{rng.randint(0, 10**6)}",
        context_nodes=(ContextNode("co0", "background"),),
        trigger_nodes=tuple(triggers),
        type_nodes=tuple(type_nodes),
        edges_context_trigger=tuple(("co0", t.id) for t in triggers),
        edges_trigger_trigger=tuple(chain),
        edges_trigger_type=tuple(
            (t.id, label_to_id[assigned[i]]) for i, t in enumerate(triggers)
        ),
    )
