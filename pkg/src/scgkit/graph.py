"""Semantic causal graphs: construction, structural validation, causal subgraph.

A graph partitions its nodes into three classes — context, trigger, and type —
and carries three directed edge classes: context→trigger, trigger→trigger
(causal chains), and trigger→type. Every trigger must have exactly one
outgoing trigger→type edge, and trigger→trigger edges must be acyclic
(causes precede effects).

Graphs are frozen values; all operations here are pure functions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .corpus import AnnotatedDocument

NodeId = str

Edge = tuple[NodeId, NodeId]

# Violation rule names reported by validate().
NODE_CLASS_OVERLAP = "node-class-overlap"
DUPLICATE_NODE_ID = "duplicate-node-id"
EDGE_ENDPOINT_MISMATCH = "edge-endpoint-mismatch"
MISSING_TYPE_EDGE = "missing-type-edge"
MULTIPLE_TYPE_EDGES = "multiple-type-edges"
TRIGGER_CYCLE = "trigger-cycle"


class GraphConstructionError(Exception):
    """Raised when a graph cannot be built from its inputs."""


class InvalidGraphError(Exception):
    """Raised when an operation requires a valid graph but got violations."""

    def __init__(self, violations: list["Violation"]):
        super().__init__(f"graph has {len(violations)} structural violation(s)")
        self.violations = violations


@dataclass(frozen=True)
class ContextNode:
    id: NodeId
    text: str


@dataclass(frozen=True)
class TriggerNode:
    id: NodeId
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class TypeNode:
    id: NodeId
    label: str


@dataclass(frozen=True)
class Violation:
    """One broken structural rule; the subject names the offending node or edge."""

    rule: str
    subject: str
    detail: str


@dataclass(frozen=True)
class SemanticCausalGraph:
    source_doc_id: str
    context_nodes: tuple[ContextNode, ...]
    trigger_nodes: tuple[TriggerNode, ...]
    type_nodes: tuple[TypeNode, ...]
    edges_context_trigger: tuple[Edge, ...]
    edges_trigger_trigger: tuple[Edge, ...]
    edges_trigger_type: tuple[Edge, ...]


@dataclass(frozen=True)
class CausalSubgraph:
    """The trigger/type restriction of a graph; context never survives."""

    trigger_nodes: tuple[TriggerNode, ...]
    type_nodes: tuple[TypeNode, ...]
    edges_trigger_trigger: tuple[Edge, ...]
    edges_trigger_type: tuple[Edge, ...]


def build_scg(doc: AnnotatedDocument) -> SemanticCausalGraph:
    """Build the graph for one document.

    One context node spans the whole document (the datasets carry no
    finer-grained context annotations), one trigger node per gold mention,
    and one type node per distinct event type shared by all its triggers.
    """
    for ev in doc.events:
        if ev.end > len(doc.text) or doc.text[ev.start : ev.end] != ev.trigger_text:
            raise GraphConstructionError(
                f"document {doc.doc_id!r}: span {ev.span} does not match "
                f"trigger {ev.trigger_text!r}"
            )

    context = ContextNode(id="co0", text=doc.text)
    triggers: list[TriggerNode] = []
    type_ids: dict[str, NodeId] = {}
    types: list[TypeNode] = []
    co_et: list[Edge] = []
    et_ey: list[Edge] = []

    for i, ev in enumerate(doc.events):
        trig = TriggerNode(id=f"et{i}", text=ev.trigger_text, start=ev.start, end=ev.end)
        triggers.append(trig)
        if ev.event_type not in type_ids:
            type_ids[ev.event_type] = f"ey{len(type_ids)}"
            types.append(TypeNode(id=type_ids[ev.event_type], label=ev.event_type))
        co_et.append((context.id, trig.id))
        et_ey.append((trig.id, type_ids[ev.event_type]))

    return SemanticCausalGraph(
        source_doc_id=doc.doc_id,
        context_nodes=(context,),
        trigger_nodes=tuple(triggers),
        type_nodes=tuple(types),
        edges_context_trigger=tuple(co_et),
        edges_trigger_trigger=(),
        edges_trigger_type=tuple(et_ey),
    )


def _find_cycle(nodes: set[NodeId], edges: list[Edge]) -> list[NodeId] | None:
    adjacency: dict[NodeId, list[NodeId]] = {n: [] for n in nodes}
    for src, dst in edges:
        adjacency[src].append(dst)

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}
    stack: list[NodeId] = []

    def visit(node: NodeId) -> list[NodeId] | None:
        color[node] = GRAY
        stack.append(node)
        for nxt in adjacency[node]:
            if color[nxt] == GRAY:
                return stack[stack.index(nxt) :] + [nxt]
            if color[nxt] == WHITE:
                cycle = visit(nxt)
                if cycle is not None:
                    return cycle
        stack.pop()
        color[node] = BLACK
        return None

    for node in sorted(nodes):
        if color[node] == WHITE:
            cycle = visit(node)
            if cycle is not None:
                return cycle
    return None


def validate(graph: SemanticCausalGraph) -> list[Violation]:
    """Check all structural rules; an empty list means the graph is valid.

    Violations are data, not failures: every broken rule is reported with
    the offending node or edge.
    """
    violations: list[Violation] = []

    context_ids = [n.id for n in graph.context_nodes]
    trigger_ids = [n.id for n in graph.trigger_nodes]
    type_ids = [n.id for n in graph.type_nodes]

    for class_name, ids in (
        ("context", context_ids),
        ("trigger", trigger_ids),
        ("type", type_ids),
    ):
        seen: set[NodeId] = set()
        for node_id in ids:
            if node_id in seen:
                violations.append(
                    Violation(DUPLICATE_NODE_ID, node_id, f"repeated within {class_name} nodes")
                )
            seen.add(node_id)

    co, et, ey = set(context_ids), set(trigger_ids), set(type_ids)
    for a_name, a, b_name, b in (
        ("context", co, "trigger", et),
        ("context", co, "type", ey),
        ("trigger", et, "type", ey),
    ):
        for node_id in sorted(a & b):
            violations.append(
                Violation(
                    NODE_CLASS_OVERLAP,
                    node_id,
                    f"appears in both {a_name} and {b_name} node sets",
                )
            )

    def check_edges(edges: tuple[Edge, ...], src_set: set[NodeId], dst_set: set[NodeId],
                    kind: str) -> list[Edge]:
        well_typed = []
        for src, dst in edges:
            if src not in src_set or dst not in dst_set:
                violations.append(
                    Violation(
                        EDGE_ENDPOINT_MISMATCH,
                        f"{src}->{dst}",
                        f"edge class {kind} requires endpoints in those node classes",
                    )
                )
            else:
                well_typed.append((src, dst))
        return well_typed

    check_edges(graph.edges_context_trigger, co, et, "context->trigger")
    et_et = check_edges(graph.edges_trigger_trigger, et, et, "trigger->trigger")
    et_ey = check_edges(graph.edges_trigger_type, et, ey, "trigger->type")

    outgoing: dict[NodeId, int] = {t: 0 for t in trigger_ids}
    for src, _ in et_ey:
        outgoing[src] += 1
    for trig_id in trigger_ids:
        count = outgoing[trig_id]
        if count == 0:
            violations.append(
                Violation(MISSING_TYPE_EDGE, trig_id, "trigger has no outgoing type edge")
            )
        elif count > 1:
            violations.append(
                Violation(
                    MULTIPLE_TYPE_EDGES, trig_id, f"trigger has {count} outgoing type edges"
                )
            )

    cycle = _find_cycle(et, et_et)
    if cycle is not None:
        violations.append(
            Violation(TRIGGER_CYCLE, " -> ".join(cycle), "trigger chain contains a cycle")
        )

    return violations


def causal_subgraph(graph: SemanticCausalGraph) -> CausalSubgraph:
    """Restrict a valid graph to its trigger and type nodes and their edges."""
    violations = validate(graph)
    if violations:
        raise InvalidGraphError(violations)
    return CausalSubgraph(
        trigger_nodes=graph.trigger_nodes,
        type_nodes=graph.type_nodes,
        edges_trigger_trigger=graph.edges_trigger_trigger,
        edges_trigger_type=graph.edges_trigger_type,
    )


def graph_to_record(graph: SemanticCausalGraph) -> dict:
    """Serializable form; field names are pinned in docs/formats.md."""
    return {
        "doc_id": graph.source_doc_id,
        "context_nodes": [{"id": n.id, "text": n.text} for n in graph.context_nodes],
        "trigger_nodes": [
            {"id": n.id, "text": n.text, "span": [n.start, n.end]}
            for n in graph.trigger_nodes
        ],
        "type_nodes": [{"id": n.id, "label": n.label} for n in graph.type_nodes],
        "edges": {
            "context_trigger": [list(e) for e in graph.edges_context_trigger],
            "trigger_trigger": [list(e) for e in graph.edges_trigger_trigger],
            "trigger_type": [list(e) for e in graph.edges_trigger_type],
        },
    }


def graph_from_record(record: dict) -> SemanticCausalGraph:
    edges = record["edges"]
    return SemanticCausalGraph(
        source_doc_id=record["doc_id"],
        context_nodes=tuple(
            ContextNode(n["id"], n["text"]) for n in record["context_nodes"]
        ),
        trigger_nodes=tuple(
            TriggerNode(n["id"], n["text"], n["span"][0], n["span"][1])
            for n in record["trigger_nodes"]
        ),
        type_nodes=tuple(TypeNode(n["id"], n["label"]) for n in record["type_nodes"]),
        edges_context_trigger=tuple((s, d) for s, d in edges["context_trigger"]),
        edges_trigger_trigger=tuple((s, d) for s, d in edges["trigger_trigger"]),
        edges_trigger_type=tuple((s, d) for s, d in edges["trigger_type"]),
    )


def save_graphs(graphs: list[SemanticCausalGraph], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for graph in graphs:
            fh.write(json.dumps(graph_to_record(graph), sort_keys=True) + "\n")


def load_graphs(path: str | Path) -> list[SemanticCausalGraph]:
    graphs = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                graphs.append(graph_from_record(json.loads(line)))
    return graphs
