"""Toolkit for causal-graph-based event detection datasets and evaluation."""

from .corpus import (
    AnnotatedDocument,
    Corpus,
    CorpusStats,
    EventMention,
    corpus_stats,
    load_corpus,
    save_corpus,
)
from .graph import (
    CausalSubgraph,
    SemanticCausalGraph,
    Violation,
    build_scg,
    causal_subgraph,
    validate,
)
from .instructions import SCGInstructionRecord, gen_dataset, gen_record, render_response
from .parsing import PredictionSet, normalize, parse_prediction
from .scoring import ScoreReport, score
from .complexity import ComplexityReport, complexity_from_corpus, complexity_from_metrics

__all__ = [
    "AnnotatedDocument",
    "CausalSubgraph",
    "ComplexityReport",
    "Corpus",
    "CorpusStats",
    "EventMention",
    "PredictionSet",
    "SCGInstructionRecord",
    "ScoreReport",
    "SemanticCausalGraph",
    "Violation",
    "build_scg",
    "causal_subgraph",
    "complexity_from_corpus",
    "complexity_from_metrics",
    "corpus_stats",
    "gen_dataset",
    "gen_record",
    "load_corpus",
    "normalize",
    "parse_prediction",
    "render_response",
    "save_corpus",
    "score",
    "validate",
]

__version__ = "0.1.0"
