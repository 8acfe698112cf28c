"""Event-detection corpus model and JSONL loading.

A corpus file holds one document per line:

    {"doc_id": "...", "text": "...", "events": [{"trigger": "...", "span": [s, e], "type": "..."}]}

Offsets are character offsets over the unicode scalar sequence, end-exclusive.
The event-type inventory comes from a sidecar schema file (one type per line),
so prompts can enumerate all types even when a split never mentions some of them.
See docs/formats.md for the exact field-level contract.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

SPLITS = ("train", "dev", "test")

DEFAULT_SCHEMA_FILENAME = "types.txt"


class CorpusError(Exception):
    """Raised when a corpus file or record violates the documented format."""


@dataclass(frozen=True)
class EventMention:
    """One gold (trigger span, event type) annotation."""

    trigger_text: str
    start: int
    end: int
    event_type: str

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise CorpusError(
                f"mention span [{self.start}, {self.end}) is empty or inverted"
            )
        if not self.event_type:
            raise CorpusError("mention has an empty event type")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class AnnotatedDocument:
    """One text with its gold event mentions; may carry zero events."""

    doc_id: str
    text: str
    events: tuple[EventMention, ...]
    split: str

    def __post_init__(self) -> None:
        if self.split not in SPLITS:
            raise CorpusError(
                f"document {self.doc_id!r}: unknown split {self.split!r}"
            )
        for ev in self.events:
            if ev.end > len(self.text):
                raise CorpusError(
                    f"document {self.doc_id!r}: span {ev.span} exceeds text length "
                    f"{len(self.text)}"
                )
            actual = self.text[ev.start : ev.end]
            if actual != ev.trigger_text:
                raise CorpusError(
                    f"document {self.doc_id!r}: span {ev.span} reads {actual!r}, "
                    f"annotation says {ev.trigger_text!r}"
                )

    @property
    def is_negative(self) -> bool:
        return not self.events


@dataclass(frozen=True)
class Corpus:
    """Immutable collection of documents plus the dataset's type inventory."""

    name: str
    documents: tuple[AnnotatedDocument, ...]
    type_inventory: tuple[str, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise CorpusError(f"duplicate doc_id {doc.doc_id!r}")
            seen.add(doc.doc_id)
        known = set(self.type_inventory)
        if len(known) != len(self.type_inventory):
            raise CorpusError("type inventory contains duplicates")
        for doc in self.documents:
            for ev in doc.events:
                if ev.event_type not in known:
                    raise CorpusError(
                        f"document {doc.doc_id!r}: event type {ev.event_type!r} "
                        f"not in the type inventory"
                    )

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[AnnotatedDocument]:
        return iter(self.documents)

    def get(self, doc_id: str) -> AnnotatedDocument:
        for doc in self.documents:
            if doc.doc_id == doc_id:
                return doc
        raise KeyError(doc_id)

    @property
    def doc_ids(self) -> tuple[str, ...]:
        return tuple(doc.doc_id for doc in self.documents)


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    event_count: int
    type_count: int
    negative_doc_ratio: float


def load_type_schema(path: str | Path) -> tuple[str, ...]:
    """Read the sidecar schema: one event type per line, blanks ignored."""
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"type schema file not found: {path}")
    types: list[str] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            types.append(line)
    if not types:
        raise CorpusError(f"type schema file is empty: {path}")
    return tuple(types)


def _mention_from_record(raw: object, doc_id: str, lineno: int) -> EventMention:
    if not isinstance(raw, dict):
        raise CorpusError(f"line {lineno}: event entry of {doc_id!r} is not an object")
    try:
        trigger = raw["trigger"]
        span = raw["span"]
        event_type = raw["type"]
    except KeyError as exc:
        raise CorpusError(
            f"line {lineno}: event entry of {doc_id!r} missing field {exc}"
        ) from None
    if (
        not isinstance(span, (list, tuple))
        or len(span) != 2
        or not all(isinstance(v, int) for v in span)
    ):
        raise CorpusError(
            f"line {lineno}: document {doc_id!r} span must be [start, end], got {span!r}"
        )
    if span[0] < 0:
        raise CorpusError(f"line {lineno}: document {doc_id!r} span {span} has a negative offset")
    try:
        return EventMention(str(trigger), span[0], span[1], str(event_type))
    except CorpusError as exc:
        raise CorpusError(f"line {lineno}: {exc}") from None


def load_corpus(
    path: str | Path,
    split: str,
    schema: str | Path | None = None,
    name: str | None = None,
) -> Corpus:
    """Load a JSONL corpus file; every invariant is enforced on the way in.

    `schema` defaults to `types.txt` next to the corpus file. Negative
    documents (empty event list) are retained.
    """
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")
    if split not in SPLITS:
        raise CorpusError(f"unknown split {split!r}; expected one of {SPLITS}")
    schema_path = Path(schema) if schema is not None else path.parent / DEFAULT_SCHEMA_FILENAME
    inventory = load_type_schema(schema_path)

    documents: list[AnnotatedDocument] = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {lineno}: malformed record: {exc}") from None
            if not isinstance(record, dict):
                raise CorpusError(f"{path}: line {lineno}: record is not an object")
            try:
                doc_id = str(record["doc_id"])
                text = record["text"]
                raw_events = record["events"]
            except KeyError as exc:
                raise CorpusError(f"{path}: line {lineno}: record missing field {exc}") from None
            if not isinstance(text, str):
                raise CorpusError(f"{path}: line {lineno}: text of {doc_id!r} is not a string")
            if not isinstance(raw_events, list):
                raise CorpusError(f"{path}: line {lineno}: events of {doc_id!r} is not a list")
            mentions = tuple(
                _mention_from_record(raw, doc_id, lineno) for raw in raw_events
            )
            try:
                documents.append(AnnotatedDocument(doc_id, text, mentions, split))
            except CorpusError as exc:
                raise CorpusError(f"{path}: line {lineno}: {exc}") from None

    return Corpus(
        name=name if name is not None else path.stem,
        documents=tuple(documents),
        type_inventory=inventory,
    )


def document_to_record(doc: AnnotatedDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "text": doc.text,
        "events": [
            {"trigger": ev.trigger_text, "span": [ev.start, ev.end], "type": ev.event_type}
            for ev in doc.events
        ],
    }


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the corpus back out in the same line-delimited format."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            fh.write(json.dumps(document_to_record(doc), sort_keys=True) + "\n")


def save_type_schema(types: Iterable[str], path: str | Path) -> None:
    Path(path).write_text("".join(f"{t}\n" for t in types), encoding="utf-8")


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Count documents, mentions, inventory size, and the negative-doc ratio."""
    doc_count = len(corpus.documents)
    event_count = sum(len(doc.events) for doc in corpus.documents)
    negative = sum(1 for doc in corpus.documents if doc.is_negative)
    return CorpusStats(
        doc_count=doc_count,
        event_count=event_count,
        type_count=len(corpus.type_inventory),
        negative_doc_ratio=(negative / doc_count) if doc_count else 0.0,
    )
