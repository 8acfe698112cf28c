"""Context-perturbed test corpus generation with trigger preservation.

Each document is rewritten by an LLM under a fixed system prompt that allows
changing entities, places, dates, and numbers but forbids touching the
trigger phrases. A rewrite is accepted only if every gold trigger still
occurs at least as many times as it does in the gold annotations; failed
attempts retry up to a bound, after which the document is excluded and
reported. Accepted rewrites get their gold spans re-anchored to the new
text, so the emitted corpus satisfies the same invariants as a loaded one.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable

import time

from .corpus import AnnotatedDocument, Corpus, EventMention
from .gateway import ProviderConfig, ProviderError, Transport, complete

STATUS_ACCEPTED = "accepted"
STATUS_EXHAUSTED = "exhausted"

DEFAULT_MAX_ATTEMPTS = 10


class AblationError(Exception):
    pass


def rewrite_system_prompt() -> str:
    """The verbatim system prompt text asset used for every rewrite request."""
    return (
        resources.files("scgkit")
        .joinpath("assets/ablation_system_prompt.txt")
        .read_text(encoding="utf-8")
    )


@dataclass(frozen=True)
class AblationResult:
    doc_id: str
    original_text: str
    modified_text: str | None
    attempts: int
    status: str
    triggers_verified: bool


def verify_triggers_preserved(modified: str, gold_triggers: Iterable[str]) -> bool:
    """True iff each distinct trigger occurs at least its gold multiplicity.

    Occurrences are exact case-sensitive substring matches, counted
    non-overlapping — the same way re-anchoring later consumes them.
    """
    needed = Counter(gold_triggers)
    return all(modified.count(trigger) >= count for trigger, count in needed.items())


def build_rewrite_request(doc: AnnotatedDocument) -> str:
    """User message: the gold triggers to keep, then the text to rewrite."""
    triggers = [ev.trigger_text for ev in doc.events]
    trigger_line = ", ".join(triggers) if triggers else "(none)"
    return (
        f"Trigger words/phrases that must be kept exactly as written: {trigger_line}\n\n"
        f"Text:\n{doc.text}"
    )


def ablate_document(
    doc: AnnotatedDocument,
    config: ProviderConfig,
    system_prompt: str | None = None,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    transport: Transport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> AblationResult:
    """Rewrite one document, retrying until verification passes or attempts run out."""
    if max_attempts < 1:
        raise AblationError(f"max_attempts must be >= 1, got {max_attempts}")
    system = system_prompt if system_prompt is not None else rewrite_system_prompt()
    gold_triggers = [ev.trigger_text for ev in doc.events]
    request = build_rewrite_request(doc)

    for attempt in range(1, max_attempts + 1):
        try:
            result = complete(request, config, system=system, transport=transport, sleep=sleep)
        except ProviderError:
            continue
        candidate = result.text.strip()
        if verify_triggers_preserved(candidate, gold_triggers):
            return AblationResult(
                doc_id=doc.doc_id,
                original_text=doc.text,
                modified_text=candidate,
                attempts=attempt,
                status=STATUS_ACCEPTED,
                triggers_verified=True,
            )
    return AblationResult(
        doc_id=doc.doc_id,
        original_text=doc.text,
        modified_text=None,
        attempts=max_attempts,
        status=STATUS_EXHAUSTED,
        triggers_verified=False,
    )


def reanchor_events(
    events: tuple[EventMention, ...], modified_text: str
) -> tuple[EventMention, ...]:
    """Assign each mention the leftmost unused occurrence of its trigger.

    Mentions are visited in original span order; each distinct trigger keeps
    its own cursor, so repeated triggers consume successive non-overlapping
    occurrences.
    """
    cursors: dict[str, int] = {}
    anchored: list[EventMention] = []
    for ev in sorted(events, key=lambda e: (e.start, e.end, e.event_type)):
        start = modified_text.find(ev.trigger_text, cursors.get(ev.trigger_text, 0))
        if start < 0:
            raise AblationError(
                f"trigger {ev.trigger_text!r} not found in verified rewrite"
            )
        cursors[ev.trigger_text] = start + len(ev.trigger_text)
        anchored.append(
            EventMention(ev.trigger_text, start, start + len(ev.trigger_text), ev.event_type)
        )
    return tuple(anchored)


def ablate_corpus(
    corpus: Corpus,
    config: ProviderConfig,
    system_prompt: str | None = None,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    transport: Transport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[Corpus, list[AblationResult]]:
    """Rewrite a whole corpus; exhausted documents are dropped and reported."""
    results: list[AblationResult] = []
    modified_docs: list[AnnotatedDocument] = []
    for doc in corpus.documents:
        result = ablate_document(
            doc,
            config,
            system_prompt=system_prompt,
            max_attempts=max_attempts,
            transport=transport,
            sleep=sleep,
        )
        results.append(result)
        if result.status == STATUS_ACCEPTED:
            assert result.modified_text is not None
            modified_docs.append(
                AnnotatedDocument(
                    doc_id=doc.doc_id,
                    text=result.modified_text,
                    events=reanchor_events(doc.events, result.modified_text),
                    split=doc.split,
                )
            )
    modified = Corpus(
        name=f"{corpus.name}-ablated",
        documents=tuple(modified_docs),
        type_inventory=corpus.type_inventory,
    )
    return modified, results
