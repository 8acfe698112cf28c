"""Inference prompt construction: zero-shot, six-shot, and six-shot RAG.

One documented prompt layout serves all three modes (version ``v1``):

    {task description}

    Event types: {comma-joined inventory}

    Text: {example input}          # six-shot modes only, six blocks
    Response: {example response}

    Text: {target}
    Response:

Six-shot draws examples uniformly without replacement from the training
split; six-shot RAG takes the six training texts most cosine-similar to the
target, placed most-similar-last so the strongest exemplar sits closest to
the target.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import AnnotatedDocument, Corpus
from .embeddings import EmbeddingIndex, EmbeddingProvider, embed, top_k_cosine
from .instructions import render_response

ZERO_SHOT = "zero_shot"
SIX_SHOT = "six_shot"
SIX_SHOT_RAG = "six_shot_rag"
PROMPT_MODES = (ZERO_SHOT, SIX_SHOT, SIX_SHOT_RAG)

FEW_SHOT_COUNT = 6

PROMPT_LAYOUT_VERSION = "v1"

DEFAULT_TASK_DESCRIPTION = (
    "You are an event detection assistant. Identify the event triggers in the "
    "given text and classify each one into one of the listed event types. "
    "Answer with one line per event, in the form "
    "'Event trigger: <trigger> ; Event type: <type>'. "
    "If the text describes no event, answer 'None'."
)


class PromptError(Exception):
    pass


@dataclass(frozen=True)
class PromptSpec:
    mode: str
    task_description: str
    type_inventory: tuple[str, ...]
    examples: tuple[tuple[str, str], ...]
    target_text: str

    def __post_init__(self) -> None:
        if self.mode not in PROMPT_MODES:
            raise PromptError(f"unknown prompt mode {self.mode!r}")
        if self.mode == ZERO_SHOT and self.examples:
            raise PromptError("zero-shot prompts carry no examples")
        if self.mode != ZERO_SHOT and len(self.examples) != FEW_SHOT_COUNT:
            raise PromptError(
                f"{self.mode} prompts need exactly {FEW_SHOT_COUNT} examples, "
                f"got {len(self.examples)}"
            )


@dataclass(frozen=True)
class RagSelector:
    """Embedding index over the training split plus the provider to embed queries."""

    index: EmbeddingIndex
    provider: EmbeddingProvider

    def select(self, text: str, k: int) -> list[str]:
        query = embed([text], self.provider)[0]
        return top_k_cosine(query, self.index, k)


def build_prompt(
    mode: str,
    target: AnnotatedDocument,
    train: Corpus,
    selector: random.Random | RagSelector | None = None,
    task_description: str = DEFAULT_TASK_DESCRIPTION,
    most_similar_last: bool = True,
    example_mode: str = "scg",
) -> PromptSpec:
    """Assemble the prompt content for one target document."""
    if mode not in PROMPT_MODES:
        raise PromptError(f"unknown prompt mode {mode!r}")

    examples: tuple[tuple[str, str], ...] = ()
    if mode != ZERO_SHOT:
        if len(train.documents) < FEW_SHOT_COUNT:
            raise PromptError(
                f"{mode} needs at least {FEW_SHOT_COUNT} training documents, "
                f"corpus {train.name!r} has {len(train.documents)}"
            )
        if mode == SIX_SHOT:
            if not isinstance(selector, random.Random):
                raise PromptError("six_shot requires a seeded random source")
            chosen = selector.sample(list(train.documents), FEW_SHOT_COUNT)
        else:
            if not isinstance(selector, RagSelector):
                raise PromptError("six_shot_rag requires a RagSelector")
            ids = selector.select(target.text, FEW_SHOT_COUNT)
            chosen = [train.get(doc_id) for doc_id in ids]
            if most_similar_last:
                chosen = list(reversed(chosen))
        examples = tuple(
            (doc.text, render_response(doc.events, example_mode)) for doc in chosen
        )

    return PromptSpec(
        mode=mode,
        task_description=task_description,
        type_inventory=train.type_inventory,
        examples=examples,
        target_text=target.text,
    )


def render_prompt(spec: PromptSpec) -> str:
    parts = [spec.task_description, "", f"Event types: {', '.join(spec.type_inventory)}"]
    for example_input, example_response in spec.examples:
        parts.extend(["", f"Text: {example_input}", f"Response: {example_response}"])
    parts.extend(["", f"Text: {spec.target_text}", "Response:"])
    return "\n".join(parts)


def target_text_from_prompt(prompt: str) -> str:
    """Recover the target text from a rendered prompt (mock providers use this)."""
    _, sep, tail = prompt.rpartition("\nText: ")
    if not sep or not tail.endswith("\nResponse:"):
        raise PromptError("prompt does not end with a target text block")
    return tail[: -len("\nResponse:")]
