"""Inference driver for chat-completions-compatible HTTP endpoints.

``complete`` retries transient failures with exponential backoff;
``batch_infer`` runs a bounded worker pool and appends one manifest line per
document as soon as its result lands, so a killed run resumes where it
stopped. Auth tokens come from the environment at request time and are never
written anywhere.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import requests

from .corpus import AnnotatedDocument

STATUS_COMPLETE = "complete"
STATUS_COMPLETE_WITH_ERRORS = "complete-with-errors"
STATUS_INCOMPLETE = "incomplete"


class ProviderError(Exception):
    """Non-retryable provider failure (or retries exhausted)."""


class TransientProviderError(ProviderError):
    """Retryable failure: timeouts, connection loss, 408/429/5xx."""


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    model: str
    temperature: float = 1.0
    top_p: float = 1.0
    max_retries: int = 3
    backoff_base: float = 0.5
    auth_env: str = "LLM_API_KEY"
    timeout: float = 120.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if not 0.0 <= self.top_p <= 2.0:
            raise ValueError(f"top_p must be in [0, 2], got {self.top_p}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.backoff_base < 0:
            raise ValueError(f"backoff_base must be >= 0, got {self.backoff_base}")

    def to_public_dict(self) -> dict:
        """Manifest snapshot; holds the auth env var name, never its value."""
        return {
            "endpoint": self.endpoint,
            "model": self.model,
            "temperature": self.temperature,
            "top_p": self.top_p,
            "max_retries": self.max_retries,
            "backoff_base": self.backoff_base,
            "auth_env": self.auth_env,
        }


Transport = Callable[[list[dict], ProviderConfig], str]


def http_transport(messages: list[dict], config: ProviderConfig) -> str:
    headers = {}
    token = os.environ.get(config.auth_env, "")
    if token:
        headers["Authorization"] = f"Bearer {token}"
    try:
        response = requests.post(
            config.endpoint,
            json={
                "model": config.model,
                "messages": messages,
                "temperature": config.temperature,
                "top_p": config.top_p,
            },
            headers=headers,
            timeout=config.timeout,
        )
    except requests.RequestException as exc:
        raise TransientProviderError(f"transport failure: {exc}") from exc
    if response.status_code in (408, 429) or response.status_code >= 500:
        raise TransientProviderError(
            f"provider status {response.status_code}: {response.text[:200]}"
        )
    if response.status_code != 200:
        raise ProviderError(
            f"provider status {response.status_code}: {response.text[:200]}"
        )
    try:
        return response.json()["choices"][0]["message"]["content"]
    except (KeyError, IndexError, ValueError) as exc:
        raise ProviderError(f"malformed provider response: {exc}") from exc


class MockTransport:
    """Scripted transport for tests: strings are returned, exceptions raised.

    A callable script receives the messages and computes the response, which
    is how tests answer per-document.
    """

    def __init__(self, script):
        self._script = script if callable(script) else iter(list(script))
        self.calls = 0

    def __call__(self, messages: list[dict], config: ProviderConfig) -> str:
        self.calls += 1
        if callable(self._script):
            return self._script(messages)
        try:
            step = next(self._script)
        except StopIteration:
            raise ProviderError("mock script exhausted") from None
        if isinstance(step, Exception):
            raise step
        return step


@dataclass(frozen=True)
class CompletionResult:
    text: str
    attempts: int


def complete(
    prompt: str,
    config: ProviderConfig,
    system: str | None = None,
    transport: Transport | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> CompletionResult:
    """One completion with retry/backoff; returns the first message text."""
    transport = transport or http_transport
    messages: list[dict] = []
    if system is not None:
        messages.append({"role": "system", "content": system})
    messages.append({"role": "user", "content": prompt})

    last: ProviderError | None = None
    for attempt in range(1, config.max_retries + 2):
        try:
            return CompletionResult(text=transport(messages, config), attempts=attempt)
        except TransientProviderError as exc:
            last = exc
            if attempt <= config.max_retries:
                sleep(config.backoff_base * 2 ** (attempt - 1))
    raise ProviderError(
        f"gave up after {config.max_retries + 1} attempts: {last}"
    ) from last


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ManifestRecord:
    doc_id: str
    prompt_sha256: str
    response: str | None
    error: str | None
    latency_s: float
    attempts: int


@dataclass
class RunManifest:
    run_id: str
    corpus: str
    mode: str
    provider: dict
    doc_count: int
    records: dict[str, ManifestRecord] = field(default_factory=dict)

    @property
    def status(self) -> str:
        if len(self.records) < self.doc_count:
            return STATUS_INCOMPLETE
        if any(r.error is not None for r in self.records.values()):
            return STATUS_COMPLETE_WITH_ERRORS
        return STATUS_COMPLETE

    def responses(self) -> dict[str, str]:
        return {
            doc_id: r.response
            for doc_id, r in self.records.items()
            if r.response is not None
        }


def _record_to_line(record: ManifestRecord) -> str:
    return json.dumps(
        {
            "kind": "record",
            "doc_id": record.doc_id,
            "prompt_sha256": record.prompt_sha256,
            "response": record.response,
            "error": record.error,
            "latency_s": record.latency_s,
            "attempts": record.attempts,
        },
        sort_keys=True,
    )


def load_manifest(path: str | Path) -> RunManifest:
    path = Path(path)
    manifest: RunManifest | None = None
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            payload = json.loads(line)
            if payload.get("kind") == "header":
                manifest = RunManifest(
                    run_id=payload["run_id"],
                    corpus=payload["corpus"],
                    mode=payload["mode"],
                    provider=payload["provider"],
                    doc_count=payload["doc_count"],
                )
            elif payload.get("kind") == "record":
                if manifest is None:
                    raise ProviderError(f"{path}: record before header at line {lineno}")
                record = ManifestRecord(
                    doc_id=payload["doc_id"],
                    prompt_sha256=payload["prompt_sha256"],
                    response=payload["response"],
                    error=payload["error"],
                    latency_s=payload["latency_s"],
                    attempts=payload["attempts"],
                )
                manifest.records[record.doc_id] = record
    if manifest is None:
        raise ProviderError(f"{path}: no manifest header found")
    return manifest


def batch_infer(
    docs: Sequence[AnnotatedDocument],
    prompt_builder: Callable[[AnnotatedDocument], str],
    config: ProviderConfig,
    manifest_path: str | Path,
    run_id: str,
    corpus_name: str,
    mode: str,
    transport: Transport | None = None,
    concurrency: int = 4,
    sleep: Callable[[float], None] = time.sleep,
) -> RunManifest:
    """Run inference over a split, one manifest record per document.

    Per-document provider failures are recorded and the run continues;
    re-invocation with an existing manifest skips every recorded document.
    """
    manifest_path = Path(manifest_path)
    doc_ids = [doc.doc_id for doc in docs]
    if len(set(doc_ids)) != len(doc_ids):
        raise ProviderError("duplicate doc_ids in the inference split")

    if manifest_path.exists():
        manifest = load_manifest(manifest_path)
        if (manifest.run_id, manifest.corpus, manifest.mode) != (run_id, corpus_name, mode):
            raise ProviderError(
                f"{manifest_path} belongs to run "
                f"{(manifest.run_id, manifest.corpus, manifest.mode)}; refusing to mix runs"
            )
        fh = manifest_path.open("a", encoding="utf-8")
    else:
        manifest = RunManifest(
            run_id=run_id,
            corpus=corpus_name,
            mode=mode,
            provider=config.to_public_dict(),
            doc_count=len(docs),
        )
        fh = manifest_path.open("w", encoding="utf-8")
        header = {
            "kind": "header",
            "run_id": run_id,
            "corpus": corpus_name,
            "mode": mode,
            "provider": manifest.provider,
            "doc_count": len(docs),
        }
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        fh.flush()

    pending = [doc for doc in docs if doc.doc_id not in manifest.records]

    def run_one(doc: AnnotatedDocument) -> ManifestRecord:
        prompt = prompt_builder(doc)
        started = time.perf_counter()
        try:
            result = complete(prompt, config, transport=transport, sleep=sleep)
            return ManifestRecord(
                doc_id=doc.doc_id,
                prompt_sha256=prompt_hash(prompt),
                response=result.text,
                error=None,
                latency_s=time.perf_counter() - started,
                attempts=result.attempts,
            )
        except ProviderError as exc:
            return ManifestRecord(
                doc_id=doc.doc_id,
                prompt_sha256=prompt_hash(prompt),
                response=None,
                error=str(exc),
                latency_s=time.perf_counter() - started,
                attempts=config.max_retries + 1,
            )

    try:
        with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
            futures = [pool.submit(run_one, doc) for doc in pending]
            for future in as_completed(futures):
                record = future.result()
                manifest.records[record.doc_id] = record
                fh.write(_record_to_line(record) + "\n")
                fh.flush()
    finally:
        fh.close()

    return manifest
