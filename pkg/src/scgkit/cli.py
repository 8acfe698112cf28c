"""Command-line entry point for the full pipeline.

Subcommands: ingest, gen-instructions, gen-dpo, prompt, infer, parse, score,
complexity, ablate. Anything multi-field (provider endpoints, output
directory, seeds) lives in a JSON config file passed with --config; flags
override config values. API keys come from environment variables named in
the config, never from files or flags.

Offline runs use mock providers: ``--mock none`` answers the empty sentinel,
``--mock echo-gold`` answers each prompt with the gold rendering of its
target document, and ``--mock identity`` (ablate) echoes the original text.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import ablation, complexity, gateway, instructions, parsing, preferences, prompting, scoring
from .corpus import Corpus, CorpusError, corpus_stats, load_corpus, load_type_schema, save_corpus
from .embeddings import DEFAULT_DIMENSION, EmbeddingError, HashEmbedder, HTTPEmbedder, build_index
from .graph import GraphConstructionError, InvalidGraphError, build_scg, save_graphs


class CliError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    config_path = Path(path)
    if not config_path.exists():
        raise CliError(f"config file not found: {config_path}")
    return json.loads(config_path.read_text(encoding="utf-8"))


def _corpus_from_args(args, config: dict, role: str = "data") -> Corpus:
    data = getattr(args, role.replace("-", "_"))
    schema = args.schema or config.get("schema")
    split = getattr(args, "split", None) or "test"
    if role == "train":
        split = "train"
    return load_corpus(data, split, schema=schema)


def _provider_config(args, config: dict) -> gateway.ProviderConfig:
    section = dict(config.get("inference_provider", {}))
    if getattr(args, "endpoint", None):
        section["endpoint"] = args.endpoint
    if getattr(args, "model", None):
        section["model"] = args.model
    if getattr(args, "mock", None):
        section.setdefault("endpoint", "mock://local")
        section.setdefault("model", "mock")
        section.setdefault("backoff_base", 0.0)
    if "endpoint" not in section or "model" not in section:
        raise CliError(
            "provider endpoint and model required (config inference_provider "
            "section or --endpoint/--model), unless --mock is used"
        )
    return gateway.ProviderConfig(**section)


def _embedder(args, config: dict):
    section = config.get("embedding_provider", {})
    if getattr(args, "hash_embedder", False) or "base_url" not in section:
        return HashEmbedder(dimension=section.get("dimension", DEFAULT_DIMENSION))
    return HTTPEmbedder(
        base_url=section["base_url"],
        dimension=section.get("dimension"),
        auth_env=section.get("auth_env", "EMBEDDING_API_KEY"),
    )


def _mock_transport(kind: str, gold: Corpus | None):
    if kind == "none":
        return gateway.MockTransport(lambda messages: "None")
    if kind == "echo-gold":
        if gold is None:
            raise CliError("--mock echo-gold needs the gold corpus")
        by_text = {
            doc.text: instructions.render_response(doc.events, "scg")
            for doc in gold.documents
        }

        def answer(messages):
            prompt = messages[-1]["content"]
            target = prompting.target_text_from_prompt(prompt)
            if target not in by_text:
                raise gateway.ProviderError(f"mock has no document for target {target[:40]!r}")
            return by_text[target]

        return gateway.MockTransport(answer)
    if kind == "identity":
        def echo_original(messages):
            prompt = messages[-1]["content"]
            _, _, text = prompt.partition("Text:\n")
            return text

        return gateway.MockTransport(echo_original)
    raise CliError(f"unknown mock kind {kind!r}")


def _prompt_builder(args, config: dict, train: Corpus):
    mode = args.prompt_mode
    if mode == prompting.ZERO_SHOT:
        selector = None
    elif mode == prompting.SIX_SHOT:
        selector = random.Random(args.seed)
    else:
        provider = _embedder(args, config)
        index = build_index(
            ((doc.doc_id, doc.text) for doc in train.documents), provider
        )
        selector = prompting.RagSelector(index=index, provider=provider)

    def build(doc) -> str:
        spec = prompting.build_prompt(mode, doc, train, selector)
        return prompting.render_prompt(spec)

    return build


def _read_responses(path: str | Path) -> dict[str, str]:
    """Accept either a run manifest or bare {doc_id, response} lines."""
    path = Path(path)
    first = ""
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                first = line
                break
    if first and json.loads(first).get("kind") == "header":
        return gateway.load_manifest(path).responses()
    out: dict[str, str] = {}
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                record = json.loads(line)
                out[record["doc_id"]] = record["response"]
    return out


def cmd_ingest(args, config: dict) -> int:
    corpus = _corpus_from_args(args, config)
    stats = corpus_stats(corpus)
    if args.out:
        save_corpus(corpus, args.out)
    if args.graphs_out:
        save_graphs([build_scg(doc) for doc in corpus.documents], args.graphs_out)
    print(
        f"{corpus.name} [{args.split}]: {stats.doc_count} docs, "
        f"{stats.event_count} events, {stats.type_count} types, "
        f"negative ratio {stats.negative_doc_ratio:.3f}"
    )
    return 0


def cmd_gen_instructions(args, config: dict) -> int:
    corpus = _corpus_from_args(args, config)
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    manifest = instructions.gen_dataset(corpus, args.mode, seed, args.out)
    print(
        f"wrote {manifest['record_count']} {args.mode} records to {args.out} "
        f"(seed {manifest['seed']})"
    )
    return 0


def cmd_gen_dpo(args, config: dict) -> int:
    corpus = _corpus_from_args(args, config)
    responses = _read_responses(args.responses)
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    pairs = preferences.build_dpo_pairs(corpus, responses, args.mode, seed=seed)
    preferences.save_dpo_pairs(pairs, args.out)
    print(f"wrote {len(pairs)} preference pairs to {args.out} "
          f"({len(responses) - len(pairs)} responses were correct)")
    return 0


def cmd_prompt(args, config: dict) -> int:
    corpus = _corpus_from_args(args, config)
    train = _corpus_from_args(args, config, role="train")
    build = _prompt_builder(args, config, train)
    with Path(args.out).open("w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            fh.write(
                json.dumps(
                    {"doc_id": doc.doc_id, "mode": args.prompt_mode, "prompt": build(doc)},
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"wrote {len(corpus.documents)} {args.prompt_mode} prompts to {args.out}")
    return 0


def cmd_infer(args, config: dict) -> int:
    corpus = _corpus_from_args(args, config)
    train = _corpus_from_args(args, config, role="train")
    provider_config = _provider_config(args, config)
    transport = _mock_transport(args.mock, corpus) if args.mock else None
    build = _prompt_builder(args, config, train)
    manifest = gateway.batch_infer(
        corpus.documents,
        build,
        provider_config,
        args.out,
        run_id=args.run_id,
        corpus_name=corpus.name,
        mode=args.prompt_mode,
        transport=transport,
        concurrency=args.concurrency,
    )
    errors = sum(1 for r in manifest.records.values() if r.error)
    print(
        f"run {manifest.run_id}: {len(manifest.records)}/{manifest.doc_count} docs, "
        f"{errors} errors, status {manifest.status}"
    )
    return 0


def cmd_parse(args, config: dict) -> int:
    schema = args.schema or config.get("schema")
    if schema is None:
        raise CliError("parse needs --schema (the type inventory)")
    inventory = load_type_schema(schema)
    manifest = gateway.load_manifest(args.manifest)
    predictions = [
        parsing.parse_prediction(response, inventory, doc_id)
        for doc_id, response in sorted(manifest.responses().items())
    ]
    parsing.save_predictions(predictions, args.out)
    failed = sum(1 for p in predictions if p.parse_status == parsing.STATUS_FAILED)
    print(f"parsed {len(predictions)} responses to {args.out} ({failed} failed)")
    return 0


def cmd_score(args, config: dict) -> int:
    corpus = _corpus_from_args(args, config, role="gold")
    predictions = parsing.load_predictions(args.pred)
    report = scoring.score(corpus, predictions, ec_document_level=args.ec_document_level)
    print(scoring.format_report_table(report))
    if args.out:
        Path(args.out).write_text(
            json.dumps(scoring.report_to_dict(report), sort_keys=True, indent=2) + "\n"
        )
    return 0


def cmd_complexity(args, config: dict) -> int:
    if args.from_table:
        atl, tpd, et, mtr = args.from_table
        print(f"{complexity.complexity_from_metrics(atl, tpd, et, mtr):.2f}")
        return 0
    if not args.data:
        raise CliError("complexity needs --data or --from-table")
    corpus = _corpus_from_args(args, config)
    report = complexity.complexity_from_corpus(corpus)
    print(
        f"{corpus.name}: atl {report.atl:.2f}, tpd {report.tpd:.2f}, "
        f"et {report.et}, mtr {report.mtr:.2f}, c {report.c:.2f}"
    )
    if args.out:
        Path(args.out).write_text(
            json.dumps(
                {
                    "atl": report.atl,
                    "tpd": report.tpd,
                    "et": report.et,
                    "mtr": report.mtr,
                    "c": report.c,
                },
                sort_keys=True,
                indent=2,
            )
            + "\n"
        )
    return 0


def cmd_ablate(args, config: dict) -> int:
    corpus = _corpus_from_args(args, config)
    provider_config = _provider_config(args, config)
    transport = _mock_transport(args.mock, corpus) if args.mock else None
    modified, results = ablation.ablate_corpus(
        corpus,
        provider_config,
        max_attempts=args.max_attempts,
        transport=transport,
    )
    save_corpus(modified, args.out)
    exhausted = [r.doc_id for r in results if r.status == ablation.STATUS_EXHAUSTED]
    with Path(args.report).open("w", encoding="utf-8") as fh:
        for result in results:
            fh.write(
                json.dumps(
                    {
                        "doc_id": result.doc_id,
                        "status": result.status,
                        "attempts": result.attempts,
                        "triggers_verified": result.triggers_verified,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    print(
        f"ablated {len(modified.documents)}/{len(corpus.documents)} docs to {args.out} "
        f"({len(exhausted)} exhausted)"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scgkit", description="Event-detection dataset and evaluation pipeline"
    )
    parser.add_argument("--config", help="JSON config file; flags override its values")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_corpus_args(p, role="data", split_default=None):
        p.add_argument(f"--{role}", required=True, help=f"{role} corpus JSONL")
        p.add_argument("--schema", help="sidecar type inventory (default: types.txt beside the corpus)")
        if split_default is not None:
            p.add_argument("--split", default=split_default, choices=("train", "dev", "test"))

    p = sub.add_parser("ingest", help="load a corpus, validate it, report stats")
    add_corpus_args(p, split_default="train")
    p.add_argument("--out", help="re-serialize the validated corpus here")
    p.add_argument("--graphs-out", help="write one causal graph record per document")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("gen-instructions", help="generate an instruction dataset")
    add_corpus_args(p, split_default="train")
    p.add_argument("--mode", required=True, choices=instructions.MODES)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_instructions)

    p = sub.add_parser("gen-dpo", help="build preference pairs from dev-set errors")
    add_corpus_args(p, split_default="dev")
    p.add_argument("--responses", required=True, help="run manifest or {doc_id, response} JSONL")
    p.add_argument("--mode", default="scg", choices=instructions.MODES)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_dpo)

    def add_prompt_args(p):
        p.add_argument("--train", required=True, help="training-split corpus JSONL")
        p.add_argument(
            "--prompt-mode", required=True, choices=prompting.PROMPT_MODES
        )
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--hash-embedder", action="store_true",
                       help="use the deterministic offline embedder for RAG")

    p = sub.add_parser("prompt", help="render inference prompts for a split")
    add_corpus_args(p, split_default="test")
    add_prompt_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_prompt)

    p = sub.add_parser("infer", help="run inference over a split into a run manifest")
    add_corpus_args(p, split_default="test")
    add_prompt_args(p)
    p.add_argument("--out", required=True, help="run manifest path (resumable)")
    p.add_argument("--run-id", required=True)
    p.add_argument("--endpoint")
    p.add_argument("--model")
    p.add_argument("--mock", choices=("none", "echo-gold"))
    p.add_argument("--concurrency", type=int, default=4)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("parse", help="parse run-manifest responses into predictions")
    p.add_argument("--manifest", required=True)
    p.add_argument("--schema", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("score", help="score predictions against a gold corpus")
    add_corpus_args(p, role="gold", split_default="test")
    p.add_argument("--pred", required=True, help="predictions JSONL from `parse`")
    p.add_argument("--out", help="write the report as JSON here")
    p.add_argument("--ec-document-level", action="store_true",
                   help="score EC on per-document type sets instead of mention multisets")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("complexity", help="dataset complexity report")
    p.add_argument("--data")
    p.add_argument("--schema")
    p.add_argument("--split", default="train", choices=("train", "dev", "test"))
    p.add_argument(
        "--from-table",
        nargs=4,
        type=float,
        metavar=("ATL", "TPD", "ET", "MTR"),
        help="compute the composite score from the four statistics directly",
    )
    p.add_argument("--out")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("ablate", help="rewrite a split's context, preserving triggers")
    add_corpus_args(p, split_default="test")
    p.add_argument("--out", required=True, help="modified corpus JSONL")
    p.add_argument("--report", required=True, help="per-document result JSONL")
    p.add_argument("--endpoint")
    p.add_argument("--model")
    p.add_argument("--mock", choices=("identity", "none"))
    p.add_argument("--max-attempts", type=int, default=ablation.DEFAULT_MAX_ATTEMPTS)
    p.set_defaults(func=cmd_ablate)

    return parser


_KNOWN_ERRORS = (
    CliError,
    CorpusError,
    EmbeddingError,
    GraphConstructionError,
    InvalidGraphError,
    ablation.AblationError,
    complexity.ComplexityError,
    gateway.ProviderError,
    instructions.GenerationError,
    preferences.PreferenceError,
    prompting.PromptError,
    scoring.ScoringError,
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except _KNOWN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
