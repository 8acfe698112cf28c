import math
from collections import Counter

import pytest

from scgkit.corpus import AnnotatedDocument, Corpus, EventMention
from scgkit.instructions import (
    DEFAULT_DEMARCATION,
    GenerationError,
    doc_rng,
    gen_dataset,
    gen_record,
    load_records,
    render_response,
    render_training_text,
)
from scgkit.parsing import parse_prediction
from scgkit.templates import INSTRUCTION_TEMPLATES, TEMPLATE_COUNT, get_template

INVENTORY = ("Attack", "Movement", "Transport", "Meet", "Injure", "Die")


def mention(trigger, start, event_type):
    return EventMention(trigger, start, start + len(trigger), event_type)


def test_template_pool_shape():
    assert TEMPLATE_COUNT == 20
    assert [t.template_id for t in INSTRUCTION_TEMPLATES] == list(range(1, 21))
    assert get_template(1).text.startswith(
        "As an event detection assistant, your task is to identify the event triggers"
    )
    with pytest.raises(ValueError):
        get_template(0)
    with pytest.raises(ValueError):
        get_template(21)


def test_render_scg_single():
    out = render_response([mention("fired", 7, "Attack")], "scg")
    assert out == "Event trigger: fired ; Event type: Attack"


def test_render_standard_single():
    out = render_response([mention("fired", 7, "Attack")], "standard")
    assert out == "Event type: Attack"


def test_render_empty_is_sentinel():
    assert render_response([], "scg") == "None"
    assert render_response([], "standard") == "None"


def test_render_orders_by_span_start():
    events = [mention("died", 30, "Die"), mention("fired", 7, "Attack")]
    out = render_response(events, "scg")
    assert out.splitlines() == [
        "Event trigger: fired ; Event type: Attack",
        "Event trigger: died ; Event type: Die",
    ]


def test_render_tie_breaks_by_type():
    events = [
        EventMention("fired", 7, 12, "Die"),
        EventMention("fired", 7, 12, "Attack"),
    ]
    out = render_response(events, "scg")
    assert out.splitlines()[0].endswith("Attack")


def test_render_rejects_unknown_mode():
    with pytest.raises(GenerationError):
        render_response([], "chain")


def test_trigger_precedes_type_in_every_scg_line(train_corpus):
    for doc in train_corpus.documents:
        if doc.is_negative:
            continue
        for line in render_response(doc.events, "scg").splitlines():
            assert line.index("Event trigger:") < line.index("Event type:")


def test_gen_record_deterministic(train_corpus):
    doc = train_corpus.documents[0]
    records = [gen_record(doc, "scg", doc_rng(0, doc.doc_id)) for _ in range(5)]
    assert len({r.template_id for r in records}) == 1
    assert records[0].instruction_text == get_template(records[0].template_id).text
    assert records[0].input_text == doc.text


def test_gen_record_negative_doc(train_corpus):
    doc = train_corpus.get("t7")
    record = gen_record(doc, "scg", doc_rng(0, doc.doc_id))
    assert record.response_text == "None"


def test_demarcation_tokens_exactly_once(train_corpus):
    for doc in train_corpus.documents:
        record = gen_record(doc, "scg", doc_rng(0, doc.doc_id))
        rendered = render_training_text(record)
        for token in DEFAULT_DEMARCATION:
            assert rendered.count(token) == 1


def test_demarcation_collision_raises(train_corpus):
    doc = train_corpus.documents[0]
    with pytest.raises(GenerationError, match="demarcation"):
        gen_record(doc, "scg", doc_rng(0, doc.doc_id), demarcation=("Troops", "<|r|>"))


def test_roundtrip_all_fixture_docs_both_modes(train_corpus, test_corpus, dev_corpus):
    for corpus in (train_corpus, test_corpus, dev_corpus):
        for doc in corpus.documents:
            scg = parse_prediction(
                render_response(doc.events, "scg"), corpus.type_inventory, doc.doc_id
            )
            assert scg.pair_multiset() == Counter(
                (ev.trigger_text.lower(), ev.event_type.lower()) for ev in doc.events
            )
            std = parse_prediction(
                render_response(doc.events, "standard"), corpus.type_inventory, doc.doc_id
            )
            assert std.type_multiset() == Counter(
                ev.event_type.lower() for ev in doc.events
            )


def test_gen_dataset_counts_and_manifest(train_corpus, tmp_path):
    out = tmp_path / "ds.jsonl"
    manifest = gen_dataset(train_corpus, "scg", 0, out)
    assert manifest["record_count"] == len(train_corpus.documents)
    assert manifest["seed"] == 0
    assert manifest["mode"] == "scg"
    assert (tmp_path / "ds.manifest.json").exists()
    records = load_records(out)
    assert [r.doc_id for r in records] == list(train_corpus.doc_ids)


def test_gen_dataset_byte_identical_across_runs(train_corpus, tmp_path):
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    gen_dataset(train_corpus, "scg", 42, out1)
    gen_dataset(train_corpus, "scg", 42, out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_scg_and_standard_share_prompt_sections(train_corpus, tmp_path):
    gen_dataset(train_corpus, "scg", 7, tmp_path / "scg.jsonl")
    gen_dataset(train_corpus, "standard", 7, tmp_path / "std.jsonl")
    scg = load_records(tmp_path / "scg.jsonl")
    std = load_records(tmp_path / "std.jsonl")
    for a, b in zip(scg, std):
        assert (a.instruction_text, a.input_text) == (b.instruction_text, b.input_text)
    assert any(a.response_text != b.response_text for a, b in zip(scg, std))


def test_template_draws_uniform_within_3_sigma():
    docs = [
        AnnotatedDocument(f"u{i:05d}", "calm text", (), "train") for i in range(10_000)
    ]
    corpus = Corpus("uniform", tuple(docs), INVENTORY)
    counts = Counter(
        gen_record(doc, "scg", doc_rng(0, doc.doc_id)).template_id
        for doc in corpus.documents
    )
    n, p = 10_000, 1 / TEMPLATE_COUNT
    expected = n * p
    sigma = math.sqrt(n * p * (1 - p))
    assert set(counts) == set(range(1, 21))
    for template_id, count in counts.items():
        assert abs(count - expected) <= 3 * sigma, (template_id, count)
