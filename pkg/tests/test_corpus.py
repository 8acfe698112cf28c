import json

import pytest

from scgkit.corpus import (
    Corpus,
    CorpusError,
    EventMention,
    corpus_stats,
    load_corpus,
    save_corpus,
)

from conftest import DATA_DIR, SCHEMA


def write_lines(path, records):
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def test_load_fixture_document(train_corpus):
    doc = train_corpus.get("t1")
    assert doc.text == "Troops fired at dawn near the border."
    assert len(doc.events) == 1
    ev = doc.events[0]
    assert (ev.trigger_text, ev.span, ev.event_type) == ("fired", (7, 12), "Attack")


def test_negative_document_retained(train_corpus):
    doc = train_corpus.get("t7")
    assert doc.is_negative
    assert doc.events == ()


def test_span_mismatch_names_doc_and_span(tmp_path):
    write_lines(
        tmp_path / "bad.jsonl",
        [{"doc_id": "x1", "text": "Troops fired at dawn",
          "events": [{"trigger": "fired", "span": [0, 5], "type": "Attack"}]}],
    )
    with pytest.raises(CorpusError, match=r"x1.*\(0, 5\)"):
        load_corpus(tmp_path / "bad.jsonl", "train", schema=SCHEMA)


def test_malformed_record_reports_line_number(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"doc_id": "a", "text": "ok", "events": []}\n{nope\n')
    with pytest.raises(CorpusError, match="line 2"):
        load_corpus(path, "train", schema=SCHEMA)


def test_span_out_of_bounds(tmp_path):
    write_lines(
        tmp_path / "bad.jsonl",
        [{"doc_id": "x2", "text": "short",
          "events": [{"trigger": "short", "span": [0, 99], "type": "Attack"}]}],
    )
    with pytest.raises(CorpusError, match="x2"):
        load_corpus(tmp_path / "bad.jsonl", "train", schema=SCHEMA)


def test_unknown_event_type_rejected(tmp_path):
    write_lines(
        tmp_path / "bad.jsonl",
        [{"doc_id": "x3", "text": "Troops fired",
          "events": [{"trigger": "fired", "span": [7, 12], "type": "NotAType"}]}],
    )
    with pytest.raises(CorpusError, match="NotAType"):
        load_corpus(tmp_path / "bad.jsonl", "train", schema=SCHEMA)


def test_duplicate_doc_id_rejected(tmp_path):
    record = {"doc_id": "dup", "text": "calm day", "events": []}
    write_lines(tmp_path / "bad.jsonl", [record, record])
    with pytest.raises(CorpusError, match="dup"):
        load_corpus(tmp_path / "bad.jsonl", "train", schema=SCHEMA)


def test_empty_or_inverted_span_rejected():
    with pytest.raises(CorpusError):
        EventMention("x", 5, 5, "Attack")
    with pytest.raises(CorpusError):
        EventMention("x", 6, 5, "Attack")


def test_roundtrip_structural_equality(train_corpus, tmp_path):
    out = tmp_path / "again.jsonl"
    save_corpus(train_corpus, out)
    again = load_corpus(out, "train", schema=SCHEMA, name=train_corpus.name)
    assert again == train_corpus


def test_stats_match_fixture(train_corpus):
    stats = corpus_stats(train_corpus)
    assert stats.doc_count == 8
    assert stats.event_count == sum(len(d.events) for d in train_corpus.documents)
    assert stats.type_count == 6
    assert stats.negative_doc_ratio == 1 / 8


def test_stats_empty_corpus():
    empty = Corpus("empty", (), ("Attack",))
    stats = corpus_stats(empty)
    assert (stats.doc_count, stats.event_count, stats.negative_doc_ratio) == (0, 0, 0.0)


def test_negative_ratio_bounds(train_corpus, test_corpus, dev_corpus):
    for corpus in (train_corpus, test_corpus, dev_corpus):
        assert 0.0 <= corpus_stats(corpus).negative_doc_ratio <= 1.0


def test_schema_file_missing(tmp_path):
    write_lines(tmp_path / "c.jsonl", [{"doc_id": "a", "text": "x", "events": []}])
    with pytest.raises(CorpusError, match="types.txt"):
        load_corpus(tmp_path / "c.jsonl", "train")


def test_unknown_split_rejected():
    with pytest.raises(CorpusError, match="validation"):
        load_corpus(DATA_DIR / "fixture.train.jsonl", "validation", schema=SCHEMA)
