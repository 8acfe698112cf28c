import json

import pytest

from scgkit.cli import main

from conftest import DATA_DIR, SCHEMA

TRAIN = str(DATA_DIR / "fixture.train.jsonl")
TEST = str(DATA_DIR / "fixture.test.jsonl")
DEV = str(DATA_DIR / "fixture.dev.jsonl")
TYPES = str(SCHEMA)


def test_unknown_subcommand_usage_error(capsys):
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_ingest_prints_stats(capsys):
    code = main(["ingest", "--data", TRAIN, "--split", "train", "--schema", TYPES])
    out = capsys.readouterr().out
    assert code == 0
    assert "8 docs" in out
    assert "10 events" in out
    assert "6 types" in out


def test_ingest_missing_file_exits_nonzero(capsys):
    code = main(["ingest", "--data", "no/such/file.jsonl", "--schema", TYPES])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_ingest_writes_graphs(tmp_path, capsys):
    graphs_out = tmp_path / "graphs.jsonl"
    code = main([
        "ingest", "--data", TRAIN, "--split", "train", "--schema", TYPES,
        "--graphs-out", str(graphs_out),
    ])
    assert code == 0
    lines = [json.loads(l) for l in graphs_out.read_text().splitlines()]
    assert len(lines) == 8
    assert {"context_nodes", "trigger_nodes", "type_nodes", "edges"} <= set(lines[0])


def test_gen_instructions_deterministic(tmp_path, capsys):
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (out1, out2):
        code = main([
            "gen-instructions", "--data", TRAIN, "--split", "train",
            "--schema", TYPES, "--mode", "scg", "--seed", "11", "--out", str(out),
        ])
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert json.loads((tmp_path / "a.manifest.json").read_text())["record_count"] == 8


def test_complexity_from_table(capsys):
    code = main(["complexity", "--from-table", "30.33", "1.03", "8", "0.04"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "31.38"


def test_complexity_from_corpus(capsys):
    code = main(["complexity", "--data", TRAIN, "--split", "train", "--schema", TYPES])
    assert code == 0
    assert "et 6" in capsys.readouterr().out


def full_pipeline(tmp_path, capsys, mock, run_id):
    manifest = tmp_path / f"{run_id}.jsonl"
    preds = tmp_path / f"{run_id}.preds.jsonl"
    report = tmp_path / f"{run_id}.report.json"
    assert main([
        "infer", "--data", TEST, "--split", "test", "--schema", TYPES,
        "--train", TRAIN, "--prompt-mode", "six_shot_rag", "--hash-embedder",
        "--mock", mock, "--run-id", run_id, "--out", str(manifest),
    ]) == 0
    assert main([
        "parse", "--manifest", str(manifest), "--schema", TYPES, "--out", str(preds),
    ]) == 0
    assert main([
        "score", "--gold", TEST, "--split", "test", "--schema", TYPES,
        "--pred", str(preds), "--out", str(report),
    ]) == 0
    capsys.readouterr()
    return json.loads(report.read_text())


def test_pipeline_echo_gold_scores_one(tmp_path, capsys):
    report = full_pipeline(tmp_path, capsys, "echo-gold", "echo")
    assert report["ec"]["f1"] == report["ti"]["f1"] == report["tc"]["f1"] == 1.0


def test_pipeline_always_none_scores_zero(tmp_path, capsys):
    report = full_pipeline(tmp_path, capsys, "none", "none")
    assert report["ec"]["f1"] == report["ti"]["f1"] == report["tc"]["f1"] == 0.0


def test_gen_dpo_from_responses_file(tmp_path, capsys):
    responses = tmp_path / "responses.jsonl"
    with responses.open("w") as fh:
        fh.write(json.dumps({"doc_id": "d1", "response": "wrong"}) + "\n")
        fh.write(json.dumps(
            {"doc_id": "d2", "response": "Event trigger: met ; Event type: Meet"}
        ) + "\n")
    out = tmp_path / "pairs.jsonl"
    code = main([
        "gen-dpo", "--data", DEV, "--split", "dev", "--schema", TYPES,
        "--responses", str(responses), "--mode", "scg", "--out", str(out),
    ])
    assert code == 0
    pairs = [json.loads(l) for l in out.read_text().splitlines()]
    assert [p["doc_id"] for p in pairs] == ["d1"]


def test_prompt_subcommand_writes_rendered_prompts(tmp_path, capsys):
    out = tmp_path / "prompts.jsonl"
    code = main([
        "prompt", "--data", TEST, "--split", "test", "--schema", TYPES,
        "--train", TRAIN, "--prompt-mode", "zero_shot", "--out", str(out),
    ])
    assert code == 0
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(lines) == 5
    assert lines[0]["prompt"].endswith("Response:")


def test_ablate_with_identity_mock(tmp_path, capsys):
    out = tmp_path / "ablated.jsonl"
    report = tmp_path / "ablation.report.jsonl"
    code = main([
        "ablate", "--data", TEST, "--split", "test", "--schema", TYPES,
        "--mock", "identity", "--out", str(out), "--report", str(report),
    ])
    assert code == 0
    docs = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(docs) == 5
    statuses = [json.loads(l)["status"] for l in report.read_text().splitlines()]
    assert statuses == ["accepted"] * 5


def test_config_file_supplies_schema(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"schema": TYPES}))
    code = main([
        "--config", str(config), "ingest", "--data", TRAIN, "--split", "train",
    ])
    assert code == 0
    assert "8 docs" in capsys.readouterr().out
