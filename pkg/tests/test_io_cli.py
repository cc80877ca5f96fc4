import json

import pytest

from relgrid.cli import main
from relgrid.commands import Pattern
from relgrid.distractors import GeneratorConfig, generate_corpus
from relgrid.io import (
    FORMAT_VERSION,
    check_record,
    from_record,
    manifest_path,
    read_dataset,
    read_predictions,
    to_record,
    validate_file,
    worker_count,
    write_dataset,
)


@pytest.fixture(scope="module")
def examples():
    out = []
    for p in (Pattern.SIMPLE, Pattern.ONE_REL, Pattern.TWO_REL):
        out += generate_corpus(p, GeneratorConfig(worlds_per_command=2, seed=1), 8)[0]
    return out


def test_roundtrip(tmp_path, examples):
    path = tmp_path / "d.jsonl"
    manifest = write_dataset(examples, path, seed=1)
    assert read_dataset(path) == examples
    assert manifest["count"] == len(examples)
    assert manifest["patterns"] == {"1rel": 16, "2rel": 16, "simple": 16}
    assert json.loads(manifest_path(path).read_text())["seed"] == 1
    assert validate_file(path).ok


def test_record_layout(examples):
    rec = to_record(examples[0])
    assert list(rec)[:3] == ["format_version", "id", "command"]
    assert rec["format_version"] == FORMAT_VERSION
    assert from_record(rec) == examples[0]


def test_tampered_records_fail(examples):
    rec = to_record(next(e for e in examples if e.pattern is Pattern.ONE_REL))
    moved = json.loads(json.dumps(rec))
    moved["action_tokens"] = "walk"
    assert check_record(moved)
    twin = json.loads(json.dumps(rec))
    t = next(o for o in twin["objects"] if o["id"] == twin["target"]["id"])
    clone = dict(t, id=99)
    free = {(r, c) for r in range(6) for c in range(6)} - {(o["row"], o["col"]) for o in twin["objects"]}
    free.discard((twin["agent"]["row"], twin["agent"]["col"]))
    clone["row"], clone["col"] = sorted(free)[0]
    twin["objects"].append(clone)
    assert any("referents" in p or "relation" in p or "annotation" in p for p in check_record(twin))
    assert check_record({"format_version": 99})


def test_read_errors_have_context(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n")
    with pytest.raises(OSError, match="bad.jsonl:1"):
        read_dataset(bad)
    with pytest.raises(OSError, match="missing.jsonl"):
        read_dataset(tmp_path / "missing.jsonl")


def test_worker_count(monkeypatch):
    monkeypatch.setenv("RELGRID_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("RELGRID_WORKERS", "x")
    with pytest.raises(ValueError):
        worker_count()


def test_cli_pipeline(tmp_path, capsys):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert main(["generate", "--pattern", "simple", "--commands", "30", "--worlds", "2", "--seed", "1", "--out", str(a)]) == 0
    assert main(["generate", "--pattern", "simple", "--commands", "30", "--worlds", "2", "--seed", "1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["validate", "--in", str(a)]) == 0
    pred = tmp_path / "p.jsonl"
    assert main(["solve", "--in", str(a), "--out", str(pred)]) == 0
    assert len(read_predictions(pred)) == 60
    capsys.readouterr()
    assert main(["evaluate", "--gold", str(a), "--pred", str(pred), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["exact_match_percent"] == 100.0
    assert main(["stats", "--in", str(a)]) == 0
    assert main(["split", "--kind", "random", "--in", str(a), "--out-dir", str(tmp_path / "s"), "--ratios", "0.8,0.1,0.1"]) == 0
    assert json.loads((tmp_path / "s" / "split.json").read_text())["kind"] == "random"


def test_cli_random_only(tmp_path):
    out = tmp_path / "rd.jsonl"
    assert main(["generate", "--pattern", "2rel", "--commands", "5", "--worlds", "2", "--distractors", "random-only",
                 "--out", str(out)]) == 0
    kinds = {d["kind"] for rec in map(json.loads, out.read_text().splitlines()) for d in rec["distractors"]}
    assert kinds <= {"random"}


def test_cli_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--pattern", "nope", "--out", "x"])
    assert exc.value.code != 0
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"format_version": 1, "id": "z"}\n')
    assert main(["validate", "--in", str(bad)]) == 1
    assert main(["stats", "--in", str(tmp_path / "missing.jsonl")]) == 2
