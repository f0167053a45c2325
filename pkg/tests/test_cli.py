import hashlib
import json

import pytest

from conftest import run_cli
from doctypeclf.harvest.fixture_server import FixtureServer
from doctypeclf.manifest import manifest_path


def data_args(p):
    return ["--features", p["features"], "--labels", p["labels"], "--splits", p["splits"]]


def read_rows(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def test_split_twice_identical(pipeline, tmp_path):
    p = pipeline()
    again = tmp_path / "splits2.jsonl"
    assert run_cli("split", "--features", p["features"], "--labels", p["labels"], "--merged", p["merged"],
                   "--ratios", "0.8,0.1,0.1", "--seed", "42", "--min-publisher-works", "0",
                   "--out", again) == 0
    assert again.read_bytes() == p["splits"].read_bytes()
    splits = {r["split"] for r in read_rows(again)}
    assert splits == {"train", "test", "validation"}


def test_stage_outputs_and_manifests(pipeline):
    p = pipeline()
    merged = read_rows(p["merged"])
    assert [r["key"] for r in merged] == sorted(r["key"] for r in merged)
    feats = read_rows(p["features"])
    assert set(feats[0]) == {"key", "issue_override_triggered", "f1_has_abstract", "f2_title_word_count",
                             "f3_page_count", "f4_author_count", "f5_has_license", "f6_citation_count",
                             "f7_reference_count", "f8_has_funding", "f9_affiliation_count",
                             "f10_has_oa_url"}
    labels = read_rows(p["labels"])
    assert {r["label"] for r in labels} == {"research", "non-research"}
    assert all(r["matched_types"] for r in labels)
    man = json.loads(manifest_path(p["features"]).read_text())
    assert man["stage"] == "featurize"
    assert man["inputs"][str(p["merged"])] == hashlib.sha256(p["merged"].read_bytes()).hexdigest()
    assert man["outputs"][str(p["features"])] == hashlib.sha256(p["features"].read_bytes()).hexdigest()
    man = json.loads(manifest_path(p["labels"]).read_text())
    assert man["stats"]["unmappable"] > 0


def test_classify_applies_issue_rule(pipeline, tmp_path):
    p = pipeline()
    model = tmp_path / "knn.json"
    assert run_cli("train", "--model", "knn", *data_args(p), "--hyper", "k=5", "--out", model) == 0
    out = tmp_path / "pred.jsonl"
    assert run_cli("classify", "--model", model, "--features", p["features"], "--apply-issue-rule",
                   "--out", out) == 0
    rows = read_rows(out)
    merged = {r["key"]: r for r in read_rows(p["merged"])}
    suppl = [r for r in rows if merged[r["key"]]["crossref"]["issue"] == "Suppl 1"]
    assert suppl
    assert all(r["label"] == "non-research" for r in suppl)
    # without the flag the model's own label is kept
    plain = tmp_path / "plain.jsonl"
    assert run_cli("classify", "--model", model, "--features", p["features"], "--out", plain) == 0
    assert all(r["label"] == r["model_label"] for r in read_rows(plain))


def test_report_group_by(pipeline, tmp_path):
    p = pipeline()
    model, preds, rep = tmp_path / "b.json", tmp_path / "pred.jsonl", tmp_path / "report.json"
    assert run_cli("train", "--model", "baseline", *data_args(p), "--out", model) == 0
    assert run_cli("classify", "--model", model, "--features", p["features"], "--out", preds) == 0
    assert run_cli("report", "--predictions", preds, "--merged", p["merged"], "--group-by", "year",
                   "--out", rep) == 0
    report = json.loads(rep.read_text())
    assert report["total"] == len(read_rows(p["merged"]))
    assert sum(g["total"] for g in report["groups"].values()) == report["total"]
    assert report["non_research"] >= report["non_research_before_override"]
    assert report["override_triggered"] == sum(r["issue_override_triggered"] for r in read_rows(preds))


def test_inputs_not_mutated_and_rerun_identical(pipeline, tmp_path):
    p = pipeline()
    before = {k: v.read_bytes() for k, v in p.items() if k != "dir"}
    out1, out2 = tmp_path / "m1.json", tmp_path / "m2.json"
    for out in (out1, out2):
        assert run_cli("train", "--model", "rf", *data_args(p), "--hyper", "n_trees=5", "--out", out) == 0
    assert out1.read_bytes() == out2.read_bytes()
    m1, m2 = (json.loads(manifest_path(o).read_text()) for o in (out1, out2))
    for m in (m1, m2):
        m.pop("created_at")
        m["outputs"] = list(m["outputs"].values())
    assert m1 == m2
    assert before == {k: v.read_bytes() for k, v in p.items() if k != "dir"}


def test_exit_codes(api_env, tmp_path, capsys, monkeypatch):
    assert run_cli("featurize", "--merged", tmp_path / "nope.jsonl", "--out", tmp_path / "f.jsonl") == 3
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("error: input-not-found:")
    assert run_cli("harvest", "--source", "crossref", "--year-from", "2020", "--year-to", "2010",
                   "--out", tmp_path / "x.jsonl") == 4
    with pytest.raises(SystemExit) as exc:
        run_cli("train", "--model", "svm")
    assert exc.value.code == 2
    with FixtureServer(fail_times=10, fail_status=429) as srv:
        monkeypatch.setenv("CROSSREF_BASE_URL", srv.url("crossref"))
        monkeypatch.setattr("doctypeclf.harvest.client.HarvestConfig.backoff_base", 0.001)
        assert run_cli("harvest", "--source", "crossref", "--rps", "1000", "--out", tmp_path / "x.jsonl") == 5
    assert "error: api: RateLimited" in capsys.readouterr().err
    monkeypatch.delenv("CONTACT_MAILTO")
    assert run_cli("harvest", "--source", "crossref", "--out", tmp_path / "x.jsonl") == 4


def test_config_file(pipeline, tmp_path):
    p = pipeline()
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 42, "min_publisher_works": 0, "ratios": [0.8, 0.1, 0.1]}))
    out = tmp_path / "s.jsonl"
    assert run_cli("--config", cfg, "split", "--features", p["features"], "--labels", p["labels"],
                   "--merged", p["merged"], "--out", out) == 0
    assert out.read_bytes() == p["splits"].read_bytes()
    cfg.write_text(json.dumps({"seed": 1, "colour": "blue"}))
    assert run_cli("--config", cfg, "split", "--features", p["features"], "--labels", p["labels"],
                   "--merged", p["merged"], "--out", out) == 4


def test_default_publisher_filter_empties_fixture(pipeline, tmp_path):
    p = pipeline()
    # the fixture is far below 5000 works per publisher, so nothing survives to be split
    assert run_cli("split", "--features", p["features"], "--labels", p["labels"], "--merged", p["merged"],
                   "--out", tmp_path / "s.jsonl") == 4


def test_grid_file(pipeline, tmp_path):
    p = pipeline()
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"knn": {"k": [3, 7]}}))
    out = tmp_path / "knn.json"
    assert run_cli("train", "--model", "knn", *data_args(p), "--grid", grid, "--out", out) == 0
    man = json.loads(manifest_path(out).read_text())
    assert [r["hyper"]["k"] for r in man["stats"]["grid_report"]] == [3, 7]
    assert json.loads(out.read_text())["hyperparameters"]["k"] in (3, 7)
