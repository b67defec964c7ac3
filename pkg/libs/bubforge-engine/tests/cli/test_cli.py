import json

import pytest

from bubforge.engine.bubdb import load_db, save_db
from bubforge.engine.cli import EXIT_INVALID, EXIT_OK, EXIT_RUNTIME, resolve_threads
from bubforge.engine.errors import ValidationError
from bubforge.engine.features.descriptors import extract_features
from bubforge.engine.imgproc.codecs import read_pgm, write_pbm, write_pgm


def scene_bytes(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def test_gradcheck_json(run):
    # ACT
    code, out, _ = run("gradcheck", "--seed", 1, "--json")

    # ASSERT
    payload = json.loads(out)
    assert code == EXIT_OK, "gradient check should pass"
    assert payload["max_rel_error"] < 1e-4, "relative error should be under tolerance"
    assert payload["seed"] == 1, "seed should be echoed"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nonsense"],
        ["stats"],
        ["eval", "--model", "m.bgan", "--sweep", "area"],
        ["corpus", "--out", "x.bdb", "--n", "many"],
    ],
)
def test_usage_errors_exit_invalid(run, argv):
    # ACT
    code, _, err = run(*argv)

    # ASSERT
    assert code == EXIT_INVALID, f"{argv} should be a usage error"
    assert "usage" in err, "usage should be printed"


def test_missing_file_is_runtime_error(run, tmp_path):
    # ACT
    code, _, err = run("stats", "--db", tmp_path / "absent.bdb")

    # ASSERT
    assert code == EXIT_RUNTIME, "missing input should exit 2"
    assert "bubforge stats" in err, "error should name the subcommand"


def test_synth_without_database(run, tmp_path):
    # ACT
    code, _, err = run("synth", "--out", tmp_path / "scenes")

    # ASSERT
    assert code == EXIT_INVALID, "gan renderer without --db is invalid"
    assert "--db" in err, "error should mention the missing option"


def test_bad_thread_environment(run, monkeypatch):
    # ARRANGE
    monkeypatch.setenv("BUBFORGE_THREADS", "lots")

    # ACT
    code, _, err = run("gradcheck")

    # ASSERT
    assert code == EXIT_INVALID, "non-integer thread count is invalid"
    assert "BUBFORGE_THREADS" in err, "error should name the variable"


def test_resolve_threads(monkeypatch):
    # ARRANGE
    monkeypatch.setenv("BUBFORGE_THREADS", "3")

    # ACT & ASSERT
    assert resolve_threads(None) == 3, "environment should supply the default"
    assert resolve_threads(2) == 2, "explicit value should win"
    with pytest.raises(ValidationError, match=">= 1"):
        resolve_threads(0)


def test_features_matches_extractor(run, tmp_path, rendered_bubble):
    # ARRANGE
    img, mask, _ = rendered_bubble
    write_pgm(tmp_path / "b.pgm", img)
    write_pbm(tmp_path / "b.pbm", mask)
    expected = extract_features(read_pgm(tmp_path / "b.pgm"), mask)

    # ACT
    code, out, _ = run("features", "--image", tmp_path / "b.pgm", "--mask", tmp_path / "b.pbm", "--json")

    # ASSERT
    payload = json.loads(out)
    assert code == EXIT_OK, "features should succeed"
    assert payload == pytest.approx(expected.to_dict()), "CLI should report the extractor's vector"


def test_features_text_output(run, tmp_path, rendered_bubble):
    # ARRANGE
    img, mask, _ = rendered_bubble
    write_pgm(tmp_path / "b.pgm", img)
    write_pbm(tmp_path / "b.pbm", mask)

    # ACT
    code, out, _ = run("features", "--image", tmp_path / "b.pgm", "--mask", tmp_path / "b.pbm")

    # ASSERT
    assert code == EXIT_OK, "features should succeed"
    assert [field.split("=")[0] for field in out.split()] == ["E", "phi", "psi", "m"], "text lists the components"


def test_features_rejects_non_pgm(run, tmp_path, rendered_bubble):
    # ARRANGE
    _, mask, _ = rendered_bubble
    (tmp_path / "b.pgm").write_bytes(b"not an image")
    write_pbm(tmp_path / "b.pbm", mask)

    # ACT
    code, _, err = run("features", "--image", tmp_path / "b.pgm", "--mask", tmp_path / "b.pbm")

    # ASSERT
    assert code == EXIT_INVALID, "malformed image should be a format error"
    assert "unreadable image" in err, "error should describe the file"


def test_stats_reports_correlation(run, tmp_path, record_db):
    # ARRANGE
    save_db(record_db, tmp_path / "db.bdb")

    # ACT
    code, out, _ = run("stats", "--db", tmp_path / "db.bdb", "--json")

    # ASSERT
    payload = json.loads(out)
    assert code == EXIT_OK, "stats should succeed"
    assert payload["records"] == 8, "record count"
    assert payload["seed"] == 3 and payload["config_hash"] == "abc123", "header should be echoed"
    assert len(payload["correlation"]["matrix"]) == 4, "4x4 correlation matrix"
    assert set(payload["statistics"]) == {"E", "phi", "psi", "m"}, "per-component statistics"


def test_corpus_writes_flagged_database(run, tmp_path, corpus_config):
    # ACT
    code, out, _ = run(
        "corpus", "--n", 3, "--seed", 4, "--config", corpus_config, "--out", tmp_path / "c.bdb", "--json"
    )

    # ASSERT
    db = load_db(tmp_path / "c.bdb")
    assert code == EXIT_OK, "corpus should succeed"
    assert json.loads(out)["records"] == 3, "summary should count records"
    assert db.is_corpus and db.seed == 4 and len(db) == 3, "corpus header"


def test_synth_cca_is_deterministic(run, tmp_path, flow_file, corpus_config):
    # ARRANGE
    argv = ["synth", "--renderer", "cca", "--config", corpus_config, "--flow", flow_file, "--count", 2, "--seed", 9]

    # ACT
    first = run(*argv, "--out", tmp_path / "a")
    second = run(*argv, "--out", tmp_path / "b", "--threads", 2)

    # ASSERT
    assert first[0] == EXIT_OK and second[0] == EXIT_OK, "synth should succeed"
    files = scene_bytes(tmp_path / "a")
    assert "scene_0001/labels.csv" in files, "one directory per scene"
    assert files == scene_bytes(tmp_path / "b"), "same seed should give identical bytes"


def test_synth_bubble_override(run, tmp_path, flow_file, corpus_config):
    # ACT
    code, out, _ = run(
        "synth", "--renderer", "cca", "--config", corpus_config, "--flow", flow_file,
        "--bubbles", 0, "--out", tmp_path / "s", "--json",
    )

    # ASSERT
    payload = json.loads(out)
    assert code == EXIT_OK, "synth should succeed"
    assert payload["counts"] == [0], "--bubbles should override the flow count"
    assert (tmp_path / "s" / "scene_0000" / "labels.csv").read_text().count("\n") == 1, "header only"


def test_synth_from_database(run, tmp_path, flow_file, record_db):
    # ARRANGE
    save_db(record_db, tmp_path / "db.bdb")

    # ACT
    code, out, _ = run("synth", "--db", tmp_path / "db.bdb", "--flow", flow_file, "--out", tmp_path / "s", "--json")

    # ASSERT
    meta = json.loads((tmp_path / "s" / "scene_0000" / "meta.json").read_text())
    assert code == EXIT_OK, "synth should succeed"
    assert json.loads(out)["counts"] == [meta["count"]], "summary should match the scene"
    assert meta["spec"]["width"] == 96, "flow file should be echoed in meta"


def test_train_gendb_eval(run, tmp_path, pipeline):
    # ARRANGE
    _, model, db_path = pipeline(tmp_path / "run")

    # ACT
    sweep = run("eval", "--model", model, "--sweep", "phi", "--points", 3, "--samples", 2, "--json")
    point = run("eval", "--model", model, "--sweep", "phi", "--value", 0.5, "--samples", 2, "--json")
    off = run("eval", "--model", model, "--sweep", "phi", "--value", 3.0, "--samples", 2)

    # ASSERT
    db = load_db(db_path)
    assert len(db) == 4 and not db.is_corpus and db.side == 8, "generated database header"
    report = json.loads(sweep[1])
    assert sweep[0] == EXIT_OK and len(report["requested"]) == 3, "three-point sweep"
    assert point[0] == EXIT_OK and json.loads(point[1])["requested"] == 0.5, "single-point evaluation"
    assert off[0] == EXIT_INVALID and "off-manifold" in off[2], "out-of-range requests are rejected"


def test_pipeline_is_deterministic(run, tmp_path, pipeline, flow_file):
    # ARRANGE
    outputs = []
    for name in ("first", "second"):
        corpus, model, db = pipeline(tmp_path / name)
        run("synth", "--db", db, "--flow", flow_file, "--seed", 2, "--out", tmp_path / name / "scenes")
        outputs.append((corpus.read_bytes(), model.read_bytes(), db.read_bytes(), scene_bytes(tmp_path / name / "scenes")))

    # ASSERT
    for label, a, b in zip(("corpus", "model", "database", "scenes"), *outputs):
        assert a == b, f"{label} should be byte-identical across runs"
