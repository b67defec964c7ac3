import json

import pytest

from bubforge.engine.cli import dispatch

TINY_GAN = {
    "side": 8,
    "nz": 4,
    "ne": 4,
    "nd": 4,
    "c0": 8,
    "d_channels": [2, 4, 8],
    "batch_size": 3,
    "dtype": "float64",
    "init_std": 0.3,
    "epochs": 1,
}

SMALL_CORPUS = {"diameter_range": [24.0, 32.0], "margin": 4}

SMALL_FLOW = {
    "width": 96,
    "height": 80,
    "resolution": 1.0,
    "channel_left_mm": 0.0,
    "channel_right_mm": 96.0,
    "count": 5,
    "median_diameter_mm": 14.0,
    "log_sigma": 0.2,
}


def write_json(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


@pytest.fixture
def run(capsys):
    """Runs the CLI and returns (exit code, stdout, stderr)."""

    def invoke(*argv):
        code = dispatch([str(a) for a in argv])
        out, err = capsys.readouterr()
        return code, out, err

    return invoke


@pytest.fixture
def gan_config(tmp_path):
    return write_json(tmp_path / "gan.json", TINY_GAN)


@pytest.fixture
def corpus_config(tmp_path):
    return write_json(tmp_path / "ccarender.json", SMALL_CORPUS)


@pytest.fixture
def flow_file(tmp_path):
    return write_json(tmp_path / "flow.json", SMALL_FLOW)


@pytest.fixture
def pipeline(tmp_path, run, gan_config, corpus_config):
    """corpus -> train -> gendb under ``root``; returns the produced paths."""

    def make(root):
        root.mkdir(parents=True, exist_ok=True)
        corpus, model, db = root / "corpus.bdb", root / "model.bgan", root / "bubbles.bdb"
        assert run("corpus", "--n", 8, "--seed", 5, "--config", corpus_config, "--out", corpus)[0] == 0, "corpus failed"
        assert run("train", "--corpus", corpus, "--config", gan_config, "--seed", 5, "--out", model)[0] == 0, (
            "train failed"
        )
        assert run("gendb", "--model", model, "--n", 4, "--batch", 8, "--seed", 5, "--out", db)[0] == 0, (
            "gendb failed"
        )
        return corpus, model, db

    return make
