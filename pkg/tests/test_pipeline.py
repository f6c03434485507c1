import shutil

import numpy as np
import pytest

from priorwsd import pipeline
from priorwsd.cli import main
from priorwsd.composers import load_params, save_params
from priorwsd.errors import ConfigError, StageError
from priorwsd.senses import load_inventory, save_inventory
from priorwsd.vectorspace import load_vectors, save_vectors


def test_config_parsing(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\nseed = 3\ncorpus = data/c.txt\nmodels = add, rae\n"
                   "rae_normalize = yes\nthreshold = 3.5\nsense_window = none\n")
    c = pipeline.load_config(cfg, {"k": "2"})
    assert c.seed == 3 and c.k == 2
    assert c.corpus == str(tmp_path / "data/c.txt")
    assert c.models == ["add", "rae"]
    assert c.rae_normalize is True and c.threshold == 3.5 and c.sense_window is None


@pytest.mark.parametrize("settings", [
    {},                                  # no seed
    {"seed": "1", "bogus": "2"},
    {"seed": "1", "window": "0"},
    {"seed": "1", "linkage": "ward"},
    {"seed": "1", "models": "tensor"},
    {"seed": "1", "modes": "most"},
    {"seed": "x"},
    {"seed": "1", "rae_normalize": "maybe"},
])
def test_config_validation(settings):
    with pytest.raises(ConfigError):
        pipeline.make_config(settings)


def test_dump_config_round_trips():
    c = pipeline.make_config({"seed": "9", "models": "add,mult", "threshold": "2.0"})
    again = pipeline.make_config(pipeline.parse_settings(pipeline.dump_config(c).splitlines()))
    assert again == c


def test_stage_rngs_are_independent_and_reproducible():
    a = pipeline.stage_rng(5, "rae").random(3)
    assert np.array_equal(a, pipeline.stage_rng(5, "rae").random(3))
    assert not np.array_equal(a, pipeline.stage_rng(5, "recnn").random(3))
    assert not np.array_equal(a, pipeline.stage_rng(6, "rae").random(3))


def _run(argv):
    return main([str(a) for a in argv])


def test_stage_by_stage_cli(toy_bench, tmp_path, capsys):
    cfg = toy_bench / "toy.cfg"
    out = tmp_path / "run"
    for cmd in ("build-vectors", "induce-senses", "train-rae"):
        assert _run([cmd, "--config", cfg, "--out", out]) == 0
    assert _run(["evaluate", "--config", cfg, "--out", out, "--model", "add",
                 "--disambig", "none", "--disambig", "verbs"]) == 0
    printed = capsys.readouterr().out
    assert "Additive model" in printed and "RecNN" not in printed
    csv = (out / "report.csv").read_text().splitlines()
    assert [line.split(",")[1:3] for line in csv[1:]] == [["add", "none"], ["add", "verbs"]]


def test_artifacts_round_trip(toy_bench, tmp_path):
    out = tmp_path / "run"
    assert _run(["run-all", "--config", toy_bench / "toy.cfg", "--out", out]) == 0
    space = load_vectors(out / "vectors.txt")
    save_vectors(space, tmp_path / "v2.txt")
    assert load_vectors(tmp_path / "v2.txt") == space
    assert (tmp_path / "v2.txt").read_bytes() == (out / "vectors.txt").read_bytes()
    inv = load_inventory(out / "senses.txt")
    save_inventory(inv, tmp_path / "s2.txt")
    assert (tmp_path / "s2.txt").read_bytes() == (out / "senses.txt").read_bytes()
    for name in ("rae_params.txt", "recnn_params.txt"):
        params = load_params(out / name)
        save_params(params, tmp_path / name)
        assert (tmp_path / name).read_bytes() == (out / name).read_bytes()
    assert load_params(out / "rae_params.txt").has_decoder
    assert not load_params(out / "recnn_params.txt").has_decoder


def test_mode_none_only(toy_bench, tmp_path):
    out = tmp_path / "run"
    assert _run(["run-all", "--config", toy_bench / "toy.cfg", "--out", out,
                 "--disambig", "none"]) == 0
    table = (out / "report.txt").read_text()
    assert "No disambiguation" in table
    assert "every word" not in table and "verbs only" not in table
    rows = (out / "report.csv").read_text().splitlines()[1:]
    assert {r.split(",")[2] for r in rows} == {"none"}
    assert len(rows) == 4


def test_resume_reuses_artifacts(toy_bench, tmp_path):
    out = tmp_path / "run"
    cfg = toy_bench / "toy.cfg"
    assert _run(["run-all", "--config", cfg, "--out", out]) == 0
    first = (out / "report.csv").read_bytes()
    # a stale marker proves the vectors file was reused, not rebuilt
    stamp = (out / "vectors.txt").stat().st_mtime_ns
    assert _run(["run-all", "--config", cfg, "--out", out, "--resume"]) == 0
    assert (out / "vectors.txt").stat().st_mtime_ns == stamp
    assert (out / "report.csv").read_bytes() == first


def test_recnn_from_rae(toy_bench, tmp_path):
    out = tmp_path / "run"
    assert _run(["run-all", "--config", toy_bench / "toy.cfg", "--out", out,
                 "--set", "recnn_init=rae", "--model", "recnn"]) == 0
    rae = load_params(out / "rae_params.txt")
    recnn = load_params(out / "recnn_params.txt")
    np.testing.assert_array_equal(rae.W, recnn.W)
    assert "trained RAE encoder" in (out / "report.txt").read_text()


def test_exit_codes(toy_bench, tmp_path, capsys):
    assert _run(["run-all", "--seed", "1", "--out", tmp_path]) == 1  # no corpus
    assert _run(["run-all", "--config", tmp_path / "missing.cfg"]) == 1
    assert _run(["evaluate", "--config", toy_bench / "toy.cfg", "--out", tmp_path / "empty"]) == 1
    assert _run(["run-all", "--config", toy_bench / "toy.cfg", "--model", "tensor"]) == 1
    bad = tmp_path / "bad.tsv"
    bad.write_text("x\tSVO\ta/S\ta/S b/V c/O\t1\t7\n")
    assert _run(["run-all", "--config", toy_bench / "toy.cfg", "--out", tmp_path / "o",
                 "--dataset", bad]) == 1
    assert "line 1" in capsys.readouterr().err
    # divergence is a runtime failure
    assert _run(["run-all", "--config", toy_bench / "toy.cfg", "--out", tmp_path / "o2",
                 "--set", "rae_learning_rate=1e12", "--set", "activation=identity"]) == 2


def test_stage_error_names_stage(toy_bench, tmp_path):
    c = pipeline.load_config(toy_bench / "toy.cfg",
                             {"out": str(tmp_path), "dimension": "100000"})
    with pytest.raises(StageError, match="build-vectors"):
        pipeline.run_pipeline(c)


def test_synth_bench_cli(tmp_path):
    out = tmp_path / "bench"
    assert _run(["synth-bench", "--out", out, "--seed", "2", "--pairs", "12"]) == 0
    for name in ("corpus.txt", "dataset.tsv", "gold.tsv", "bench.cfg"):
        assert (out / name).exists()
    assert _run(["run-all", "--config", out / "bench.cfg", "--model", "add"]) == 0
    assert (out / "run" / "report.csv").exists()
    shutil.rmtree(out)
