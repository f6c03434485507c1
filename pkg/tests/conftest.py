import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from priorwsd.synth import make_benchmark, write_corpus  # noqa: E402
from priorwsd.datasets import write_dataset  # noqa: E402

_criteria = {}
_outcomes = {}


def pytest_collection_modifyitems(items):
    for item in items:
        if item.get_closest_marker("acceptance") and item.function.__doc__:
            _criteria[item.nodeid] = item.function.__doc__.strip().splitlines()[0]


def pytest_runtest_logreport(report):
    if report.nodeid in _criteria and (report.when == "call" or report.failed):
        _outcomes.setdefault(report.nodeid, report.outcome)
        if report.failed:
            _outcomes[report.nodeid] = "failed"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, label in _criteria.items():
        if nodeid in _outcomes:
            status = "PASS" if _outcomes[nodeid] == "passed" else "FAIL"
            terminalreporter.write_line(f"{status}  {label}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def toy_bench(tmp_path_factory):
    """200-sentence synthetic corpus and a 10-pair dataset on disk."""
    root = tmp_path_factory.mktemp("toy")
    bench = make_benchmark(seed=7, n_pairs=10)
    write_corpus(bench.corpus, root / "corpus.txt")
    write_dataset(bench.pairs, root / "toy.tsv", header=["toy fixture"])
    (root / "toy.cfg").write_text(
        "seed = 11\ncorpus = corpus.txt\ndatasets = toy.tsv\n"
        "window = 5\ndimension = 100\nrae_epochs = 10\n",
        encoding="utf-8",
    )
    return root
