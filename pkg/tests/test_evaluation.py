import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import median_oracle, spearman_oracle
from priorwsd.errors import (
    ConfigError,
    DegenerateLabelsError,
    UndefinedCorrelationError,
    ValidationError,
    ZeroVectorError,
)
from priorwsd.evaluation import (
    ExperimentReport,
    LogisticRegression,
    PhrasePair,
    binarize,
    cosine,
    crossval_logreg,
    fold_indices,
    format_table,
    run_experiment,
    spearman,
)
from priorwsd.senses import SenseInventory
from priorwsd.vectorspace import VectorSpace


def test_cosine_examples():
    assert cosine([1, 0], [0, 1]) == 0.0
    assert cosine([3, 4], [3, 4]) == 1.0
    assert cosine([1, 2], [2, 1]) == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(ZeroVectorError):
        cosine([0, 0], [1, 1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=3, max_size=3),
       st.lists(st.floats(-100, 100), min_size=3, max_size=3),
       st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_cosine_scale_invariant(u, v, a, b):
    u, v = np.array(u), np.array(v)
    assume(np.linalg.norm(u) > 1e-3 and np.linalg.norm(v) > 1e-3)
    assert abs(cosine(u, v) - cosine(a * u, b * v)) < 1e-12


def test_spearman_examples():
    assert spearman([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0)
    assert spearman([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    # ranks (1, 2.5, 2.5, 4) vs (2, 1, 4, 3): 1.5 / sqrt(4.5 * 5)
    assert spearman([1, 2, 2, 4], [2, 1, 4, 3]) == pytest.approx(1 / math.sqrt(10), abs=1e-15)
    assert spearman([1, 2, 2, 4], [2, 1, 4, 3]) == pytest.approx(
        spearman_oracle([1, 2, 2, 4], [2, 1, 4, 3]), abs=1e-15)


def test_spearman_errors():
    with pytest.raises(UndefinedCorrelationError):
        spearman([1, 1, 1], [1, 2, 3])
    with pytest.raises(UndefinedCorrelationError):
        spearman([1], [2])
    with pytest.raises(ValidationError):
        spearman([1, 2], [1, 2, 3])


distinct_lists = st.lists(st.integers(-20, 20), min_size=3, max_size=30).filter(
    lambda xs: len(set(xs)) >= 2)


@settings(max_examples=100, deadline=None)
@given(distinct_lists, st.data())
def test_spearman_properties(xs, data):
    ys = data.draw(st.lists(st.integers(-20, 20), min_size=len(xs), max_size=len(xs)).filter(
        lambda v: len(set(v)) >= 2))
    rho = spearman(xs, ys)
    assert -1.0 <= rho <= 1.0
    assert spearman(xs, xs) == pytest.approx(1.0)
    # strictly increasing transforms leave rho unchanged
    assert spearman(np.exp(np.array(xs) / 10.0), np.array(ys) ** 3) == pytest.approx(rho, abs=1e-12)


def test_binarize_examples():
    np.testing.assert_array_equal(binarize([1, 2, 6, 7]), [0, 0, 1, 1])
    np.testing.assert_array_equal(binarize([1, 7], "fixed", 4), [0, 1])
    with pytest.raises(DegenerateLabelsError):
        binarize([3, 3, 3])
    with pytest.raises(ConfigError):
        binarize([1, 2], "fixed")
    with pytest.raises(ValidationError):
        binarize([])


def test_binarize_matches_sort_oracle(rng):
    scores = rng.uniform(0, 7, 100)
    med = median_oracle(list(scores))
    assert binarize(scores).tolist() == [int(s > med) for s in scores]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 7), min_size=2, max_size=40).filter(lambda s: len(set(s)) > 1))
def test_median_split_has_a_zero(scores):
    try:
        labels = binarize(scores)
    except DegenerateLabelsError:
        return  # every score at or above the median is tied with it
    assert 0 in labels


def test_fold_partition(rng):
    for n in rng.integers(4, 200, size=20):
        folds = fold_indices(int(n), 4, rng)
        sizes = [len(f) for f in folds]
        assert max(sizes) - min(sizes) <= 1
        assert sorted(np.concatenate(folds).tolist()) == list(range(n))


def test_logreg_separable_1d():
    x = np.concatenate([np.linspace(-3, -0.01, 20), np.linspace(1.01, 4, 20)])
    y = (x > 0.5).astype(int)
    assert crossval_logreg(x, y, k=4, seed=0) == 1.0
    clf = LogisticRegression().fit(x[:, None], y)
    # agrees with a direct threshold rule
    assert (clf.predict(x[:, None]) == (x > 0.5)).all()


def test_crossval_preconditions():
    with pytest.raises(DegenerateLabelsError):
        crossval_logreg([1, 2, 3, 4], [1, 1, 1, 1])
    with pytest.raises(ValidationError):
        crossval_logreg([1, 2, 3], [0, 1, 0])


def test_crossval_skips_single_class_training_folds(caplog):
    # 4 examples, one positive: the fold holding it trains on negatives only
    acc = crossval_logreg([0, 1, 2, 3], [0, 0, 0, 1], k=4, seed=1)
    assert 0.0 <= acc <= 1.0
    assert "skipped" in caplog.text


def _pair(i, v1, o1, v2, o2, score):
    return PhrasePair(f"p{i}", "VO", ((v1, "V"), (o1, "O")), ((v2, "V"), (o2, "O")), score, 7.0)


@pytest.fixture
def toy():
    words = {"a": (1, 0), "b": (0, 1), "c": (1, 1), "d": (2, 1), "e": (1, 3), "z": (0, 0)}
    space = VectorSpace(list(words), ["x", "y"], np.array(list(words.values()), dtype=float))
    combos = [("a", "b", "a", "c"), ("a", "a", "b", "b"), ("c", "d", "e", "a"),
              ("d", "d", "d", "e"), ("b", "e", "a", "d"), ("c", "c", "c", "e"),
              ("e", "e", "a", "a"), ("a", "d", "b", "e"), ("b", "c", "d", "a"),
              ("c", "e", "d", "b")]
    scores = [5.5, 1.0, 3.2, 6.1, 2.2, 6.8, 0.5, 4.4, 3.9, 2.7]
    pairs = [_pair(i, *c, s) for i, (c, s) in enumerate(zip(combos, scores))]
    return space, pairs


def test_run_experiment_ten_pairs_by_hand(toy):
    space, pairs = toy
    vec = dict(zip(space.vocabulary, space.vectors.tolist()))

    def hand_cos(u, v):
        dot = u[0] * v[0] + u[1] * v[1]
        return dot / (math.hypot(*u) * math.hypot(*v))

    sims = []
    for p in pairs:
        (v1, _), (o1, _) = p.tokens1
        (v2, _), (o2, _) = p.tokens2
        s1 = [vec[v1][0] + vec[o1][0], vec[v1][1] + vec[o1][1]]
        s2 = [vec[v2][0] + vec[o2][0], vec[v2][1] + vec[o2][1]]
        sims.append(hand_cos(s1, s2))
    expected = spearman_oracle(sims, [p.human_score for p in pairs])
    row = run_experiment(pairs, space, SenseInventory(), "add", "none", dataset="toy")
    assert row.spearman == pytest.approx(expected, abs=1e-12)
    assert (row.n_pairs, row.n_skipped) == (10, 0)
    assert 0.0 <= row.cv_accuracy <= 1.0
    assert not row.unreliable


def test_run_experiment_is_deterministic(toy):
    space, pairs = toy
    a = run_experiment(pairs, space, SenseInventory(), "mult", "all", seed=5)
    b = run_experiment(pairs, space, SenseInventory(), "mult", "all", seed=5)
    assert a == b


def test_skips_oov_and_zero_pairs(toy):
    space, pairs = toy
    extra = [_pair(20, "a", "q", "b", "c", 3.0), _pair(21, "z", "z", "a", "b", 4.0)]
    # q is OOV; z + z is the zero vector
    row = run_experiment(pairs + extra, space, SenseInventory(), "add", "none")
    assert (row.n_pairs, row.n_skipped) == (12, 2)
    assert not row.unreliable
    row = run_experiment(pairs + extra + [_pair(22, "b", "c", "z", "z", 1.0)], space,
                         SenseInventory(), "add", "none")
    assert (row.n_pairs, row.n_skipped) == (13, 3)
    assert row.unreliable  # 3 of 13 > 20%


def test_report_outputs(toy):
    space, pairs = toy
    rep = ExperimentReport("toy", notes=["labels: median split"])
    for model in ("add", "mult"):
        rep.rows.append(run_experiment(pairs, space, SenseInventory(), model, "none"))
    csv = rep.to_csv().splitlines()
    assert csv[0] == "dataset,model,mode,spearman,cv_accuracy,n_pairs,n_skipped"
    assert len(csv) == 3 and csv[1].startswith("dataset,add,none,")
    table = format_table(rep)
    assert "No disambiguation" in table
    assert "Disamb. verbs only" not in table
    assert "Additive model" in table and "Multiplicative model" in table
    assert "# labels: median split" in table
    assert rep.row("add", "none").model == "add"
