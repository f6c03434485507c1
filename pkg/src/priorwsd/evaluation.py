"""Score composed phrase vectors against human similarity judgements.

Two measures per (model, disambiguation mode): Spearman's rho between the
cosine similarity of the two composed phrases and the human score, and the
k-fold cross-validated accuracy of a logistic regression that predicts the
binarized human score.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import rankdata

from .composers import compose_phrase, parse_model
from .disambiguator import Mode, disambiguate_phrase
from .errors import (
    ConfigError,
    DegenerateLabelsError,
    DimensionMismatchError,
    OOVError,
    UndefinedCorrelationError,
    ValidationError,
    ZeroVectorError,
)

log = logging.getLogger(__name__)

UNRELIABLE_SKIP_FRACTION = 0.2


@dataclass(frozen=True)
class PhrasePair:
    id: str
    structure: str                     # "SVO" or "VO"
    tokens1: Tuple[Tuple[str, str], ...]  # (word, role tag)
    tokens2: Tuple[Tuple[str, str], ...]
    human_score: float
    scale_max: float = 7.0


def cosine(u, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"cosine of shapes {u.shape} and {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ZeroVectorError("cosine is undefined for a zero vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def spearman(xs, ys):
    """Pearson correlation of average ranks."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValidationError("spearman needs two 1-D sequences of equal length")
    if len(xs) < 2:
        raise UndefinedCorrelationError("spearman needs at least two observations")
    if np.unique(xs).size < 2 or np.unique(ys).size < 2:
        raise UndefinedCorrelationError("spearman is undefined for a constant sequence")
    rx = rankdata(xs) - (len(xs) + 1) / 2.0
    ry = rankdata(ys) - (len(ys) + 1) / 2.0
    rho = float(np.dot(rx, ry) / math.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))
    return max(-1.0, min(1.0, rho))


def binarize(scores, rule="median", threshold=None):
    """Label 1 for scores strictly above the median (or a fixed threshold)."""
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise ValidationError("nothing to binarize")
    if rule == "median":
        cut = float(np.median(scores))
    elif rule == "fixed":
        if threshold is None:
            raise ConfigError("fixed binarization needs a threshold")
        cut = float(threshold)
    else:
        raise ConfigError(f"unknown binarization rule {rule!r}")
    labels = (scores > cut).astype(int)
    if labels.min() == labels.max():
        raise DegenerateLabelsError(f"every label is {labels[0]} after splitting at {cut}")
    return labels


def fold_indices(n, k, rng):
    """Shuffle ``range(n)`` and cut it into ``k`` near-equal contiguous folds."""
    if k < 2 or n < k:
        raise ValidationError(f"cannot make {k} folds from {n} examples")
    return np.array_split(rng.permutation(n), k)


@dataclass
class LogisticRegression:
    learning_rate: float = 0.1
    iterations: int = 1000
    standardize: bool = True
    w: Optional[np.ndarray] = None
    b: float = 0.0
    mean: Optional[np.ndarray] = None
    scale: Optional[np.ndarray] = None

    def _prep(self, X):
        return (X - self.mean) / self.scale

    def fit(self, X, y):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float)
        if self.standardize:
            self.mean = X.mean(axis=0)
            sd = X.std(axis=0)
            self.scale = np.where(sd > 0, sd, 1.0)
        else:
            self.mean = np.zeros(X.shape[1])
            self.scale = np.ones(X.shape[1])
        Z = self._prep(X)
        m = len(y)
        self.w = np.zeros(X.shape[1])
        self.b = 0.0
        for _ in range(self.iterations):
            p = _sigmoid(Z @ self.w + self.b)
            err = p - y
            self.w -= self.learning_rate * (Z.T @ err) / m
            self.b -= self.learning_rate * float(err.sum()) / m
        return self

    def predict_proba(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return _sigmoid(self._prep(X) @ self.w + self.b)

    def predict(self, X):
        return (self.predict_proba(X) >= 0.5).astype(int)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def crossval_logreg(features, labels, k=4, seed=0, learning_rate=0.1, iterations=1000):
    """Mean held-out accuracy of logistic regression over ``k`` folds."""
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(labels, dtype=int)
    if len(X) != len(y):
        raise ValidationError("features and labels differ in length")
    if len(y) < k:
        raise ValidationError(f"need at least {k} examples for {k}-fold cross-validation")
    if np.unique(y).size < 2:
        raise DegenerateLabelsError("both classes must be present")
    folds = fold_indices(len(y), k, np.random.default_rng(seed))
    accs = []
    for f, test in enumerate(folds):
        train = np.concatenate([g for i, g in enumerate(folds) if i != f])
        if np.unique(y[train]).size < 2:
            log.warning("fold %d skipped: training labels are single-class", f)
            continue
        clf = LogisticRegression(learning_rate, iterations).fit(X[train], y[train])
        accs.append(float(np.mean(clf.predict(X[test]) == y[test])))
    if not accs:
        raise DegenerateLabelsError("every fold had a single-class training set")
    return float(np.mean(accs))


@dataclass(frozen=True)
class EvalConfig:
    binarize: str = "median"
    threshold: Optional[float] = None  # for binarize="fixed"; None -> mid-scale
    feature: str = "cosine"            # or "concat"
    folds: int = 4
    metric: str = "cosine"             # sense selection distance
    lr_learning_rate: float = 0.1
    lr_iterations: int = 1000


@dataclass
class ReportRow:
    dataset: str
    model: str
    mode: str
    spearman: float
    cv_accuracy: float
    n_pairs: int
    n_skipped: int

    @property
    def unreliable(self):
        return self.n_pairs == 0 or self.n_skipped > UNRELIABLE_SKIP_FRACTION * self.n_pairs

    def csv(self):
        return (f"{self.dataset},{self.model},{self.mode},{_num(self.spearman)},"
                f"{_num(self.cv_accuracy)},{self.n_pairs},{self.n_skipped}")


@dataclass
class ExperimentReport:
    dataset: str
    rows: List[ReportRow] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    CSV_HEADER = "dataset,model,mode,spearman,cv_accuracy,n_pairs,n_skipped"

    def row(self, model, mode):
        for r in self.rows:
            if r.model == model and r.mode == Mode.parse(mode).value:
                return r
        raise KeyError((model, mode))

    def to_csv(self):
        return "\n".join([self.CSV_HEADER] + [r.csv() for r in self.rows]) + "\n"

    def to_table(self):
        return format_table(self)


def _num(x):
    return "nan" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.6f}"


_MODEL_LABELS = {"add": "Additive model", "mult": "Multiplicative model",
                 "recnn": "RecNN", "rae": "RAE"}
_MODE_LABELS = {"none": "No disambiguation", "all": "Disamb. every word",
                "verbs": "Disamb. verbs only"}


def format_table(report):
    """Plain-text table: one column per mode, one block per measure."""
    modes = list(dict.fromkeys(r.mode for r in report.rows))
    models = list(dict.fromkeys(r.model for r in report.rows))
    cells = {(r.model, r.mode): r for r in report.rows}
    w0 = max([len(_MODEL_LABELS.get(m, m)) for m in models] + [20])
    widths = [max(len(_MODE_LABELS[m]), 10) for m in modes]
    head = " " * w0 + "  " + "  ".join(_MODE_LABELS[m].rjust(w) for m, w in zip(modes, widths))
    rule = "-" * len(head)
    lines = [f"Dataset: {report.dataset}"] + [f"# {n}" for n in report.notes] + [rule]

    def block(title, getter):
        lines.extend([title, rule, head])
        for model in models:
            vals = []
            for mode, w in zip(modes, widths):
                r = cells.get((model, mode))
                text = "-" if r is None else getter(r)
                if r is not None and r.unreliable:
                    text += "*"
                vals.append(text.rjust(w))
            lines.append(_MODEL_LABELS.get(model, model).ljust(w0) + "  " + "  ".join(vals))
        lines.append(rule)

    block("Spearman's correlation", lambda r: "nan" if math.isnan(r.spearman) else f"{r.spearman:.3f}")
    block("Cross validation accuracy",
          lambda r: "nan" if math.isnan(r.cv_accuracy) else f"{100 * r.cv_accuracy:.2f}%")
    if any(r.unreliable for r in report.rows):
        lines.append(f"* more than {UNRELIABLE_SKIP_FRACTION:.0%} of pairs skipped; unreliable")
    return "\n".join(lines) + "\n"


def score_pairs(pairs, space, inventory, model, mode, params=None, metric="cosine"):
    """Compose both sides of every pair; return ``(kept, sims, vecs, skipped)``."""
    kept, sims, vecs, skipped = [], [], [], 0
    for pair in pairs:
        try:
            v1 = compose_phrase(disambiguate_phrase(pair.tokens1, space, inventory, mode, metric),
                                pair.structure, model, params)
            v2 = compose_phrase(disambiguate_phrase(pair.tokens2, space, inventory, mode, metric),
                                pair.structure, model, params)
            sim = cosine(v1, v2)
        except (OOVError, ZeroVectorError) as exc:
            log.debug("pair %s skipped: %s", pair.id, exc)
            skipped += 1
            continue
        kept.append(pair)
        sims.append(sim)
        vecs.append(np.concatenate([v1, v2]))
    return kept, sims, vecs, skipped


def run_experiment(pairs, space, inventory, model, mode, params=None, dataset="dataset",
                   config=EvalConfig(), seed=0):
    """One report row for a (model, mode) combination."""
    model = parse_model(model)
    mode = Mode.parse(mode)
    kept, sims, vecs, skipped = score_pairs(pairs, space, inventory, model, mode, params,
                                            config.metric)
    human = [p.human_score for p in kept]
    try:
        rho = spearman(sims, human)
    except UndefinedCorrelationError as exc:
        log.warning("%s/%s/%s: %s", dataset, model, mode.value, exc)
        rho = float("nan")

    acc = float("nan")
    if len(kept) >= config.folds:
        threshold = config.threshold
        if config.binarize == "fixed" and threshold is None:
            threshold = kept[0].scale_max / 2.0
        try:
            labels = binarize(human, config.binarize, threshold)
            feats = np.array(sims)[:, None] if config.feature == "cosine" else np.array(vecs)
            acc = crossval_logreg(feats, labels, config.folds, seed,
                                  config.lr_learning_rate, config.lr_iterations)
        except DegenerateLabelsError as exc:
            log.warning("%s/%s/%s: %s", dataset, model, mode.value, exc)
    row = ReportRow(dataset, model, mode.value, rho, acc, len(pairs), skipped)
    if row.unreliable:
        log.warning("%s/%s/%s: %d of %d pairs skipped; report is unreliable",
                    dataset, model, mode.value, skipped, len(pairs))
    return row
