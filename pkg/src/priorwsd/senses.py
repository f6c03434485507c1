"""Word sense induction: cluster the context vectors of a word's occurrences.

Each occurrence of a target word yields a context vector (the mean of its
in-window neighbours' vectors). The context vectors are grouped by bottom-up
agglomerative clustering and every cluster's centroid becomes one sense.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, NamedTuple

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatchError,
    NoContextError,
    TargetNotFoundError,
    ValidationError,
)
from .textio import fmt_row, parse_floats
from .vectorspace import normalize_tokens

log = logging.getLogger(__name__)

LINKAGES = ("single", "complete", "average")
METRICS = ("cosine", "euclidean")


def context_vector(neighbours):
    """Component-wise mean of the neighbour vectors."""
    if len(neighbours) == 0:
        raise NoContextError("no context: the neighbour list is empty")
    dims = {np.shape(v) for v in neighbours}
    if len(dims) != 1 or len(next(iter(dims))) != 1:
        raise DimensionMismatchError(f"neighbour vectors have mixed shapes: {sorted(dims)}")
    return np.mean(np.asarray(neighbours, dtype=float), axis=0)


class Contexts(NamedTuple):
    vectors: np.ndarray  # (occurrences kept, dim)
    skipped: int         # occurrences with no in-vocabulary neighbour


def _context_windows(sentences, targets, window):
    """Map each target to the neighbour-token lists of its occurrences, in corpus order."""
    found = {t: [] for t in targets}
    for sent in sentences:
        for i, tok in enumerate(sent):
            if tok in found:
                found[tok].append(sent[max(0, i - window):i] + sent[i + 1:i + 1 + window])
    return found


def _contexts_from_windows(windows, space):
    vecs, skipped = [], 0
    for neigh in windows:
        known = [space.lookup(w) for w in neigh if w in space]
        if not known:
            skipped += 1
            continue
        vecs.append(context_vector(known))
    arr = np.array(vecs, dtype=float).reshape(len(vecs), space.dimension)
    return Contexts(arr, skipped)


def collect_contexts(corpus, target, space, window=5):
    """One context vector per corpus occurrence of ``target``."""
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    sentences = [normalize_tokens(s, space.lowercase) for s in corpus]
    key = target.lower() if space.lowercase else target
    windows = _context_windows(sentences, [key], window)[key]
    if not windows:
        raise TargetNotFoundError(f"target word {target!r} never occurs in the corpus")
    return _contexts_from_windows(windows, space)


def pairwise_distances(points, metric="cosine"):
    x = np.asarray(points, dtype=float)
    if metric == "cosine":
        norms = np.linalg.norm(x, axis=1)
        if np.any(norms == 0):
            raise ValidationError("cosine distance is undefined for zero vectors")
        u = x / norms[:, None]
        d = 1.0 - u @ u.T
        d = np.clip(d, 0.0, 2.0)
    elif metric == "euclidean":
        sq = np.sum(x * x, axis=1)
        d = np.sqrt(np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0))
    else:
        raise ConfigError(f"unknown metric {metric!r}; choose from {METRICS}")
    np.fill_diagonal(d, 0.0)
    return (d + d.T) / 2.0


TIE_TOL = 1e-12


class Merge(NamedTuple):
    left: int        # slot of the surviving cluster (its smallest member index)
    right: int       # slot absorbed into ``left``
    distance: float
    members: tuple   # sorted member indices of the merged cluster


def agglomerate(points, k, linkage="average", metric="cosine"):
    """Bottom-up clustering down to ``min(k, len(points))`` clusters.

    Clusters are identified by the index of their smallest member, which keeps
    them in the same relative order as a list that inserts each merged cluster
    at the position of its left part. Among pairs whose linkage distance is
    within ``TIE_TOL`` (relative) of the minimum, the lexicographically
    smallest (left, right) pair is merged first, so ties that are exact in
    real arithmetic do not depend on rounding order.

    Returns ``(clusters, merges)``.
    """
    if linkage not in LINKAGES:
        raise ConfigError(f"unknown linkage {linkage!r}; choose from {LINKAGES}")
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    n = len(points)
    if n == 0:
        raise ValidationError("nothing to cluster")

    dist = pairwise_distances(points, metric)
    link = dist.copy()
    sums = dist.copy()  # summed member-pair distances, for average linkage
    sizes = np.ones(n)
    active = np.ones(n, dtype=bool)
    members = [[i] for i in range(n)]
    work = np.where(np.triu(np.ones((n, n), dtype=bool), k=1), link, np.inf)

    merges = []
    for _ in range(n - min(k, n)):
        best = work.min()
        tied = work <= best + TIE_TOL * max(1.0, abs(best))
        i, j = divmod(int(np.argmax(tied)), n)  # first True in row-major order
        merges.append(Merge(i, j, float(work[i, j]), tuple(sorted(members[i] + members[j]))))
        members[i].extend(members[j])
        members[j] = []
        active[j] = False
        if linkage == "average":
            sums[i] += sums[j]
            sums[:, i] = sums[i]
            sizes[i] += sizes[j]
            link[i] = sums[i] / (sizes[i] * sizes)
        elif linkage == "single":
            link[i] = np.minimum(link[i], link[j])
        else:
            link[i] = np.maximum(link[i], link[j])
        link[:, i] = link[i]
        work[j, :] = np.inf
        work[:, j] = np.inf
        work[i, i + 1:] = np.where(active[i + 1:], link[i, i + 1:], np.inf)
        work[:i, i] = np.where(active[:i], link[:i, i], np.inf)

    clusters = [sorted(m) for m in members if m]
    return clusters, merges


def cluster_contexts(contexts, k, linkage="average", metric="cosine"):
    """Partition context indices into ``min(k, len(contexts))`` clusters."""
    return agglomerate(contexts, k, linkage, metric)[0]


@dataclass
class Sense:
    centroid: np.ndarray
    count: int


@dataclass
class SenseInventory:
    k: int = 3
    linkage: str = "average"
    metric: str = "cosine"
    senses: Dict[str, List[Sense]] = field(default_factory=dict)

    def __contains__(self, word):
        return word in self.senses

    def __len__(self):
        return len(self.senses)

    def centroids(self, word):
        return np.array([s.centroid for s in self.senses[word]])

    def __eq__(self, other):
        if not isinstance(other, SenseInventory):
            return NotImplemented
        if (self.k, self.linkage, self.metric) != (other.k, other.linkage, other.metric):
            return False
        if list(self.senses) != list(other.senses):
            return False
        for w, ss in self.senses.items():
            oo = other.senses[w]
            if len(ss) != len(oo):
                return False
            for a, b in zip(ss, oo):
                if a.count != b.count or not np.array_equal(a.centroid, b.centroid):
                    return False
        return True


def build_inventory(word, clusters, contexts):
    """Centroid and member count for each cluster of ``word``'s contexts."""
    contexts = np.asarray(contexts, dtype=float)
    seen = sorted(i for c in clusters for i in c)
    if seen != list(range(len(contexts))):
        raise ValidationError(f"clusters for {word!r} do not partition the context indices")
    return [Sense(contexts[list(c)].mean(axis=0), len(c)) for c in clusters]


def induce_senses(corpus, targets, space, k=3, window=5, linkage="average",
                  metric="cosine", max_contexts=None, rng=None):
    """Build a ``SenseInventory`` for every target that has usable contexts.

    Targets that never occur, or whose contexts are all empty or zero, are
    left out of the inventory and logged. With ``max_contexts`` set, longer
    context lists are subsampled (order preserved) using ``rng``.
    """
    sentences = [normalize_tokens(s, space.lowercase) for s in corpus]
    keys = list(dict.fromkeys(t.lower() if space.lowercase else t for t in targets))
    windows = _context_windows(sentences, keys, window)
    inv = SenseInventory(k=k, linkage=linkage, metric=metric)
    for word in keys:
        if not windows[word]:
            log.info("target %r never occurs; no senses induced", word)
            continue
        ctx = _contexts_from_windows(windows[word], space).vectors
        if metric == "cosine":
            nonzero = np.linalg.norm(ctx, axis=1) > 0
            if not nonzero.all():
                log.info("%r: excluding %d zero context vectors", word, int((~nonzero).sum()))
            ctx = ctx[nonzero]
        if len(ctx) == 0:
            log.info("target %r has no usable contexts", word)
            continue
        if max_contexts is not None and len(ctx) > max_contexts:
            rng = rng if rng is not None else np.random.default_rng(0)
            keep = np.sort(rng.choice(len(ctx), size=max_contexts, replace=False))
            ctx = ctx[keep]
        clusters = cluster_contexts(ctx, k, linkage, metric)
        inv.senses[word] = build_inventory(word, clusters, ctx)
    return inv


def save_inventory(inv, path):
    lines = [f"K {inv.k} LINKAGE {inv.linkage} METRIC {inv.metric}"]
    for word, senses in inv.senses.items():
        lines.append(f"WORD {word} SENSES {len(senses)}")
        for idx, s in enumerate(senses):
            lines.append(f"{idx} {s.count} {fmt_row(s.centroid)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_inventory(path):
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    inv = SenseInventory()
    pos = 0
    if lines and lines[0].startswith("K "):
        f = lines[0].split()
        try:
            inv.k, inv.linkage, inv.metric = int(f[1]), f[3], f[5]
        except (IndexError, ValueError):
            raise ValidationError(f"{path}:1: bad metadata line") from None
        pos = 1
    dim = None
    while pos < len(lines):
        head = lines[pos].split()
        if len(head) != 4 or head[0] != "WORD" or head[2] != "SENSES":
            raise ValidationError(f"{path}:{pos + 1}: expected 'WORD <w> SENSES <m>'")
        word, m = head[1], int(head[3])
        senses = []
        for idx in range(m):
            pos += 1
            if pos >= len(lines):
                raise ValidationError(f"{path}: truncated entry for {word!r}")
            fields = lines[pos].split()
            if int(fields[0]) != idx:
                raise ValidationError(f"{path}:{pos + 1}: sense index {fields[0]}, expected {idx}")
            if dim is None:
                dim = len(fields) - 2
            senses.append(Sense(parse_floats(fields[2:], dim, f"{path}:{pos + 1}"), int(fields[1])))
        inv.senses[word] = senses
        pos += 1
    return inv
