"""Count-based distributional word vectors (symmetric window, PPMI weighting)."""

import logging
import string
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ConfigError, EmptyCorpusError, OOVError, ValidationError
from .textio import fmt_row, parse_floats

log = logging.getLogger(__name__)

# Closed-class words never used as vocabulary entries or context dimensions.
STOPWORDS = frozenset(
    """
    the a an and or but if of to in on at by for with from as is are was were be
    been being am it its this that these those there here he she they we you i me
    him her them us my your his our their not no so than then too very can will
    would should could do does did has have had into onto over under about up
    down out off again just also only own same such s t
    """.split()
)

_PUNCT = frozenset(string.punctuation)


@dataclass(frozen=True)
class VectorConfig:
    window: int = 5
    min_freq: int = 1
    dimension: int = 300
    lowercase: bool = True
    stopwords: Optional[frozenset] = None  # None -> STOPWORDS

    def validate(self):
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.dimension < 1:
            raise ConfigError(f"dimension must be >= 1, got {self.dimension}")
        if self.min_freq < 1:
            raise ConfigError(f"min_freq must be >= 1, got {self.min_freq}")

    @property
    def stoplist(self):
        return STOPWORDS if self.stopwords is None else frozenset(self.stopwords)


def is_punct(token):
    return all(ch in _PUNCT for ch in token)


def normalize_tokens(tokens, lowercase=True):
    """Lowercase (optionally) and drop punctuation-only tokens."""
    out = []
    for tok in tokens:
        if not tok or is_punct(tok):
            continue
        out.append(tok.lower() if lowercase else tok)
    return out


def read_corpus(path):
    """Yield whitespace-tokenized sentences, one per non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            toks = line.split()
            if toks:
                yield toks


class VectorSpace:
    """Vocabulary-indexed dense word vectors over a fixed set of context words.

    The backing matrix is read-only; instances are safe to share between threads.
    """

    def __init__(self, vocabulary: Sequence[str], context_words: Sequence[str],
                 vectors: np.ndarray, lowercase: bool = True):
        vectors = np.array(vectors, dtype=float)
        vocabulary = tuple(vocabulary)
        context_words = tuple(context_words)
        if len(context_words) == 0:
            raise ValidationError("a vector space needs at least one dimension")
        if len(set(context_words)) != len(context_words):
            raise ValidationError("duplicate context words")
        if len(set(vocabulary)) != len(vocabulary):
            raise ValidationError("duplicate vocabulary words")
        if vectors.shape != (len(vocabulary), len(context_words)):
            raise ValidationError(
                f"vector matrix shape {vectors.shape} does not match "
                f"{len(vocabulary)} words x {len(context_words)} dimensions"
            )
        vectors.setflags(write=False)
        self.vocabulary = vocabulary
        self.context_words = context_words
        self.vectors = vectors
        self.lowercase = lowercase
        self._index = {w: i for i, w in enumerate(vocabulary)}

    @property
    def dimension(self):
        return len(self.context_words)

    def __len__(self):
        return len(self.vocabulary)

    def _key(self, word):
        return word.lower() if self.lowercase else word

    def __contains__(self, word):
        return self._key(word) in self._index

    def lookup(self, word):
        """Return the stored vector for ``word``; raise ``OOVError`` if absent."""
        try:
            return self.vectors[self._index[self._key(word)]]
        except KeyError:
            raise OOVError(word) from None

    def __eq__(self, other):
        if not isinstance(other, VectorSpace):
            return NotImplemented
        return (self.vocabulary == other.vocabulary
                and self.context_words == other.context_words
                and np.array_equal(self.vectors, other.vectors))

    def __repr__(self):
        return f"VectorSpace({len(self)} words, dim={self.dimension})"


def lookup(space, word):
    return space.lookup(word)


def cooccurrence_counts(sentences: Iterable[Sequence[str]], rows, cols, window):
    """Symmetric-window co-occurrence counts, bounded by sentence.

    ``rows`` and ``cols`` map words to matrix indices. Counts over disjoint
    shards of a corpus sum to the counts over the whole corpus.
    """
    counts = np.zeros((len(rows), len(cols)), dtype=float)
    for sent in sentences:
        n = len(sent)
        for i, w in enumerate(sent):
            r = rows.get(w)
            if r is None:
                continue
            lo, hi = max(0, i - window), min(n, i + window + 1)
            for j in range(lo, hi):
                if j == i:
                    continue
                c = cols.get(sent[j])
                if c is not None:
                    counts[r, c] += 1
    return counts


def weight_ppmi(counts):
    """Positive PMI with probabilities estimated from the count table."""
    counts = np.asarray(counts, dtype=float)
    if counts.ndim != 2:
        raise ValidationError("count table must be a 2-D matrix")
    if np.any(counts < 0):
        raise ValidationError("count table has negative entries")
    total = counts.sum()
    if not total > 0:
        raise ValidationError("count table has no positive entries")
    p_wc = counts / total
    p_w = counts.sum(axis=1, keepdims=True) / total
    p_c = counts.sum(axis=0, keepdims=True) / total
    out = np.zeros_like(counts)
    nz = counts > 0
    # p_w, p_c are positive wherever a cell is positive
    pmi = np.log(p_wc[nz] / (p_w * p_c)[nz])
    out[nz] = np.maximum(pmi, 0.0)
    return out


def build_vector_space(corpus: Iterable[Sequence[str]], config: VectorConfig = VectorConfig()):
    config.validate()
    sentences = [normalize_tokens(s, config.lowercase) for s in corpus]
    sentences = [s for s in sentences if s]
    if not sentences:
        raise EmptyCorpusError()

    stop = config.stoplist
    freq = Counter(tok for s in sentences for tok in s)
    vocab = sorted((w for w, c in freq.items() if c >= config.min_freq and w not in stop),
                   key=lambda w: (-freq[w], w))
    if config.dimension > len(vocab):
        raise ConfigError(
            f"dimension {config.dimension} exceeds the {len(vocab)} available context words"
        )
    contexts = vocab[: config.dimension]
    counts = cooccurrence_counts(
        sentences,
        {w: i for i, w in enumerate(vocab)},
        {w: i for i, w in enumerate(contexts)},
        config.window,
    )
    if counts.any():
        vectors = weight_ppmi(counts)
    else:
        log.warning("corpus has no in-window co-occurrences; all vectors are zero")
        vectors = counts
    return VectorSpace(vocab, contexts, vectors, lowercase=config.lowercase)


def save_vectors(space, path):
    lines = [f"DIM {space.dimension}", "CONTEXT " + " ".join(space.context_words)]
    for word, vec in zip(space.vocabulary, space.vectors):
        lines.append(f"{word} {fmt_row(vec)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_vectors(path, lowercase=True):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if len(lines) < 2 or not lines[0].startswith("DIM ") or not lines[1].startswith("CONTEXT "):
        raise ValidationError(f"{path}: missing DIM/CONTEXT header")
    try:
        dim = int(lines[0].split()[1])
    except (IndexError, ValueError):
        raise ValidationError(f"{path}: bad DIM line") from None
    context = lines[1].split()[1:]
    if len(context) != dim:
        raise ValidationError(f"{path}: CONTEXT lists {len(context)} words, DIM says {dim}")
    words, rows = [], []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        fields = line.split()
        words.append(fields[0])
        rows.append(parse_floats(fields[1:], dim, f"{path}:{lineno}"))
    vectors = np.array(rows, dtype=float).reshape(len(rows), dim)
    return VectorSpace(words, context, vectors, lowercase=lowercase)
