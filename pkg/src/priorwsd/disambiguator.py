"""Pick the sense centroid closest to a word's context before composition."""

import enum

import numpy as np

from .errors import ConfigError, DegenerateContextError, DimensionMismatchError, ValidationError


class Mode(str, enum.Enum):
    NONE = "none"
    ALL = "all"      # disambiguate every word
    VERBS = "verbs"  # disambiguate verb tokens only

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"every-word": "all", "verbs-only": "verbs"}
        try:
            return cls(aliases.get(value, value))
        except ValueError:
            raise ConfigError(f"unknown disambiguation mode {value!r}") from None


def cosine_distance(u, v):
    return 1.0 - float(np.dot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))


def euclidean_distance(u, v):
    return float(np.linalg.norm(np.asarray(u) - np.asarray(v)))


DISTANCES = {"cosine": cosine_distance, "euclidean": euclidean_distance}


def sense_distances(context, senses, metric="cosine"):
    """Distance from ``context`` to each row of ``senses``."""
    senses = np.atleast_2d(np.asarray(senses, dtype=float))
    context = np.asarray(context, dtype=float)
    if senses.shape[0] == 0 or senses.size == 0:
        raise ValidationError("empty sense set")
    if senses.shape[1] != context.shape[-1]:
        raise DimensionMismatchError(
            f"senses have dimension {senses.shape[1]}, context has {context.shape[-1]}"
        )
    if metric == "cosine":
        cnorm = np.linalg.norm(context)
        if cnorm == 0:
            raise DegenerateContextError("zero context vector under cosine distance")
        snorm = np.linalg.norm(senses, axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            sim = senses @ context / (snorm * cnorm)
        # a zero sense is maximally uninformative: treat as orthogonal
        return 1.0 - np.where(snorm > 0, sim, 0.0)
    if metric == "euclidean":
        return np.linalg.norm(senses - context, axis=1)
    raise ConfigError(f"unknown metric {metric!r}")


def select_sense_index(context, senses, metric="cosine"):
    # argmin returns the first minimum, i.e. the lowest sense index on ties
    return int(np.argmin(sense_distances(context, senses, metric)))


def select_sense(context, senses, metric="cosine"):
    """Return the member of ``senses`` nearest to ``context``."""
    senses = np.atleast_2d(np.asarray(senses, dtype=float))
    return senses[select_sense_index(context, senses, metric)]


def is_verb(tag):
    return tag.upper().startswith("V")


def disambiguate_phrase(tokens, space, inventory, mode, metric="cosine"):
    """Vectors for a tagged phrase, with chosen tokens swapped for sense centroids.

    ``tokens`` is a sequence of ``(word, tag)``. The selection context for a
    token is the mean of the other tokens' ambiguous vectors. Tokens without
    senses, lone tokens, and tokens whose context is zero keep their ambiguous
    vector. ``OOVError`` from the space propagates.
    """
    mode = Mode.parse(mode)
    ambiguous = [np.asarray(space.lookup(w)) for w, _ in tokens]
    if mode is Mode.NONE:
        return ambiguous
    out = list(ambiguous)
    for i, (word, tag) in enumerate(tokens):
        if mode is Mode.VERBS and not is_verb(tag):
            continue
        key = word.lower() if space.lowercase else word
        if key not in inventory or len(tokens) < 2:
            continue
        context = np.mean([v for j, v in enumerate(ambiguous) if j != i], axis=0)
        try:
            out[i] = select_sense(context, inventory.centroids(key), metric)
        except DegenerateContextError:
            pass
    return out
