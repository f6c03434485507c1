"""Helpers shared by the plain-text artifact formats."""

import numpy as np


def fmt(x):
    # shortest repr that round-trips a float64 exactly
    return repr(float(x))


def fmt_row(values):
    return " ".join(fmt(v) for v in np.asarray(values, dtype=float).ravel())


def parse_floats(fields, expected, where):
    from .errors import ValidationError

    if len(fields) != expected:
        raise ValidationError(f"{where}: expected {expected} values, got {len(fields)}")
    try:
        return np.array([float(f) for f in fields], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"{where}: {exc}") from None
