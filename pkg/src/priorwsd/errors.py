"""Exception hierarchy.

``ValidationError`` covers bad input (config, data files, preconditions) and
maps to CLI exit code 1. Everything else derives from ``PriorWSDError`` and is
treated as a runtime failure (exit code 2).
"""


class PriorWSDError(Exception):
    pass


class ValidationError(PriorWSDError, ValueError):
    pass


class ConfigError(ValidationError):
    pass


class EmptyCorpusError(ValidationError):
    def __init__(self, msg="empty corpus: no sentences with tokens"):
        super().__init__(msg)


class DimensionMismatchError(ValidationError):
    pass


class OOVError(PriorWSDError, KeyError):
    """Word not in the vector space vocabulary."""

    def __init__(self, word):
        super().__init__(word)
        self.word = word

    def __str__(self):
        return f"out-of-vocabulary word: {self.word!r}"


class NoContextError(ValidationError):
    pass


class TargetNotFoundError(ValidationError):
    pass


class DegenerateContextError(PriorWSDError):
    """Context vector is zero, so cosine distance to the senses is undefined."""


class ZeroVectorError(PriorWSDError):
    pass


class DivergenceError(PriorWSDError):
    def __init__(self, msg, epoch=None):
        super().__init__(msg)
        self.epoch = epoch


class UndefinedCorrelationError(ValidationError):
    pass


class DegenerateLabelsError(ValidationError):
    pass


class DatasetFormatError(ValidationError):
    def __init__(self, msg, lineno=None):
        if lineno is not None:
            msg = f"line {lineno}: {msg}"
        super().__init__(msg)
        self.lineno = lineno


class InsufficientOccurrencesError(ValidationError):
    def __init__(self, offending):
        self.offending = list(offending)
        desc = ", ".join(f"{a}/{b} ({na}, {nb})" for a, b, na, nb in self.offending)
        super().__init__(f"word pairs below the occurrence threshold: {desc}")


class StageError(PriorWSDError):
    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
