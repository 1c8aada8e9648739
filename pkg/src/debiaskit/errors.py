"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: usage errors exit 1, data errors
(malformed files, out-of-vocabulary tokens) exit 2, numeric errors
(degenerate geometry, undefined statistics) exit 3.
"""


class DebiasError(Exception):
    """Base class for all toolkit errors."""


class UsageError(DebiasError):
    """Invalid arguments or configuration."""


class DataError(DebiasError):
    """Malformed input files or unusable data."""


class VocabularyError(DataError):
    """Tokens required by an operation are missing from the vocabulary."""

    def __init__(self, tokens, context=""):
        self.tokens = sorted(set(tokens))
        msg = "out-of-vocabulary tokens: " + ", ".join(self.tokens)
        if context:
            msg = f"{context}: {msg}"
        super().__init__(msg)


class NumericError(DebiasError):
    """Numerically undefined or degenerate computation."""
