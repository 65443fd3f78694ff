"""Error taxonomy shared by the library and the CLI.

Every error carries the exit code the CLI maps it to: 2 for usage
problems, 3 for bad or missing data, 4 for numeric degeneracies.
"""

from __future__ import annotations


class SemcartoError(Exception):
    """Base class; ``code`` is the CLI exit status."""

    code = 1


class UsageError(SemcartoError):
    """Bad parameter or flag combination (exit 2)."""

    code = 2


class DataError(SemcartoError):
    """Malformed, missing, or inconsistent input data (exit 3)."""

    code = 3


class NumericError(SemcartoError):
    """Numeric degeneracy: zero vectors, rank deficiency, zero variance (exit 4)."""

    code = 4
