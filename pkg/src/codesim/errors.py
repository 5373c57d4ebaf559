"""Exception types shared across the package."""

from __future__ import annotations


class CodesimError(Exception):
    """Base class for all codesim errors."""


class ParseError(CodesimError):
    """Source text falls outside the supported C subset."""

    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
        self.message = message


class KindMismatchError(CodesimError):
    """Two observations of different kinds were compared (corrupt database)."""


class ZeroWeightSumError(CodesimError):
    """All feature-class weights are zero; the combined score is undefined."""


class DuplicateIdError(CodesimError):
    """A record with the same id is already present in the database."""


class DatabaseFormatError(CodesimError):
    """A database file is malformed."""

    def __init__(self, message: str, record_id: str | None = None):
        if record_id is not None:
            message = f"record {record_id!r}: {message}"
        super().__init__(message)
        self.record_id = record_id


class VersionMismatchError(CodesimError):
    """Database was produced by a different extractor version."""


class SampleTooLargeError(CodesimError):
    """Requested sample exceeds the database size."""


class GroupTooSmallError(CodesimError):
    """A ground-truth group has fewer than two members."""


class DegenerateDataError(CodesimError):
    """Training data contains only one label."""


class AllNonPositiveError(CodesimError):
    """No classifier coefficient is positive; no weight profile exists."""


class EmptyRelevantSetError(CodesimError):
    """Average precision is undefined without relevant documents."""


class MissingIdError(CodesimError):
    """A ground-truth id is not present in the database."""


class InsufficientDistractorsError(CodesimError):
    """The distractor pool is smaller than the requested count."""


class TooManyFoldsError(CodesimError):
    """More folds requested than ground-truth groups."""
