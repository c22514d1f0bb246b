"""Exception hierarchy shared across the package."""


class BenfraudError(Exception):
    """Base class for all package errors."""


class ValidationError(BenfraudError):
    """A record failed input validation.

    Carries the 1-based line number and offending field when known so CLI
    diagnostics can point at the exact input row.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if field is not None:
            prefix += f"field {field!r}: "
        super().__init__(prefix + message)


class LabelConflictError(ValidationError):
    """The same address carries both a scam and a nonscam label."""


class SchemaError(BenfraudError):
    """A file header does not match the expected column schema."""


class FetchError(BenfraudError):
    """Provider retrieval failed after bounded retries."""


class PartialDataError(BenfraudError):
    """Page limit exhausted while the provider still had a cursor.

    The records retrieved so far are attached so the caller can decide to
    accept the partial history instead of aborting.
    """

    def __init__(self, message, records, cursor):
        super().__init__(message)
        self.records = records
        self.cursor = cursor


class NoSignificantDigitError(BenfraudError):
    """The value has no significant digit (zero or negative)."""


class EmptyDistributionError(BenfraudError):
    """No valid samples were available to build a digit distribution."""


class DistributionMismatchError(BenfraudError):
    """Two distributions cover different digit positions."""


class SplitError(BenfraudError):
    """A stratified split left some class absent from a partition."""


class TrainingError(BenfraudError):
    """Training preconditions violated (e.g. single-class train set)."""


class DataError(BenfraudError):
    """Non-finite or otherwise unusable values in a feature matrix."""


class ModelFormatError(BenfraudError):
    """A model file could not be parsed or has an unsupported version."""
