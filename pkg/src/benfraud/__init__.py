"""Benford's-Law digit features and fraud classifiers for blockchain addresses."""

from .benford import (
    DigitDistribution,
    DigitPosition,
    FitStatistics,
    benford_expected,
    chi_squared,
    fit_address,
    ks_statistic,
    observed_distribution,
    significant_digit,
)
from .errors import (
    BenfraudError,
    DataError,
    DistributionMismatchError,
    EmptyDistributionError,
    FetchError,
    LabelConflictError,
    ModelFormatError,
    NoSignificantDigitError,
    PartialDataError,
    SchemaError,
    SplitError,
    TrainingError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DigitDistribution",
    "DigitPosition",
    "FitStatistics",
    "benford_expected",
    "chi_squared",
    "fit_address",
    "ks_statistic",
    "observed_distribution",
    "significant_digit",
    "BenfraudError",
    "DataError",
    "DistributionMismatchError",
    "EmptyDistributionError",
    "FetchError",
    "LabelConflictError",
    "ModelFormatError",
    "NoSignificantDigitError",
    "PartialDataError",
    "SchemaError",
    "SplitError",
    "TrainingError",
    "ValidationError",
]
