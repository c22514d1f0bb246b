"""Significant-digit distributions and Benford's-Law fit statistics.

The first-digit law is P(d) = log10(1 + 1/d) for d in 1..9; the second-digit
law sums that expression over the ten two-digit prefixes sharing the second
digit. Observed distributions are compared against the laws with a
proportion-based chi-squared distance and a digit-CDF Kolmogorov-Smirnov
statistic, both of which are used downstream as classifier features.

Digit extraction is exact: integers are read from their decimal string and
decimals from their digit tuple, never through a floating-point significand.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable, Sequence

from .errors import (
    DistributionMismatchError,
    EmptyDistributionError,
    NoSignificantDigitError,
)

__all__ = [
    "DigitPosition",
    "DigitDistribution",
    "FitStatistics",
    "significant_digit",
    "count_digits",
    "benford_expected",
    "observed_distribution",
    "chi_squared",
    "ks_statistic",
    "fit_address",
]


class DigitPosition(enum.Enum):
    FIRST = "first"
    SECOND = "second"

    @property
    def support(self) -> range:
        # First significant digit is never 0; the second can be.
        return range(1, 10) if self is DigitPosition.FIRST else range(0, 10)


_MASS_TOL = 1e-12


@dataclass(frozen=True)
class DigitDistribution:
    """Probability mass over the digits of one position.

    ``mass`` is aligned with ``position.support``; ``sample_count`` is 0 for
    analytic laws and the number of contributing values otherwise.
    """

    position: DigitPosition
    mass: tuple[float, ...]
    sample_count: int

    def __post_init__(self):
        support = self.position.support
        if len(self.mass) != len(support):
            raise ValueError(
                f"expected {len(support)} masses for {self.position.value} digits, "
                f"got {len(self.mass)}"
            )
        if any(m < 0 for m in self.mass):
            raise ValueError("digit masses must be non-negative")
        total = math.fsum(self.mass)
        if total == 0:
            raise ValueError("all-zero digit distribution is invalid")
        if abs(total - 1.0) > _MASS_TOL:
            raise ValueError(f"digit masses sum to {total!r}, not 1")
        if self.sample_count < 0:
            raise ValueError("sample_count must be non-negative")

    def mass_of(self, digit: int) -> float:
        return self.mass[digit - self.position.support.start]


@dataclass(frozen=True)
class FitStatistics:
    """Distance of an observed digit distribution from the Benford law."""

    chi_squared: float
    ks: float
    sample_count: int


def _digits_of(value) -> tuple[int, int] | None:
    """Return (first, second) significant digits, or None for value <= 0.

    The second digit follows the trailing-zero convention: the significand of
    2 * 10**18 is 2.000..., so its second digit is 0.
    """
    if isinstance(value, float):
        # Route through the shortest-roundtrip repr so 2e18 reads as "2e+18".
        value = Decimal(repr(value))
    if isinstance(value, Decimal):
        if not value.is_finite() or value <= 0:
            return None
        digits = value.as_tuple().digits
        return digits[0], digits[1] if len(digits) > 1 else 0
    value = int(value)
    if value <= 0:
        return None
    text = str(value)
    return int(text[0]), int(text[1]) if len(text) > 1 else 0


def significant_digit(value, position: DigitPosition) -> int:
    """Extract the significant digit of ``value`` at ``position``.

    ``value`` may be an int, Decimal, or float; it must be positive.
    """
    pair = _digits_of(value)
    if pair is None:
        raise NoSignificantDigitError(f"value {value!r} has no significant digit")
    return pair[0] if position is DigitPosition.FIRST else pair[1]


def count_digits(values: Iterable, position: DigitPosition) -> tuple[list[int], int]:
    """Count digit occurrences at ``position`` over ``values``.

    Returns (counts aligned with the position support, number of skipped
    values). Values without a significant digit (zeros) are skipped, not
    errors: zero-value transfers are legitimate records with no digit.
    """
    idx = 0 if position is DigitPosition.FIRST else 1
    start = position.support.start
    counts = [0] * len(position.support)
    skipped = 0
    for value in values:
        pair = _digits_of(value)
        if pair is None:
            skipped += 1
        else:
            counts[pair[idx] - start] += 1
    return counts, skipped


def benford_expected(position: DigitPosition) -> DigitDistribution:
    """The analytic Benford law for the given digit position."""
    if position is DigitPosition.FIRST:
        mass = tuple(math.log10(1.0 + 1.0 / d) for d in range(1, 10))
    else:
        mass = tuple(
            math.fsum(math.log10(1.0 + 1.0 / (10 * d1 + d2)) for d1 in range(1, 10))
            for d2 in range(0, 10)
        )
    return DigitDistribution(position=position, mass=mass, sample_count=0)


def observed_distribution(values: Iterable, position: DigitPosition) -> DigitDistribution:
    """Empirical digit distribution of ``values`` at ``position``."""
    counts, _ = count_digits(values, position)
    n = sum(counts)
    if n == 0:
        raise EmptyDistributionError(
            f"no value with a valid {position.value} digit"
        )
    return DigitDistribution(
        position=position,
        mass=tuple(c / n for c in counts),
        sample_count=n,
    )


def _check_positions(observed: DigitDistribution, expected: DigitDistribution) -> None:
    if observed.position is not expected.position:
        raise DistributionMismatchError(
            f"cannot compare {observed.position.value}-digit distribution "
            f"with {expected.position.value}-digit distribution"
        )


def chi_squared(observed: DigitDistribution, expected: DigitDistribution) -> float:
    """Proportion-based chi-squared distance sum((p_obs - p_exp)^2 / p_exp).

    Computed on proportions rather than counts so the statistic is comparable
    across addresses with very different transaction volumes.
    """
    _check_positions(observed, expected)
    if any(m <= 0 for m in expected.mass):
        raise ValueError("expected distribution must have positive mass on every digit")
    return math.fsum(
        (o - e) ** 2 / e for o, e in zip(observed.mass, expected.mass)
    )


def ks_statistic(observed: DigitDistribution, expected: DigitDistribution) -> float:
    """Kolmogorov-Smirnov statistic on the digit CDFs in ascending digit order."""
    _check_positions(observed, expected)
    cdf_obs = 0.0
    cdf_exp = 0.0
    worst = 0.0
    for o, e in zip(observed.mass, expected.mass):
        cdf_obs += o
        cdf_exp += e
        worst = max(worst, abs(cdf_obs - cdf_exp))
    return worst


def fit_address(values: Sequence) -> tuple[FitStatistics, FitStatistics]:
    """Fit statistics of an address's transaction values, (first, second).

    Raises EmptyDistributionError when no value has a significant digit.
    """
    stats = []
    for position in (DigitPosition.FIRST, DigitPosition.SECOND):
        obs = observed_distribution(values, position)
        exp = benford_expected(position)
        stats.append(
            FitStatistics(
                chi_squared=chi_squared(obs, exp),
                ks=ks_statistic(obs, exp),
                sample_count=obs.sample_count,
            )
        )
    return stats[0], stats[1]
