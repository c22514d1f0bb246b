"""Per-address feature vectors: direction statistics plus Benford fit.

The canonical schema is 20 columns: for each direction (in, out) the
transaction count, unique counterparty count, and mean/median/population-std
of transfer value (wei) and gas limit; then chi2_first, chi2_second,
ks_first, ks_second computed on the pooled in+out values. Missing values
(empty direction, no valid digits) are NaN internally and the literal NA in
CSV, never a silent zero.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .benford import fit_address
from .errors import EmptyDistributionError, SchemaError, ValidationError
from .ingest import AddressLabel, NONSCAM, SCAM, _text_stream, normalize_address
from .txgraph import AddressNeighborhood, TransactionGraph, neighborhood, unique_counterparties

__all__ = [
    "DIRECTIONS",
    "FEATURE_COLUMNS",
    "BENFORD_COLUMNS",
    "STATISTICAL_COLUMNS",
    "MISSING",
    "FeatureVector",
    "LabeledExample",
    "extract_features",
    "build_dataset",
    "write_matrix",
    "read_matrix",
    "design_matrix",
]

DIRECTIONS = ("in", "out")

_DIRECTION_STATS = (
    "tx_count",
    "unique_counterparties",
    "value_mean",
    "value_median",
    "value_std",
    "gas_mean",
    "gas_median",
    "gas_std",
)

BENFORD_COLUMNS = ("chi2_first", "chi2_second", "ks_first", "ks_second")
STATISTICAL_COLUMNS = tuple(
    f"{direction}_{stat}" for direction in DIRECTIONS for stat in _DIRECTION_STATS
)
FEATURE_COLUMNS = STATISTICAL_COLUMNS + BENFORD_COLUMNS

MISSING = math.nan

_INDEX = {name: i for i, name in enumerate(FEATURE_COLUMNS)}


def _same_value(a: float, b: float) -> bool:
    return a == b or (math.isnan(a) and math.isnan(b))


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """The 20 features of one address, aligned with FEATURE_COLUMNS."""

    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(FEATURE_COLUMNS):
            raise ValidationError(
                f"feature vector needs {len(FEATURE_COLUMNS)} values, got {len(self.values)}"
            )
        for name in ("in_tx_count", "out_tx_count"):
            count = self.get(name)
            if not (count >= 0 and count == int(count)):
                raise ValidationError(f"{name} must be a non-negative integer, got {count}")
        for name in ("chi2_first", "chi2_second"):
            value = self.get(name)
            if not math.isnan(value) and value < 0:
                raise ValidationError(f"{name} must be non-negative, got {value}")
        for name in ("ks_first", "ks_second"):
            value = self.get(name)
            if not math.isnan(value) and not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0,1], got {value}")

    def get(self, name: str) -> float:
        return self.values[_INDEX[name]]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(FEATURE_COLUMNS, self.values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return all(_same_value(a, b) for a, b in zip(self.values, other.values))


@dataclass(frozen=True, eq=False)
class LabeledExample:
    address: str
    features: FeatureVector
    label: int

    def __post_init__(self):
        if self.label not in (SCAM, NONSCAM):
            raise ValidationError(f"label must be +1 or -1, got {self.label}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledExample):
            return NotImplemented
        return (
            self.address == other.address
            and self.label == other.label
            and self.features == other.features
        )


def _direction_block(records, counterparty_count: int) -> list[float]:
    n = len(records)
    if n == 0:
        return [0.0, 0.0] + [MISSING] * 6
    values = np.array([float(r.value_wei) for r in records], dtype=np.float64)
    gas = np.array([float(r.gas_limit) for r in records], dtype=np.float64)
    return [
        float(n),
        float(counterparty_count),
        float(values.mean()),
        float(np.median(values)),
        float(values.std()),
        float(gas.mean()),
        float(np.median(gas)),
        float(gas.std()),
    ]


def extract_features(nbhd: AddressNeighborhood) -> FeatureVector:
    """Compute the 20-feature vector of one neighborhood.

    Standard deviations are population (ddof=0); the Benford block is fit on
    the union of incoming and outgoing values.
    """
    values: list[float] = []
    for direction in DIRECTIONS:
        records = nbhd.direction(direction)
        values.extend(_direction_block(records, unique_counterparties(nbhd, direction)))
    try:
        first, second = fit_address(nbhd.all_values())
        values.extend([first.chi_squared, second.chi_squared, first.ks, second.ks])
    except EmptyDistributionError:
        values.extend([MISSING] * 4)
    return FeatureVector(values=tuple(values))


def build_dataset(
    graph: TransactionGraph, labels: Mapping[str, AddressLabel]
) -> list[LabeledExample]:
    """One example per labeled address, in lexicographic address order.

    Unlabeled graph addresses are ignored. A labeled address absent from the
    graph, or one with no digit-valid transaction values, keeps its example
    (with missing features) and emits a warning.
    """
    examples: list[LabeledExample] = []
    for address in sorted(labels):
        entry = labels[address]
        if address not in graph.vertices:
            warnings.warn(f"labeled address {address} has no transactions in the graph")
        nbhd = neighborhood(graph, address)
        features = extract_features(nbhd)
        if math.isnan(features.get("chi2_first")) and (nbhd.incoming or nbhd.outgoing):
            warnings.warn(
                f"address {address} has transactions but no nonzero values;"
                " Benford features are missing"
            )
        examples.append(LabeledExample(address=address, features=features, label=entry.label))
    return examples


def _format_cell(value: float) -> str:
    return "NA" if math.isnan(value) else repr(value)


def write_matrix(examples: Iterable[LabeledExample], stream: IO) -> None:
    """Serialize examples as address,<20 features>,label CSV with NA markers."""
    with _text_stream(stream) as text:
        writer = csv.writer(text, lineterminator="\n")
        writer.writerow(("address",) + FEATURE_COLUMNS + ("label",))
        for example in examples:
            writer.writerow(
                [example.address]
                + [_format_cell(v) for v in example.features.values]
                + [str(example.label)]
            )


def read_matrix(stream: IO) -> list[LabeledExample]:
    """Read a feature matrix CSV; the exact canonical header is required."""
    expected = ("address",) + FEATURE_COLUMNS + ("label",)
    examples: list[LabeledExample] = []
    with _text_stream(stream) as text:
        reader = csv.reader(text)
        try:
            header = tuple(cell.strip() for cell in next(reader))
        except StopIteration:
            raise SchemaError("empty feature matrix (no header row)") from None
        if header != expected:
            missing = sorted(set(expected) - set(header))
            extra = sorted(set(header) - set(expected))
            detail = []
            if missing:
                detail.append(f"missing columns: {', '.join(missing)}")
            if extra:
                detail.append(f"unknown columns: {', '.join(extra)}")
            raise SchemaError(
                "feature matrix header mismatch"
                + (f" ({'; '.join(detail)})" if detail else " (wrong column order)")
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected):
                raise ValidationError(
                    f"expected {len(expected)} fields, got {len(row)}", line=line_no
                )
            address = normalize_address(row[0], line=line_no)
            cells = []
            for name, cell in zip(FEATURE_COLUMNS, row[1:-1]):
                cell = cell.strip()
                if cell == "NA":
                    cells.append(MISSING)
                else:
                    try:
                        cells.append(float(cell))
                    except ValueError:
                        raise ValidationError(
                            f"invalid number {cell!r}", line=line_no, field=name
                        ) from None
            try:
                label = int(row[-1])
            except ValueError:
                raise ValidationError(
                    f"invalid label {row[-1]!r}", line=line_no, field="label"
                ) from None
            if label not in (SCAM, NONSCAM):
                raise ValidationError(
                    f"label must be 1 or -1, got {label}", line=line_no, field="label"
                )
            examples.append(
                LabeledExample(address=address, features=FeatureVector(tuple(cells)), label=label)
            )
    return examples


def design_matrix(
    examples: Sequence[LabeledExample], columns: Sequence[str] = FEATURE_COLUMNS
) -> tuple[np.ndarray, np.ndarray, list[str]]:
    """Stack examples into (X, y, addresses) numpy form for model training.

    ``columns`` selects and orders the feature subset; NaN marks missing.
    """
    unknown = [c for c in columns if c not in _INDEX]
    if unknown:
        raise SchemaError(f"unknown feature columns: {', '.join(unknown)}")
    indexes = [_INDEX[c] for c in columns]
    X = np.empty((len(examples), len(indexes)), dtype=np.float64)
    y = np.empty(len(examples), dtype=np.int64)
    addresses: list[str] = []
    for i, example in enumerate(examples):
        X[i] = [example.features.values[j] for j in indexes]
        y[i] = example.label
        addresses.append(example.address)
    return X, y, addresses
