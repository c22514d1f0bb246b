"""Shared test fixtures: compact constructors for addresses and records."""

import numpy as np

from benfraud.features import FEATURE_COLUMNS, FeatureVector, LabeledExample
from benfraud.ingest import TransactionRecord


def addr(i: int) -> str:
    return "0x" + format(i, "040x")


def txh(i: int) -> str:
    return "0x" + format(i, "064x")


def record(
    i: int,
    from_addr: str,
    to_addr: str | None,
    value: int,
    gas: int = 21000,
    timestamp: int | None = None,
    block: int | None = None,
    internal: bool = False,
) -> TransactionRecord:
    return TransactionRecord(
        tx_hash=txh(i),
        from_addr=from_addr,
        to_addr=to_addr,
        value_wei=value,
        gas_limit=gas,
        timestamp=1_600_000_000 + i if timestamp is None else timestamp,
        block_number=14_000_000 + i if block is None else block,
        internal=internal,
    )


def examples_from_columns(columns: dict, labels) -> list[LabeledExample]:
    """Labeled examples whose named feature columns come from arrays.

    Unnamed columns are zero, which the FeatureVector validators accept for
    every position. Column arrays must share the length of labels.
    """
    labels = [int(v) for v in labels]
    index = {name: i for i, name in enumerate(FEATURE_COLUMNS)}
    out = []
    for row, label in enumerate(labels):
        values = [0.0] * len(FEATURE_COLUMNS)
        for name, arr in columns.items():
            values[index[name]] = float(arr[row])
        out.append(
            LabeledExample(
                address=addr(row),
                features=FeatureVector(values=tuple(values)),
                label=label,
            )
        )
    return out


def labels_from_signs(signal: np.ndarray) -> np.ndarray:
    return np.where(np.asarray(signal) > 0, 1, -1).astype(np.int64)
