"""Stratified train/valid/test splitting.

Partition sizes follow the 64/16/20 protocol by default. Stratification
allocates each class across the partitions by largest remainder, so sizes
are exact whenever the arithmetic allows, and every class must land in every
partition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..errors import SplitError
from ..features import LabeledExample
from ..seeds import SPLIT, component_rng

__all__ = ["SplitSpec", "split"]


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.64
    valid_frac: float = 0.16
    test_frac: float = 0.20
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        fracs = (self.train_frac, self.valid_frac, self.test_frac)
        if any(f <= 0 for f in fracs):
            raise SplitError("split fractions must be positive")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise SplitError(f"split fractions must sum to 1, got {sum(fracs)!r}")

    @property
    def fractions(self) -> tuple[float, float, float]:
        return (self.train_frac, self.valid_frac, self.test_frac)


def _largest_remainder(count: int, fractions: Sequence[float]) -> list[int]:
    """Integer allocation of ``count`` by fractions; remainders assigned
    largest-first with ties broken by partition order (train, valid, test)."""
    raw = [count * f for f in fractions]
    base = [math.floor(r) for r in raw]
    leftover = count - sum(base)
    order = sorted(range(len(fractions)), key=lambda i: (-(raw[i] - base[i]), i))
    for i in order[:leftover]:
        base[i] += 1
    return base


def split(
    examples: Sequence[LabeledExample], spec: SplitSpec
) -> tuple[list[LabeledExample], list[LabeledExample], list[LabeledExample]]:
    """Partition examples into (train, valid, test) at the requested fractions.

    Deterministic given the seed, and independent of input order: examples
    are canonicalized by (address, label) before shuffling. When stratified,
    raises SplitError if any class would be absent from any partition.
    """
    if not examples:
        raise SplitError("cannot split an empty dataset")
    examples = sorted(examples, key=lambda e: (e.address, e.label))
    classes = sorted({e.label for e in examples})
    if len(classes) < 2:
        raise SplitError("dataset must contain both classes")
    rng = component_rng(spec.seed, SPLIT)
    partitions: tuple[list[LabeledExample], ...] = ([], [], [])
    if spec.stratified:
        for label in classes:
            indexes = [i for i, e in enumerate(examples) if e.label == label]
            shuffled = [indexes[p] for p in rng.permutation(len(indexes))]
            sizes = _largest_remainder(len(indexes), spec.fractions)
            if min(sizes) == 0:
                raise SplitError(
                    f"class {label:+d} has too few examples ({len(indexes)}) to appear"
                    " in every partition; use a different seed or a smaller valid_frac"
                )
            start = 0
            for part, size in zip(partitions, sizes):
                part.extend(examples[i] for i in shuffled[start : start + size])
                start += size
    else:
        shuffled = [examples[p] for p in rng.permutation(len(examples))]
        sizes = _largest_remainder(len(examples), spec.fractions)
        start = 0
        for part, size in zip(partitions, sizes):
            part.extend(shuffled[start : start + size])
            start += size
    train, valid, test = partitions
    return train, valid, test
