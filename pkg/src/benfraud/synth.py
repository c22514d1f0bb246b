"""Synthetic labeled transaction datasets with known digit structure.

Legitimate addresses draw values log-uniformly over whole decades, which is
exactly Benford for every digit position. Scam addresses draw uniformly
within a single decade, which is exactly uniform(1/9) in the first digit.

With match_statistics enabled the goal flips from realism to control: both
classes draw counts, gas, counterparties, and value magnitudes from one
shared recipe, so none of the statistical features carries class signal.
The only difference left is digit structure: scam values are rounded to one
significant digit with probability round_bias (flat "round amount"
transfers), which spikes the second digit at zero and mildly reshapes the
first-digit law.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .ingest import NONSCAM, SCAM, AddressLabel, TransactionRecord
from .seeds import SYNTH, component_rng

__all__ = ["GeneratorConfig", "generate", "statistics_separation"]

_GAS_CHOICES = (21000, 21000, 21000, 21000, 52000, 68500, 105000, 180000)
_BLOCK_BASE = 15_000_000
_TIME_BASE = 1_650_000_000


@dataclass(frozen=True)
class GeneratorConfig:
    n_legit: int = 200
    n_scam: int = 20
    tx_per_address: tuple[int, int] = (100, 2000)
    legit_decades: int = 3
    scam_decade: int = 17
    legit_base_decade: int = 14
    scale_decades: int = 4
    round_bias: float = 0.5
    match_statistics: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_legit < 0 or self.n_scam < 0 or self.n_legit + self.n_scam < 1:
            raise ValueError("need at least one address to generate")
        lo, hi = self.tx_per_address
        if not 1 <= lo <= hi:
            raise ValueError(f"tx_per_address must satisfy 1 <= lo <= hi, got {lo}..{hi}")
        if self.legit_decades < 1:
            raise ValueError("legit_decades must be >= 1")
        if not 1 <= self.scam_decade <= 30:
            raise ValueError("scam_decade must lie in 1..30")
        if not 1 <= self.legit_base_decade <= 30:
            raise ValueError("legit_base_decade must lie in 1..30")
        if self.scale_decades < 1:
            raise ValueError("scale_decades must be >= 1")
        if not 0.0 <= self.round_bias <= 1.0:
            raise ValueError("round_bias must lie in [0, 1]")


def _address(i: int) -> str:
    return "0x" + format(i, "040x")


def _tx_hash(i: int) -> str:
    return "0x" + format(i, "064x")


def _uniform_decade_int(rng: np.random.Generator, decade: int) -> int:
    """Exactly uniform integer on [10^decade, 10^(decade+1))."""
    lo = 10**decade
    span = 9 * lo
    if span < 2**63:
        return int(rng.integers(0, span)) + lo
    # compose two int64 draws so the span stays exactly uniform
    high = int(rng.integers(0, 9 * 10 ** (decade - 9)))
    low = int(rng.integers(0, 10**9))
    return high * 10**9 + low + lo


def _log_uniform_int(rng: np.random.Generator, base: float, decades: float) -> int:
    exponent = base + rng.uniform(0.0, decades)
    return round(math.exp(exponent * math.log(10.0)))


def _round_one_digit(value: int) -> int:
    """Round to one significant digit, half away from zero (9.5 -> 10)."""
    magnitude = 10 ** (len(str(value)) - 1)
    return int(value / magnitude + 0.5) * magnitude


def generate(
    config: GeneratorConfig,
) -> tuple[list[TransactionRecord], dict[str, AddressLabel]]:
    """Labeled records for n_legit + n_scam focal addresses.

    Counterparties come from a background pool of unlabeled addresses that
    never overlaps the focal set, so each focal history only contains its
    own class's value draws. Deterministic given config.
    """
    rng = component_rng(config.seed, SYNTH)
    n_focal = config.n_legit + config.n_scam
    focal = [_address(i + 1) for i in range(n_focal)]
    labels = {
        address: AddressLabel(
            address=address,
            label=NONSCAM if i < config.n_legit else SCAM,
            source="synthetic",
        )
        for i, address in enumerate(focal)
    }
    pool_size = max(16, 2 * n_focal)
    pool = [_address(n_focal + 1 + i) for i in range(pool_size)]

    lo, hi = config.tx_per_address
    records: list[TransactionRecord] = []
    counter = 0
    for address in focal:
        scam = labels[address].label == SCAM
        n_tx = int(rng.integers(lo, hi + 1))
        scale_exp = rng.uniform(0.0, config.scale_decades) if config.match_statistics else 0.0
        for _ in range(n_tx):
            outgoing = rng.random() < 0.5
            counterparty = pool[int(rng.integers(0, pool_size))]
            gas = _GAS_CHOICES[int(rng.integers(0, len(_GAS_CHOICES)))]
            if config.match_statistics:
                # shared value recipe for both classes; scam differs only
                # through the round-amount bias applied afterwards
                value = _log_uniform_int(
                    rng, config.legit_base_decade + scale_exp, config.legit_decades
                )
                if scam and rng.random() < config.round_bias:
                    value = _round_one_digit(value)
            elif scam:
                value = _uniform_decade_int(rng, config.scam_decade)
            else:
                value = _log_uniform_int(
                    rng, config.legit_base_decade, config.legit_decades
                )
            records.append(
                TransactionRecord(
                    tx_hash=_tx_hash(counter + 1),
                    from_addr=address if outgoing else counterparty,
                    to_addr=counterparty if outgoing else address,
                    value_wei=value,
                    gas_limit=gas,
                    timestamp=_TIME_BASE + 12 * counter,
                    block_number=_BLOCK_BASE + counter,
                )
            )
            counter += 1

    if config.match_statistics and config.n_legit >= 5 and config.n_scam >= 5:
        z_scores = statistics_separation(records, labels)
        drifted = {k: z for k, z in z_scores.items() if abs(z) > 4.0}
        if drifted:
            warnings.warn(
                "matched statistics drifted between classes: "
                + ", ".join(f"{k} z={z:.2f}" for k, z in sorted(drifted.items())),
                stacklevel=2,
            )
    return records, labels


def _rank_sum_z(a: np.ndarray, b: np.ndarray) -> float:
    """Mann-Whitney z via normal approximation with tie correction."""
    m, n = a.size, b.size
    pooled = np.concatenate([a, b])
    order = np.argsort(pooled, kind="stable")
    ranks = np.empty(pooled.size, dtype=np.float64)
    ranks[order] = np.arange(1, pooled.size + 1, dtype=np.float64)
    # average ranks across ties
    sorted_vals = pooled[order]
    i = 0
    while i < sorted_vals.size:
        j = i
        while j + 1 < sorted_vals.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        if j > i:
            ranks[order[i : j + 1]] = (i + 1 + j + 1) / 2.0
        i = j + 1
    u = float(np.sum(ranks[:m])) - m * (m + 1) / 2.0
    mean_u = m * n / 2.0
    size = m + n
    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts)) / (size * (size - 1))
    var_u = m * n / 12.0 * ((size + 1) - tie_term)
    if var_u <= 0:
        return 0.0
    return (u - mean_u) / math.sqrt(var_u)


def statistics_separation(
    records: list[TransactionRecord], labels: dict[str, AddressLabel]
) -> dict[str, float]:
    """Per-feature Mann-Whitney z between classes for the non-digit features.

    Near-zero values mean the classes are statistically indistinguishable on
    that feature; used as the generation-time check for match_statistics.
    """
    per_address: dict[str, dict] = {
        address: {"n_tx": 0, "gas": [], "parties": set(), "log_value": []}
        for address in labels
    }
    for record in records:
        for address, other in (
            (record.from_addr, record.to_addr),
            (record.to_addr, record.from_addr),
        ):
            stats = per_address.get(address) if address else None
            if stats is None:
                continue
            stats["n_tx"] += 1
            stats["gas"].append(record.gas_limit)
            if other:
                stats["parties"].add(other)
            if record.value_wei > 0:
                stats["log_value"].append(math.log10(record.value_wei))

    features: dict[str, dict[str, list[float]]] = {
        "tx_count": {"scam": [], "legit": []},
        "gas_mean": {"scam": [], "legit": []},
        "unique_counterparties": {"scam": [], "legit": []},
        "log_value_mean": {"scam": [], "legit": []},
    }
    for address, entry in labels.items():
        side = "scam" if entry.label == SCAM else "legit"
        stats = per_address[address]
        if stats["n_tx"] == 0:
            continue
        features["tx_count"][side].append(float(stats["n_tx"]))
        features["gas_mean"][side].append(float(np.mean(stats["gas"])))
        features["unique_counterparties"][side].append(float(len(stats["parties"])))
        if stats["log_value"]:
            features["log_value_mean"][side].append(float(np.mean(stats["log_value"])))

    out: dict[str, float] = {}
    for name, sides in features.items():
        scam_vals = np.array(sides["scam"])
        legit_vals = np.array(sides["legit"])
        if scam_vals.size == 0 or legit_vals.size == 0:
            continue
        out[name] = _rank_sum_z(scam_vals, legit_vals)
    return out
