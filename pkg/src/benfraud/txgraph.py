"""Directed transaction multigraph and per-address edge partitions.

Vertices are addresses, edges are transactions; multiplicity is preserved,
so two transfers between the same pair are two edges. A self-transfer is
listed in both directions of its address's neighborhood so the incoming and
outgoing statistics stay independent filters.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable

from .ingest import TransactionRecord, _text_stream

__all__ = [
    "TransactionGraph",
    "AddressNeighborhood",
    "build_graph",
    "neighborhood",
    "unique_counterparties",
    "write_edge_list",
]


@dataclass(frozen=True)
class AddressNeighborhood:
    """Edges incident to one address, partitioned by direction.

    Both lists are sorted by (block_number, tx_hash); contract creations
    (absent to_addr) appear only in the creator's outgoing list.
    """

    address: str
    incoming: tuple[TransactionRecord, ...]
    outgoing: tuple[TransactionRecord, ...]

    def direction(self, name: str) -> tuple[TransactionRecord, ...]:
        if name == "in":
            return self.incoming
        if name == "out":
            return self.outgoing
        raise ValueError(f"direction must be 'in' or 'out', got {name!r}")

    def all_values(self) -> list[int]:
        """Union of incoming and outgoing transfer values (self-transfers
        contribute twice, matching the double-listing convention)."""
        return [r.value_wei for r in self.incoming] + [
            r.value_wei for r in self.outgoing
        ]


class TransactionGraph:
    """Immutable directed multigraph with per-address direction indexes."""

    def __init__(self, records: Iterable[TransactionRecord]):
        ordered = sorted(records, key=lambda r: r.sort_key)
        vertices: set[str] = set()
        incoming: dict[str, list[TransactionRecord]] = {}
        outgoing: dict[str, list[TransactionRecord]] = {}
        for record in ordered:
            vertices.add(record.from_addr)
            outgoing.setdefault(record.from_addr, []).append(record)
            if record.to_addr is not None:
                vertices.add(record.to_addr)
                incoming.setdefault(record.to_addr, []).append(record)
        self._records = tuple(ordered)
        self._vertices = frozenset(vertices)
        self._incoming = {a: tuple(rs) for a, rs in incoming.items()}
        self._outgoing = {a: tuple(rs) for a, rs in outgoing.items()}

    @property
    def vertices(self) -> frozenset[str]:
        return self._vertices

    @property
    def edges(self) -> tuple[TransactionRecord, ...]:
        return self._records

    @property
    def edge_count(self) -> int:
        return len(self._records)

    def multiplicity(self, from_addr: str, to_addr: str | None) -> int:
        return sum(
            1
            for r in self._outgoing.get(from_addr, ())
            if r.to_addr == to_addr
        )

    def incoming(self, address: str) -> tuple[TransactionRecord, ...]:
        return self._incoming.get(address, ())

    def outgoing(self, address: str) -> tuple[TransactionRecord, ...]:
        return self._outgoing.get(address, ())


def build_graph(records: Iterable[TransactionRecord]) -> TransactionGraph:
    """Build the transaction graph; empty input yields an empty graph."""
    return TransactionGraph(records)


def neighborhood(graph: TransactionGraph, address: str) -> AddressNeighborhood:
    """The address's incoming/outgoing partition; absent addresses yield
    empty lists."""
    return AddressNeighborhood(
        address=address,
        incoming=graph.incoming(address),
        outgoing=graph.outgoing(address),
    )


def unique_counterparties(nbhd: AddressNeighborhood, direction: str) -> int:
    """Count distinct opposite endpoints in the chosen direction.

    Contract creations have no counterparty and do not contribute.
    """
    records = nbhd.direction(direction)
    if direction == "in":
        return len({r.from_addr for r in records})
    return len({r.to_addr for r in records if r.to_addr is not None})


def write_edge_list(graph: TransactionGraph, stream: IO) -> None:
    """Export edges as from,to,value_wei,block_number CSV for plotting."""
    with _text_stream(stream) as text:
        writer = csv.writer(text, lineterminator="\n")
        writer.writerow(["from", "to", "value_wei", "block_number"])
        for record in graph.edges:
            writer.writerow(
                [
                    record.from_addr,
                    record.to_addr or "",
                    str(record.value_wei),
                    str(record.block_number),
                ]
            )
