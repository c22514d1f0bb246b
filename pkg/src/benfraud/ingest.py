"""Parsing and validation of transaction and label data.

Transactions arrive as CSV or JSONL streams with the canonical columns
``tx_hash,from_addr,to_addr,value_wei,gas_limit,timestamp,block_number`` plus
an optional ``internal`` flag; labels arrive as ``address,label,source`` rows.
Values are parsed as arbitrary-precision integers: wei amounts routinely
exceed the 64-bit range (2 ETH is 2 * 10**18), so they must never pass
through a float.
"""

from __future__ import annotations

import csv
import io
import json
import re
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import IO, Iterable, Mapping, Sequence

from .errors import (
    FetchError,
    LabelConflictError,
    PartialDataError,
    SchemaError,
    ValidationError,
)

__all__ = [
    "SCAM",
    "NONSCAM",
    "TRANSACTION_COLUMNS",
    "LABEL_COLUMNS",
    "TransactionRecord",
    "AddressLabel",
    "ParseIssue",
    "ParseResult",
    "normalize_address",
    "normalize_tx_hash",
    "parse_transactions",
    "write_transactions",
    "load_labels",
    "write_labels",
    "label_counts",
    "fetch_address_history",
]

SCAM = 1
NONSCAM = -1

LABEL_NAMES = {SCAM: "scam", NONSCAM: "nonscam"}
LABEL_VALUES = {name: value for value, name in LABEL_NAMES.items()}

TRANSACTION_COLUMNS = (
    "tx_hash",
    "from_addr",
    "to_addr",
    "value_wei",
    "gas_limit",
    "timestamp",
    "block_number",
)
OPTIONAL_TRANSACTION_COLUMNS = ("internal",)
LABEL_COLUMNS = ("address", "label", "source")

_ADDRESS_RE = re.compile(r"0x[0-9a-f]{40}")
_TX_HASH_RE = re.compile(r"0x[0-9a-f]{64}")
_UINT_RE = re.compile(r"[0-9]+")


@dataclass(frozen=True, slots=True)
class TransactionRecord:
    """One on-chain transfer; ``to_addr`` is None for contract creation."""

    tx_hash: str
    from_addr: str
    to_addr: str | None
    value_wei: int
    gas_limit: int
    timestamp: int
    block_number: int
    internal: bool = False

    def __post_init__(self):
        if self.value_wei < 0:
            raise ValidationError("value_wei must be non-negative", field="value_wei")
        if self.gas_limit < 0:
            raise ValidationError("gas_limit must be non-negative", field="gas_limit")
        if self.block_number < 0:
            raise ValidationError(
                "block_number must be non-negative", field="block_number"
            )
        if not self.from_addr:
            raise ValidationError("from_addr must not be empty", field="from_addr")

    @property
    def sort_key(self) -> tuple[int, str]:
        return (self.block_number, self.tx_hash)


@dataclass(frozen=True, slots=True)
class AddressLabel:
    """Ground-truth class of one address; label is +1 (scam) or -1 (nonscam)."""

    address: str
    label: int
    source: str

    def __post_init__(self):
        if self.label not in (SCAM, NONSCAM):
            raise ValidationError(
                f"label must be +1 or -1, got {self.label}", field="label"
            )

    @property
    def label_name(self) -> str:
        return LABEL_NAMES[self.label]


@dataclass(frozen=True, slots=True)
class ParseIssue:
    line: int
    message: str


@dataclass(frozen=True, slots=True)
class ParseResult:
    records: tuple[TransactionRecord, ...]
    issues: tuple[ParseIssue, ...] = ()


def normalize_address(raw: str, *, field: str = "address", line: int | None = None) -> str:
    """Normalize an address to lowercase 0x-prefixed 40-hex form."""
    text = raw.strip().lower()
    if not _ADDRESS_RE.fullmatch(text):
        raise ValidationError(
            f"invalid address {raw!r} (want 0x + 40 hex chars)", line=line, field=field
        )
    return text


def normalize_tx_hash(raw: str, *, line: int | None = None) -> str:
    text = raw.strip().lower()
    if not _TX_HASH_RE.fullmatch(text):
        raise ValidationError(
            f"invalid tx_hash {raw!r} (want 0x + 64 hex chars)", line=line, field="tx_hash"
        )
    return text


def _parse_uint(raw: str, *, field: str, line: int | None) -> int:
    text = raw.strip()
    if text and text[0] == "-":
        raise ValidationError(
            f"{field} must be non-negative, got {raw!r}", line=line, field=field
        )
    if not _UINT_RE.fullmatch(text):
        raise ValidationError(
            f"{field} must be a decimal integer, got {raw!r}", line=line, field=field
        )
    return int(text)


def _parse_bool(raw: str, *, field: str, line: int | None) -> bool:
    text = raw.strip().lower()
    if text in ("true", "1"):
        return True
    if text in ("", "false", "0"):
        return False
    raise ValidationError(
        f"{field} must be true/false, got {raw!r}", line=line, field=field
    )


def record_from_strings(
    values: Mapping[str, str], *, line: int | None = None
) -> TransactionRecord:
    """Build a validated record from string-valued fields (CSV cell texts)."""
    to_raw = values.get("to_addr", "").strip()
    try:
        return TransactionRecord(
            tx_hash=normalize_tx_hash(values["tx_hash"], line=line),
            from_addr=normalize_address(values["from_addr"], field="from_addr", line=line),
            to_addr=normalize_address(to_raw, field="to_addr", line=line) if to_raw else None,
            value_wei=_parse_uint(values["value_wei"], field="value_wei", line=line),
            gas_limit=_parse_uint(values["gas_limit"], field="gas_limit", line=line),
            timestamp=_parse_uint(values["timestamp"], field="timestamp", line=line),
            block_number=_parse_uint(values["block_number"], field="block_number", line=line),
            internal=_parse_bool(values.get("internal", ""), field="internal", line=line),
        )
    except ValidationError as err:
        if err.line is None:
            raise ValidationError(err.message, line=line, field=err.field) from None
        raise


def record_from_json(obj, *, line: int | None = None) -> TransactionRecord:
    """Build a validated record from a parsed JSON object."""
    if not isinstance(obj, dict):
        raise ValidationError("JSONL line must be an object", line=line)
    missing = [c for c in TRANSACTION_COLUMNS if c not in obj and c != "to_addr"]
    if missing:
        raise ValidationError(f"missing fields: {', '.join(missing)}", line=line)
    as_text = {}
    for key in TRANSACTION_COLUMNS + OPTIONAL_TRANSACTION_COLUMNS:
        value = obj.get(key)
        if value is None:
            as_text[key] = ""
        elif isinstance(value, bool):
            as_text[key] = "true" if value else "false"
        else:
            as_text[key] = str(value)
    return record_from_strings(as_text, line=line)


def _check_header(header: Sequence[str]) -> bool:
    """Validate the CSV header; returns whether the internal column is present."""
    cells = tuple(cell.strip() for cell in header)
    if cells == TRANSACTION_COLUMNS:
        return False
    if cells == TRANSACTION_COLUMNS + OPTIONAL_TRANSACTION_COLUMNS:
        return True
    raise SchemaError(
        f"transactions header must be {','.join(TRANSACTION_COLUMNS)}"
        f"[,internal], got {','.join(cells)}"
    )


@contextmanager
def _text_stream(stream: IO):
    """Text view over a possibly-binary stream, detached (never closed) on
    exit so the caller keeps ownership of the underlying buffer."""
    if isinstance(stream, io.TextIOBase):
        yield stream
        return
    wrapper = io.TextIOWrapper(stream, encoding="utf-8", newline="")
    try:
        yield wrapper
    finally:
        wrapper.flush()
        wrapper.detach()


def parse_transactions(
    stream: IO, format: str = "csv", *, on_error: str = "raise"
) -> ParseResult:
    """Parse a transactions stream into validated records.

    ``on_error`` is "raise" (default, first bad row aborts) or "collect"
    (bad rows are skipped and reported as issues). Duplicate tx_hash values
    are always row errors.
    """
    if format not in ("csv", "jsonl"):
        raise ValueError(f"unknown format {format!r}")
    if on_error not in ("raise", "collect"):
        raise ValueError(f"unknown on_error mode {on_error!r}")
    records: list[TransactionRecord] = []
    issues: list[ParseIssue] = []
    seen_hashes: set[str] = set()

    def emit(record: TransactionRecord, line: int) -> None:
        if record.tx_hash in seen_hashes:
            raise ValidationError(
                f"duplicate tx_hash {record.tx_hash}", line=line, field="tx_hash"
            )
        seen_hashes.add(record.tx_hash)
        records.append(record)

    with _text_stream(stream) as text:
        if format == "csv":
            reader = csv.reader(text)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError("empty transactions stream (no header row)") from None
            has_internal = _check_header(header)
            columns = TRANSACTION_COLUMNS + (("internal",) if has_internal else ())
            for line_no, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    if len(row) != len(columns):
                        raise ValidationError(
                            f"expected {len(columns)} fields, got {len(row)}", line=line_no
                        )
                    emit(record_from_strings(dict(zip(columns, row)), line=line_no), line_no)
                except ValidationError as err:
                    if on_error == "raise":
                        raise
                    issues.append(ParseIssue(line=line_no, message=str(err)))
        else:
            for line_no, raw in enumerate(text, start=1):
                if not raw.strip():
                    continue
                try:
                    try:
                        obj = json.loads(raw)
                    except json.JSONDecodeError as err:
                        raise ValidationError(
                            f"invalid JSON: {err.msg}", line=line_no
                        ) from None
                    emit(record_from_json(obj, line=line_no), line_no)
                except ValidationError as err:
                    if on_error == "raise":
                        raise
                    issues.append(ParseIssue(line=line_no, message=str(err)))

    return ParseResult(records=tuple(records), issues=tuple(issues))


def write_transactions(records: Iterable[TransactionRecord], stream: IO, format: str = "csv") -> None:
    """Serialize records in canonical form: sorted by (block_number, tx_hash),
    all eight columns, lowercase booleans."""
    if format not in ("csv", "jsonl"):
        raise ValueError(f"unknown format {format!r}")
    ordered = sorted(records, key=lambda r: r.sort_key)
    with _text_stream(stream) as text:
        if format == "csv":
            writer = csv.writer(text, lineterminator="\n")
            writer.writerow(TRANSACTION_COLUMNS + OPTIONAL_TRANSACTION_COLUMNS)
            for r in ordered:
                writer.writerow(
                    [
                        r.tx_hash,
                        r.from_addr,
                        r.to_addr or "",
                        str(r.value_wei),
                        str(r.gas_limit),
                        str(r.timestamp),
                        str(r.block_number),
                        "true" if r.internal else "false",
                    ]
                )
        else:
            for r in ordered:
                obj = {
                    "tx_hash": r.tx_hash,
                    "from_addr": r.from_addr,
                    "to_addr": r.to_addr,
                    "value_wei": str(r.value_wei),
                    "gas_limit": r.gas_limit,
                    "timestamp": r.timestamp,
                    "block_number": r.block_number,
                    "internal": r.internal,
                }
                text.write(json.dumps(obj, sort_keys=True) + "\n")


def load_labels(stream: IO) -> dict[str, AddressLabel]:
    """Load the address,label,source CSV into a map keyed by address.

    Repeated agreeing labels merge their sources; disagreeing labels for one
    address are a load-time conflict error naming both sources.
    """
    labels: dict[str, AddressLabel] = {}
    with _text_stream(stream) as text:
        reader = csv.reader(text)
        try:
            header = tuple(cell.strip() for cell in next(reader))
        except StopIteration:
            raise SchemaError("empty labels stream (no header row)") from None
        if header != LABEL_COLUMNS:
            raise SchemaError(
                f"labels header must be {','.join(LABEL_COLUMNS)}, got {','.join(header)}"
            )
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValidationError(f"expected 3 fields, got {len(row)}", line=line_no)
            address = normalize_address(row[0], line=line_no)
            name = row[1].strip().lower()
            if name not in LABEL_VALUES:
                raise ValidationError(
                    f"label must be scam or nonscam, got {row[1]!r}",
                    line=line_no,
                    field="label",
                )
            label = LABEL_VALUES[name]
            source = row[2].strip()
            existing = labels.get(address)
            if existing is None:
                labels[address] = AddressLabel(address=address, label=label, source=source)
            elif existing.label != label:
                raise LabelConflictError(
                    f"address {address} labeled {existing.label_name} (source"
                    f" {existing.source!r}) and {name} (source {source!r})",
                    line=line_no,
                )
            elif source and source not in existing.source.split(";"):
                labels[address] = replace(existing, source=f"{existing.source};{source}")
    return labels


def write_labels(labels: Mapping[str, AddressLabel], stream: IO) -> None:
    """Serialize a label map in canonical form: sorted by address."""
    with _text_stream(stream) as text:
        writer = csv.writer(text, lineterminator="\n")
        writer.writerow(LABEL_COLUMNS)
        for address in sorted(labels):
            entry = labels[address]
            writer.writerow([entry.address, entry.label_name, entry.source])


def label_counts(labels: Mapping[str, AddressLabel]) -> dict[str, int]:
    counts = {"scam": 0, "nonscam": 0}
    for entry in labels.values():
        counts[entry.label_name] += 1
    return counts


def fetch_address_history(
    provider, address: str, page_limit: int, *, retries: int = 2
) -> tuple[TransactionRecord, ...]:
    """Fetch an address history through a paged provider.

    Pages are requested sequentially until the provider reports no further
    cursor or ``page_limit`` pages have been fetched. Each page request is
    retried up to ``retries`` extra times on FetchError. Results are
    deduplicated on tx_hash and sorted by (block_number, tx_hash).

    Raises PartialDataError carrying the records fetched so far when the page
    limit is exhausted while a cursor remains; the caller decides whether the
    partial history is acceptable.
    """
    if page_limit < 1:
        raise ValueError("page_limit must be positive")
    address = normalize_address(address)
    collected: list[TransactionRecord] = []
    cursor: str | None = None
    for _ in range(page_limit):
        last_error: FetchError | None = None
        for _attempt in range(retries + 1):
            try:
                page = provider.request(address, cursor)
                last_error = None
                break
            except FetchError as err:
                last_error = err
        if last_error is not None:
            raise FetchError(
                f"fetch failed for {address} at cursor {cursor!r} after"
                f" {retries + 1} attempts: {last_error}"
            ) from last_error
        collected.extend(page.records)
        cursor = page.next_cursor
        if cursor is None:
            break
    else:
        if cursor is not None:
            raise PartialDataError(
                f"page limit {page_limit} exhausted for {address} with cursor"
                f" {cursor!r} remaining",
                records=_dedupe_sorted(collected),
                cursor=cursor,
            )
    return _dedupe_sorted(collected)


def _dedupe_sorted(records: Iterable[TransactionRecord]) -> tuple[TransactionRecord, ...]:
    by_hash: dict[str, TransactionRecord] = {}
    for record in records:
        by_hash.setdefault(record.tx_hash, record)
    return tuple(sorted(by_hash.values(), key=lambda r: r.sort_key))
