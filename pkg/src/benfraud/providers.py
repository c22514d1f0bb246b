"""Chain-data providers: paged access to per-address transaction histories.

The default provider is file/fixture backed so the full pipeline runs
offline and deterministically; a thin HTTP adapter for explorer-style APIs
is provided as an optional alternative. Both speak the same paged protocol:
``request(address, cursor) -> ProviderPage``.
"""

from __future__ import annotations

import json
import os
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from typing import IO, Callable, Iterable, Protocol

from .errors import FetchError, SchemaError
from .ingest import TransactionRecord, normalize_address, record_from_json

__all__ = [
    "ProviderPage",
    "ChainDataProvider",
    "RateLimiter",
    "FixtureProvider",
    "HttpProvider",
    "API_KEY_ENV",
]

API_KEY_ENV = "BENFRAUD_API_KEY"


@dataclass(frozen=True)
class ProviderPage:
    """One page of an address history; records sorted by (block, hash)."""

    records: tuple[TransactionRecord, ...]
    next_cursor: str | None = None

    def __post_init__(self):
        keys = [r.sort_key for r in self.records]
        if keys != sorted(keys):
            raise SchemaError("provider page records must be sorted by (block_number, tx_hash)")


class ChainDataProvider(Protocol):
    def request(self, address: str, cursor: str | None) -> ProviderPage: ...


class RateLimiter:
    """Enforces a minimum interval between requests.

    Clock and sleeper are injectable so tests can assert pacing without
    real waiting.
    """

    def __init__(
        self,
        min_interval: float = 0.0,
        *,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.min_interval = min_interval
        self._clock = clock
        self._sleep = sleep
        self._last: float | None = None

    def wait(self) -> None:
        now = self._clock()
        if self.min_interval > 0 and self._last is not None:
            remaining = self.min_interval - (now - self._last)
            if remaining > 0:
                self._sleep(remaining)
                now += remaining
        self._last = now


@dataclass
class FixtureProvider:
    """Deterministic provider serving pre-baked pages per address.

    Cursors are stringified page indexes. ``fail_cursors`` maps a cursor
    value (None for the first page) to a number of times the request should
    raise before succeeding, for exercising retry paths.
    """

    pages: dict[str, tuple[ProviderPage, ...]]
    page_size: int = 0
    rate_limiter: RateLimiter | None = None
    fail_cursors: dict[str | None, int] = field(default_factory=dict)

    @classmethod
    def from_records(
        cls, records: Iterable[TransactionRecord], page_size: int = 100, **kwargs
    ) -> "FixtureProvider":
        """Index records into per-address pages; a record appears under both
        of its endpoints."""
        by_address: dict[str, dict[str, TransactionRecord]] = {}
        for record in records:
            by_address.setdefault(record.from_addr, {})[record.tx_hash] = record
            if record.to_addr is not None:
                by_address.setdefault(record.to_addr, {})[record.tx_hash] = record
        pages: dict[str, tuple[ProviderPage, ...]] = {}
        for address, by_hash in by_address.items():
            ordered = sorted(by_hash.values(), key=lambda r: r.sort_key)
            chunks = [
                tuple(ordered[i : i + page_size])
                for i in range(0, len(ordered), page_size)
            ] or [()]
            pages[address] = tuple(
                ProviderPage(
                    records=chunk,
                    next_cursor=str(i + 1) if i + 1 < len(chunks) else None,
                )
                for i, chunk in enumerate(chunks)
            )
        return cls(pages=pages, page_size=page_size, **kwargs)

    @classmethod
    def from_file(cls, stream: IO, **kwargs) -> "FixtureProvider":
        """Load pages from JSON: {address: [[record objects, ...], ...]}."""
        payload = json.load(stream)
        if not isinstance(payload, dict):
            raise SchemaError("fixture file must be a JSON object keyed by address")
        pages: dict[str, tuple[ProviderPage, ...]] = {}
        for raw_address, raw_pages in payload.items():
            address = normalize_address(raw_address)
            chunks = [
                tuple(record_from_json(obj) for obj in raw_page)
                for raw_page in raw_pages
            ] or [()]
            pages[address] = tuple(
                ProviderPage(
                    records=chunk,
                    next_cursor=str(i + 1) if i + 1 < len(chunks) else None,
                )
                for i, chunk in enumerate(chunks)
            )
        return cls(pages=pages, **kwargs)

    def request(self, address: str, cursor: str | None) -> ProviderPage:
        if self.rate_limiter is not None:
            self.rate_limiter.wait()
        if self.fail_cursors.get(cursor, 0) > 0:
            self.fail_cursors[cursor] -= 1
            raise FetchError(f"injected transport failure at cursor {cursor!r}")
        address = normalize_address(address)
        address_pages = self.pages.get(address, (ProviderPage(records=()),))
        index = 0 if cursor is None else int(cursor)
        if not 0 <= index < len(address_pages):
            raise FetchError(f"unknown cursor {cursor!r} for {address}")
        return address_pages[index]


class HttpProvider:
    """Adapter for explorer-style HTTP APIs.

    Issues GET requests with ``address`` and ``cursor`` query parameters and
    expects a JSON body {"records": [...], "next_cursor": ...}. The API key
    is read from the BENFRAUD_API_KEY environment variable and sent as the
    ``apikey`` parameter. The opener is injectable for offline tests.
    """

    def __init__(
        self,
        base_url: str,
        *,
        rate_limiter: RateLimiter | None = None,
        opener: Callable = urllib.request.urlopen,
        timeout: float = 30.0,
    ):
        self.base_url = base_url
        self.rate_limiter = rate_limiter
        self._opener = opener
        self._timeout = timeout

    def request(self, address: str, cursor: str | None) -> ProviderPage:
        if self.rate_limiter is not None:
            self.rate_limiter.wait()
        params = {"address": normalize_address(address)}
        if cursor is not None:
            params["cursor"] = cursor
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            params["apikey"] = api_key
        url = f"{self.base_url}?{urllib.parse.urlencode(params)}"
        try:
            with self._opener(url, timeout=self._timeout) as response:
                payload = json.load(response)
        except (urllib.error.URLError, OSError, ValueError) as err:
            raise FetchError(f"request to {self.base_url} failed: {err}") from err
        if not isinstance(payload, dict) or "records" not in payload:
            raise FetchError("malformed provider response: missing 'records'")
        records = tuple(record_from_json(obj) for obj in payload["records"])
        next_cursor = payload.get("next_cursor")
        if next_cursor is not None and not isinstance(next_cursor, str):
            next_cursor = str(next_cursor)
        return ProviderPage(records=records, next_cursor=next_cursor)
