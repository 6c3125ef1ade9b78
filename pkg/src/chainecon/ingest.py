"""Parse and validate the transaction stream and the daily price table.

Transactions arrive as JSONL, one object per line:

    {"tx_id": str, "timestamp": int,
     "inputs":  [{"address": str, "value": int}, ...],
     "outputs": [{"address": str, "value": int}, ...]}

Prices arrive as CSV with header ``date,usd_per_btc`` and ISO-8601 dates.
Calendar dates and month buckets are always computed in UTC; week-hour
buckets are computed under a configurable reference offset (default
UTC-12, "Anywhere on Earth") with half-open hour buckets.
"""

from __future__ import annotations

import csv
import json
from bisect import bisect_right
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from typing import IO, Iterable, Iterator, NamedTuple

from .errors import MalformedRecord, DuplicateTxId, MissingPrice, NonPositivePrice

SATS_PER_BTC = 100_000_000
HOURS_PER_WEEK = 168
AOE_OFFSET_HOURS = -12

# 1970-01-01 was a Thursday; weekday index 0 = Monday.
_EPOCH_WEEKDAY = 3


class TxIO(NamedTuple):
    """One input or output slot: an address and a value in satoshis."""

    address: str
    value: int


@dataclass(frozen=True, slots=True)
class RawTransaction:
    """One blockchain transaction as seen in the import stream."""

    tx_id: str
    timestamp: int
    inputs: tuple[TxIO, ...]
    outputs: tuple[TxIO, ...]

    @property
    def is_coinbase(self) -> bool:
        return len(self.inputs) == 0


@dataclass
class ParseStats:
    """Tally of a tolerant parsing pass; malformed lines are counted, not dropped silently."""

    lines: int = 0
    parsed: int = 0
    malformed: int = 0
    duplicates: int = 0
    messages: list[str] = field(default_factory=list)
    max_messages: int = 20

    def record(self, err: Exception) -> None:
        if isinstance(err, DuplicateTxId):
            self.duplicates += 1
        else:
            self.malformed += 1
        if len(self.messages) < self.max_messages:
            self.messages.append(str(err))


def _check_slot(obj, line_no: int, side: str) -> TxIO:
    if not isinstance(obj, dict):
        raise MalformedRecord(line_no, f"{side} entry is not an object")
    addr = obj.get("address")
    value = obj.get("value")
    if not isinstance(addr, str) or not addr:
        raise MalformedRecord(line_no, f"{side} address missing or empty")
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedRecord(line_no, f"{side} value is not an integer")
    if value < 0:
        raise MalformedRecord(line_no, f"{side} value is negative")
    return TxIO(addr, value)


def parse_transaction_line(line: str, line_no: int = 0) -> RawTransaction:
    """Parse and validate one JSONL record; raises MalformedRecord on any schema violation."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(line_no, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise MalformedRecord(line_no, "record is not an object")
    tx_id = obj.get("tx_id")
    if not isinstance(tx_id, str) or not tx_id:
        raise MalformedRecord(line_no, "tx_id missing or empty")
    ts = obj.get("timestamp")
    if isinstance(ts, bool) or not isinstance(ts, int):
        raise MalformedRecord(line_no, "timestamp missing or not an integer")
    inputs = obj.get("inputs")
    outputs = obj.get("outputs")
    if not isinstance(inputs, list):
        raise MalformedRecord(line_no, "inputs missing or not a list")
    if not isinstance(outputs, list) or not outputs:
        raise MalformedRecord(line_no, "outputs missing or empty")
    return RawTransaction(
        tx_id=tx_id,
        timestamp=ts,
        inputs=tuple(_check_slot(o, line_no, "input") for o in inputs),
        outputs=tuple(_check_slot(o, line_no, "output") for o in outputs),
    )


def parse_transactions(
    stream: Iterable[str],
    strict: bool = True,
    stats: ParseStats | None = None,
) -> Iterator[RawTransaction]:
    """Yield transactions from a line stream, in file order.

    With strict=True the first schema violation raises MalformedRecord and
    a repeated tx_id raises DuplicateTxId. With strict=False bad lines are
    counted in `stats` (and the offending line skipped) so a whole file can
    be audited in one pass.
    """
    seen: set[str] = set()
    for line_no, line in enumerate(stream, start=1):
        if stats is not None:
            stats.lines += 1
        if not line.strip():
            continue
        try:
            tx = parse_transaction_line(line, line_no)
            if tx.tx_id in seen:
                raise DuplicateTxId(tx.tx_id, line_no)
        except (MalformedRecord, DuplicateTxId) as exc:
            if strict:
                raise
            if stats is not None:
                stats.record(exc)
            continue
        seen.add(tx.tx_id)
        if stats is not None:
            stats.parsed += 1
        yield tx


def serialize_transaction(tx: RawTransaction) -> str:
    """One canonical JSONL line; parse -> serialize round-trips byte-identically."""
    return json.dumps(
        {
            "tx_id": tx.tx_id,
            "timestamp": tx.timestamp,
            "inputs": [{"address": a, "value": v} for a, v in tx.inputs],
            "outputs": [{"address": a, "value": v} for a, v in tx.outputs],
        },
        separators=(",", ":"),
    )


@dataclass(frozen=True)
class FillPolicy:
    """Price lookup policy: 'strict' or 'forward' with a max look-back in days."""

    kind: str = "strict"
    max_days: int = 0

    @classmethod
    def strict(cls) -> "FillPolicy":
        return cls("strict", 0)

    @classmethod
    def forward(cls, max_days: int) -> "FillPolicy":
        if max_days < 1:
            raise ValueError("forward fill requires max_days >= 1")
        return cls("forward", max_days)

    @classmethod
    def parse(cls, text: str) -> "FillPolicy":
        if text == "strict":
            return cls.strict()
        if text.startswith("forward:"):
            return cls.forward(int(text.split(":", 1)[1]))
        raise ValueError(f"unknown price fill policy {text!r}")

    def __str__(self) -> str:
        return "strict" if self.kind == "strict" else f"forward:{self.max_days}"


class PriceTable:
    """Daily USD price of one BTC, keyed by UTC calendar date."""

    def __init__(self, entries: dict[date, float]):
        for d, p in entries.items():
            if p <= 0:
                raise NonPositivePrice(f"{d}: {p}")
        self._prices = dict(sorted(entries.items()))
        self._dates = list(self._prices)

    def __len__(self) -> int:
        return len(self._prices)

    def __contains__(self, d: date) -> bool:
        return d in self._prices

    @property
    def entries(self) -> dict[date, float]:
        return dict(self._prices)

    def price_on(self, d: date, policy: FillPolicy | None = None) -> float:
        """Price for a date; under forward policy the latest prior price within max_days."""
        policy = policy or FillPolicy.strict()
        hit = self._prices.get(d)
        if hit is not None:
            return hit
        if policy.kind == "forward":
            i = bisect_right(self._dates, d) - 1
            if i >= 0 and (d - self._dates[i]).days <= policy.max_days:
                return self._prices[self._dates[i]]
        raise MissingPrice(d)

    @classmethod
    def from_csv(cls, stream: Iterable[str]) -> "PriceTable":
        reader = csv.reader(stream)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["date", "usd_per_btc"]:
            raise MalformedRecord(1, "expected header 'date,usd_per_btc'")
        entries: dict[date, float] = {}
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise MalformedRecord(line_no, f"expected 2 columns, got {len(row)}")
            try:
                d = date.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise MalformedRecord(line_no, f"bad date {row[0]!r}") from exc
            try:
                p = float(row[1])
            except ValueError as exc:
                raise MalformedRecord(line_no, f"bad price {row[1]!r}") from exc
            if p <= 0:
                raise NonPositivePrice(f"line {line_no}: {row[1]}")
            if d in entries:
                raise MalformedRecord(line_no, f"duplicate date {d.isoformat()}")
            entries[d] = p
        return cls(entries)

    def to_csv(self, out: IO[str]) -> None:
        out.write("date,usd_per_btc\n")
        for d, p in self._prices.items():
            out.write(f"{d.isoformat()},{p!r}\n")


def usd_value(
    sats: int,
    d: date,
    prices: PriceTable,
    policy: FillPolicy | None = None,
) -> float:
    """USD value of a satoshi amount at a date's price; linear in sats."""
    return sats * prices.price_on(d, policy) / SATS_PER_BTC


def week_hour_of(timestamp: int, reference_offset_hours: int = AOE_OFFSET_HOURS) -> int:
    """Hour-of-week bucket in [0,167] under the reference time zone.

    Bucket 0 is Monday 00:00-01:00 in the reference zone; buckets are
    half-open, so Monday 00:00 exactly maps to 0.
    """
    if not -12 <= reference_offset_hours <= 14:
        raise ValueError("reference offset must be an integer in [-12, +14]")
    shifted = timestamp + reference_offset_hours * 3600
    days = shifted // 86400
    weekday = (days + _EPOCH_WEEKDAY) % 7
    hour = (shifted % 86400) // 3600
    return int(weekday * 24 + hour)


def date_of(timestamp: int) -> date:
    """UTC calendar date of an epoch timestamp."""
    return datetime.fromtimestamp(timestamp, tz=timezone.utc).date()


def month_of(timestamp: int) -> tuple[int, int]:
    """UTC (year, month) bucket of an epoch timestamp."""
    d = date_of(timestamp)
    return d.year, d.month
