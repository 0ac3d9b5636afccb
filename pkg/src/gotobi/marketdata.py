"""Minute-resolution bid/ask quotes: parsing, validation and per-day indexing.

Prices are held as integer micro-yen (six fractional digits) so that ingest
is exact and round-trips bit-for-bit; float views are derived on demand.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass
from datetime import date
from decimal import Decimal
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

MINUTES_PER_DAY = 1440
PRICE_SCALE = 1_000_000  # micro-yen per yen
PRICE_DIGITS = 6


class QuoteFormatError(ValueError):
    """A row could not be parsed. ``line`` is 1-based and counts the header."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class QuoteValidationError(QuoteFormatError):
    """A row parsed but violates a quote invariant (duplicate, crossed, ...)."""


def parse_minute(text: str) -> int:
    """``"09:55"`` -> 595."""
    m = re.fullmatch(r"(\d{1,2}):(\d{2})", text.strip())
    if not m:
        raise ValueError(f"expected HH:MM, got {text!r}")
    hh, mm = int(m.group(1)), int(m.group(2))
    if hh > 23 or mm > 59:
        raise ValueError(f"time of day out of range: {text!r}")
    return hh * 60 + mm


def format_minute(minute: int) -> str:
    return f"{minute // 60:02d}:{minute % 60:02d}"


def check_minute(minute: int) -> int:
    if not 0 <= minute < MINUTES_PER_DAY:
        raise ValueError(f"minute-of-day must be in [0, {MINUTES_PER_DAY - 1}], got {minute}")
    return int(minute)


def to_micro(value: str | Decimal | float) -> int:
    """Convert a decimal price to integer micro-yen, rejecting excess precision."""
    d = Decimal(value) if not isinstance(value, float) else Decimal(repr(value))
    scaled = d.scaleb(PRICE_DIGITS)
    if scaled != scaled.to_integral_value():
        raise ValueError(f"{value!r} has more than {PRICE_DIGITS} fractional digits")
    return int(scaled)


def format_micro(value: int) -> str:
    sign = "-" if value < 0 else ""
    whole, frac = divmod(abs(int(value)), PRICE_SCALE)
    return f"{sign}{whole}.{frac:0{PRICE_DIGITS}d}"


def micro_to_decimal(value: int) -> Decimal:
    return Decimal(int(value)).scaleb(-PRICE_DIGITS)


@dataclass(frozen=True)
class MinuteQuote:
    date: date
    minute: int
    bid: Decimal
    ask: Decimal

    def __post_init__(self):
        check_minute(self.minute)
        if not (self.ask >= self.bid > 0):
            raise ValueError(f"quote violates ask >= bid > 0: bid={self.bid} ask={self.ask}")

    @property
    def timestamp(self) -> str:
        return f"{self.date.isoformat()}T{format_minute(self.minute)}"


def mid(q: MinuteQuote) -> Decimal:
    """Mid price (bid + ask) / 2; exact for six-digit quotes."""
    return (q.bid + q.ask) / 2


class DaySeries:
    """All quotes of one trading date, sorted by minute-of-day.

    Backed by read-only numpy arrays: ``minutes`` (int), ``bid`` and ``ask``
    (int64 micro-yen). Instances are immutable and safe to share.
    """

    __slots__ = ("date", "minutes", "bid", "ask", "_mid2")

    def __init__(self, day: date, minutes, bid, ask):
        minutes = np.asarray(minutes, dtype=np.int64)
        bid = np.asarray(bid, dtype=np.int64)
        ask = np.asarray(ask, dtype=np.int64)
        if not (minutes.ndim == bid.ndim == ask.ndim == 1) or not (len(minutes) == len(bid) == len(ask)):
            raise ValueError("minutes, bid and ask must be 1-d arrays of equal length")
        if len(minutes):
            if minutes[0] < 0 or minutes[-1] >= MINUTES_PER_DAY:
                raise ValueError("minute-of-day out of range")
            if np.any(np.diff(minutes) <= 0):
                raise ValueError(f"{day}: minutes must be strictly increasing")
            if np.any(bid <= 0) or np.any(ask < bid):
                raise ValueError(f"{day}: quotes must satisfy ask >= bid > 0")
        mid2 = bid + ask
        for arr in (minutes, bid, ask, mid2):
            arr.flags.writeable = False
        object.__setattr__(self, "date", day)
        object.__setattr__(self, "minutes", minutes)
        object.__setattr__(self, "bid", bid)
        object.__setattr__(self, "ask", ask)
        object.__setattr__(self, "_mid2", mid2)

    def __setattr__(self, name, value):
        raise AttributeError("DaySeries is immutable")

    def __len__(self) -> int:
        return len(self.minutes)

    def __iter__(self) -> Iterator[MinuteQuote]:
        return iter(self.quotes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DaySeries):
            return NotImplemented
        return (
            self.date == other.date
            and np.array_equal(self.minutes, other.minutes)
            and np.array_equal(self.bid, other.bid)
            and np.array_equal(self.ask, other.ask)
        )

    def __hash__(self):
        return hash((self.date, len(self)))

    def __repr__(self) -> str:
        return f"DaySeries({self.date.isoformat()}, {len(self)} quotes)"

    @property
    def quotes(self) -> tuple[MinuteQuote, ...]:
        return tuple(self._quote(i) for i in range(len(self)))

    @property
    def mid2(self) -> np.ndarray:
        """bid + ask in micro-yen, i.e. twice the mid; exact integer arithmetic."""
        return self._mid2

    def mids(self) -> np.ndarray:
        return self._mid2 / (2 * PRICE_SCALE)

    def index_of(self, minute: int) -> int | None:
        check_minute(minute)
        i = int(np.searchsorted(self.minutes, minute))
        if i < len(self.minutes) and self.minutes[i] == minute:
            return i
        return None

    def _quote(self, i: int) -> MinuteQuote:
        return MinuteQuote(
            self.date, int(self.minutes[i]), micro_to_decimal(self.bid[i]), micro_to_decimal(self.ask[i])
        )


def rate_at(day: DaySeries, minute: int) -> MinuteQuote | None:
    """Quote at exactly ``minute`` or None; binary search over the day."""
    i = day.index_of(minute)
    return None if i is None else day._quote(i)


# --- CSV ---------------------------------------------------------------------

_PRICE = r"(\d{1,9})(?:\.(\d{1,6}))?"
_TS = r"(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2})"
_ROW3 = re.compile(rf"{_TS},{_PRICE},{_PRICE}")
_ROW2 = re.compile(rf"{_TS},{_PRICE}")
_MAX_WHOLE_DIGITS = 9

# byte template for "YYYY-MM-DDTHH:MM,"; 0 marks a digit slot
_TS_TEMPLATE = np.frombuffer(b"0000-00-00T00:00,", dtype=np.uint8)
_TS_DIGIT = _TS_TEMPLATE == ord("0")
_TS_WIDTH = len(_TS_TEMPLATE)
_POW10 = 10 ** np.arange(_MAX_WHOLE_DIGITS + PRICE_DIGITS, dtype=np.int64)


@dataclass(frozen=True)
class CsvSpec:
    """Quote file layout.

    ``spread`` (yen) is required for the two-column ``timestamp,price`` form;
    bid/ask are then synthesized around the price.
    """

    spread: Decimal | str | float | None = None

    @property
    def spread_micro(self) -> int | None:
        return None if self.spread is None else to_micro(self.spread)


def _diagnose(lines: Sequence[str], ncols: int, first_line: int) -> QuoteFormatError:
    row = _ROW3 if ncols == 3 else _ROW2
    for offset, line in enumerate(lines):
        if row.fullmatch(line):
            continue
        lineno = first_line + offset
        parts = line.split(",")
        if len(parts) != ncols:
            return QuoteFormatError(f"expected {ncols} columns, got {len(parts)}", lineno)
        if not re.fullmatch(_TS, parts[0]):
            return QuoteFormatError(f"bad timestamp {parts[0]!r}", lineno)
        return QuoteFormatError(f"unparsable price in {line!r}", lineno)
    return QuoteFormatError("unparsable input", None)


def _decode_fields(buf: np.ndarray, fs: np.ndarray, fe: np.ndarray) -> np.ndarray | None:
    """Decimal fields ``buf[fs:fe]`` to micro-units, or None if any is malformed.

    Horner's scheme run column-wise: one pass per character offset, so the
    work is vectorised across fields and bounded by the widest field.
    """
    lengths = fe - fs
    if len(fs) == 0:
        return np.zeros(0, dtype=np.int64)
    if lengths.min() < 1 or lengths.max() > _MAX_WHOLE_DIGITS + 1 + PRICE_DIGITS:
        return None
    acc = np.zeros(len(fs), dtype=np.int64)
    frac = np.zeros(len(fs), dtype=np.int64)
    seen_dot = np.zeros(len(fs), dtype=bool)
    last = len(buf) - 1
    for k in range(int(lengths.max())):
        active = lengths > k
        ch = buf[np.minimum(fs + k, last)]
        is_dot = active & (ch == ord("."))
        digit = ch.astype(np.int64) - ord("0")
        is_digit = active & (digit >= 0) & (digit <= 9)
        if np.any(active & ~is_dot & ~is_digit) or np.any(is_dot & seen_dot):
            return None
        acc = np.where(is_digit, acc * 10 + digit, acc)
        frac += is_digit & seen_dot
        seen_dot |= is_dot
    whole = lengths - frac - seen_dot
    if np.any(whole < 1) or np.any(whole > _MAX_WHOLE_DIGITS) or np.any(frac > PRICE_DIGITS):
        return None
    if np.any(seen_dot & (frac < 1)):
        return None
    return acc * _POW10[PRICE_DIGITS - frac]


def _decode_rows(body: str, ncols: int):
    """Vectorised parse of validated-by-construction rows; None on any malformation."""
    raw = body.encode("utf-8")
    if not raw.isascii():
        return None
    buf = np.frombuffer(raw, dtype=np.uint8)
    nl = np.flatnonzero(buf == ord("\n"))
    starts = np.concatenate(([0], nl[:-1] + 1))
    if np.any(nl - starts < _TS_WIDTH + 1):
        return None
    ts = buf[starts[:, None] + np.arange(_TS_WIDTH)]
    digits = ts[:, _TS_DIGIT]
    if np.any((digits < ord("0")) | (digits > ord("9"))):
        return None
    if np.any(ts[:, ~_TS_DIGIT] != _TS_TEMPLATE[~_TS_DIGIT]):
        return None
    commas = np.flatnonzero(buf == ord(","))
    if len(commas) != len(starts) * (ncols - 1):
        return None
    commas = commas.reshape(len(starts), ncols - 1)
    if np.any(commas[:, 0] != starts + _TS_WIDTH - 1) or np.any(commas[:, -1] >= nl):
        return None
    fs = (commas + 1).ravel()
    fe = np.column_stack([commas[:, 1:], nl]).ravel()
    prices = _decode_fields(buf, fs, fe)
    if prices is None:
        return None
    d = digits.astype(np.int64) - ord("0")
    w = 10 ** np.arange(3, -1, -1)
    year = d[:, 0:4] @ w
    month, day = d[:, 4] * 10 + d[:, 5], d[:, 6] * 10 + d[:, 7]
    hh, mm = d[:, 8] * 10 + d[:, 9], d[:, 10] * 10 + d[:, 11]
    return year, month, day, hh, mm, prices.reshape(len(starts), ncols - 1)


def load_quotes(source: IO[str] | IO[bytes] | str, fmt: CsvSpec | None = None) -> list[DaySeries]:
    """Parse a quote CSV into per-date series, ascending by date.

    ``source`` is a text or binary stream, or the CSV text itself.
    Raises QuoteFormatError on malformed rows and QuoteValidationError on
    duplicate timestamps, crossed or non-positive quotes and impossible dates.
    """
    fmt = fmt or CsvSpec()
    if isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    text = text.replace("\r\n", "\n")
    if text.startswith("\ufeff"):
        text = text[1:]
    header, _, body = text.partition("\n")
    columns = [c.strip() for c in header.split(",")]
    if columns == ["timestamp", "bid", "ask"]:
        ncols = 3
    elif columns == ["timestamp", "price"]:
        if fmt.spread is None:
            raise QuoteFormatError("two-column timestamp,price input requires a spread", 1)
        ncols = 2
    else:
        raise QuoteFormatError(f"unexpected header {header!r}", 1)

    body = body.rstrip("\n")
    if not body:
        return []
    decoded = _decode_rows(body + "\n", ncols)
    if decoded is None:
        raise _diagnose(body.split("\n"), ncols, 2)
    y, mo, d, hh, mm, prices = decoded
    lineno = np.arange(len(y), dtype=np.int64) + 2
    if ncols == 3:
        bid, ask = prices[:, 0], prices[:, 1]
    else:
        spread = fmt.spread_micro
        bid = prices[:, 0] - spread // 2
        ask = bid + spread

    bad = np.flatnonzero((hh > 23) | (mm > 59))
    if len(bad):
        raise QuoteValidationError("time of day out of range", int(lineno[bad[0]]))
    bad = np.flatnonzero(bid > ask)
    if len(bad):
        raise QuoteValidationError("bid exceeds ask", int(lineno[bad[0]]))
    bad = np.flatnonzero(bid <= 0)
    if len(bad):
        raise QuoteValidationError("non-positive price", int(lineno[bad[0]]))

    daykey = y * 10000 + mo * 100 + d
    minute = hh * 60 + mm
    order = np.lexsort((minute, daykey))
    daykey, minute, bid, ask, lineno = daykey[order], minute[order], bid[order], ask[order], lineno[order]
    dup = np.flatnonzero((np.diff(daykey) == 0) & (np.diff(minute) == 0))
    if len(dup):
        i = dup[0]
        first, second = sorted((int(lineno[i]), int(lineno[i + 1])))
        raise QuoteValidationError(f"duplicate timestamp (first seen on line {first})", second)

    keys, starts = np.unique(daykey, return_index=True)
    bounds = list(starts[1:]) + [len(daykey)]
    out = []
    for key, lo, hi in zip(keys, starts, bounds):
        key = int(key)
        try:
            day = date(key // 10000, key // 100 % 100, key % 100)
        except ValueError as exc:
            raise QuoteValidationError(f"invalid date: {exc}", int(lineno[lo:hi].min())) from None
        out.append(DaySeries(day, minute[lo:hi], bid[lo:hi], ask[lo:hi]))
    return out


_HHMM = [format_minute(m) for m in range(MINUTES_PER_DAY)]


def dump_quotes(days: Iterable[DaySeries], stream: IO[str] | None = None) -> str | None:
    """Write days in the three-column CSV format; returns the text if no stream."""
    buf = stream if stream is not None else io.StringIO()
    buf.write("timestamp,bid,ask\n")
    for day in days:
        prefix = day.date.isoformat() + "T"
        buf.write(
            "".join(
                f"{prefix}{_HHMM[m]},{b // PRICE_SCALE}.{b % PRICE_SCALE:06d},{a // PRICE_SCALE}.{a % PRICE_SCALE:06d}\n"
                for m, b, a in zip(day.minutes.tolist(), day.bid.tolist(), day.ask.tolist())
            )
        )
    if stream is None:
        return buf.getvalue()
    return None


def day_map(days: Iterable[DaySeries]) -> dict[date, DaySeries]:
    return {d.date: d for d in days}
