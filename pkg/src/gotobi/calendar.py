"""Gotobi day classification, holiday shifting and matched control sampling."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from datetime import date, timedelta
from importlib import resources
from pathlib import Path
from typing import Collection, Iterator

import numpy as np

GOTOBI_DAYS = frozenset({5, 10, 15, 20, 25, 30})
MONDAY, FRIDAY = 0, 4
DEFAULT_HOLIDAY_RESOURCE = "holidays_jp_2018_2020.csv"


class DayKind(enum.Enum):
    GOTOBI_EFFECTIVE = "gotobi"
    NON_GOTOBI = "non-gotobi"
    EXCLUDED = "excluded"


@dataclass(frozen=True)
class DayLabel:
    date: date
    kind: DayKind
    source_gotobi: date | None = None

    def __post_init__(self):
        if self.kind is DayKind.GOTOBI_EFFECTIVE and self.source_gotobi is None:
            raise ValueError("an effective Gotobi label needs its nominal source date")


@dataclass(frozen=True)
class TradingCalendar:
    """Business-day rules: weekend weekdays plus an explicit holiday set.

    Holidays that fall on a weekend are dropped on construction since the
    weekend rule already covers them.
    """

    holidays: frozenset[date] = frozenset()
    weekend_days: frozenset[int] = frozenset({5, 6})

    def __post_init__(self):
        weekend = frozenset(self.weekend_days)
        object.__setattr__(self, "weekend_days", weekend)
        object.__setattr__(
            self, "holidays", frozenset(d for d in self.holidays if d.weekday() not in weekend)
        )

    def is_business_day(self, d: date) -> bool:
        return d.weekday() not in self.weekend_days and d not in self.holidays

    def is_sample_day(self, d: date) -> bool:
        """Business day falling Tuesday..Friday (Mondays are never sampled)."""
        return MONDAY < d.weekday() <= FRIDAY and self.is_business_day(d)

    @classmethod
    def from_csv(cls, source: str | Path | io.TextIOBase, **kwargs) -> "TradingCalendar":
        """Read a ``date,name`` holiday file."""
        if isinstance(source, (str, Path)):
            with open(source, newline="", encoding="utf-8") as fh:
                return cls.from_csv(fh, **kwargs)
        reader = csv.DictReader(source)
        if reader.fieldnames is None or "date" not in reader.fieldnames:
            raise ValueError("holiday file must have a 'date' column")
        days = set()
        for row in reader:
            try:
                days.add(date.fromisoformat(row["date"].strip()))
            except ValueError as exc:
                raise ValueError(f"holiday file line {reader.line_num}: {exc}") from None
        return cls(frozenset(days), **kwargs)

    @classmethod
    def default(cls) -> "TradingCalendar":
        """Japanese national holidays and Dec 31 - Jan 3 bank closures, 2018-2020."""
        text = resources.files("gotobi.data").joinpath(DEFAULT_HOLIDAY_RESOURCE).read_text("utf-8")
        return cls.from_csv(io.StringIO(text))


def default_holiday_bytes() -> bytes:
    return resources.files("gotobi.data").joinpath(DEFAULT_HOLIDAY_RESOURCE).read_bytes()


def _days(start: date, end: date) -> Iterator[date]:
    d = start
    while d <= end:
        yield d
        d += timedelta(days=1)


def _check_range(start: date, end: date) -> None:
    if end < start:
        raise ValueError(f"invalid range: end {end} precedes start {start}")


def is_gotobi_date(d: date) -> bool:
    return d.day in GOTOBI_DAYS


def shift_to_business_day(d: date, cal: TradingCalendar) -> date:
    """Latest business day on or before ``d``."""
    while not cal.is_business_day(d):
        d -= timedelta(days=1)
    return d


def effective_gotobi_days(start: date, end: date, cal: TradingCalendar) -> list[DayLabel]:
    """Labels for every nominal Gotobi date in ``[start, end]``.

    A nominal date on a weekend or holiday moves back to the previous business
    day; landing on a Monday yields an EXCLUDED label. When two nominal dates
    land on the same day only the earlier source is kept. The effective day may
    precede ``start`` if the first nominal date is shifted.
    """
    _check_range(start, end)
    labels: dict[date, DayLabel] = {}
    for nominal in _days(start, end):
        if not is_gotobi_date(nominal):
            continue
        eff = shift_to_business_day(nominal, cal)
        if eff in labels:
            continue
        kind = DayKind.EXCLUDED if eff.weekday() == MONDAY else DayKind.GOTOBI_EFFECTIVE
        labels[eff] = DayLabel(eff, kind, nominal)
    return [labels[d] for d in sorted(labels)]


def gotobi_dates(start: date, end: date, cal: TradingCalendar) -> list[date]:
    return [
        lab.date for lab in effective_gotobi_days(start, end, cal) if lab.kind is DayKind.GOTOBI_EFFECTIVE
    ]


def closing_run_end(end: date, cal: TradingCalendar) -> date:
    """Last day of the non-business run right after ``end`` (``end`` itself if none).

    Nominal dates in that run shift back onto or before ``end``.
    """
    d = end
    while not cal.is_business_day(d + timedelta(days=1)):
        d += timedelta(days=1)
    return d


def non_gotobi_pool(start: date, end: date, cal: TradingCalendar) -> list[date]:
    """Tue..Fri business days in range that are neither nominal nor effective Gotobi days."""
    _check_range(start, end)
    effective = {lab.date for lab in effective_gotobi_days(start, closing_run_end(end, cal), cal)}
    return [
        d for d in _days(start, end) if cal.is_sample_day(d) and not is_gotobi_date(d) and d not in effective
    ]


class PoolTooSmallError(ValueError):
    def __init__(self, pool_size: int, count: int):
        self.pool_size = pool_size
        self.count = count
        super().__init__(f"cannot sample {count} non-Gotobi days from a pool of {pool_size}")


def sample_non_gotobi(
    start: date,
    end: date,
    count: int,
    cal: TradingCalendar,
    seed: int,
    within: Collection[date] | None = None,
) -> list[date]:
    """Draw ``count`` distinct control days uniformly without replacement.

    ``within`` optionally restricts the pool, e.g. to dates present in a
    dataset. Uses numpy's PCG64 seeded with ``seed`` (reduced mod 2**64).
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    pool = non_gotobi_pool(start, end, cal)
    if within is not None:
        allowed = set(within)
        pool = [d for d in pool if d in allowed]
    if count > len(pool):
        raise PoolTooSmallError(len(pool), count)
    if count == 0:
        return []
    rng = np.random.Generator(np.random.PCG64(seed % 2**64))
    picks = rng.choice(len(pool), size=count, replace=False)
    return sorted(pool[i] for i in picks)


def label_range(start: date, end: date, cal: TradingCalendar) -> list[DayLabel]:
    """Every Tue..Fri business day plus every excluded Monday substitute, labelled."""
    _check_range(start, end)
    by_date = {lab.date: lab for lab in effective_gotobi_days(start, end, cal)}
    for d in non_gotobi_pool(start, end, cal):
        by_date.setdefault(d, DayLabel(d, DayKind.NON_GOTOBI))
    return [by_date[d] for d in sorted(by_date)]


def count_kinds(labels) -> dict[str, int]:
    out = {k.value: 0 for k in DayKind}
    for lab in labels:
        out[lab.kind.value] += 1
    return out
