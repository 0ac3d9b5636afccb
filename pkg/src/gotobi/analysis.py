"""Anchored intraday event-study statistics around the TTM fixing minute.

All per-minute accumulations run on integer micro-yen offsets, so results do
not depend on the order in which days are supplied.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date
from typing import Sequence

import numpy as np

from .marketdata import MINUTES_PER_DAY, PRICE_SCALE, DaySeries, check_minute, format_minute

log = logging.getLogger(__name__)

TTM_MINUTE = 9 * 60 + 55


class EmptyInputError(ValueError):
    """No day had the quotes an analysis needs."""


@dataclass(frozen=True)
class ProfileCurve:
    anchor: int
    minutes: np.ndarray
    mean_offset: np.ndarray
    n_days: np.ndarray
    skipped: tuple[date, ...] = ()

    def at(self, minute: int) -> float:
        i = np.searchsorted(self.minutes, minute)
        if i == len(self.minutes) or self.minutes[i] != minute:
            raise KeyError(format_minute(minute))
        return float(self.mean_offset[i])


@dataclass(frozen=True)
class ProbabilityCurve:
    anchor: int
    minutes: np.ndarray
    prob: np.ndarray
    n_days: np.ndarray
    skipped: tuple[date, ...] = ()

    def at(self, minute: int) -> float:
        i = np.searchsorted(self.minutes, minute)
        if i == len(self.minutes) or self.minutes[i] != minute:
            raise KeyError(format_minute(minute))
        return float(self.prob[i])


@dataclass(frozen=True)
class DriftSeries:
    anchor: int
    horizon: int
    dates: tuple[date, ...]
    per_day: np.ndarray
    cumulative: np.ndarray
    skipped: tuple[date, ...] = field(default=())

    def slope(self) -> float:
        """Average change per contributing day (final cumulative / day count)."""
        return float(self.cumulative[-1] / len(self.dates))


def _anchored(days: Sequence[DaySeries], anchor: int):
    """Accumulate per-minute offset sums, above-anchor counts and day counts."""
    check_minute(anchor)
    sums = np.zeros(MINUTES_PER_DAY, dtype=np.int64)
    above = np.zeros(MINUTES_PER_DAY, dtype=np.int64)
    counts = np.zeros(MINUTES_PER_DAY, dtype=np.int64)
    skipped = []
    for day in days:
        i = day.index_of(anchor)
        if i is None:
            skipped.append(day.date)
            continue
        offset = day.mid2 - day.mid2[i]
        sums[day.minutes] += offset
        above[day.minutes] += offset > 0
        counts[day.minutes] += 1
    if skipped:
        log.warning("%d day(s) lack the %s anchor quote and were skipped", len(skipped), format_minute(anchor))
    if not counts.any():
        raise EmptyInputError(f"no day contains the {format_minute(anchor)} anchor quote")
    return sums, above, counts, tuple(sorted(skipped))


def intraday_profile(days: Sequence[DaySeries], anchor: int = TTM_MINUTE) -> ProfileCurve:
    """Mean mid-price offset from the anchor minute, per minute of day."""
    sums, _, counts, skipped = _anchored(days, anchor)
    keep = np.flatnonzero(counts)
    mean = sums[keep] / (2 * PRICE_SCALE * counts[keep])
    return ProfileCurve(anchor, keep, mean, counts[keep], skipped)


def prob_above_anchor(days: Sequence[DaySeries], anchor: int = TTM_MINUTE) -> ProbabilityCurve:
    """Fraction of days whose mid at each minute is strictly above the anchor mid."""
    _, above, counts, skipped = _anchored(days, anchor)
    keep = np.flatnonzero(counts)
    return ProbabilityCurve(anchor, keep, above[keep] / counts[keep], counts[keep], skipped)


def post_announcement_drift(
    days: Sequence[DaySeries], anchor: int = TTM_MINUTE, horizon: int = 1
) -> DriftSeries:
    """Per-day mid change from ``anchor`` to ``anchor + horizon`` and its running sum."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1 minute")
    check_minute(anchor)
    check_minute(anchor + horizon)
    rows = []
    skipped = []
    for day in sorted(days, key=lambda d: d.date):
        i, j = day.index_of(anchor), day.index_of(anchor + horizon)
        if i is None or j is None:
            skipped.append(day.date)
            continue
        rows.append((day.date, int(day.mid2[j] - day.mid2[i])))
    if skipped:
        log.warning("%d day(s) lack quotes at %s or %s and were skipped",
                    len(skipped), format_minute(anchor), format_minute(anchor + horizon))
    if not rows:
        raise EmptyInputError("no day has both the anchor and horizon quotes")
    moves = np.array([m for _, m in rows], dtype=np.int64)
    scale = 2 * PRICE_SCALE
    return DriftSeries(
        anchor,
        horizon,
        tuple(d for d, _ in rows),
        moves / scale,
        np.cumsum(moves) / scale,
        tuple(skipped),
    )
