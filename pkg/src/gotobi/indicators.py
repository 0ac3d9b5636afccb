"""Intraday simple moving averages and golden-cross detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .marketdata import MINUTES_PER_DAY, PRICE_SCALE, DaySeries, check_minute


@dataclass(frozen=True)
class IndicatorSeries:
    minutes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if len(self.minutes) != len(self.values):
            raise ValueError("minutes and values must have equal length")
        if len(self.minutes) > 1 and np.any(np.diff(self.minutes) <= 0):
            raise ValueError("minutes must be strictly increasing")

    def __len__(self) -> int:
        return len(self.minutes)


def _window_sums(day: DaySeries, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Eligibility mask and integer sums of ``mid2`` over trailing windows.

    A window is eligible only if it spans ``window`` consecutive present
    minutes; any gap restarts the count.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    n = len(day)
    if n == 0:
        return np.zeros(0, dtype=bool), np.zeros(0, dtype=np.int64)
    breaks = np.concatenate(([True], np.diff(day.minutes) != 1))
    run_start = np.maximum.accumulate(np.where(breaks, np.arange(n), 0))
    eligible = np.arange(n) - run_start + 1 >= window
    csum = np.concatenate(([0], np.cumsum(day.mid2)))
    idx = np.arange(n)
    lo = np.clip(idx + 1 - window, 0, None)
    sums = np.where(eligible, csum[idx + 1] - csum[lo], 0)
    return eligible, sums


def sma(day: DaySeries, window: int, upto: int = MINUTES_PER_DAY - 1) -> IndicatorSeries:
    """Mean mid price over each trailing run of ``window`` consecutive minutes, up to ``upto``."""
    check_minute(upto)
    eligible, sums = _window_sums(day, window)
    keep = eligible & (day.minutes <= upto)
    return IndicatorSeries(day.minutes[keep], sums[keep] / (2 * PRICE_SCALE * window))


def detect_golden_cross(
    day: DaySeries,
    short_window: int,
    long_window: int,
    search: tuple[int, int],
) -> int | None:
    """Earliest minute in ``[t0, t1)`` where the short SMA moves from <= to > the long SMA.

    Both averages must exist at the minute and the one before it. Comparison
    is done on integer sums, so touching exactly counts as ``<=``.
    """
    if short_window >= long_window:
        raise ValueError(f"short window ({short_window}) must be below long window ({long_window})")
    t0, t1 = search
    if not t0 < t1:
        raise ValueError(f"empty search window [{t0}, {t1})")
    s_ok, s_sum = _window_sums(day, short_window)
    l_ok, l_sum = _window_sums(day, long_window)
    if len(day) < 2:
        return None
    # short above long  <=>  s_sum / short > l_sum / long
    above = s_sum * long_window > l_sum * short_window
    valid = l_ok & s_ok
    cross = valid[1:] & valid[:-1] & above[1:] & ~above[:-1]
    minutes = day.minutes[1:]
    hits = np.flatnonzero(cross & (minutes >= t0) & (minutes < t1))
    return int(minutes[hits[0]]) if len(hits) else None
