"""Seeded synthetic minute quotes with an injected Gotobi-day drift.

Every Tue..Fri business day gets a full 00:00-23:59 series: a Gaussian random
walk started at ``base_rate`` plus, on effective Gotobi days, a linear rise of
``drift`` over [anomaly_start, anchor] and a linear fall of ``reversal`` over
[anchor, reversal_end]. The drift is a closed-form function of the minute, so
with zero noise the endpoints are exact to the micro-yen.

Each day draws from its own PCG64 stream keyed by (seed, date ordinal), so
days can be generated in any order or in parallel with identical results.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from datetime import date, timedelta
from typing import Iterator

import numpy as np

from .calendar import DayKind, TradingCalendar, effective_gotobi_days
from .marketdata import MINUTES_PER_DAY, PRICE_SCALE, DaySeries, format_minute, to_micro

log = logging.getLogger(__name__)

GENERATOR_ID = f"numpy.PCG64/SeedSequence(seed, date.toordinal()) numpy=={np.__version__}"
MIN_BID_MICRO = 1


@dataclass(frozen=True)
class SynthParams:
    start: date
    end: date
    base_rate: float = 108.0
    noise_sigma: float = 0.0
    spread: float = 0.004
    drift: float = 0.10
    reversal: float = 0.06
    anomaly_start: int = 3 * 60
    anchor: int = 9 * 60 + 55
    reversal_end: int = 12 * 60
    seed: int = 0

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError(f"invalid range: end {self.end} precedes start {self.start}")
        if self.noise_sigma < 0 or self.spread < 0:
            raise ValueError("noise_sigma and spread must be non-negative")
        if not (np.isfinite(self.drift) and np.isfinite(self.reversal)):
            raise ValueError("drift and reversal must be finite")
        if not 0 <= self.anomaly_start < self.anchor < self.reversal_end < MINUTES_PER_DAY:
            raise ValueError("need anomaly_start < anchor < reversal_end within the day")
        if self.base_rate <= 0:
            raise ValueError("base_rate must be positive")

    def metadata(self) -> dict:
        out = asdict(self)
        out["start"], out["end"] = self.start.isoformat(), self.end.isoformat()
        for key in ("anomaly_start", "anchor", "reversal_end"):
            out[key] = format_minute(out[key])
        out["generator"] = GENERATOR_ID
        return out


@dataclass
class SynthResult:
    days: list[DaySeries]
    gotobi: frozenset[date]
    clamped_days: list[date]

    def __iter__(self) -> Iterator[DaySeries]:
        return iter(self.days)

    def __len__(self) -> int:
        return len(self.days)


def drift_profile(params: SynthParams) -> np.ndarray:
    """Injected Gotobi-day offset (micro-yen, float) for every minute of the day."""
    m = np.arange(MINUTES_PER_DAY)
    rise = np.clip((m - params.anomaly_start) / (params.anchor - params.anomaly_start), 0.0, 1.0)
    fall = np.clip((m - params.anchor) / (params.reversal_end - params.anchor), 0.0, 1.0)
    return to_micro(params.drift) * rise - to_micro(params.reversal) * fall


def day_rng(seed: int, day: date) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed % 2**64, day.toordinal()])))


def generate_day(params: SynthParams, day: date, gotobi: bool, profile: np.ndarray | None = None):
    """One day's series and whether the positive-price floor had to be applied."""
    base = to_micro(round(params.base_rate, 6))
    spread = to_micro(round(params.spread, 6))
    mid = np.full(MINUTES_PER_DAY, float(base))
    if params.noise_sigma > 0:
        steps = day_rng(params.seed, day).standard_normal(MINUTES_PER_DAY)
        steps[0] = 0.0
        mid += np.cumsum(steps) * (params.noise_sigma * PRICE_SCALE)
    if gotobi:
        mid += drift_profile(params) if profile is None else profile
    bid = np.rint(mid).astype(np.int64) - spread // 2
    clamped = bool(np.any(bid < MIN_BID_MICRO))
    if clamped:
        bid = np.maximum(bid, MIN_BID_MICRO)
    return DaySeries(day, np.arange(MINUTES_PER_DAY), bid, bid + spread), clamped


def generate(params: SynthParams, cal: TradingCalendar | None = None) -> SynthResult:
    """Synthetic series for every Tue..Fri business day in the range."""
    cal = cal or TradingCalendar()
    gotobi = frozenset(
        lab.date
        for lab in effective_gotobi_days(params.start, params.end, cal)
        if lab.kind is DayKind.GOTOBI_EFFECTIVE
    )
    profile = drift_profile(params)
    days, clamped = [], []
    d = params.start
    while d <= params.end:
        if cal.is_sample_day(d):
            series, was_clamped = generate_day(params, d, d in gotobi, profile)
            days.append(series)
            if was_clamped:
                clamped.append(d)
        d += timedelta(days=1)
    if clamped:
        log.warning("price floor applied on %d synthetic day(s)", len(clamped))
    return SynthResult(days, gotobi, clamped)
