from __future__ import annotations

from datetime import date

import numpy as np
import pytest

from gotobi.marketdata import PRICE_SCALE, DaySeries

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def make_day(day: date, mids, start_minute: int = 0, spread: float = 0.0, minutes=None) -> DaySeries:
    """DaySeries from mid prices (yen); consecutive minutes unless ``minutes`` given."""
    mids = np.asarray(mids, dtype=float)
    if minutes is None:
        minutes = np.arange(start_minute, start_minute + len(mids))
    mid_micro = np.rint(mids * PRICE_SCALE).astype(np.int64)
    s = int(round(spread * PRICE_SCALE))
    bid = mid_micro - s // 2
    return DaySeries(day, minutes, bid, bid + s)


def hm(text: str) -> int:
    h, m = text.split(":")
    return int(h) * 60 + int(m)


def piecewise_day(day: date, knots: dict[str, float], spread: float = 0.0, base: float = 108.0) -> DaySeries:
    """Full-day series linearly interpolating mid offsets between HH:MM knots (flat outside)."""
    xs = [hm(k) for k in knots]
    ys = [base + v for v in knots.values()]
    mids = np.interp(np.arange(1440), xs, ys)
    return make_day(day, mids, spread=spread)


@pytest.fixture
def day():
    return date(2020, 4, 3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
