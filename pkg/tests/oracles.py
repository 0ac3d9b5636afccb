"""Independent brute-force reference implementations used by the tests."""

from __future__ import annotations

import math
from datetime import date, timedelta
from fractions import Fraction

_SAKAMOTO = [0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4]


def weekday(d: date) -> int:
    """Monday=0 .. Sunday=6 via Sakamoto's method (no datetime.weekday)."""
    y = d.year - (d.month < 3)
    sunday_based = (y + y // 4 - y // 100 + y // 400 + _SAKAMOTO[d.month - 1] + d.day) % 7
    return (sunday_based + 6) % 7


def business(d: date, holidays) -> bool:
    return weekday(d) < 5 and d not in holidays


def effective_gotobi_oracle(start: date, end: date, holidays) -> dict[date, str]:
    """Scan every day; a business day d is an effective day if walking *forward*
    from d reaches a nominal Gotobi date in range before reaching another business day.
    Returns {date: 'gotobi' | 'excluded'}.
    """
    out = {}
    d = start - timedelta(days=120)
    while d <= end:
        if business(d, holidays):
            j = d
            while True:
                if start <= j <= end and j.day % 5 == 0:
                    out[d] = "excluded" if weekday(d) == 0 else "gotobi"
                    break
                j += timedelta(days=1)
                if j > end or business(j, holidays):
                    break
        d += timedelta(days=1)
    return out


def brute_sma(minutes, mids, window, m):
    """Mean over minutes m-window+1..m if all present, else None."""
    have = dict(zip(minutes, mids))
    vals = [have.get(k) for k in range(m - window + 1, m + 1)]
    if any(v is None for v in vals):
        return None
    return math.fsum(vals) / window


def brute_cross(minutes, mids, short, long_, t0, t1):
    for m in range(t0, t1):
        prev = [brute_sma(minutes, mids, w, m - 1) for w in (short, long_)]
        cur = [brute_sma(minutes, mids, w, m) for w in (short, long_)]
        if None in prev or None in cur:
            continue
        if prev[0] <= prev[1] and cur[0] > cur[1]:
            return m
    return None


def brute_metrics(profits):
    """Exact rational evaluation; ratios are None when undefined, 'inf' when no losses."""
    ps = [Fraction(p) for p in profits]
    wins = [p for p in ps if p > 0]
    losses = [p for p in ps if p <= 0]
    n = len(ps)
    out = {"n": n, "wins": len(wins), "losses": len(losses), "total": sum(ps, Fraction(0))}
    out["w"] = Fraction(len(wins), n) if n else Fraction(0)
    if n == 0:
        out["pf"] = out["pr"] = None
        return out
    gain, loss = sum(wins, Fraction(0)), -sum(losses, Fraction(0))
    out["pf"] = gain / loss if loss else ("inf" if gain else None)
    avg_gain = gain / len(wins) if wins else Fraction(0)
    avg_loss = loss / len(losses) if losses else Fraction(0)
    out["pr"] = avg_gain / avg_loss if avg_loss else ("inf" if avg_gain else None)
    return out
