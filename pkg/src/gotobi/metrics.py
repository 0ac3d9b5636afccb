"""Trade performance statistics: N, profit factor, payoff ratio, win rate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date
from typing import Iterable, Sequence

from .strategy import SkippedDay, Trade


def _ordered(trades: Iterable[Trade]) -> list[Trade]:
    return sorted(trades, key=lambda t: (t.date, t.entry_minute))


def cumulative_curve(trades: Iterable[Trade]) -> list[tuple[date, float]]:
    """Running total of profit, one point per trade, in (date, entry minute) order."""
    out = []
    total = 0.0
    for t in _ordered(trades):
        total += t.profit
        out.append((t.date, total))
    return out


@dataclass
class PerformanceReport:
    """Summary of a trade list.

    Ratios are ``math.inf`` when there are winners but no loss magnitude and
    ``None`` when undefined (no trades, or neither gains nor losses).
    Trades with zero profit count as losses.
    """

    n_trades: int
    n_wins: int
    n_losses: int
    profit_factor: float | None
    payoff_ratio: float | None
    win_rate: float
    total_profit: float
    cumulative: list[tuple[date, float]] = field(default_factory=list)
    trades: list[Trade] = field(default_factory=list)
    skipped_days: list[SkippedDay] = field(default_factory=list)

    @property
    def mean_profit(self) -> float | None:
        return self.total_profit / self.n_trades if self.n_trades else None

    def to_dict(self) -> dict:
        def ratio(x):
            return None if x is None or math.isinf(x) else x

        return {
            "n_trades": self.n_trades,
            "profit_factor": ratio(self.profit_factor),
            "profit_factor_infinite": self.profit_factor == math.inf,
            "payoff_ratio": ratio(self.payoff_ratio),
            "payoff_ratio_infinite": self.payoff_ratio == math.inf,
            "win_rate": self.win_rate,
            "total_profit": self.total_profit,
            "skipped_days": [s.to_dict() for s in self.skipped_days],
            "trades": [t.to_row() for t in self.trades],
            "cumulative": [{"date": d.isoformat(), "total": v} for d, v in self.cumulative],
        }


def _ratio(num: float, den: float) -> float | None:
    if den > 0:
        return num / den
    return math.inf if num > 0 else None


def evaluate(trades: Sequence[Trade], skipped: Sequence[SkippedDay] = ()) -> PerformanceReport:
    ordered = _ordered(trades)
    gains = [t.profit for t in ordered if t.profit > 0]
    losses = [t.profit for t in ordered if t.profit <= 0]
    n = len(ordered)
    gain_sum = math.fsum(gains)
    loss_mag = -math.fsum(losses)
    if n == 0:
        pf = pr = None
    else:
        pf = _ratio(gain_sum, loss_mag)
        avg_gain = gain_sum / len(gains) if gains else 0.0
        avg_loss = loss_mag / len(losses) if losses else 0.0
        pr = _ratio(avg_gain, avg_loss)
    curve = cumulative_curve(ordered)
    return PerformanceReport(
        n_trades=n,
        n_wins=len(gains),
        n_losses=len(losses),
        profit_factor=pf,
        payoff_ratio=pr,
        win_rate=len(gains) / n if n else 0.0,
        total_profit=curve[-1][1] if curve else 0.0,
        cumulative=curve,
        trades=ordered,
        skipped_days=sorted(skipped, key=lambda s: s.date),
    )
