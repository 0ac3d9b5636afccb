"""Per-day execution of the morning-long (H1), post-fixing short (H2) and combined rules.

Execution is taker-style: a long pays the ask and exits at the bid, a short
sells the bid and buys back at the ask, so each round trip costs one spread.
Profits are in yen per dollar of notional.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from datetime import date
from typing import Iterable, Sequence

from .indicators import detect_golden_cross
from .marketdata import PRICE_SCALE, DaySeries, check_minute, format_minute


class Side(enum.Enum):
    LONG = "long"
    SHORT = "short"


class Gate(enum.Enum):
    ANOMALY = "anomaly"
    NO_ANOMALY = "no-anomaly"
    ALWAYS = "always"


def _hhmm(h: int, m: int = 0) -> int:
    return h * 60 + m


@dataclass(frozen=True)
class StrategyConfig:
    use_gc: bool = False
    gc_window_hour: int = 3
    entry_minute_h1: int = _hhmm(3)
    exit_minute_h1: int = _hhmm(9, 55)
    gate_minute: int = _hhmm(9)
    h2_entry_minute: int = _hhmm(9, 55)
    h2_exit_minute: int = _hhmm(12)
    short_window: int = 25
    long_window: int = 100

    def __post_init__(self):
        for name in ("entry_minute_h1", "exit_minute_h1", "gate_minute", "h2_entry_minute", "h2_exit_minute"):
            check_minute(getattr(self, name))
        if not 1 <= self.gc_window_hour <= 5:
            raise ValueError(f"gc_window_hour must be in [1, 5], got {self.gc_window_hour}")
        if not (
            self.entry_minute_h1 < self.gate_minute < self.exit_minute_h1
            <= self.h2_entry_minute < self.h2_exit_minute
        ):
            raise ValueError("config times must satisfy entry_h1 < gate < exit_h1 <= entry_h2 < exit_h2")
        if not 1 <= self.short_window < self.long_window:
            raise ValueError("short_window must be positive and below long_window")

    @property
    def gc_search(self) -> tuple[int, int]:
        """``[n-1:30, n:00)`` for the configured hour n."""
        n = self.gc_window_hour
        return _hhmm(n - 1, 30), _hhmm(n)


@dataclass(frozen=True)
class Trade:
    date: date
    side: Side
    entry_minute: int
    exit_minute: int
    entry_price: float
    exit_price: float
    profit: float

    def __post_init__(self):
        if self.entry_minute >= self.exit_minute:
            raise ValueError("entry must precede exit")

    def to_row(self) -> dict:
        return {
            "date": self.date.isoformat(),
            "side": self.side.value,
            "entry_minute": format_minute(self.entry_minute),
            "exit_minute": format_minute(self.exit_minute),
            "entry_price": f"{self.entry_price:.6f}",
            "exit_price": f"{self.exit_price:.6f}",
            "profit": f"{self.profit:.6f}",
        }


@dataclass(frozen=True)
class SkippedDay:
    date: date
    reason: str

    def to_dict(self) -> dict:
        return {"date": self.date.isoformat(), "reason": self.reason}


@dataclass
class StrategyRun:
    """Trades plus an itemized account of every day that produced none."""

    trades: list[Trade] = field(default_factory=list)
    skipped: list[SkippedDay] = field(default_factory=list)

    def __iter__(self):
        return iter(self.trades)

    def __len__(self) -> int:
        return len(self.trades)

    def extend(self, other: "StrategyRun") -> None:
        self.trades.extend(other.trades)
        self.skipped.extend(other.skipped)

    def sort(self) -> "StrategyRun":
        self.trades.sort(key=lambda t: (t.date, t.entry_minute))
        self.skipped.sort(key=lambda s: s.date)
        return self


def _trade(day: DaySeries, side: Side, entry: int, exit_: int) -> Trade | str:
    i, j = day.index_of(entry), day.index_of(exit_)
    if i is None:
        return f"missing entry quote at {format_minute(entry)}"
    if j is None:
        return f"missing exit quote at {format_minute(exit_)}"
    if side is Side.LONG:
        px_in, px_out = int(day.ask[i]), int(day.bid[j])
        pnl = px_out - px_in
    else:
        px_in, px_out = int(day.bid[i]), int(day.ask[j])
        pnl = px_in - px_out
    return Trade(day.date, side, entry, exit_, px_in / PRICE_SCALE, px_out / PRICE_SCALE, pnl / PRICE_SCALE)


def _h1_day(day: DaySeries, cfg: StrategyConfig) -> Trade | str:
    if cfg.use_gc:
        entry = detect_golden_cross(day, cfg.short_window, cfg.long_window, cfg.gc_search)
        if entry is None:
            t0, t1 = cfg.gc_search
            return f"no golden cross in [{format_minute(t0)}, {format_minute(t1)})"
    else:
        entry = cfg.entry_minute_h1
    return _trade(day, Side.LONG, entry, cfg.exit_minute_h1)


def run_h1(days: Iterable[DaySeries], cfg: StrategyConfig) -> StrategyRun:
    """Long from the morning entry (03:00 or the golden-cross minute) to the fixing."""
    run = StrategyRun()
    for day in days:
        res = _h1_day(day, cfg)
        if isinstance(res, Trade):
            run.trades.append(res)
        else:
            run.skipped.append(SkippedDay(day.date, res))
    return run.sort()


def _gate_move(day: DaySeries, cfg: StrategyConfig, h1: Trade | None = None) -> int | str:
    """Morning gain up to the gate minute in units of mid2 (twice micro-yen).

    Measured mid-to-mid from the fixed H1 entry minute, or from the actual
    H1 fill price when a trade is given.
    """
    g = day.index_of(cfg.gate_minute)
    if g is None:
        return f"missing gate quote at {format_minute(cfg.gate_minute)}"
    if h1 is not None:
        return int(day.mid2[g]) - 2 * round(h1.entry_price * PRICE_SCALE)
    s = day.index_of(cfg.entry_minute_h1)
    if s is None:
        return f"missing gate reference quote at {format_minute(cfg.entry_minute_h1)}"
    return int(day.mid2[g] - day.mid2[s])


def anomaly_occurred(day: DaySeries, cfg: StrategyConfig) -> bool:
    """True iff mid(gate) - mid(H1 entry minute) > 0; missing quotes give False."""
    move = _gate_move(day, cfg)
    return not isinstance(move, str) and move > 0


def _h2_day(day: DaySeries, cfg: StrategyConfig, gate: Gate, h1: Trade | None = None) -> Trade | str:
    if gate is not Gate.ALWAYS:
        move = _gate_move(day, cfg, h1)
        if isinstance(move, str):
            return move
        if (move > 0) != (gate is Gate.ANOMALY):
            return "gate closed: anomaly " + ("did not occur" if gate is Gate.ANOMALY else "occurred")
    return _trade(day, Side.SHORT, cfg.h2_entry_minute, cfg.h2_exit_minute)


def run_h2(days: Iterable[DaySeries], cfg: StrategyConfig, gate: Gate = Gate.ANOMALY) -> StrategyRun:
    """Short from the fixing minute to midday on days passing ``gate``."""
    gate = Gate(gate)
    run = StrategyRun()
    for day in days:
        res = _h2_day(day, cfg, gate)
        if isinstance(res, Trade):
            run.trades.append(res)
        else:
            run.skipped.append(SkippedDay(day.date, res))
    return run.sort()


def run_combined(days: Sequence[DaySeries], cfg: StrategyConfig) -> StrategyRun:
    """Golden-cross H1 leg plus the anomaly-gated H2 leg, at most two trades per day.

    When the H1 leg traded, the gate measures the morning gain from its fill
    price; otherwise it falls back to the fixed H1 entry minute.
    """
    if not cfg.use_gc:
        raise ValueError("the combined strategy uses the golden-cross H1 leg; set use_gc=True")
    run = StrategyRun()
    for day in days:
        h1 = _h1_day(day, cfg)
        if isinstance(h1, Trade):
            run.trades.append(h1)
            h1_trade = h1
        else:
            run.skipped.append(SkippedDay(day.date, "h1: " + h1))
            h1_trade = None
        h2 = _h2_day(day, cfg, Gate.ANOMALY, h1_trade)
        if isinstance(h2, Trade):
            run.trades.append(h2)
        else:
            run.skipped.append(SkippedDay(day.date, "h2: " + h2))
    return run.sort()


def config_dict(cfg: StrategyConfig) -> dict:
    out = asdict(cfg)
    for key in ("entry_minute_h1", "exit_minute_h1", "gate_minute", "h2_entry_minute", "h2_exit_minute"):
        out[key] = format_minute(out[key])
    return out
