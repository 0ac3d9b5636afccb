"""Command-line front end: generate, calendar, analyze, backtest.

Exit codes: 0 success, 2 usage/argument error, 3 data error.

Each run writes a ``manifest.json`` beside its outputs. The manifest digest
covers the resolved configuration and input digests only; the argv and
wall-clock timestamp sit in an ``invocation`` block outside the digest, so
repeated runs produce byte-identical data files.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Sequence

from . import __version__
from .analysis import (
    EmptyInputError,
    intraday_profile,
    post_announcement_drift,
    prob_above_anchor,
)
from .calendar import (
    DayKind,
    DayLabel,
    PoolTooSmallError,
    TradingCalendar,
    closing_run_end,
    count_kinds,
    default_holiday_bytes,
    effective_gotobi_days,
    gotobi_dates,
    sample_non_gotobi,
)
from .marketdata import CsvSpec, DaySeries, QuoteFormatError, dump_quotes, format_minute, load_quotes, parse_minute
from .metrics import evaluate
from .strategy import Gate, StrategyConfig, config_dict, run_combined, run_h1, run_h2
from .synthdata import SynthParams, generate

log = logging.getLogger("gotobi")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3
DAY_SETS = ("gotobi", "non-gotobi")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


# --- helpers -------------------------------------------------------------------


def _date(text: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {text!r}") from None


def _minute(text: str) -> int:
    try:
        return parse_minute(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _fmt(x: float) -> str:
    return repr(float(x))


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, indent=2) + "\n").encode()


def _csv_bytes(header: Sequence[str], rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().encode()


def _load_calendar(path: str | None) -> tuple[TradingCalendar, str]:
    path = path or os.environ.get("GOTOBI_HOLIDAYS")
    if path:
        try:
            raw = Path(path).read_bytes()
            cal = TradingCalendar.from_csv(io.StringIO(raw.decode("utf-8")))
        except (OSError, ValueError) as exc:
            raise DataError(f"holiday file {path}: {exc}") from None
        return cal, _sha256(raw)
    raw = default_holiday_bytes()
    return TradingCalendar.default(), "bundled:" + _sha256(raw)


def _load_data(path: str, spread: str | None) -> tuple[list[DaySeries], str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise DataError(str(exc)) from None
    try:
        days = load_quotes(raw.decode("utf-8"), CsvSpec(spread))
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not UTF-8 ({exc})") from None
    except QuoteFormatError as exc:
        raise DataError(f"{path}: {exc}") from None
    if not days:
        raise DataError(f"{path}: no quotes")
    return days, _sha256(raw)


@dataclass
class Manifest:
    command: str
    config: dict
    inputs: dict
    seed: int | None
    argv: list[str]

    def core(self) -> dict:
        return {
            "tool": "gotobi",
            "version": __version__,
            "command": self.command,
            "config": self.config,
            "inputs": self.inputs,
            "seed": self.seed,
        }

    @property
    def digest(self) -> str:
        return _sha256(_canonical(self.core()))

    def render(self, outputs: dict[str, str]) -> bytes:
        doc = {"manifest_sha256": self.digest, **self.core(), "outputs": outputs}
        doc["invocation"] = {
            "argv": self.argv,
            "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        return _json_bytes(doc)


class OutputSet:
    """Collects output files, then writes them with a manifest listing their digests."""

    def __init__(self, out_dir: Path, manifest: Manifest, manifest_name: str = "manifest.json"):
        self.out_dir = out_dir
        self.manifest = manifest
        self.manifest_name = manifest_name
        self.files: dict[str, bytes] = {}

    def add(self, name: str, data: bytes) -> None:
        self.files[name] = data

    def write(self) -> None:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        for name, data in self.files.items():
            (self.out_dir / name).write_bytes(data)
        outputs = {name: _sha256(data) for name, data in sorted(self.files.items())}
        (self.out_dir / self.manifest_name).write_bytes(self.manifest.render(outputs))


def _select_day_sets(
    days: list[DaySeries], cal: TradingCalendar, which: str, seed: int
) -> dict[str, list[DaySeries]]:
    start, end = days[0].date, days[-1].date
    by_date = {d.date: d for d in days}
    # a nominal date just past the last data day can still shift onto it
    g_dates = [d for d in gotobi_dates(start, closing_run_end(end, cal), cal) if d in by_date]
    sets = {"gotobi": [by_date[d] for d in g_dates]}
    if which in ("non-gotobi", "both"):
        try:
            picks = sample_non_gotobi(start, end, len(g_dates), cal, seed, within=by_date.keys())
        except PoolTooSmallError as exc:
            raise DataError(str(exc)) from None
        sets["non-gotobi"] = [by_date[d] for d in picks]
    if which != "both":
        sets = {which: sets[which]}
    for name, chosen in sets.items():
        if not chosen:
            raise DataError(f"no {name} days in the data")
    return sets


# --- commands ------------------------------------------------------------------


def cmd_generate(args) -> int:
    try:
        params = SynthParams(
            start=args.start,
            end=args.end,
            base_rate=args.base_rate,
            noise_sigma=args.sigma,
            spread=args.spread,
            drift=args.drift,
            reversal=args.reversal,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cal, cal_digest = _load_calendar(args.holidays)
    result = generate(params, cal)
    data = dump_quotes(result.days).encode()
    manifest = Manifest(
        "generate",
        {**params.metadata(), "n_days": len(result.days), "n_gotobi_days": len(result.gotobi),
         "clamped_days": [d.isoformat() for d in result.clamped_days]},
        {"holidays": cal_digest},
        args.seed,
        list(args.argv),
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(data)
    out.with_name(out.name + ".manifest.json").write_bytes(manifest.render({out.name: _sha256(data)}))
    log.info("wrote %d days to %s", len(result.days), out)
    return EXIT_OK


def _label_rows(labels: list[DayLabel]):
    for lab in labels:
        yield [
            lab.date.isoformat(),
            lab.date.strftime("%a"),
            lab.kind.value,
            lab.source_gotobi.isoformat() if lab.source_gotobi else "",
        ]


def cmd_calendar(args) -> int:
    if args.end < args.start:
        raise UsageError(f"invalid range: --to {args.end} precedes --from {args.start}")
    cal, cal_digest = _load_calendar(args.holidays)
    labels = effective_gotobi_days(args.start, args.end, cal)
    n_gotobi = sum(lab.kind is DayKind.GOTOBI_EFFECTIVE for lab in labels)
    if args.sample:
        try:
            picks = sample_non_gotobi(args.start, args.end, n_gotobi, cal, args.seed)
        except PoolTooSmallError as exc:
            raise DataError(str(exc)) from None
        labels = sorted(labels + [DayLabel(d, DayKind.NON_GOTOBI) for d in picks], key=lambda x: x.date)
    counts = count_kinds(labels)
    table = _csv_bytes(["date", "weekday", "kind", "source_gotobi"], _label_rows(labels))
    if args.out_dir is None:
        sys.stdout.write(table.decode())
        print(" ".join(f"{k}={v}" for k, v in counts.items()), file=sys.stderr)
        return EXIT_OK
    manifest = Manifest(
        "calendar",
        {"from": args.start.isoformat(), "to": args.end.isoformat(), "sample": args.sample},
        {"holidays": cal_digest},
        args.seed if args.sample else None,
        list(args.argv),
    )
    outs = OutputSet(Path(args.out_dir), manifest)
    outs.add("labels.csv", table)
    outs.add("summary.json", _json_bytes({"manifest_sha256": manifest.digest, "counts": counts}))
    outs.write()
    return EXIT_OK


def cmd_analyze(args) -> int:
    cal, cal_digest = _load_calendar(args.holidays)
    days, data_digest = _load_data(args.data, args.spread)
    sets = _select_day_sets(days, cal, args.day_set, args.seed)
    manifest = Manifest(
        "analyze",
        {"day_set": args.day_set, "anchor": format_minute(args.anchor), "horizon": args.horizon,
         "spread": args.spread},
        {"data": data_digest, "holidays": cal_digest},
        args.seed,
        list(args.argv),
    )
    outs = OutputSet(Path(args.out_dir), manifest)
    meta = {"manifest_sha256": manifest.digest, "anchor": format_minute(args.anchor),
            "horizon": args.horizon, "seed": args.seed, "day_sets": {}}
    try:
        for name, chosen in sets.items():
            prof = intraday_profile(chosen, args.anchor)
            prob = prob_above_anchor(chosen, args.anchor)
            drift = post_announcement_drift(chosen, args.anchor, args.horizon)
            outs.add(f"profile_{name}.csv", _csv_bytes(
                ["minute", "value", "n_days"],
                ([format_minute(m), _fmt(v), int(n)] for m, v, n in zip(prof.minutes, prof.mean_offset, prof.n_days)),
            ))
            outs.add(f"prob_{name}.csv", _csv_bytes(
                ["minute", "value", "n_days"],
                ([format_minute(m), _fmt(v), int(n)] for m, v, n in zip(prob.minutes, prob.prob, prob.n_days)),
            ))
            outs.add(f"drift_{name}.csv", _csv_bytes(
                ["date", "per_day", "cumulative"],
                ([d.isoformat(), _fmt(p), _fmt(c)] for d, p, c in zip(drift.dates, drift.per_day, drift.cumulative)),
            ))
            meta["day_sets"][name] = {
                "n_days": len(chosen),
                "n_days_profile": len(chosen) - len(prof.skipped),
                "n_days_drift": len(drift.dates),
                "skipped_anchor": [d.isoformat() for d in prof.skipped],
                "skipped_drift": [d.isoformat() for d in drift.skipped],
                "dates": [d.date.isoformat() for d in chosen],
            }
    except EmptyInputError as exc:
        raise DataError(str(exc)) from None
    outs.add("analysis.json", _json_bytes(meta))
    outs.write()
    return EXIT_OK


def _strategy_config(args) -> StrategyConfig:
    use_gc = args.gc
    if use_gc is None:
        use_gc = args.strategy == "combined"
    try:
        return StrategyConfig(
            use_gc=use_gc,
            gc_window_hour=args.gc_hour,
            entry_minute_h1=args.h1_entry,
            exit_minute_h1=args.h1_exit,
            gate_minute=args.gate_time,
            h2_entry_minute=args.h2_entry,
            h2_exit_minute=args.h2_exit,
            short_window=args.short_window,
            long_window=args.long_window,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_backtest(args) -> int:
    cfg = _strategy_config(args)
    if args.strategy == "combined" and not cfg.use_gc:
        raise UsageError("--strategy combined requires --gc")
    cal, cal_digest = _load_calendar(args.holidays)
    days, data_digest = _load_data(args.data, args.spread)
    sets = _select_day_sets(days, cal, args.day_set, args.seed)
    gate = Gate(args.gate)
    manifest = Manifest(
        "backtest",
        {"strategy": args.strategy, "day_set": args.day_set, "gate": gate.value,
         "spread": args.spread, **config_dict(cfg)},
        {"data": data_digest, "holidays": cal_digest},
        args.seed,
        list(args.argv),
    )
    outs = OutputSet(Path(args.out_dir), manifest)
    for name, chosen in sets.items():
        if args.strategy == "h1":
            run = run_h1(chosen, cfg)
        elif args.strategy == "h2":
            run = run_h2(chosen, cfg, gate)
        else:
            run = run_combined(chosen, cfg)
        report = evaluate(run.trades, run.skipped)
        rows = [t.to_row() for t in report.trades]
        header = ["date", "side", "entry_minute", "exit_minute", "entry_price", "exit_price", "profit"]
        outs.add(f"trades_{name}.csv", _csv_bytes(header, ([r[h] for h in header] for r in rows)))
        doc = {"manifest_sha256": manifest.digest, "strategy": args.strategy, "day_set": name,
               "n_days": len(chosen), **report.to_dict()}
        outs.add(f"report_{name}.json", _json_bytes(doc))
        pf = report.profit_factor
        log.info("%s/%s: N=%d P_F=%s P_R=%s W=%.2f total=%.6f", args.strategy, name, report.n_trades,
                 "n/a" if pf is None else f"{pf:.2f}",
                 "n/a" if report.payoff_ratio is None else f"{report.payoff_ratio:.2f}",
                 report.win_rate, report.total_profit)
    outs.write()
    return EXIT_OK


# --- parser --------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gotobi", description="Gotobi-anomaly statistics and backtests on minute FX quotes.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, data=True):
        sp.add_argument("--holidays", help="holiday CSV (date,name); default $GOTOBI_HOLIDAYS or bundled")
        if data:
            sp.add_argument("--data", required=True, help="quote CSV")
            sp.add_argument("--spread", help="constant spread (yen) for two-column timestamp,price input")
            sp.add_argument("--day-set", choices=("gotobi", "non-gotobi", "both"), default="gotobi")
            sp.add_argument("--seed", type=int, default=0, help="seed for non-Gotobi sampling")
            sp.add_argument("--out-dir", required=True)

    g = sub.add_parser("generate", help="write a synthetic quote CSV")
    g.add_argument("--from", dest="start", type=_date, required=True)
    g.add_argument("--to", dest="end", type=_date, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--drift", type=float, default=0.10, help="Gotobi rise into the anchor (yen)")
    g.add_argument("--reversal", type=float, default=0.06, help="Gotobi fall after the anchor (yen)")
    g.add_argument("--sigma", type=float, default=0.0, help="random-walk sigma (yen per sqrt-minute)")
    g.add_argument("--spread", type=float, default=0.004)
    g.add_argument("--base-rate", type=float, default=108.0)
    g.add_argument("--out", required=True)
    common(g, data=False)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("calendar", help="list effective Gotobi days (and sampled controls)")
    c.add_argument("--from", dest="start", type=_date, required=True)
    c.add_argument("--to", dest="end", type=_date, required=True)
    c.add_argument("--sample", action="store_true", help="add a matched non-Gotobi sample")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out-dir")
    common(c, data=False)
    c.set_defaults(func=cmd_calendar)

    a = sub.add_parser("analyze", help="anchored profile, probability-above-anchor and drift")
    common(a)
    a.add_argument("--anchor", type=_minute, default=parse_minute("09:55"))
    a.add_argument("--horizon", type=int, default=1, help="drift horizon in minutes")
    a.set_defaults(func=cmd_analyze)

    b = sub.add_parser("backtest", help="run a strategy and report performance")
    common(b)
    b.add_argument("--strategy", choices=("h1", "h2", "combined"), required=True)
    b.add_argument("--gc", action=argparse.BooleanOptionalAction, default=None,
                   help="golden-cross entry filter for H1 (default: on for combined only)")
    b.add_argument("--gc-hour", type=int, default=3, help="GC search window [n-1:30, n:00)")
    b.add_argument("--gate", choices=[x.value for x in Gate], default="anomaly")
    b.add_argument("--h1-entry", type=_minute, default=parse_minute("03:00"))
    b.add_argument("--h1-exit", type=_minute, default=parse_minute("09:55"))
    b.add_argument("--gate-time", type=_minute, default=parse_minute("09:00"))
    b.add_argument("--h2-entry", type=_minute, default=parse_minute("09:55"))
    b.add_argument("--h2-exit", type=_minute, default=parse_minute("12:00"))
    b.add_argument("--short-window", type=int, default=25)
    b.add_argument("--long-window", type=int, default=100)
    b.set_defaults(func=cmd_backtest)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gotobi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"gotobi: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
