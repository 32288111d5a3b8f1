"""Command-line entry point.

Exit codes: 0 success, 1 input or configuration error, 2 identity breach.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from . import formats, report, synth
from .backtest import decompose_ior, rank_outliers
from .errors import ConfigInvalid, ElBacktestError, IdentityBreach
from .ledger import PeriodLedger, pair_periods

EXIT_OK, EXIT_INPUT, EXIT_BREACH = 0, 1, 2


@dataclass
class RunConfig:
    bop: str | None = None
    eop: str | None = None
    events: str | None = None
    provisions: str | None = None
    bop_as_of: str | None = None
    eop_as_of: str | None = None
    snapshots: list[str] = field(default_factory=list)
    events_list: list[str] = field(default_factory=list)
    provisions_list: list[str] = field(default_factory=list)
    discount_rate: float = 0.0
    lcp_months: int = 12
    segments: list[str] = field(default_factory=list)
    out: str | None = None
    format: str = "json"
    tolerance: float = 1e-9
    top: int = 5

    def validate(self) -> None:
        if not self.tolerance > 0:
            raise ConfigInvalid(f"tolerance must be > 0, got {self.tolerance}")
        if self.format not in ("json", "csv"):
            raise ConfigInvalid(f"format must be json or csv, got {self.format!r}")


_PATH_KEYS = {"bop", "eop", "events", "provisions", "out"}
_PATH_LIST_KEYS = {"snapshots", "events_list", "provisions_list"}


def load_run_config(path: str | None, overrides: dict[str, Any]) -> RunConfig:
    """Config file values (paths relative to the file) overlaid by explicit flags."""
    values: dict[str, Any] = {}
    if path:
        cfg_path = Path(path)
        try:
            data = json.loads(cfg_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config {path}: {exc}") from None
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigInvalid(f"{path}: unknown keys {sorted(unknown)}")
        base = cfg_path.parent
        for key, value in data.items():
            if key in _PATH_KEYS and value is not None:
                value = str(base / value)
            elif key in _PATH_LIST_KEYS:
                value = [str(base / v) for v in value]
            values[key] = value
    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


def _split_segments(raw: str | None) -> list[str] | None:
    if raw is None:
        return None
    return [s.strip() for s in raw.split(",") if s.strip()]


def _date(raw: str | None) -> dt.date | None:
    if not raw:
        return None
    try:
        return dt.date.fromisoformat(raw)
    except ValueError:
        raise ConfigInvalid(f"not an ISO date: {raw!r}") from None


def build_ledger(cfg: RunConfig) -> PeriodLedger:
    if not cfg.bop or not cfg.eop:
        raise ConfigInvalid("both --bop and --eop are required")
    bop = formats.read_snapshot_csv(cfg.bop, _date(cfg.bop_as_of))
    eop = formats.read_snapshot_csv(cfg.eop, _date(cfg.eop_as_of))
    events = formats.read_events_csv(cfg.events) if cfg.events else None
    provisions = formats.read_provisions(cfg.provisions) if cfg.provisions else None
    (ledger,) = pair_periods([bop, eop], [events], [provisions], discount_rate=cfg.discount_rate,
                             loss_confirmation_months=cfg.lcp_months)
    return ledger


def _emit_report(doc: dict[str, Any], cfg: RunConfig) -> None:
    if not cfg.out:
        return
    if cfg.format == "json":
        Path(cfg.out).write_text(report.dumps(doc), encoding="utf-8")
    else:
        report.write_report_csv(doc, cfg.out)


def cmd_backtest(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config, {
        "bop": args.bop, "eop": args.eop, "events": args.events, "provisions": args.provisions,
        "bop_as_of": args.bop_as_of, "eop_as_of": args.eop_as_of,
        "discount_rate": args.discount_rate, "lcp_months": args.lcp_months,
        "segments": _split_segments(args.segments), "out": args.out, "format": args.format,
        "tolerance": args.tolerance, "top": args.top,
    })
    ledger = build_ledger(cfg)
    rep = decompose_ior(ledger, cfg.segments, tol=cfg.tolerance)
    doc = report.report_to_dict(rep)
    _emit_report(doc, cfg)
    print(report.render_summary(doc))
    if cfg.top > 0:
        out = rank_outliers(rep, cfg.top)
        if out.largest_new_defaults:
            print("largest new defaults: " + ", ".join(
                f"{r.account_id} ({report.fmt(r.eop_el)})" for r in out.largest_new_defaults))
        if out.npl_shortages:
            print("NPL shortages:        " + ", ".join(
                f"{r.account_id} ({report.fmt(r.npl_backtest)})" for r in out.npl_shortages))
        if out.npl_gains:
            print("NPL gains:            " + ", ".join(
                f"{r.account_id} ({report.fmt(r.npl_backtest)})" for r in out.npl_gains))
    return EXIT_OK


def _load_scenario(args: argparse.Namespace) -> list[PeriodLedger]:
    if args.case is not None:
        return synth.generate_appendix_case(args.case)
    if not args.config:
        raise ConfigInvalid("simulate needs --case or --config")
    try:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read scenario {args.config}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigInvalid("scenario file must hold a JSON object")
    if "case" in data:
        return synth.generate_appendix_case(int(data["case"]))
    if args.seed is not None:
        data["seed"] = args.seed
    return synth.simulate_lifecycle(synth.ScenarioConfig.from_mapping(data))


def _ior_line(reports) -> str:
    return "IoR by period: " + ", ".join(report.fmt(r.ior) for r in reports)


def cmd_simulate(args: argparse.Namespace) -> int:
    ledgers = _load_scenario(args)
    if not args.out:
        raise ConfigInvalid("simulate needs --out DIR")
    manifest = formats.write_chain(ledgers, args.out)
    print(f"wrote {len(ledgers)} periods to {manifest}")
    if not args.verify:
        print(_ior_line([decompose_ior(lg, tol=args.tolerance) for lg in ledgers]))
        return EXIT_OK
    reports = [decompose_ior(lg, tol=args.tolerance) for lg in ledgers]
    recon = report.chain_reconciliation(reports, tol=args.tolerance)
    # round trip through the written files must reproduce the in-memory figures
    reread = [decompose_ior(lg, tol=args.tolerance) for lg in formats.read_chain(manifest)]
    for a, b in zip(reports, reread):
        if report.report_to_dict(a) != report.report_to_dict(b):
            raise IdentityBreach("file round trip", a.ior, b.ior, args.tolerance, 0.0)
    print(_ior_line(reports))
    print("PL Backtest by period: " + ", ".join(report.fmt(r.pl_backtest) for r in reports))
    print("NPL Backtest by period: " + ", ".join(report.fmt(r.npl_backtest) for r in reports))
    print(f"cumulative IoR {recon['cumulative_ior']} = cumulative write-off "
          f"{recon['cumulative_write_off']}; all identities verified")
    return EXIT_OK


def _chain_ledgers(args: argparse.Namespace, cfg: RunConfig) -> list[PeriodLedger]:
    if args.manifest:
        return formats.read_chain(args.manifest)
    if len(cfg.snapshots) < 2:
        raise ConfigInvalid("chain needs at least two snapshots (or a manifest)")
    dates = [_date(d) for d in (args.as_of or [])]
    if dates and len(dates) != len(cfg.snapshots):
        raise ConfigInvalid(f"--as-of needs one date per snapshot ({len(cfg.snapshots)})")
    dates = dates or [None] * len(cfg.snapshots)
    snaps = [formats.read_snapshot_csv(p, d) for p, d in zip(cfg.snapshots, dates)]
    n = len(snaps) - 1
    events = [formats.read_events_csv(p) for p in cfg.events_list] or None
    provisions = [formats.read_provisions(p) for p in cfg.provisions_list] or None
    for name, block in (("--events", events), ("--provisions", provisions)):
        if block is not None and len(block) != n:
            raise ConfigInvalid(f"{name} needs {n} files for {n + 1} snapshots")
    return pair_periods(snaps, events, provisions, discount_rate=cfg.discount_rate,
                        loss_confirmation_months=cfg.lcp_months)


def cmd_chain(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config, {
        "snapshots": args.snapshots, "events_list": args.events, "provisions_list": args.provisions,
        "discount_rate": args.discount_rate, "lcp_months": args.lcp_months,
        "segments": _split_segments(args.segments), "out": args.out, "format": args.format,
        "tolerance": args.tolerance,
    })
    ledgers = _chain_ledgers(args, cfg)
    if not ledgers:
        raise ConfigInvalid("chain needs at least two snapshots")
    reports = [decompose_ior(lg, cfg.segments, tol=cfg.tolerance) for lg in ledgers]
    doc = report.chain_to_dict(reports, tol=cfg.tolerance)
    recon = doc["reconciliation"]
    if cfg.out:
        if cfg.format == "json":
            Path(cfg.out).write_text(report.dumps(doc), encoding="utf-8")
        else:
            out = Path(cfg.out)
            out.mkdir(parents=True, exist_ok=True)
            (out / "reconciliation.csv").write_text(
                report.csv_text(tuple(recon["periods"][0]), recon["periods"]), encoding="utf-8")
            for i, sub in enumerate(doc["reports"], start=1):
                report.write_report_csv(sub, out / f"period_{i:02d}")
    header = f"{'EOP':<12}{'IoR':>16}{'write-off':>16}{'cum IoR':>16}{'cum wo':>16}"
    print(header)
    for row in recon["periods"]:
        print(f"{row['eop_as_of']:<12}{row['ior']:>16}{row['write_off']:>16}"
              f"{row['cum_ior']:>16}{row['cum_write_off']:>16}")
    state = "liquidated" if recon["liquidated"] else "open book"
    print(f"cumulative IoR {recon['cumulative_ior']} vs write-off {recon['cumulative_write_off']} "
          f"({state}; EL {recon['el_first']} -> {recon['el_last']})")
    if "cumulative_cost_of_risk" in recon:
        print(f"cumulative cost of risk {recon['cumulative_cost_of_risk']}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot read report {args.input}: {exc}") from None
    docs = doc["reports"] if "reports" in doc else [doc]
    if args.format == "csv":
        if not args.out:
            raise ConfigInvalid("report --format csv needs --out DIR")
        for i, sub in enumerate(docs, start=1):
            target = Path(args.out) if len(docs) == 1 else Path(args.out) / f"period_{i:02d}"
            report.write_report_csv(sub, target)
        return EXIT_OK
    if args.format == "json":
        text = report.dumps(doc)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    print("\n\n".join(report.render_summary(d) for d in docs))
    return EXIT_OK


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--discount-rate", type=float, dest="discount_rate")
    p.add_argument("--lcp-months", type=int, dest="lcp_months")
    p.add_argument("--segments", help="comma-separated segment dimensions")
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--tolerance", type=float)
    p.add_argument("--config", help="JSON run configuration; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elbacktest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("backtest", help="decompose one period")
    p.add_argument("--bop")
    p.add_argument("--eop")
    p.add_argument("--events")
    p.add_argument("--provisions")
    p.add_argument("--bop-as-of", dest="bop_as_of", help="date for an empty BOP file")
    p.add_argument("--eop-as-of", dest="eop_as_of", help="date for an empty EOP file")
    p.add_argument("--top", type=int, help="number of outliers to list")
    _common(p)
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("simulate", help="generate a ledger chain")
    p.add_argument("--case", type=int, choices=(1, 2, 3))
    p.add_argument("--config", help="scenario JSON (lifecycle parameters or {\"case\": n})")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("chain", help="decompose a multi-period chain")
    p.add_argument("manifest", nargs="?", help="manifest.json or a directory written by simulate")
    p.add_argument("--snapshots", nargs="+")
    p.add_argument("--events", nargs="+")
    p.add_argument("--provisions", nargs="+")
    p.add_argument("--as-of", dest="as_of", nargs="+", help="snapshot dates, needed for empty files")
    _common(p)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("report", help="re-render a saved report")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IdentityBreach as exc:
        print(f"identity breach: {exc}", file=sys.stderr)
        return EXIT_BREACH
    except (ElBacktestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
