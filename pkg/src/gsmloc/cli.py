"""Command-line front end.

Exit status: 0 success, 1 runtime/domain error, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import RunConfig, read_config
from .errors import ConfigError, GsmLocError
from .fuzzy import LinguisticLabel, read_fuzzy_spec, spec_by_name
from .network import read_topology
from .sim import (
    compare_schemes,
    format_log_csv,
    format_metrics_csv,
    format_report,
    format_report_csv,
    run_simulation,
    validate_trace,
)
from .traces import (
    CommuterParams,
    format_time_of_day,
    format_trace,
    generate_commuter_trace,
    parse_time_of_day,
    random_trace,
    read_trace,
)


class UsageError(Exception):
    pass


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _load_inputs(cfg: RunConfig):
    topology = read_topology(cfg.topology)
    if cfg.trace is not None:
        trace = read_trace(cfg.trace)
    elif cfg.generator == "commuter":
        trace = generate_commuter_trace(cfg.commuter_params(), topology, cfg.lcg)
    else:
        p = cfg.generator_params
        try:
            subs, days, per_day = int(p.get("subscribers", 3)), int(p.get("days", 7)), int(p.get("events_per_day", 8))
        except ValueError as exc:
            raise ConfigError(f"random generator parameters: {exc}") from None
        trace = random_trace(topology, subs, days, per_day, cfg.seed, cfg.lcg)
    return topology, trace


def _config(args) -> RunConfig:
    cfg = read_config(args.config)
    if getattr(args, "scheme", None):
        cfg.scheme = args.scheme
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "out", None):
        cfg.output = Path(args.out)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _config(args)
    topology, trace = _load_inputs(cfg)
    result = run_simulation(topology, trace, cfg.scheme, cfg.sim_config())
    _emit(format_metrics_csv([result]), cfg.output)
    if args.verbose_log:
        log_path = None if cfg.output is None else cfg.output.with_name(cfg.output.stem + ".log.csv")
        _emit(format_log_csv(result.log), log_path)
    return 0


def cmd_compare(args) -> int:
    cfg = _config(args)
    topology, trace = _load_inputs(cfg)
    cmp = compare_schemes(topology, trace, cfg.sim_config(), runner=run_simulation)
    _emit(format_report(cmp), cfg.output)
    if cfg.output is not None:
        _emit(format_report_csv(cmp), cfg.output.with_suffix(".csv"))
        _emit(format_metrics_csv([cmp.baseline, cmp.intelligent]), cfg.output.with_name(cfg.output.stem + ".metrics.csv"))
    if not cmp.ok:
        for v in cmp.violations:
            print(f"error: {v}", file=sys.stderr)
        return 1
    return 0


def cmd_fuzzy_eval(args) -> int:
    spec = read_fuzzy_spec(args.spec_file) if args.spec_file else spec_by_name(args.spec)
    if args.visits < 0:
        raise UsageError("visits must be non-negative")
    labels = [LinguisticLabel.parse(args.label)] if args.label else list(LinguisticLabel)
    for label in labels:
        print(f"{label.value} {spec[label](args.visits):.6f}")
    print(f"class {spec.classify(args.visits).value}")
    return 0


def cmd_trace_gen(args) -> int:
    topology = read_topology(args.topology)
    if args.random:
        trace = random_trace(topology, args.population, args.days, args.events_per_day, args.seed)
    else:
        defaults = CommuterParams()
        try:
            params = CommuterParams(
                home_la=args.home_la or defaults.home_la,
                work_la=args.work_la or defaults.work_la,
                transit_las=tuple(args.transit_las.split(",")) if args.transit_las else defaults.transit_las,
                leave_time=args.leave,
                return_time=args.return_,
                transit_offset=args.transit_offset,
                transit_dwell=args.transit_dwell,
                days=args.days,
                population=args.population,
                seed=args.seed,
                jitter=args.jitter,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        trace = generate_commuter_trace(params, topology)
    _emit(format_trace(trace), Path(args.out) if args.out else None)
    return 0


def cmd_validate(args) -> int:
    topology = read_topology(args.topology)
    print(f"topology ok: {len(topology.cells)} cells, {len(topology.las)} LAs, {len(topology.mscs)} MSCs")
    if args.trace:
        trace = read_trace(args.trace)
        validate_trace(topology, trace, {ev.imsi for ev in trace})
        print(f"trace ok: {len(trace)} events")
    return 0


def _time_arg(text: str) -> int:
    try:
        return parse_time_of_day(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gsmloc", description="GSM location management simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def run_opts(sp):
        sp.add_argument("--config", required=True, help="run configuration file")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("--out", help="output path (default: stdout)")

    s = sub.add_parser("simulate", help="run one scheme and write metrics")
    run_opts(s)
    s.add_argument("--scheme", choices=["baseline", "intelligent"])
    s.add_argument("--verbose-log", action="store_true", help="also write the full message log")
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="run both schemes on the same trace")
    run_opts(c)
    c.set_defaults(func=cmd_compare)

    f = sub.add_parser("fuzzy-eval", help="evaluate membership functions")
    f.add_argument("--spec", choices=["observation", "weekly"], default="observation")
    f.add_argument("--spec-file", help="membership function file overriding --spec")
    f.add_argument("--label", help="Low, Medium or High (default: all)")
    f.add_argument("--visits", type=int, required=True)
    f.set_defaults(func=cmd_fuzzy_eval)

    d = CommuterParams()
    t = sub.add_parser("trace-gen", help="generate a commuter (or random) trace")
    t.add_argument("--topology", required=True)
    t.add_argument("--out")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--days", type=int, default=d.days)
    t.add_argument("--population", type=int, default=d.population)
    t.add_argument("--home-la")
    t.add_argument("--work-la")
    t.add_argument("--transit-las", help="comma-separated LA ids")
    t.add_argument("--leave", type=_time_arg, default=d.leave_time, help=f"HH:MM (default {format_time_of_day(d.leave_time)})")
    t.add_argument("--return", dest="return_", type=_time_arg, default=d.return_time, help=f"HH:MM (default {format_time_of_day(d.return_time)})")
    t.add_argument("--transit-offset", type=int, default=d.transit_offset, help="seconds from leaving home to the first transit LA")
    t.add_argument("--transit-dwell", type=int, default=d.transit_dwell, help="seconds spent in each transit LA")
    t.add_argument("--jitter", type=int, default=0)
    t.add_argument("--random", action="store_true", help="random mobility/call mix instead of commuting")
    t.add_argument("--events-per-day", type=int, default=8)
    t.set_defaults(func=cmd_trace_gen)

    v = sub.add_parser("validate", help="lint a topology and optionally a trace")
    v.add_argument("--topology", required=True)
    v.add_argument("--trace")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GsmLocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = exc.filename or ""
        print(f"error: {name}: {exc.strerror}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
