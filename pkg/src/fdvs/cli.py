"""Command-line front end: simulate, check, oracle, sweep.

Exit codes: 0 success; 1 configuration or usage error; 2 ChartExit;
3 PrincipalDegenerate; 4 NonFinite; 5 failed check-suite threshold;
6 failed oracle band; 7 failed sweep gate.
"""
import argparse
import os
import sys
import time as _time

from . import __version__
from .config import load_config
from .diagnostics import CSV_COLUMNS, epsilon_sweep
from .errors import ConfigError, FdvsError
from .integrator import CHART_EXIT, COMPLETED, NON_FINITE, \
    PRINCIPAL_DEGENERATE, run
from .io import format_float, write_diagnostics_csv, write_snapshot
from .suites import CHECK_SUITES, ORACLE_SUITES

STATUS_EXIT = {COMPLETED: 0, CHART_EXIT: 2, PRINCIPAL_DEGENERATE: 3,
               NON_FINITE: 4}


def _say(quiet, *parts):
    if not quiet:
        print(*parts)


def cmd_simulate(args) -> int:
    try:
        cfg = load_config(args.config, nx_override=args.nx_override)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    os.makedirs(args.out, exist_ok=True)
    t_start = _time.perf_counter()
    progress = None
    if not args.quiet:
        def progress(k, n, t):
            if k % 50 == 0 or k == n:
                print(f"  step {k}/{n}  t={t:.3f}", flush=True)
    traj = run(cfg, progress=progress)
    elapsed = _time.perf_counter() - t_start

    columns = list(CSV_COLUMNS) + [s.label() for s in cfg.norms]
    write_diagnostics_csv(os.path.join(args.out, "diagnostics.csv"),
                          traj.series, columns)
    if cfg.snapshot_stride > 0:
        snap_dir = os.path.join(args.out, "snapshots")
        os.makedirs(snap_dir, exist_ok=True)
        for i, st in enumerate(traj.snapshots):
            write_snapshot(os.path.join(snap_dir, f"{i:05d}.fdvs"), st)
    final_t = traj.final_state.t if traj.final_state is not None else 0.0
    summary = [
        f"status: {traj.status}",
        f"message: {traj.message}" if traj.message else "message:",
        f"final_t: {format_float(final_t)}",
        f"nx: {cfg.nx}", f"L: {format_float(cfg.L)}",
        f"dt: {format_float(cfg.dt())}",
        f"epsilon: {format_float(cfg.data.epsilon)}",
        f"seed: {cfg.seed}",
        f"diag_rows: {len(traj.series)}",
        f"wall_seconds: {elapsed:.1f}",
    ]
    with open(os.path.join(args.out, "summary.txt"), "w") as fh:
        fh.write("\n".join(summary) + "\n")
    _say(args.quiet, "\n".join(summary))
    return STATUS_EXIT[traj.status]


def cmd_check(args) -> int:
    names = list(CHECK_SUITES) if args.suite == "all" else [args.suite]
    all_ok = True
    for name in names:
        text, ok = CHECK_SUITES[name]()
        _say(args.quiet, text)
        all_ok = all_ok and ok
    return 0 if all_ok else 5


def cmd_oracle(args) -> int:
    fn = ORACLE_SUITES[args.sub]
    kwargs = {}
    if args.nx_override is not None:
        if args.sub == "b24":
            kwargs["nx_pair"] = (args.nx_override, args.nx_override)
        else:
            kwargs["nx"] = args.nx_override
    text, ok = fn(**kwargs)
    _say(args.quiet, text)
    return 0 if ok else 6


def cmd_sweep(args) -> int:
    try:
        cfg = load_config(args.config, nx_override=args.nx_override)
        epsilons = [float(tok) for tok in args.epsilons.split(",") if tok]
        if not epsilons:
            raise ConfigError("epsilons: empty list")
    except (ConfigError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    report = epsilon_sweep(cfg, epsilons)
    text = report.text()
    _say(args.quiet, text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "sweep.txt"), "w") as fh:
            fh.write(text + "\n")
        cols = ("epsilon", "status", "gamma_linf", "gamma_l2_n",
                "gamma_l2_dn", "linf_final")
        lines = ["# fdvs-sweep v1", ",".join(cols)]
        for r in report.rows:
            cells = []
            for c in cols:
                v = r[c]
                if v is None:
                    cells.append("")
                elif isinstance(v, str):
                    cells.append(v)
                else:
                    cells.append(format_float(v))
            lines.append(",".join(cells))
        with open(os.path.join(args.out, "sweep.csv"), "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0 if report.ok else 7


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fdvs",
        description="Evolutionary Faddeev-model laboratory: quasi-linear "
                    "wave solver and estimate-checking harness")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="run a configured simulation")
    ps.add_argument("--config", required=True)
    ps.add_argument("--out", required=True)
    ps.add_argument("--nx-override", type=int, default=None)
    ps.add_argument("--quiet", action="store_true")
    ps.set_defaults(fn=cmd_simulate)

    pc = sub.add_parser("check", help="run analytic identity check suites")
    pc.add_argument("suite", choices=sorted(CHECK_SUITES) + ["all"])
    pc.add_argument("--quiet", action="store_true")
    pc.set_defaults(fn=cmd_check)

    po = sub.add_parser("oracle", help="run linear-wave estimate oracles")
    po.add_argument("sub", choices=sorted(ORACLE_SUITES))
    po.add_argument("--nx-override", type=int, default=None)
    po.add_argument("--quiet", action="store_true")
    po.set_defaults(fn=cmd_oracle)

    pw = sub.add_parser("sweep", help="amplitude-scaling study")
    pw.add_argument("--config", required=True)
    pw.add_argument("--epsilons", required=True,
                    help="comma-separated amplitude list")
    pw.add_argument("--out", default=None)
    pw.add_argument("--nx-override", type=int, default=None)
    pw.add_argument("--quiet", action="store_true")
    pw.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except FdvsError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
