"""Command-line front end: build networks, run experiments, emit plot data."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .arithmetic import ArithParams, build_modexp, resource_estimate
from .gates import RegisterLayout, network_to_text, validate_network
from .oracles import exhaustive_network_check, modpow, direct_outcome_table, folded_outcome_table
from .pipeline import ExperimentConfig, ideal_distribution, run_experiment
from .simulator import Distribution, ExponentialDecay, StaticDecay


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shorsim")
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="simulate a factoring experiment")
    runp.add_argument("--n", type=int, default=15)
    runp.add_argument("--x", default="7")
    runp.add_argument("--q", type=int, default=130)
    runp.add_argument("--events", type=int, default=10)
    law = runp.add_mutually_exclusive_group()
    law.add_argument("--p1", type=float, default=None,
                     help="time-independent persistence probability")
    law.add_argument("--gamma", type=float, default=None,
                     help="exponential decay rate (default 2.5)")
    runp.add_argument("--watchdog", choices=["on", "off", "strict"], default="on")
    runp.add_argument("--seed", type=int, default=1)
    runp.add_argument("--reps", type=int, default=1)
    runp.add_argument("--r2-slice", type=int, default=None)
    runp.add_argument("--out", default=None)
    runp.add_argument("--format", choices=["csv", "json", "gnuplot"],
                      default="csv")

    buildp = sub.add_parser("build", help="emit the exponentiation network")
    buildp.add_argument("--n", type=int, default=15)
    buildp.add_argument("--x", type=int, default=7)
    buildp.add_argument("--q", type=int, default=None)
    buildp.add_argument("--out", default=None)
    buildp.add_argument("--report", action="store_true",
                        help="emit the resource report as JSON instead")

    sub.add_parser("verify", help="run the brute-force oracle suite")
    return parser


def parse_config(argv: list[str],
                 config_file: str | Path | None = None,
                 ) -> tuple[ExperimentConfig, argparse.Namespace]:
    """Turn `run` arguments (plus optional JSON defaults) into a config.

    The config file, when given, provides values under the same names as the
    flags (``r2_slice`` for ``--r2-slice``); explicit flags win.
    """
    argv = list(argv)
    if not argv or argv[0] != "run":
        argv = ["run", *argv]
    args = build_parser().parse_args(argv)
    if config_file is not None:
        given = {tok.split("=", 1)[0] for tok in argv if tok.startswith("--")}
        for key, value in json.loads(Path(config_file).read_text()).items():
            if f"--{key.replace('_', '-')}" not in given:
                setattr(args, key, value)
    if args.p1 is not None and args.gamma is not None:
        build_parser().error("--p1 and --gamma are mutually exclusive")
    if args.p1 is not None:
        law = StaticDecay(args.p1)
    else:
        law = ExponentialDecay(args.gamma if args.gamma is not None else 2.5)
    x = args.x if args.x == "random" else int(args.x)
    cfg = ExperimentConfig(n=args.n, x=x, q=args.q, n_events=args.events,
                           law=law, watchdog=args.watchdog, seed=args.seed,
                           repetitions=args.reps)
    return cfg, args


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def emit_distribution(ned: Distribution, ed: Distribution, fmt: str, sink,
                      exact: np.ndarray | None = None,
                      r2_slice: int | None = None,
                      out_path: str | None = None) -> None:
    """Write the outcome tables in one of the plot-ready formats.

    csv/json go to ``sink``; gnuplot needs ``out_path`` as a file prefix and
    ``r2_slice`` to pick the plotted column, and writes dat files plus a
    script showing exact, traced and post-selected series stacked.
    """
    rows = list(_iter_rows(ned, ed, r2_slice))
    if fmt == "csv":
        sink.write("r1,r2,p_ned,p_ed\n")
        for r1, r2, pn, pe in rows:
            sink.write(f"{r1},{r2},{_fmt(pn)},{_fmt(pe)}\n")
    elif fmt == "json":
        payload = [{"r1": r1, "r2": r2, "p_ned": float(_fmt(pn)),
                    "p_ed": float(_fmt(pe))} for r1, r2, pn, pe in rows]
        json.dump(payload, sink)
        sink.write("\n")
    elif fmt == "gnuplot":
        if out_path is None or r2_slice is None:
            raise ValueError("gnuplot output needs --out and --r2-slice")
        prefix = Path(out_path)
        series = {"ned": ned.table[:, r2_slice], "ed": ed.table[:, r2_slice]}
        if exact is not None:
            series = {"exact": exact[:, r2_slice], **series}
        for name, column in series.items():
            with open(f"{prefix}_{name}.dat", "w") as fh:
                for r1, p in enumerate(column):
                    fh.write(f"{r1} {_fmt(p)}\n")
        with open(f"{prefix}.gp", "w") as fh:
            fh.write(f"set terminal pngcairo size 800,{300 * len(series)}\n"
                     f"set output \"{prefix}.png\"\n"
                     f"set multiplot layout {len(series)},1\n"
                     f"set xlabel \"first register\"\n")
            for name in series:
                fh.write(f"set ylabel \"P\"\n"
                         f"plot \"{prefix}_{name}.dat\" with impulses "
                         f"title \"{name}\"\n")
            fh.write("unset multiplot\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _iter_rows(ned: Distribution, ed: Distribution, r2_slice: int | None):
    q, width = ned.table.shape
    for r1 in range(q):
        for r2 in range(width):
            if r2_slice is not None and r2 != r2_slice:
                continue
            yield r1, r2, float(ned.table[r1, r2]), float(ed.table[r1, r2])


def _cmd_run(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    if args.format == "gnuplot" and (args.out is None or args.r2_slice is None):
        print("gnuplot output needs --out and --r2-slice", file=sys.stderr)
        return 2
    report = run_experiment(cfg)
    if not report.repetitions:
        print(report.to_json(), file=sys.stderr)
        return 0
    ned_mean = np.mean([rep.ned.table for rep in report.repetitions], axis=0)
    ed_mean = np.mean([rep.ed.table for rep in report.repetitions], axis=0)
    ned = Distribution(ned_mean, "ned")
    ed = Distribution(ed_mean, "ed")
    exact = None
    if isinstance(report.x, int):
        exact = ideal_distribution(cfg.n, report.x, cfg.q).table
    if args.format == "gnuplot":
        emit_distribution(ned, ed, "gnuplot", None, exact=exact,
                          r2_slice=args.r2_slice, out_path=args.out)
    elif args.out:
        with open(args.out, "w") as fh:
            emit_distribution(ned, ed, args.format, fh, r2_slice=args.r2_slice)
    else:
        emit_distribution(ned, ed, args.format, sys.stdout,
                          r2_slice=args.r2_slice)
    print(report.to_json(), file=sys.stderr)
    return 0


def _cmd_build(args: argparse.Namespace) -> int:
    params = ArithParams.create(args.n, args.x,
                                args.q if args.q else args.n * args.n)
    layout = RegisterLayout.for_factoring(params.bits, q=params.q)
    net = build_modexp(params, layout)
    if args.report:
        report = resource_estimate(params.bits).as_dict()
        report["gates_exact"] = len(net.gates)
        text = json.dumps(report, sort_keys=True) + "\n"
    else:
        text = network_to_text(net)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify() -> int:
    """Run the oracle suite; exit 0 only if every check passes."""
    failures = 0

    def check(name: str, ok: bool) -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failures += 0 if ok else 1

    for n, x, q in [(15, 7, 130), (15, 4, 130), (21, 2, 50)]:
        gap = float(np.max(np.abs(direct_outcome_table(n, x, q) - folded_outcome_table(n, x, q))))
        check(f"probability formula self-check n={n} x={x} q={q} (gap {gap:.2e})",
              gap <= 1e-12)
        total = float(direct_outcome_table(n, x, q).sum())
        check(f"probability table normalization n={n} x={x} q={q}",
              abs(total - 1.0) <= 1e-12)

    params = ArithParams.create(15, 7, 130)
    layout = RegisterLayout.for_factoring(params.bits, q=130)
    net = build_modexp(params, layout)
    check("exponentiation network well formed", not validate_network(net, layout))
    bad = exhaustive_network_check(
        net, lambda a: modpow(7, a, 15), range(130),
        in_wires=list(layout.reg1), out_wires=list(layout.reg2),
        zero_wires=layout.work_qubits)
    check("exponentiation network matches modpow for all a < 130", not bad)
    return 1 if failures else 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] == "run":
        cfg, args = parse_config(argv)
        return _cmd_run(cfg, args)
    args = build_parser().parse_args(argv)
    if args.command == "build":
        return _cmd_build(args)
    return _cmd_verify()


if __name__ == "__main__":
    sys.exit(main())
