"""Command-line interface.

Subcommands:
  run       execute one configured experiment, write trace.csv + summary.csv
  validate  check a step-size exponent pair for an algorithm
  gen       generate and serialize a random problem instance
  table     run the sampler x exponent-pair grid and print a text table
"""

import argparse
import dataclasses
import sys

from .harness import (
    emit_csv,
    generate_problem,
    load_config,
    run_experiment,
    save_problem,
)
from .schedules import ALGORITHMS, StepSchedule, validate
from .solver import QUADRATIC, WEIGHTED_L1

CONDITION_LABELS = {"iid": "I", "greedy": "II", "perm": "III", "markov": "IV"}
EXPONENT_PAIRS = {"A": (0.25, 0.5), "B": (0.125, 0.75)}


def _cmd_validate(args):
    schedule = StepSchedule(args.a, args.b, args.scale_alpha, args.scale_inner)
    violations = validate(schedule, args.algorithm)
    if not violations:
        print(f"ok: (a={args.a}, b={args.b}) admissible for the "
              f"{args.algorithm} algorithm")
        return 0
    print(f"rejected for the {args.algorithm} algorithm:")
    for v in violations:
        print(f"  - {v}")
    return 1


def _cmd_gen(args):
    problem = generate_problem(args.seed, args.d, args.i, args.k, args.objective)
    save_problem(problem, args.out)
    print(f"wrote {args.out} (d={args.d}, I={args.i}, K={args.k}, "
          f"objective={args.objective})")
    return 0


def _cmd_run(args):
    cfg = load_config(args.config)
    if args.workers is not None:
        cfg = dataclasses.replace(cfg, workers=args.workers)
    report = run_experiment(cfg)
    emit_csv(report, args.out)
    ev = report.events
    print(f"wrote {args.out}/trace.csv and {args.out}/summary.csv")
    for name in ("d_cross", "f_delta_cross", "terminal"):
        e = ev[name]
        n = e.n if e.n is not None else f">{cfg.n_max}"
        print(f"  {name}: n={n} value={e.value}")
    return 0


def _fmt_cell(value, width=11):
    if value is None:
        return "---".rjust(width)
    if isinstance(value, int):
        return str(value).rjust(width)
    return f"{value:.6f}".rjust(width)


def _cmd_table(args):
    base = load_config(args.config)
    d_thr = base.d_threshold
    f_thr = base.f_delta_threshold
    print(f"{base.algorithm} algorithm, d={base.d}, I={base.I}, K={base.K}, "
          f"{base.samplings} samplings, n_max={base.n_max}")
    header = (f"{'':16s}|{'D_n <= %g' % d_thr:^36s}"
              f"|{'|F_n-F_(n-1)| <= %g' % f_thr:^36s}|{'n = %d' % base.n_max:^24s}")
    sub = (f"{'':16s}|{'n':>11s} {'time [s]':>11s} {'D_n':>11s} "
           f"|{'n':>11s} {'time [s]':>11s} {'F_n':>11s} "
           f"|{'time [s]':>11s} {'F_n':>11s}")
    print(header)
    print(sub)
    for sampler in ("iid", "greedy", "perm", "markov"):
        for pair_name, (a, b) in EXPONENT_PAIRS.items():
            cfg = dataclasses.replace(
                base,
                sampler=sampler,
                schedule=dataclasses.replace(base.schedule, a=a, b=b),
            )
            report = run_experiment(cfg)
            label = f"({CONDITION_LABELS[sampler]})({pair_name})"
            dcr = report.events["d_cross"]
            fcr = report.events["f_delta_cross"]
            term = report.events["terminal"]
            d_n = dcr.n if dcr.n is not None else None
            row = (f"{label:16s}|{_fmt_cell(d_n)} {_fmt_cell(dcr.time_s)} "
                   f"{_fmt_cell(dcr.value)} |{_fmt_cell(fcr.n)} "
                   f"{_fmt_cell(fcr.time_s)} {_fmt_cell(fcr.value)} "
                   f"|{_fmt_cell(term.time_s)} {_fmt_cell(term.value)}")
            if d_n is None:
                row = row.replace(_fmt_cell(None), f">{base.n_max}".rjust(11), 1)
            print(row)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fixopt",
        description="Stochastic convex optimization over intersections of "
                    "fixed point sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one experiment from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--workers", type=int, default=None)
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check a step-size schedule")
    p_val.add_argument("--a", type=float, required=True)
    p_val.add_argument("--b", type=float, required=True)
    p_val.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p_val.add_argument("--scale-alpha", type=float, default=1e-3)
    p_val.add_argument("--scale-inner", type=float, default=1e-3)
    p_val.set_defaults(func=_cmd_validate)

    p_gen = sub.add_parser("gen", help="generate a random problem instance")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--d", type=int, required=True)
    p_gen.add_argument("--i", type=int, required=True)
    p_gen.add_argument("--k", type=int, required=True)
    p_gen.add_argument("--objective", choices=(QUADRATIC, WEIGHTED_L1),
                       required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=_cmd_gen)

    p_tab = sub.add_parser("table", help="run the sampler x exponent grid")
    p_tab.add_argument("--config", required=True)
    p_tab.set_defaults(func=_cmd_table)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
