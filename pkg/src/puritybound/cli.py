"""Command-line front end.

Exit codes: 0 success, 2 infeasible input, 3 validation error,
4 solver disagreement.
"""

import argparse
import csv
import json
import sys

import numpy as np

from . import jsonio
from .bench import BenchConfig, run_bench, scaling_report
from .channels import (
    ExampleChannelKind,
    closed_form_O_t,
    entanglement_fidelity_bounded_purity,
    example_channel,
    multiplicativity_gap,
)
from .errors import InfeasibleError, SolverDisagreement, ValidationError
from .operators import max_expectation, max_fidelity_pure, min_energy, solve_vector
from .tomography import MeasurementBasis, linear_inversion, mle_purity_eq, mle_purity_leq

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_VALIDATION = 3
EXIT_DISAGREEMENT = 4

SOLVER_CHOICES = ("dual", "recursive", "oracle")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _plain(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return str(value)


def cmd_solve(args):
    q = jsonio.vector_from_json(jsonio.load(args.q))
    res = solve_vector(q, args.t, args.solver, args.exact_purity)
    doc = {
        "optimum": res.optimum,
        "optimizer": jsonio.vector_to_json(res.optimizer),
        "regime": res.regime.value,
        "stats": {k: _plain(v) for k, v in res.stats.items()},
    }
    jsonio.dump(doc, args.out)


def cmd_expect(args):
    h = jsonio.matrix_from_json(jsonio.load(args.h))
    if args.fidelity_target:
        doc = {"value": max_fidelity_pure(h, args.t, args.solver)}
    else:
        fn = min_energy if args.min_energy else max_expectation
        value, rho = fn(h, args.t, args.solver)
        doc = {"value": value, "rho": jsonio.matrix_to_json(rho)}
    jsonio.dump(doc, args.out)


def parse_grid(text):
    try:
        start, stop, steps = text.split(":")
        return np.linspace(float(start), float(stop), int(steps))
    except ValueError:
        raise ValidationError(f"--t-grid must look like start:stop:steps, got {text!r}") from None


def cmd_channel(args):
    grid = parse_grid(args.t_grid)
    channel = example_channel(args.kind, args.d)
    n = channel.d_in**2
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "numeric", "closed_form", "joint", "product", "gap"])
        for t in grid:
            row = [repr(float(t))]
            if t >= 1.0 / n - 1e-12:
                row += [repr(entanglement_fidelity_bounded_purity(channel, t, args.solver)),
                        repr(float(closed_form_O_t(args.kind, args.d, t)))]
            else:
                row += ["", ""]
            try:
                gap = multiplicativity_gap(args.kind, args.kind, args.d, t, args.mode, args.solver)
                row += [repr(gap.joint), repr(gap.product), repr(gap.gap)]
            except ValidationError:
                row += ["", "", ""]
            writer.writerow(row)


def cmd_tomo(args):
    elements, freqs, t = jsonio.tomo_from_json(jsonio.load(args.input))
    basis = MeasurementBasis.from_elements(elements)
    h = linear_inversion(freqs, basis)
    est = mle_purity_eq(h, t) if args.equal_purity else mle_purity_leq(h, t)
    print(f"distance={est.distance:.12g} purity={est.purity:.12g}", file=sys.stderr)
    jsonio.dump(jsonio.matrix_to_json(est.rho), args.out)


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated integers, got {text!r}") from None


def cmd_bench(args):
    config = BenchConfig(
        n_values=_int_list(args.n),
        samples_per_n=args.samples,
        t_policy=args.t,
        solvers=[s for s in args.solvers.split(",") if s.strip()],
        seed=args.seed,
        repeats=args.repeats,
        jobs=args.jobs,
        warmup=not args.no_warmup,
    )
    rows = run_bench(config, out=args.out, repro_dir=args.repro_dir)
    if args.fit:
        print(json.dumps(scaling_report(rows), indent=2))


def build_parser():
    parser = _Parser(prog="puritybound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="maximize q.p over the bounded-purity simplex")
    p.add_argument("--q", required=True, help="vector JSON file")
    p.add_argument("--t", required=True, type=float)
    p.add_argument("--solver", choices=SOLVER_CHOICES, default="dual")
    p.add_argument("--exact-purity", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("expect", help="bounded-purity expectation value of an observable")
    p.add_argument("--h", required=True, help="matrix JSON file")
    p.add_argument("--t", required=True, type=float)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--min-energy", action="store_true")
    mode.add_argument("--fidelity-target", action="store_true",
                      help="treat H as a pure target state and report the best fidelity")
    p.add_argument("--solver", choices=SOLVER_CHOICES, default="dual")
    p.add_argument("--out")
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("channel", help="entanglement-passing fidelity over a t grid")
    p.add_argument("--kind", required=True, choices=[k.value for k in ExampleChannelKind])
    p.add_argument("--d", required=True, type=int)
    p.add_argument("--t-grid", required=True, help="start:stop:steps")
    p.add_argument("--mode", choices=("same-t", "sqrt-t"), default="same-t")
    p.add_argument("--solver", choices=SOLVER_CHOICES, default="dual")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("tomo", help="purity-constrained state estimate")
    p.add_argument("--input", required=True)
    p.add_argument("--equal-purity", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tomo)

    p = sub.add_parser("bench", help="time solvers on random instances")
    p.add_argument("--n", required=True, help="comma-separated dimensions")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--solvers", default="dual,recursive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t", default="uniform", help="'uniform' or a fixed purity bound")
    p.add_argument("--repeats", type=int, default=1, help="median of this many timings")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-warmup", action="store_true",
                   help="skip the untimed call made before each timed solve")
    p.add_argument("--repro-dir", default=".")
    p.add_argument("--fit", action="store_true", help="print polynomial fits of mean time")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SolverDisagreement as exc:
        print(f"solver disagreement: {exc}", file=sys.stderr)
        return EXIT_DISAGREEMENT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
