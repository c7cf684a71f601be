"""Timing harness: random objectives, cross-solver agreement, polynomial fits."""

import csv
import gc
import json
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .dual import solve_dual
from .errors import DegenerateDesignError, SolverDisagreement, ValidationError
from .recursive import solve_recursive
from .simplex import oracle_solve

CSV_COLUMNS = ("n", "solver", "sample", "seconds", "optimum", "regime")
AGREEMENT_TOL = 1e-7

BENCH_SOLVERS = {
    "dual": solve_dual,
    "recursive": solve_recursive,
    "oracle": oracle_solve,
}


@dataclass
class BenchConfig:
    n_values: list
    samples_per_n: int = 50
    t_policy: object = "uniform"
    solvers: tuple = ("dual", "recursive")
    seed: int = 0
    repeats: int = 1
    jobs: int = 1
    warmup: bool = True

    def __post_init__(self):
        self.n_values = [int(n) for n in self.n_values]
        self.solvers = tuple(self.solvers)
        if not self.n_values:
            raise ValidationError("no dimensions given")
        if self.n_values != sorted(self.n_values):
            raise ValidationError("n_values must be sorted ascending")
        if min(self.n_values) < 2:
            raise ValidationError("benchmark dimensions must be >= 2")
        if self.samples_per_n < 1:
            raise ValidationError("samples_per_n must be >= 1")
        if not self.solvers:
            raise ValidationError("at least one solver is required")
        unknown = set(self.solvers) - set(BENCH_SOLVERS)
        if unknown:
            raise ValidationError(f"unknown solvers: {sorted(unknown)}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.t_policy != "uniform":
            self.t_policy = float(self.t_policy)


@dataclass
class BenchRow:
    n: int
    solver: str
    sample_index: int
    wall_time_seconds: float
    optimum: float
    regime: str


def gen_random_instance(n, seed, index):
    """Flat-Dirichlet objective, fixed by (seed, index)."""
    rng = np.random.default_rng([seed, index])
    e = rng.exponential(size=n)
    return e / e.sum()


_T_STREAM = 1


def draw_t(n, seed, index, policy):
    if policy == "uniform":
        # One uniform per (seed, index), shared by every n: solver cost moves
        # with t, so common draws keep per-n means comparable along the curve.
        u = np.random.default_rng([seed, index, _T_STREAM]).random()
        return 1.0 / n + u * (1.0 - 1.0 / n)
    return float(policy)


def time_solve(fn, q, t, repeats=1, warmup=True):
    """Median wall time of ``repeats`` calls, after one untimed call if ``warmup``."""
    if warmup:
        # Whatever ran before (often a much larger solve) leaves caches and
        # branch predictors cold; one throwaway call keeps that out of the timing.
        fn(q, t)
    times = []
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            start = time.perf_counter()
            res = fn(q, t)
            times.append(time.perf_counter() - start)
    finally:
        if gc_was_enabled:
            gc.enable()
    return statistics.median(times), res


def _run_instance(args):
    n, index, config = args
    q = gen_random_instance(n, config.seed, index)
    t = draw_t(n, config.seed, index, config.t_policy)
    rows = []
    for name in config.solvers:
        seconds, res = time_solve(BENCH_SOLVERS[name], q, t, config.repeats, config.warmup)
        rows.append(BenchRow(n, name, index, max(seconds, 1e-12), res.optimum, res.regime.value))
    return q, t, rows


def _report_disagreement(q, t, rows, repro_dir):
    instance = {
        "q": {"n": int(q.size), "entries": q.tolist()},
        "t": t,
        "optima": {r.solver: r.optimum for r in rows},
    }
    path = None
    if repro_dir is not None:
        os.makedirs(repro_dir, exist_ok=True)
        path = os.path.join(repro_dir, f"disagreement_n{q.size}_s{rows[0].sample_index}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(instance, fh, indent=2)
    spread = max(r.optimum for r in rows) - min(r.optimum for r in rows)
    raise SolverDisagreement(
        f"solvers disagree by {spread:.3g} at n={q.size}, sample {rows[0].sample_index}"
        + (f"; instance written to {path}" if path else ""),
        instance,
    )


def run_bench(config, out=None, repro_dir="."):
    """Time every solver on every instance; stream rows to CSV ``out`` if given."""
    # Cycle through every n for each sample index so slow drift in machine
    # speed lands on all dimensions alike instead of biasing one of them.
    tasks = [(n, i, config) for i in range(config.samples_per_n) for n in config.n_values]
    fh = writer = None
    if out is not None:
        fh = open(out, "w", encoding="utf-8", newline="")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
    rows = []
    try:
        if config.jobs > 1:
            pool = ProcessPoolExecutor(max_workers=config.jobs)
            results = pool.map(_run_instance, tasks)
        else:
            pool = None
            results = map(_run_instance, tasks)
        for q, t, inst_rows in results:
            optima = [r.optimum for r in inst_rows]
            if max(optima) - min(optima) > AGREEMENT_TOL:
                _report_disagreement(q, t, inst_rows, repro_dir)
            for r in inst_rows:
                rows.append(r)
                if writer is not None:
                    writer.writerow(
                        [r.n, r.solver, r.sample_index, repr(r.wall_time_seconds),
                         repr(r.optimum), r.regime]
                    )
        if pool is not None:
            pool.shutdown()
    finally:
        if fh is not None:
            fh.close()
    return rows


def mean_times(rows):
    """{solver: [(n, mean seconds), ...]} sorted by n."""
    grouped = {}
    for r in rows:
        grouped.setdefault(r.solver, {}).setdefault(r.n, []).append(r.wall_time_seconds)
    return {
        solver: sorted((n, float(np.mean(ts))) for n, ts in by_n.items())
        for solver, by_n in grouped.items()
    }


def fit_polynomial(points, degree):
    """Least-squares polynomial fit; coefficients in ascending degree and RMS residual."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValidationError("points must be (x, y) pairs")
    x, y = pts[:, 0], pts[:, 1]
    if len(x) <= degree:
        raise ValidationError(f"need more than {degree} points for a degree-{degree} fit")
    if np.unique(x).size != x.size:
        raise DegenerateDesignError("x-values must be distinct")
    coeffs = np.polynomial.polynomial.polyfit(x, y, degree)
    resid = y - np.polynomial.polynomial.polyval(x, coeffs)
    return coeffs, float(np.sqrt(np.mean(resid**2)))


def scaling_report(rows, degrees=(1, 2, 3)):
    report = {}
    for solver, pts in mean_times(rows).items():
        report[solver] = {}
        for deg in degrees:
            if len(pts) > deg:
                coeffs, rms = fit_polynomial(pts, deg)
                report[solver][deg] = {"coeffs": coeffs.tolist(), "rms": rms}
    return report


def row_dict(row):
    return asdict(row)
