"""Dimension-reducing solver.

At each level the candidate is the point of the ball slice that points along
q. If that candidate leaves the simplex, the coordinate holding the smallest
entry of q is provably zero at an optimum, so it is dropped and the problem
is solved again one dimension lower. Implemented as a loop, so depth is not
bounded by the interpreter stack.
"""

from dataclasses import dataclass, field

import numpy as np

from .simplex import (
    EPS_FEAS,
    Regime,
    SolveResult,
    clamp_t,
    classify_regime,
    clip_small_negatives,
    normalize_objective,
    purity_floor_gap,
    solve_special,
)


@dataclass
class RecursionTrace:
    removed_indices: list = field(default_factory=list)

    @property
    def depth(self):
        return len(self.removed_indices)


def solve_recursive(q, t):
    q_prime, _ = normalize_objective(q)
    n = q_prime.size
    t = clamp_t(n, t)
    top_regime = classify_regime(n, t, q_prime)
    q = np.asarray(q, dtype=float)

    trace = RecursionTrace()
    # Regimes whose answer does not depend on the digits of q end here; the
    # loop below re-centres the raw entries at every level so tiny spreads survive.
    special = None
    if top_regime in (Regime.FULL_SIMPLEX, Regime.SINGLETON, Regime.UNIFORM_OBJECTIVE,
                      Regime.INFEASIBLE, Regime.TWO_DIM):
        special = solve_special(top_regime, q_prime, t)
    if special is not None:
        stats = {"iterations": 0, "depth": 0, "trace": trace, "final_regime": top_regime}
        return SolveResult(special.optimizer, float(special.optimizer @ q), top_regime, stats)

    # Each level's objective is a positive affine image of q on the surviving
    # coordinates, and every test below depends only on its direction. So the
    # direction is rebuilt from the raw entries at each level instead of being
    # carried through the face push, which would smear early rounding error
    # over later levels. The smallest entry of p-bar and the face-pushed norm
    # follow from min(u) and ||u||, so p-bar is formed only at the end.
    alive = np.arange(n)
    vals = q.copy()
    iterations = 0
    while True:
        iterations += 1
        k = vals.size
        u = vals - vals.mean()
        u -= u.mean()
        kappa = float(np.sqrt(u @ u))
        if k == 2:
            regime = Regime.TWO_DIM
        elif kappa == 0.0:
            regime = Regime.UNIFORM_OBJECTIVE
        elif t <= 1.0 / (k - 1):
            regime = Regime.BALL_EQUALS_SIMPLEX_SLICE
        else:
            regime = Regime.GENERAL
        if regime is not Regime.GENERAL:
            level = 1.0 / k + (u / kappa if kappa > 0.0 else u)
            local = solve_special(regime, level, t).optimizer
            break
        i = int(np.argmin(u))
        low = float(u[i]) / kappa
        step = purity_floor_gap(k, t)
        if 1.0 / k + step * low >= -EPS_FEAS:
            local = clip_small_negatives(1.0 / k + (step / kappa) * u)
            break
        # Face push q-bar = 1/k + delta m with unit m: ||q-bar||^2 = delta^2 + 1/k.
        delta = -1.0 / (k * low)
        if delta * delta + 1.0 / k >= t:
            local = clip_small_negatives(1.0 / k + (step / kappa) * u)
            break
        trace.removed_indices.append(int(alive[i]))
        alive = np.delete(alive, i)
        vals = np.delete(vals, i)

    p = np.zeros(n)
    p[alive] = local
    stats = {
        "iterations": iterations,
        "depth": trace.depth,
        "trace": trace,
        "final_regime": regime,
    }
    return SolveResult(p, float(p @ q), top_regime, stats)
