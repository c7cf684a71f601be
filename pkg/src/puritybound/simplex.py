"""Feasible sets, regimes and closed-form cases for

    maximize p.q  subject to  p >= 0, sum(p) = 1, p.p <= t.

The feasible set P(t) is the probability simplex cut by an l2 ball of
radius sqrt(t). Everything here is shared by the recursive and dual solvers,
including the brute-force support-enumeration oracle used in tests.
"""

import enum
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionTooLargeError,
    InfeasibleError,
    OracleViolation,
    UniformObjectiveError,
)

EPS_FEAS = 1e-9
EPS_NUM = 1e-10

ORACLE_MAX_N = 4096
ORACLE_SAMPLING_MAX_N = 16
ORACLE_SAMPLES = 10_000


class Regime(enum.Enum):
    FULL_SIMPLEX = "full_simplex"
    INFEASIBLE = "infeasible"
    SINGLETON = "singleton"
    TWO_DIM = "two_dim"
    UNIFORM_OBJECTIVE = "uniform_objective"
    BALL_EQUALS_SIMPLEX_SLICE = "ball_equals_simplex_slice"
    GENERAL = "general"


@dataclass
class SolveResult:
    optimizer: np.ndarray
    optimum: float
    regime: Regime
    stats: dict = field(default_factory=dict)


class FacePush(NamedTuple):
    q_bar: np.ndarray
    index: int
    norm_sq: float


def as_vector(q):
    q = np.asarray(q, dtype=float)
    if q.ndim != 1 or q.size == 0:
        raise ValueError("objective must be a non-empty 1-d vector")
    if not np.all(np.isfinite(q)):
        raise ValueError("objective entries must be finite")
    return q


def purity_floor_gap(n, t):
    """delta_t = sqrt(t - 1/n), the radius of the ball slice inside the simplex plane."""
    return float(np.sqrt(max(t - 1.0 / n, 0.0)))


def clamp_t(n, t):
    """Snap t onto 1/n when it is within EPS_FEAS of it."""
    t = float(t)
    if abs(t - 1.0 / n) <= EPS_FEAS:
        return 1.0 / n
    return t


def normalize_objective(q):
    """Shift q along the all-ones vector so its entries sum to one.

    Returns ``(q_prime, shift)`` with ``q_prime = q + shift``. Any p in the
    simplex has ``p.q_prime = p.q + shift``, so maximizers are unchanged and
    the original optimum is ``optimum_prime - shift``.
    """
    q = as_vector(q)
    n = q.size
    shift = (1.0 - q.sum()) / n
    return q + shift, float(shift)


def standardize_objective(q):
    """Rescale q to ``1/n + (q - mean) / ||q - mean||`` for the solvers' inner loops.

    Maximizers are invariant under positive affine maps of q, and this form
    keeps the deviations from 1/n at order one, so tiny or offset objectives
    do not lose digits when compared against the 1/n baseline. Returns
    ``(q_std, centre, scale)``; undo a value with ``centre + scale * (v - 1/n)``.
    """
    q = as_vector(q)
    centre = float(q.mean())
    dev = q - centre
    # The mean of large entries rounds coarsely; centre the small residuals again.
    drift = float(dev.mean())
    centre += drift
    dev -= drift
    scale = float(np.linalg.norm(dev))
    if scale == 0.0:
        raise UniformObjectiveError("constant objective cannot be standardized")
    return 1.0 / q.size + dev / scale, centre, scale


def is_uniform(q_prime):
    n = q_prime.size
    return bool(np.max(np.abs(q_prime - 1.0 / n)) <= EPS_FEAS)


def classify_regime(n, t, q):
    """Return the first matching regime; ``q`` is normalized internally."""
    t = clamp_t(n, t)
    if t >= 1.0:
        return Regime.FULL_SIMPLEX
    if t < 1.0 / n:
        return Regime.INFEASIBLE
    if t == 1.0 / n:
        return Regime.SINGLETON
    if n == 2:
        return Regime.TWO_DIM
    q_prime, _ = normalize_objective(q)
    if is_uniform(q_prime):
        return Regime.UNIFORM_OBJECTIVE
    if t <= 1.0 / (n - 1):
        return Regime.BALL_EQUALS_SIMPLEX_SLICE
    return Regime.GENERAL


def push_to_ball_boundary(q_prime, t):
    """Maximizer of p.q' over the simplex plane intersected with the ball p.p <= t.

    The result sits on the sphere p.p = t but may have negative entries.
    """
    q_prime = as_vector(q_prime)
    n = q_prime.size
    m = q_prime - 1.0 / n
    kappa = float(np.linalg.norm(m))
    if kappa == 0.0 or is_uniform(q_prime):
        raise UniformObjectiveError("uniform objective has no ascent direction")
    return 1.0 / n + purity_floor_gap(n, t) * m / kappa


def push_to_simplex_face(q_prime):
    """Move q' away from the uniform point until its smallest entry reaches zero.

    Ties in the minimum resolve to the smallest index.
    """
    q_prime = as_vector(q_prime)
    n = q_prime.size
    if is_uniform(q_prime):
        raise UniformObjectiveError("uniform objective cannot be pushed to a face")
    i = int(np.argmin(q_prime))
    m = q_prime - 1.0 / n
    delta = 1.0 / (1.0 - n * q_prime[i])
    q_bar = 1.0 / n + delta * m
    q_bar[i] = 0.0
    kappa_sq = float(m @ m)
    return FacePush(q_bar, i, delta * delta * kappa_sq + 1.0 / n)


def clip_small_negatives(p):
    """Zero out entries in [-EPS_FEAS, 0) and rescale to unit sum."""
    p = np.where(p < 0.0, 0.0, p)
    return p / p.sum()


def argmax_vertex(q):
    p = np.zeros(q.size)
    p[int(np.argmax(q))] = 1.0
    return p


def solve_special(regime, q_prime, t):
    """Closed-form solution for every regime except GENERAL (returns None)."""
    q_prime = as_vector(q_prime)
    n = q_prime.size
    t = clamp_t(n, t)
    if regime is Regime.INFEASIBLE:
        raise InfeasibleError(t, 1.0 / n)
    if regime is Regime.FULL_SIMPLEX:
        p = argmax_vertex(q_prime)
    elif regime in (Regime.SINGLETON, Regime.UNIFORM_OBJECTIVE):
        p = np.full(n, 1.0 / n)
    elif regime is Regime.TWO_DIM:
        sign = 1.0 if 2.0 * q_prime[0] - 1.0 >= 0.0 else -1.0
        r = np.sqrt(max(2.0 * t - 1.0, 0.0))
        p = 0.5 * (1.0 + r * sign * np.array([1.0, -1.0]))
    elif regime is Regime.BALL_EQUALS_SIMPLEX_SLICE:
        p = clip_small_negatives(push_to_ball_boundary(q_prime, t))
    else:
        return None
    return SolveResult(p, float(p @ q_prime), regime, {})


def check_feasible(p, t):
    p = np.asarray(p, dtype=float)
    return bool(
        p.min() >= -EPS_FEAS
        and abs(p.sum() - 1.0) <= EPS_FEAS
        and p @ p <= t + EPS_FEAS
    )


def _support_candidates(q_sorted, t):
    """Best feasible point supported on each top-k prefix of a descending q."""
    n = q_sorted.size
    best_value, best = -np.inf, None
    for k in range(1, n + 1):
        if 1.0 / k > t + EPS_FEAS:
            continue
        top = q_sorted[:k]
        centred = top - top.mean()
        centred -= centred.mean()
        spread = float(centred @ centred)
        if spread <= 0.0:
            c = 0.0
        else:
            c = np.sqrt(max(t - 1.0 / k, 0.0) / spread)
            low = centred.min()
            if low < 0.0:
                c = min(c, (1.0 / k) / -low)
        p = 1.0 / k + c * centred
        p /= p.sum()
        value = float(p @ top)
        if value > best_value:
            best_value, best = value, (k, p)
    return best_value, best


def _rejection_samples(n, t, count, rng, max_rounds=200):
    accepted = []
    total = 0
    for _ in range(max_rounds):
        x = rng.dirichlet(np.ones(n), size=count)
        shrink = rng.random((count, 1))
        p = 1.0 / n + shrink * (x - 1.0 / n)
        p = p[np.einsum("ij,ij->i", p, p) <= t]
        accepted.append(p)
        total += len(p)
        if total >= count:
            break
    return np.concatenate(accepted)[:count]


def oracle_solve(q, t, seed=0, samples=ORACLE_SAMPLES):
    """Independent solver by enumerating top-k supports of the KKT form.

    An optimizer is affine in q on its support, which is a superlevel set of
    q. For each k the best such point with purity min(t, reachable) is
    formed, and the best overall is returned. For n <= 16 a batch of random
    feasible points is also checked against the reported optimum.
    """
    q = as_vector(q)
    n = q.size
    if n > ORACLE_MAX_N:
        raise DimensionTooLargeError(f"oracle supports n <= {ORACLE_MAX_N}, got {n}")
    t = clamp_t(n, t)
    if t < 1.0 / n:
        raise InfeasibleError(t, 1.0 / n)

    # Centre and rescale so near-constant or offset objectives keep their digits.
    dev = q - q.mean()
    dev -= dev.mean()
    scale = float(np.abs(dev).max())
    work = dev / scale if scale > 0.0 else dev
    order = np.argsort(-work, kind="stable")
    _, (k, p_top) = _support_candidates(work[order], t)
    p = np.zeros(n)
    p[order[:k]] = p_top
    value = float(p @ q)
    stats = {"support": k, "samples": 0}

    if n <= ORACLE_SAMPLING_MAX_N and samples:
        rng = np.random.default_rng(seed)
        pts = _rejection_samples(n, t, samples, rng)
        stats["samples"] = len(pts)
        if len(pts):
            beat = float((pts @ q).max())
            if beat > value + EPS_FEAS:
                raise OracleViolation(f"sample value {beat} exceeds oracle {value}")

    return SolveResult(p, value, classify_regime(n, t, q), stats)
