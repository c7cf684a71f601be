"""Lagrange-dual solver.

For 1/n < t < 1 the optimum equals the minimum of the scalar convex function

    h(z) = sqrt(t) * ||max(0, q - z)||_2 + z     (z < max q)
    h(z) = z                                     (otherwise)

over a bracket [z_min, z_max] on which h is guaranteed to turn around. The
primal maximizer is rebuilt from the minimizer through the KKT conditions:
either a water-filling vector sqrt(t) v(z*)/||v(z*)|| or, when v(z*) = 0,
the uniform vector on the set of maximal entries of q. The support read off
the golden-section minimizer is then certified by checking the KKT
conditions in closed form, which also pins z* exactly.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._scalar import golden_section
from .errors import InfeasibleError, InternalKKTViolation, ValidationError
from .simplex import (
    EPS_FEAS,
    SolveResult,
    argmax_vertex,
    as_vector,
    clamp_t,
    classify_regime,
    is_uniform,
    normalize_objective,
    standardize_objective,
)

EPS_Z = 1e-12
EPS_V = 1e-12
MAX_GOLDEN_ITER = 200


@dataclass
class DualState:
    z_min: float
    z_max: float
    z_star: float
    h_star: float
    evaluations: int
    refined: bool = False
    support: Optional[np.ndarray] = None

    def multipliers(self, q_prime, t):
        """Dual variables (u, w) paired with z_star."""
        q_prime = np.asarray(q_prime, dtype=float)
        u = np.maximum(0.0, self.z_star - q_prime)
        w = np.linalg.norm(np.maximum(0.0, q_prime - self.z_star)) / np.sqrt(4.0 * t)
        return u, float(w)


def water_level(q_prime, z):
    return np.maximum(0.0, q_prime - z)


def dual_h(z, q_prime, t):
    q_prime = np.asarray(q_prime, dtype=float)
    if z >= q_prime.max():
        return float(z)
    return float(np.sqrt(t) * np.linalg.norm(water_level(q_prime, z)) + z)


def dual_h_slope(z, q_prime, t):
    """Derivative of h; None exactly at the kink z = max q."""
    q_prime = np.asarray(q_prime, dtype=float)
    top = q_prime.max()
    if z > top:
        return 1.0
    if z == top:
        return None
    v = water_level(q_prime, z)
    return float(1.0 - np.sqrt(t) * v.sum() / np.linalg.norm(v))


def _h_evaluator(q_prime, t):
    """Fast h for golden section, reusing one scratch buffer.

    ``h.drop_below(a)`` discards entries of q at or below ``a``. They add
    nothing to h at any z >= a, so once the bracket's lower end has passed
    them the remaining evaluations touch only the few entries near the top.
    """
    top = float(q_prime.max())
    root_t = float(np.sqrt(t))
    scratch = np.empty_like(q_prime)
    active = [q_prime]

    def h(z):
        if z >= top:
            return float(z)
        q = active[0]
        buf = scratch[: q.size]
        np.subtract(q, z, out=buf)
        np.maximum(buf, 0.0, out=buf)
        return root_t * float(np.sqrt(buf @ buf)) + z

    def drop_below(a):
        q = active[0]
        keep = q[q > a]
        if keep.size < q.size:
            active[0] = keep

    h.drop_below = drop_below
    return h


def _check_open_window(n, t):
    if not 1.0 / n < t < 1.0:
        raise ValidationError(f"need 1/n < t < 1, got t={t} with n={n}")


def z_interval(q_prime, t):
    q_prime = as_vector(q_prime)
    n = q_prime.size
    _check_open_window(n, t)
    low = q_prime.min()
    spread = np.abs(q_prime - low).sum()
    c = (1.0 - np.sqrt(t)) * spread / (np.sqrt(n) * (np.sqrt(n * t) - 1.0))
    s = c + 1.0
    return float(low - 2.0 * s), float(q_prime.max())


def _max_set(q_prime):
    return q_prime >= q_prime.max() - EPS_FEAS


def _kkt_point(q_prime, t, on):
    """Optimizer supported exactly on the mask ``on``, or None if KKT fails there.

    On a support K of size k the optimizer is 1/k + c (q_K - mean_K) with
    c fixed by purity t. It is the global optimum when those entries are
    nonnegative and every q outside K sits at or below the implied water
    level. Working with centred entries keeps this stable when q is nearly
    flat, where q - z loses most of its digits.
    """
    k = int(on.sum())
    if k == 0 or t * k <= 1.0:
        return None
    top = q_prime[on]
    mean = top.mean()
    centred = top - mean
    drift = centred.mean()
    mean += drift
    centred -= drift
    spread = float(centred @ centred)
    if spread == 0.0:
        return None
    c = np.sqrt((t - 1.0 / k) / spread)
    p_top = 1.0 / k + c * centred
    if p_top.min() < -EPS_FEAS:
        return None
    if k < q_prime.size and 1.0 / k + c * (q_prime[~on].max() - mean) > EPS_FEAS:
        return None
    p = np.zeros_like(q_prime)
    p[on] = np.maximum(p_top, 0.0)
    p /= p.sum()
    return p, float(mean - 1.0 / (c * k))


def _refine_support(q_prime, t, z, band=32):
    """Search superlevel sets of q near z for the exact KKT support.

    Tries {q > z} first, then cuts at the ``band`` entries of q closest to
    z (found by partition, not a full sort).
    """
    found = _kkt_point(q_prime, t, q_prime > z)
    if found is not None:
        return q_prime > z, found
    m = min(band, q_prime.size)
    near = np.argpartition(np.abs(q_prime - z), m - 1)[:m]
    levels = np.unique(q_prime[near])
    for level in levels[np.argsort(np.abs(levels - z), kind="stable")]:
        on = q_prime >= level
        found = _kkt_point(q_prime, t, on)
        if found is not None:
            return on, found
    return None


def minimize_h(q_prime, t):
    """Minimize h on its bracket; returns the DualState at the minimizer."""
    q_prime = as_vector(q_prime)
    z_min, z_max = z_interval(q_prime, t)

    # Left slope at z_max is 1 - sqrt(t |S|); if it is >= 0, convexity pins z* there.
    if t * _max_set(q_prime).sum() >= 1.0:
        return DualState(z_min, z_max, z_max, z_max, 0)

    h = _h_evaluator(q_prime, t)
    z, h_z, evals = golden_section(
        h, z_min, z_max, EPS_Z, MAX_GOLDEN_ITER, on_raise_lower=h.drop_below
    )
    refined = _refine_support(q_prime, t, z)
    if refined is None:
        return DualState(z_min, z_max, z, h_z, evals)
    support, (_, z_exact) = refined
    # z_exact can sit a hair below the last bracket, so use every entry here.
    return DualState(z_min, z_max, z_exact, dual_h(z_exact, q_prime, t), evals + 1, True, support)


def reconstruct_primal(state, q_prime, t):
    q_prime = as_vector(q_prime)
    if state.support is not None:
        found = _kkt_point(q_prime, t, state.support)
        if found is not None:
            return found[0]
    v = water_level(q_prime, state.z_star)
    norm = np.linalg.norm(v)
    if norm <= EPS_V:
        on_top = _max_set(q_prime)
        size = int(on_top.sum())
        if 1.0 / size > t + EPS_FEAS:
            raise InternalKKTViolation(
                f"max-set of size {size} has purity {1.0 / size} above t={t}"
            )
        p = on_top / size
    else:
        p = np.sqrt(t) * v / norm
    if not (
        p.min() >= -10 * EPS_FEAS
        and abs(p.sum() - 1.0) <= 10 * EPS_FEAS
        and p @ p <= t + 10 * EPS_FEAS
    ):
        raise InternalKKTViolation(
            f"rebuilt point infeasible: sum={p.sum()!r}, purity={p @ p!r}, t={t!r}"
        )
    return p


def blend_to_purity(p, index, t):
    """Move p toward the vertex e(index) until its purity is exactly t.

    a(d) = |(1-d) p + d e|^2 - t is a quadratic with a(0) < 0 <= a(1); the
    positive root is taken in closed form, with bisection if it misbehaves.
    """
    e = np.zeros_like(p)
    e[index] = 1.0
    diff = e - p
    a = float(diff @ diff)
    b = 2.0 * float(p @ diff)
    c = float(p @ p) - t
    disc = b * b - 4.0 * a * c
    delta = None
    if a > 0.0 and disc >= 0.0:
        root = np.sqrt(disc)
        # c < 0 puts the roots on either side of zero; pick the cancellation-free form.
        delta = (-b + root) / (2.0 * a) if b < 0.0 else 2.0 * c / (-b - root)
    if delta is None or not 0.0 <= delta <= 1.0:
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            pm = p + mid * diff
            if pm @ pm < t:
                lo = mid
            else:
                hi = mid
        delta = 0.5 * (lo + hi)
    return p + delta * diff, float(delta)


def solve_dual(q, t, exact_purity=False):
    q_prime, _ = normalize_objective(q)
    n = q_prime.size
    t = clamp_t(n, t)
    regime = classify_regime(n, t, q_prime)
    q = np.asarray(q, dtype=float)
    stats = {"evaluations": 0}

    if t >= 1.0:
        p = argmax_vertex(q_prime)
        value = float(q.max())
    elif t < 1.0 / n:
        raise InfeasibleError(t, 1.0 / n)
    elif t == 1.0 / n or is_uniform(q_prime):
        p = np.full(n, 1.0 / n)
        value = float(q.mean())
    else:
        # Work on a well-scaled copy; z values in stats refer to that frame.
        q_std, centre, scale = standardize_objective(q)
        state = minimize_h(q_std, t)
        # The KKT form is affine invariant, so a certified support is rebuilt
        # from the raw entries, which carry the most digits within the support.
        found = _kkt_point(q, t, state.support) if state.refined else None
        if found is not None:
            p = found[0]
            value = float(p @ q)
        else:
            p = reconstruct_primal(state, q_std, t)
            value = centre + scale * (state.h_star - 1.0 / n)
        stats.update(
            evaluations=state.evaluations,
            z_min=state.z_min,
            z_max=state.z_max,
            z_star=state.z_star,
            refined=state.refined,
            frame=(centre, scale),
        )

    if exact_purity and p @ p < t - EPS_FEAS:
        p, stats["blend"] = blend_to_purity(p, int(np.argmax(q)), t)
    return SolveResult(p, float(value), regime, stats)
