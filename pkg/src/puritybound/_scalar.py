"""Derivative-free minimization of a unimodal scalar function."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, rel_tol=1e-12, max_iter=200, on_raise_lower=None):
    """Shrink [lo, hi] around the minimizer of a unimodal ``f``.

    Stops once the bracket width falls below ``rel_tol * (1 + initial width)``
    or after ``max_iter`` steps. Returns ``(x, f(x), evaluations)`` at the
    midpoint of the final bracket. ``on_raise_lower(a)``, if given, is called
    whenever the lower end moves up to ``a``; no later evaluation point lies
    below it.
    """
    a, b = float(lo), float(hi)
    tol = rel_tol * (1.0 + (b - a))
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            if on_raise_lower is not None:
                on_raise_lower(a)
            d = a + INV_PHI * (b - a)
            fd = f(d)
        evals += 1
    x = 0.5 * (a + b)
    return x, f(x), evals + 1
