"""Bounded-purity expectation values of Hermitian observables.

Maximizing Tr(rho H) over density operators with Tr(rho^2) <= t only depends
on the spectrum of H: in the eigenbasis of H, pinching any optimizer to its
diagonal keeps the value and does not raise the purity. The matrix problem is
therefore the vector problem on the eigenvalues, and the optimizer is
U diag(p*) U^dagger.
"""

from typing import NamedTuple

import numpy as np

from .dual import solve_dual
from .errors import InfeasibleError, NonHermitianError, NotPureTargetError
from .recursive import solve_recursive
from .simplex import EPS_FEAS, clamp_t, oracle_solve

SOLVERS = {
    "dual": solve_dual,
    "recursive": solve_recursive,
    "oracle": oracle_solve,
}


def herm_tol(d):
    return 1e-8 * d


class EigenSystem(NamedTuple):
    vectors: np.ndarray
    values: np.ndarray


def solve_vector(q, t, solver="dual", exact_purity=False):
    if solver == "dual":
        return solve_dual(q, t, exact_purity=exact_purity)
    try:
        fn = SOLVERS[solver]
    except KeyError:
        raise ValueError(f"unknown solver {solver!r}; pick one of {sorted(SOLVERS)}")
    return fn(q, t)


def hermitian(matrix):
    """Validate near-Hermiticity and return the symmetrized matrix."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NonHermitianError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonHermitianError("matrix has non-finite entries")
    d = m.shape[0]
    if np.max(np.abs(m - m.conj().T), initial=0.0) > herm_tol(d):
        raise NonHermitianError("matrix is not Hermitian within tolerance")
    return 0.5 * (m + m.conj().T)


def eigendecompose(h):
    """Eigenvalues in descending order with matching eigenvector columns."""
    h = hermitian(h)
    values, vectors = np.linalg.eigh(h)
    return EigenSystem(vectors[:, ::-1], values[::-1])


def from_spectrum(vectors, weights):
    return (vectors * weights) @ vectors.conj().T


def max_expectation(h, t, solver="dual", exact_purity=False):
    """Largest Tr(rho h) over density operators of purity at most t.

    Returns ``(value, rho_star)``.
    """
    eig = eigendecompose(h)
    d = eig.values.size
    if clamp_t(d, t) < 1.0 / d:
        raise InfeasibleError(t, 1.0 / d)
    res = solve_vector(eig.values, t, solver, exact_purity)
    rho = from_spectrum(eig.vectors, res.optimizer)
    return res.optimum, rho


def min_energy(h, t, solver="dual", exact_purity=False):
    value, rho = max_expectation(-hermitian(h), t, solver, exact_purity)
    return -value, rho


def as_projector(psi):
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim == 1:
        psi = psi / np.linalg.norm(psi)
        return np.outer(psi, psi.conj())
    return hermitian(psi)


def check_pure(proj):
    values = np.linalg.eigvalsh(proj)
    if values.size > 1 and values[-2] > EPS_FEAS or abs(values[-1] - 1.0) > EPS_FEAS:
        raise NotPureTargetError("target is not a rank-one projector")


def max_fidelity_pure(psi, t, solver="dual"):
    """Best fidelity with a pure target over states of purity at most t.

    ``psi`` may be a state vector or its projector.
    """
    proj = as_projector(psi)
    check_pure(proj)
    value, _ = max_expectation(proj, t, solver)
    return value


def purity(rho):
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))
