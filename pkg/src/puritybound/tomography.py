"""State estimation from measurement frequencies with an optional purity bound."""

import itertools
from dataclasses import dataclass

import numpy as np

from ._scalar import golden_section
from .dual import solve_dual
from .errors import DimensionMismatchError, InfeasibleError, SingularBasisError
from .operators import eigendecompose, from_spectrum, hermitian, purity
from .simplex import EPS_FEAS, clamp_t

GRAM_COND_MAX = 1e12
EPS_K = 1e-10
GRID_POINTS = 64

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def frobenius_gram(elements):
    flat = np.array([np.asarray(e, dtype=complex).reshape(-1) for e in elements])
    return flat.conj() @ flat.T


def dual_basis(elements):
    """Operators D_i with Tr(D_i^dagger E_j) = delta_ij."""
    elements = [np.asarray(e, dtype=complex) for e in elements]
    d = elements[0].shape[0]
    if len(elements) != d * d:
        raise DimensionMismatchError(f"need {d * d} basis elements, got {len(elements)}")
    gram = frobenius_gram(elements)
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > GRAM_COND_MAX:
        raise SingularBasisError(f"basis Gram matrix has condition number {cond:.3g}")
    coeffs = np.linalg.inv(gram).conj()
    stacked = np.array(elements)
    return list(np.einsum("ik,kab->iab", coeffs, stacked))


@dataclass
class MeasurementBasis:
    elements: list
    duals: list

    @classmethod
    def from_elements(cls, elements):
        elements = [hermitian(e) for e in elements]
        return cls(elements, dual_basis(elements))

    @property
    def d(self):
        return self.elements[0].shape[0]


def pauli_basis(n_qubits=1):
    """Orthonormal Pauli-product basis, each string scaled by 2^(-n/2)."""
    scale = 2.0 ** (-n_qubits / 2)
    elements = []
    for combo in itertools.product(PAULIS, repeat=n_qubits):
        op = np.array([[1.0 + 0j]])
        for p in combo:
            op = np.kron(op, p)
        elements.append(scale * op)
    return MeasurementBasis(elements, [e.copy() for e in elements])


def linear_inversion(freqs, basis):
    """Unconstrained estimate sum_i f_i D_i; may have negative eigenvalues."""
    freqs = np.asarray(freqs, dtype=float)
    if freqs.shape != (len(basis.duals),):
        raise DimensionMismatchError(
            f"{freqs.size} frequencies for a basis of {len(basis.duals)} elements"
        )
    est = np.einsum("i,iab->ab", freqs, np.array(basis.duals))
    return 0.5 * (est + est.conj().T)


@dataclass
class Estimate:
    rho: np.ndarray
    distance: float
    purity: float
    k: float = float("nan")


def _best_at_purity(q, k):
    """Closest probability vector to q with purity exactly k, and its squared distance."""
    res = solve_dual(q, k, exact_purity=True)
    p = res.optimizer
    return p, float(k + q @ q - 2.0 * (p @ q))


def nearest_vector(q, t):
    """Minimize ||p - q||^2 over p in the bounded-purity simplex.

    The inner problem at fixed purity k is a linear maximization solved by
    the dual solver; the outer one-dimensional problem over k in [1/n, t] is
    scanned on a grid and refined by golden section around the best point.
    """
    q = np.asarray(q, dtype=float)
    n = q.size
    t = clamp_t(n, t)
    if t < 1.0 / n:
        raise InfeasibleError(t, 1.0 / n)
    hi = min(t, 1.0)
    lo = 1.0 / n
    if hi <= lo:
        p = np.full(n, 1.0 / n)
        return p, float((p - q) @ (p - q)), lo

    def dist(k):
        return _best_at_purity(q, k)[1]

    grid = np.linspace(lo, hi, GRID_POINTS)
    values = np.array([dist(k) for k in grid])
    j = int(np.argmin(values))
    a, b = grid[max(j - 1, 0)], grid[min(j + 1, GRID_POINTS - 1)]
    k_ref, _, _ = golden_section(dist, a, b, EPS_K)
    candidates = [k_ref, grid[j], lo, hi]
    k_best = min(candidates, key=dist)
    p, d2 = _best_at_purity(q, k_best)
    return p, d2, float(k_best)


def mle_purity_leq(h, t):
    """Frobenius-nearest density operator to ``h`` with purity at most t."""
    eig = eigendecompose(h)
    p, d2, k = nearest_vector(eig.values, t)
    rho = from_spectrum(eig.vectors, p)
    return Estimate(rho, float(np.sqrt(max(d2, 0.0))), purity(rho), k)


def mle_purity_eq(h, t):
    """Frobenius-nearest density operator to ``h`` with purity exactly t.

    On the purity-t surface ||rho - h||^2 = t + Tr(h^2) - 2 Tr(rho h), so the
    maximizer of Tr(rho h) at exact purity t is the answer.
    """
    eig = eigendecompose(h)
    d = eig.values.size
    t = clamp_t(d, t)
    if not 1.0 / d <= t <= 1.0:
        raise InfeasibleError(t, 1.0 / d)
    p = solve_dual(eig.values, t, exact_purity=True).optimizer
    rho = from_spectrum(eig.vectors, p)
    diff = rho - hermitian(h)
    dist = float(np.sqrt(max(np.real(np.trace(diff @ diff)), 0.0)))
    return Estimate(rho, dist, purity(rho), t)


def mle_plain(h):
    return mle_purity_leq(h, 1.0)


def is_density(rho, t=1.0):
    rho = np.asarray(rho)
    values = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return bool(
        values.min() >= -EPS_FEAS
        and abs(values.sum() - 1.0) <= EPS_FEAS
        and values @ values <= t + EPS_FEAS
    )
