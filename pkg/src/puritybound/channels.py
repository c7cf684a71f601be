"""Quantum channels: Kraus and Choi forms, dual maps, and purity-limited
entanglement passing.

Choi convention: J = (I (x) N)(phi) with the normalized maximally entangled
state phi, reference system first, so J has unit trace and
J[(i, a), (j, b)] = N(|i><j|)[a, b] / d_in.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InfeasibleError,
    NotTracePreservingError,
    OutOfWindowError,
    ValidationError,
)
from .operators import as_projector, check_pure, herm_tol, hermitian, max_expectation
from .simplex import EPS_NUM, clamp_t


def choi_from_kraus(kraus, check_tp=True):
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    d_out, d_in = kraus[0].shape
    if check_tp:
        _check_kraus_tp(kraus)
    vecs = np.array([k.T.reshape(-1) for k in kraus])
    return vecs.T @ vecs.conj() / d_in


def _check_kraus_tp(kraus):
    d_in = kraus[0].shape[1]
    total = sum(k.conj().T @ k for k in kraus)
    if np.max(np.abs(total - np.eye(d_in))) > herm_tol(d_in):
        raise NotTracePreservingError("sum of K^dagger K differs from the identity")


def _choi_blocks(choi, d_in, d_out):
    return np.asarray(choi).reshape(d_in, d_out, d_in, d_out)


@dataclass
class Channel:
    """A channel from d_in to d_out dimensions, given by Kraus operators,
    a Choi matrix, or both."""

    d_in: int
    d_out: int
    kraus: Optional[Sequence[np.ndarray]] = None
    choi: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kraus is None and self.choi is None:
            raise ValidationError("a channel needs Kraus operators or a Choi matrix")
        if self.kraus is not None:
            self.kraus = [np.asarray(k, dtype=complex) for k in self.kraus]
            for k in self.kraus:
                if k.shape != (self.d_out, self.d_in):
                    raise DimensionMismatchError(
                        f"Kraus operator of shape {k.shape}, expected {(self.d_out, self.d_in)}"
                    )
            _check_kraus_tp(self.kraus)
        if self.choi is not None:
            size = self.d_in * self.d_out
            choi = np.asarray(self.choi, dtype=complex)
            if choi.shape != (size, size):
                raise DimensionMismatchError(f"Choi matrix must be {size}x{size}")
            self.choi = hermitian(choi)
            reduced = np.einsum("iaja->ij", _choi_blocks(self.choi, self.d_in, self.d_out))
            if np.max(np.abs(reduced - np.eye(self.d_in) / self.d_in)) > herm_tol(self.d_in):
                raise NotTracePreservingError("Choi partial trace over output is not I/d_in")

    @classmethod
    def from_kraus(cls, kraus):
        kraus = [np.asarray(k, dtype=complex) for k in kraus]
        d_out, d_in = kraus[0].shape
        return cls(d_in, d_out, kraus=kraus)

    @classmethod
    def from_choi(cls, choi, d_in, d_out):
        return cls(d_in, d_out, choi=choi)

    def choi_matrix(self):
        if self.choi is not None:
            return self.choi
        return choi_from_kraus(self.kraus)

    def apply(self, a):
        a = np.asarray(a, dtype=complex)
        if a.shape != (self.d_in, self.d_in):
            raise DimensionMismatchError(f"input must be {self.d_in}x{self.d_in}")
        if self.kraus is not None:
            return sum(k @ a @ k.conj().T for k in self.kraus)
        blocks = _choi_blocks(self.choi, self.d_in, self.d_out)
        return self.d_in * np.einsum("ij,iajb->ab", a, blocks)

    def apply_dual(self, b):
        b = np.asarray(b, dtype=complex)
        if b.shape != (self.d_out, self.d_out):
            raise DimensionMismatchError(f"observable must be {self.d_out}x{self.d_out}")
        if self.kraus is not None:
            return sum(k.conj().T @ b @ k for k in self.kraus)
        blocks = _choi_blocks(self.choi, self.d_in, self.d_out)
        return self.d_in * np.einsum("ba,iajb->ij", b, blocks).T

    def dual_choi(self):
        """Choi matrix of the dual map, reference (output-sized) system first."""
        if self.kraus is not None:
            return choi_from_kraus([k.conj().T for k in self.kraus], check_tp=False)
        d = self.d_out
        out = np.zeros((d * self.d_in, d * self.d_in), dtype=complex)
        for i in range(d):
            for j in range(d):
                unit = np.zeros((d, d), dtype=complex)
                unit[i, j] = 1.0
                out[i * self.d_in:(i + 1) * self.d_in, j * self.d_in:(j + 1) * self.d_in] = (
                    self.apply_dual(unit)
                )
        return out / d


def swap_factors(m, d1, d2):
    """Reorder an operator on A (x) B to act on B (x) A."""
    return (
        np.asarray(m).reshape(d1, d2, d1, d2).transpose(1, 0, 3, 2).reshape(d1 * d2, d1 * d2)
    )


def tensor_choi(choi1, dims1, choi2, dims2):
    """Choi matrix of N1 (x) N2 ordered (r1 r2, b1 b2) from the factor Chois."""
    (i1, o1), (i2, o2) = dims1, dims2
    joint = np.kron(choi1, choi2).reshape(i1, o1, i2, o2, i1, o1, i2, o2)
    size = i1 * i2 * o1 * o2
    return joint.transpose(0, 2, 1, 3, 4, 6, 5, 7).reshape(size, size)


def tensor(ch1, ch2):
    if ch1.kraus is not None and ch2.kraus is not None:
        kraus = [np.kron(a, b) for a in ch1.kraus for b in ch2.kraus]
        return Channel(ch1.d_in * ch2.d_in, ch1.d_out * ch2.d_out, kraus=kraus)
    choi = tensor_choi(
        ch1.choi_matrix(), (ch1.d_in, ch1.d_out), ch2.choi_matrix(), (ch2.d_in, ch2.d_out)
    )
    return Channel(ch1.d_in * ch2.d_in, ch1.d_out * ch2.d_out, choi=choi)


def random_channel(d_in, d_out, n_kraus, rng):
    """Kraus operators cut from a Haar-ish random isometry."""
    if n_kraus * d_out < d_in:
        raise ValidationError("need n_kraus * d_out >= d_in for a trace-preserving channel")
    g = rng.normal(size=(n_kraus * d_out, d_in)) + 1j * rng.normal(size=(n_kraus * d_out, d_in))
    iso, _ = np.linalg.qr(g)
    return Channel.from_kraus([iso[k * d_out:(k + 1) * d_out] for k in range(n_kraus)])


class ExampleChannelKind(enum.Enum):
    IDENTITY = "identity"
    TRACE = "trace"
    ID_X_TRACE = "id-x-trace"


def identity_channel(d):
    return Channel.from_kraus([np.eye(d)])


def trace_channel(d):
    """N(rho) = Tr(rho) |0><0| with Kraus operators |0><i|."""
    kraus = []
    for i in range(d):
        k = np.zeros((d, d))
        k[0, i] = 1.0
        kraus.append(k)
    return Channel.from_kraus(kraus)


def example_channel(kind, d):
    kind = ExampleChannelKind(kind)
    if d < 2:
        raise ValidationError("example channels need d >= 2")
    if kind is ExampleChannelKind.IDENTITY:
        return identity_channel(d)
    if kind is ExampleChannelKind.TRACE:
        return trace_channel(d)
    return tensor(identity_channel(d), trace_channel(d))


def _example_window(kind, d):
    if ExampleChannelKind(kind) is ExampleChannelKind.ID_X_TRACE:
        return 1.0 / d**4, 1.0
    return 1.0 / d**2, 1.0


def closed_form_O_t(kind, d, t):
    """Entanglement-passing fidelity of the example channels, in closed form.

    For id-x-trace below t = 1/d the radicand is (t d^4 - 1)(d^3 - 1): this
    is what the ball-slice formula gives for the spectrum (1/d with
    multiplicity d, zero elsewhere), and it joins the 1/d branch continuously.
    """
    kind = ExampleChannelKind(kind)
    lo, hi = _example_window(kind, d)
    if not lo - EPS_NUM <= t <= hi + EPS_NUM:
        raise OutOfWindowError(f"t={t} outside [{lo}, {hi}] for {kind.value}")
    n2, n4 = d * d, d**4
    if kind is ExampleChannelKind.IDENTITY:
        return (1.0 + np.sqrt(max(t * n2 - 1.0, 0.0) * (n2 - 1.0))) / n2
    if t >= 1.0 / d:
        return 1.0 / d
    if kind is ExampleChannelKind.TRACE:
        return (1.0 + np.sqrt(max(t * n2 - 1.0, 0.0) * (d - 1.0))) / n2
    return (1.0 + np.sqrt(max(t * n4 - 1.0, 0.0) * (d**3 - 1.0))) / n4


def entanglement_fidelity_bounded_purity(channel, t, solver="dual"):
    """Best overlap with the maximally entangled state after sending half of
    a purity-limited input through ``channel``.

    Equals the maximum of Tr(rho J) over rho of purity at most t, where J is
    the unit-trace Choi matrix of the dual map.
    """
    if channel.d_in != channel.d_out:
        raise DimensionMismatchError("entanglement passing needs d_in == d_out")
    n = channel.d_in**2
    if clamp_t(n, t) < 1.0 / n:
        raise InfeasibleError(t, 1.0 / n)
    value, _ = max_expectation(channel.dual_choi(), t, solver)
    return value


def noisy_prep_fidelity(channel, psi):
    """Best fidelity with pure ``psi`` over outputs of ``channel``: lambda_max(N^dagger(psi))."""
    proj = as_projector(psi)
    check_pure(proj)
    if proj.shape[0] != channel.d_out:
        raise DimensionMismatchError("target lives on the wrong space")
    return float(np.linalg.eigvalsh(hermitian(channel.apply_dual(proj)))[-1])


def noisy_ground_energy(channel, h):
    """Least energy reachable at the channel output: lambda_min(N^dagger(H))."""
    h = hermitian(h)
    if h.shape[0] != channel.d_out:
        raise DimensionMismatchError("Hamiltonian lives on the wrong space")
    value = float(np.linalg.eigvalsh(hermitian(channel.apply_dual(h)))[0])
    floor = float(np.linalg.eigvalsh(h)[0])
    if value < floor - EPS_NUM * (1.0 + np.abs(h).max()):
        raise RuntimeError(f"noisy ground energy {value} below noiseless {floor}")
    return value


class GapResult(NamedTuple):
    joint: float
    product: float
    gap: float


def multiplicativity_gap(kind1, kind2, d, t, mode="same-t", solver="dual"):
    """Compare O_t of a joint channel use with the product of single uses.

    ``mode="same-t"`` uses O_t for each factor, ``mode="sqrt-t"`` uses
    O_sqrt(t). The joint value is computed numerically from the tensor-product
    channel; the gap is never negative beyond rounding.
    """
    if mode not in ("same-t", "sqrt-t"):
        raise ValidationError(f"unknown mode {mode!r}")
    ch1, ch2 = example_channel(kind1, d), example_channel(kind2, d)
    joint_ch = tensor(ch1, ch2)
    t_single = t if mode == "same-t" else float(np.sqrt(t))
    for ch, tt in ((joint_ch, t), (ch1, t_single), (ch2, t_single)):
        lo = 1.0 / ch.d_in**2
        if clamp_t(ch.d_in**2, tt) < lo:
            raise OutOfWindowError(f"t={tt} below 1/d^2={lo} for a {ch.d_in}-dim channel")
    joint = entanglement_fidelity_bounded_purity(joint_ch, t, solver)
    product = entanglement_fidelity_bounded_purity(
        ch1, t_single, solver
    ) * entanglement_fidelity_bounded_purity(ch2, t_single, solver)
    return GapResult(joint, product, joint - product)
