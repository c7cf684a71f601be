import numpy as np
import pytest

from puritybound.errors import DimensionMismatchError, InfeasibleError, SingularBasisError
from puritybound.operators import purity
from puritybound.tomography import (
    MeasurementBasis,
    dual_basis,
    is_density,
    linear_inversion,
    mle_plain,
    mle_purity_eq,
    mle_purity_leq,
    nearest_vector,
    pauli_basis,
)


def frob(a, b):
    return np.trace(np.asarray(a).conj().T @ np.asarray(b))


def random_hermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


class TestDualBasis:
    def test_pauli_is_self_dual(self):
        basis = pauli_basis(1)
        duals = dual_basis(basis.elements)
        for e, dual in zip(basis.elements, duals):
            assert np.allclose(e, dual)

    def test_diagonal_projectors_in_diagonal_subspace(self):
        # Restricted to diagonal 2x2 operators, the two projectors form an
        # orthonormal basis of a 2-dim space; check via the vectorized Gram.
        p0, p1 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
        gram = np.array([[frob(a, b) for b in (p0, p1)] for a in (p0, p1)])
        assert np.allclose(gram, np.eye(2))

    def test_random_basis_biorthogonal(self, rng):
        for d in (2, 3):
            elements = [random_hermitian(rng, d) for _ in range(d * d)]
            basis = MeasurementBasis.from_elements(elements)
            gram = np.array([[frob(di, ej) for ej in basis.elements] for di in basis.duals])
            assert np.abs(gram - np.eye(d * d)).max() <= 1e-10

    def test_singular(self):
        x = np.array([[0, 1], [1, 0]])
        with pytest.raises(SingularBasisError):
            dual_basis([np.eye(2), x, x, np.diag([1, -1])])

    def test_wrong_count(self):
        with pytest.raises(DimensionMismatchError):
            dual_basis([np.eye(2)])

    def test_two_qubit_pauli(self):
        basis = pauli_basis(2)
        gram = np.array([[frob(a, b) for b in basis.elements] for a in basis.elements])
        assert np.allclose(gram, np.eye(16))


class TestLinearInversion:
    def test_pure_zero(self):
        f = [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)]
        assert np.allclose(linear_inversion(f, pauli_basis(1)), np.diag([1.0, 0.0]))

    def test_consistent_data(self):
        basis = pauli_basis(1)
        rho = np.eye(2) / 2
        f = [frob(e, rho).real for e in basis.elements]
        assert np.allclose(linear_inversion(f, basis), rho)

    def test_perturbed_data_gives_negative_eigenvalue(self):
        basis = pauli_basis(1)
        target = np.diag([1.2, -0.2])
        f = [frob(e, target).real for e in basis.elements]
        est = linear_inversion(f, basis)
        assert np.allclose(est, target)
        assert np.linalg.eigvalsh(est).min() < 0

    def test_general_basis_round_trip(self, rng):
        elements = [random_hermitian(rng, 3) for _ in range(9)]
        basis = MeasurementBasis.from_elements(elements)
        rho = random_hermitian(rng, 3)
        f = [frob(e, rho).real for e in basis.elements]
        assert np.allclose(linear_inversion(f, basis), rho, atol=1e-10)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            linear_inversion([1.0, 0.0], pauli_basis(1))


class TestMlePurityLeq:
    def test_already_feasible(self):
        rho = np.diag([0.6, 0.4])
        est = mle_purity_leq(rho, 0.6)
        assert np.allclose(est.rho, rho, atol=1e-9)
        assert est.distance == pytest.approx(0.0, abs=1e-6)

    def test_full_purity_projection(self):
        est = mle_purity_leq(np.diag([1.2, -0.2]), 1.0)
        assert np.allclose(est.rho, np.diag([1.0, 0.0]), atol=1e-8)
        assert est.distance**2 == pytest.approx(0.08, abs=1e-9)

    def test_purity_bound_binds(self):
        est = mle_purity_leq(np.diag([1.2, -0.2]), 0.58)
        assert np.allclose(est.rho, np.diag([0.7, 0.3]), atol=1e-8)
        assert est.purity == pytest.approx(0.58, abs=1e-9)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            mle_purity_leq(np.eye(3), 0.2)

    def test_distance_matches_trace_formula(self, rng):
        for _ in range(30):
            d = int(rng.integers(2, 5))
            h = random_hermitian(rng, d) * 0.3 + np.eye(d) / d
            t = float(rng.uniform(1.0 / d, 1.0))
            est = mle_purity_leq(h, t)
            diff = est.rho - h
            assert est.distance**2 == pytest.approx(np.trace(diff @ diff).real, abs=1e-9)
            assert est.purity <= t + 1e-9
            assert is_density(est.rho, t)

    def test_distance_nonincreasing_in_t(self, rng):
        for _ in range(10):
            d = int(rng.integers(2, 5))
            h = random_hermitian(rng, d) * 0.4 + np.eye(d) / d
            ts = np.linspace(1.0 / d, 1.0, 15)
            dists = [mle_purity_leq(h, t).distance for t in ts]
            assert all(b <= a + 1e-9 for a, b in zip(dists, dists[1:]))

    @pytest.mark.slow
    def test_outer_scan_matches_dense_grid(self, rng):
        from puritybound.tomography import _best_at_purity

        for _ in range(100):
            d = int(rng.integers(2, 9))
            q = rng.normal(size=d) * 0.5 + 1.0 / d
            t = float(rng.uniform(1.0 / d, 1.0))
            _, d2, _ = nearest_vector(q, t)
            grid = np.linspace(1.0 / d, t, 1000)
            best = min(_best_at_purity(q, k)[1] for k in grid)
            assert d2 <= best + 1e-6
            assert d2 >= best - 1e-6

    def test_matches_plain_mle_at_full_purity(self, rng):
        for _ in range(20):
            h = random_hermitian(rng, 3)
            a = mle_purity_leq(h, 1.0).rho
            b = mle_plain(h).rho
            assert np.linalg.norm(a - b) <= 1e-9


class TestMlePurityEq:
    def test_pure_target_full_purity(self):
        est = mle_purity_eq(np.diag([1.0, 0.0]), 1.0)
        assert np.allclose(est.rho, np.diag([1.0, 0.0]), atol=1e-12)

    def test_forced_mixed(self):
        est = mle_purity_eq(np.diag([1.0, 0.0]), 0.5)
        assert np.allclose(est.rho, np.eye(2) / 2, atol=1e-12)

    def test_two_level_closed_form(self):
        est = mle_purity_eq(np.diag([0.9, 0.1]), 0.68)
        assert np.allclose(est.rho, np.diag([0.8, 0.2]), atol=1e-9)

    def test_purity_exact(self, rng):
        for _ in range(50):
            d = int(rng.integers(2, 6))
            t = float(rng.uniform(1.0 / d, 1.0))
            est = mle_purity_eq(random_hermitian(rng, d), t)
            assert purity(est.rho) == pytest.approx(t, abs=1e-9)

    def test_outside_range(self):
        with pytest.raises(InfeasibleError):
            mle_purity_eq(np.eye(2), 0.3)


class TestMlePlain:
    def test_density_unchanged(self):
        rho = np.array([[0.7, 0.2j], [-0.2j, 0.3]])
        assert np.allclose(mle_plain(rho).rho, rho, atol=1e-8)

    def test_projection(self):
        assert np.allclose(mle_plain(np.diag([1.2, -0.2])).rho, np.diag([1.0, 0.0]), atol=1e-8)

    def test_trace_shift(self):
        assert np.allclose(mle_plain(np.diag([0.6, 0.6])).rho, np.eye(2) / 2, atol=1e-8)
