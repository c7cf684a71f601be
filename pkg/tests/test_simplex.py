import numpy as np
import pytest

from puritybound.errors import DimensionTooLargeError, InfeasibleError, UniformObjectiveError
from puritybound.simplex import (
    Regime,
    argmax_vertex,
    check_feasible,
    clamp_t,
    classify_regime,
    normalize_objective,
    oracle_solve,
    push_to_ball_boundary,
    push_to_simplex_face,
    solve_special,
)
from puritybound.dual import solve_dual


class TestNormalizeObjective:
    def test_shifts_to_unit_sum(self):
        qp, shift = normalize_objective([2.0, 0.0])
        np.testing.assert_allclose(qp, [1.5, -0.5])
        assert shift == pytest.approx(-0.5)

    def test_already_normalized(self):
        qp, shift = normalize_objective([0.3, 0.7])
        np.testing.assert_allclose(qp, [0.3, 0.7])
        assert shift == pytest.approx(0.0, abs=1e-15)

    def test_zero_vector_becomes_uniform(self):
        qp, shift = normalize_objective([0.0, 0.0, 0.0])
        np.testing.assert_allclose(qp, [1 / 3] * 3)
        assert shift == pytest.approx(1 / 3)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            normalize_objective([1.0, np.nan])


class TestClassifyRegime:
    @pytest.mark.parametrize(
        "n, t, q, expected",
        [
            (5, 0.1, np.arange(5.0), Regime.INFEASIBLE),
            (4, 0.25, np.arange(4.0), Regime.SINGLETON),
            (3, 0.4, [0.5, 0.3, 0.2], Regime.BALL_EQUALS_SIMPLEX_SLICE),
            (3, 1.0, [0.5, 0.3, 0.2], Regime.FULL_SIMPLEX),
            (2, 0.7, [0.5, 0.3], Regime.TWO_DIM),
            (3, 0.7, [5.0, 5.0, 5.0], Regime.UNIFORM_OBJECTIVE),
            (4, 0.7, [0.5, 0.3, 0.1, 0.1], Regime.GENERAL),
        ],
    )
    def test_examples(self, n, t, q, expected):
        assert classify_regime(n, t, np.asarray(q, dtype=float)) is expected

    def test_near_floor_is_clamped_to_singleton(self):
        assert classify_regime(4, 0.25 + 5e-10, np.arange(4.0)) is Regime.SINGLETON
        assert clamp_t(4, 0.25 - 5e-10) == 0.25

    def test_exactly_one_regime(self, rng):
        for _ in range(500):
            n = int(rng.integers(2, 10))
            t = float(rng.uniform(0.0, 1.2))
            assert isinstance(classify_regime(n, t, rng.normal(size=n)), Regime)


class TestPushToBallBoundary:
    def test_basis_vector(self):
        p = push_to_ball_boundary(np.array([1.0, 0, 0, 0]), 0.5)
        np.testing.assert_allclose(p, [0.683013, 0.105662, 0.105662, 0.105662], atol=1e-6)
        assert p[0] == pytest.approx((1 + np.sqrt(3)) / 4, abs=1e-12)

    def test_floor_gives_uniform(self):
        np.testing.assert_allclose(push_to_ball_boundary(np.array([1.0, 0.0]), 0.5), [0.5, 0.5])

    def test_lands_on_sphere(self):
        p = push_to_ball_boundary(np.array([0.75, 0.25, 0.0]), 0.4)
        assert p @ p == pytest.approx(0.4, abs=1e-10)
        assert p.sum() == pytest.approx(1.0, abs=1e-12)

    def test_random_points_on_sphere(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 30))
            q, _ = normalize_objective(rng.normal(size=n))
            t = float(rng.uniform(1.0 / n, 1.0))
            p = push_to_ball_boundary(q, t)
            assert abs(p @ p - t) <= 1e-10

    def test_uniform_raises(self):
        with pytest.raises(UniformObjectiveError):
            push_to_ball_boundary(np.full(3, 1 / 3), 0.5)


class TestPushToSimplexFace:
    def test_example(self):
        face = push_to_simplex_face(np.array([0.5, 0.3, 0.2]))
        np.testing.assert_allclose(face.q_bar, [0.75, 0.25, 0.0], atol=1e-12)
        assert face.index == 2
        assert face.q_bar.sum() == pytest.approx(1.0)

    def test_already_on_face(self):
        face = push_to_simplex_face(np.array([1.0, 0.0]))
        np.testing.assert_allclose(face.q_bar, [1.0, 0.0])
        assert face.index == 1

    def test_norm_identity(self):
        face = push_to_simplex_face(np.array([0.6, 0.25, 0.15]))
        assert face.norm_sq == pytest.approx(face.q_bar @ face.q_bar, abs=1e-10)

    def test_ties_pick_smallest_index(self):
        assert push_to_simplex_face(np.array([0.4, 0.2, 0.2, 0.2])).index == 1

    def test_uniform_raises(self):
        with pytest.raises(UniformObjectiveError):
            push_to_simplex_face(np.full(4, 0.25))


class TestSolveSpecial:
    def test_two_dim(self):
        res = solve_special(Regime.TWO_DIM, np.array([0.7, 0.3]), 0.68)
        np.testing.assert_allclose(res.optimizer, [0.8, 0.2], atol=1e-12)
        assert res.optimum == pytest.approx(0.62, abs=1e-12)

    def test_two_dim_tie_takes_plus_sign(self):
        res = solve_special(Regime.TWO_DIM, np.array([0.5, 0.5]), 0.68)
        np.testing.assert_allclose(res.optimizer, [0.8, 0.2], atol=1e-12)

    def test_full_simplex_vertex(self):
        res = solve_special(Regime.FULL_SIMPLEX, np.array([0.2, 0.5, 0.3]), 1.0)
        np.testing.assert_allclose(res.optimizer, [0, 1, 0])
        assert res.optimum == pytest.approx(0.5)

    def test_uniform(self):
        res = solve_special(Regime.UNIFORM_OBJECTIVE, np.full(3, 1 / 3), 0.5)
        np.testing.assert_allclose(res.optimizer, [1 / 3] * 3)
        assert res.optimum == pytest.approx(1 / 3)

    def test_general_is_not_special(self):
        assert solve_special(Regime.GENERAL, np.array([0.5, 0.3, 0.1, 0.1]), 0.7) is None

    def test_infeasible_carries_bound(self):
        with pytest.raises(InfeasibleError) as info:
            solve_special(Regime.INFEASIBLE, np.arange(5.0), 0.1)
        assert info.value.t == pytest.approx(0.1)
        assert info.value.lower == pytest.approx(0.2)

    def test_argmax_tie_smallest_index(self):
        np.testing.assert_array_equal(argmax_vertex(np.array([1.0, 3.0, 3.0])), [0, 1, 0])


class TestOracle:
    def test_basis_vector(self):
        res = oracle_solve(np.array([1.0, 0, 0, 0]), 0.5)
        assert res.optimum == pytest.approx((1 + np.sqrt(3)) / 4, abs=1e-12)

    def test_symmetric_full_simplex(self):
        res = oracle_solve(np.array([0.5, 0.5]), 1.0)
        assert res.optimum == pytest.approx(0.5)
        assert check_feasible(res.optimizer, 1.0)

    def test_matches_dual(self):
        q = np.array([0.9, 0.05, 0.05])
        assert oracle_solve(q, 0.6).optimum == pytest.approx(solve_dual(q, 0.6).optimum, abs=1e-9)

    def test_dominates_samples_and_is_feasible(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 9))
            q = rng.normal(size=n)
            t = float(rng.uniform(1.0 / n, 1.0))
            res = oracle_solve(q, t, seed=int(rng.integers(1 << 30)), samples=2000)
            assert res.stats["samples"] > 0
            assert check_feasible(res.optimizer, t)
            assert res.optimizer @ q == pytest.approx(res.optimum, abs=1e-10)

    def test_dimension_cap(self):
        with pytest.raises(DimensionTooLargeError):
            oracle_solve(np.zeros(4097), 0.5)

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            oracle_solve(np.arange(4.0), 0.1)


class TestCheckFeasible:
    def test_cases(self):
        assert check_feasible([0.5, 0.5], 0.5)
        assert not check_feasible([0.8, 0.2], 0.5)
        assert check_feasible([1.0, -1e-12], 1.0)
        assert not check_feasible([1.1, -0.1], 1.5)


def test_direction_bound(rng):
    """Unit directions inside the simplex plane have no entry below -sqrt((n-1)/n)."""
    for n in (2, 3, 5, 10, 50):
        d = rng.normal(size=(2000, n))
        d -= d.mean(axis=1, keepdims=True)
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        assert d.min() >= -np.sqrt((n - 1) / n) - 1e-12
