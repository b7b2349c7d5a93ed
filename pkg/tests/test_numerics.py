import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ripkit.errors import InvalidDimensions, NonFiniteInput, RankDeficient, ZeroVector
from ripkit.numerics import (
    angle_between,
    least_squares,
    matvec,
    orthogonal_projector,
    singular_values,
)


class TestMatvec:
    def test_identity(self):
        assert np.array_equal(matvec(np.eye(3), [1.0, 2.0, 3.0]), [1.0, 2.0, 3.0])

    def test_zero_matrix(self):
        assert np.array_equal(matvec(np.zeros((2, 2)), [5.0, -7.0]), [0.0, 0.0])

    def test_hand_example(self):
        assert np.array_equal(matvec([[1.0, 2.0], [3.0, 4.0]], [1.0, 1.0]), [3.0, 7.0])

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidDimensions):
            matvec(np.eye(3), [1.0, 2.0])

    def test_rejects_nan(self):
        with pytest.raises(NonFiniteInput):
            matvec([[np.nan, 0.0], [0.0, 1.0]], [1.0, 1.0])


class TestLeastSquares:
    def test_identity(self):
        b = np.array([3.0, -1.0, 2.0])
        assert np.allclose(least_squares(np.eye(3), b), b, atol=1e-14)

    def test_single_column(self):
        x = least_squares(np.array([[1.0], [0.0]]), [3.0, 4.0])
        assert np.allclose(x, [3.0], atol=1e-14)

    def test_overdetermined_against_normal_equations(self):
        a = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        b = np.array([1.0, 1.0, 0.0])
        # Independent oracle: solve the 2x2 normal equations directly.
        expected = np.linalg.solve(a.T @ a, a.T @ b)
        assert np.allclose(expected, [1.0 / 3.0, 1.0 / 3.0], atol=1e-15)
        assert np.allclose(least_squares(a, b), expected, atol=1e-12)

    def test_rank_deficient(self):
        a = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
        with pytest.raises(RankDeficient):
            least_squares(a, [1.0, 2.0, 3.0])

    def test_underdetermined_rejected(self):
        with pytest.raises(InvalidDimensions):
            least_squares(np.ones((2, 3)), [1.0, 2.0])

    @pytest.mark.parametrize("seed", range(100))
    def test_residual_orthogonality(self, seed):
        rng = np.random.default_rng(seed)
        rows = int(rng.integers(3, 13))
        cols = int(rng.integers(1, rows + 1))
        a = rng.standard_normal((rows, cols))
        b = rng.standard_normal(rows)
        x = least_squares(a, b)
        resid = a @ x - b
        bound = 1e-9 * np.linalg.norm(a, 2) * np.linalg.norm(b)
        assert np.linalg.norm(a.T @ resid) <= bound


class TestSingularValues:
    def test_identity(self):
        assert np.allclose(singular_values(np.eye(4)), np.ones(4), atol=1e-14)

    def test_diagonal(self):
        assert np.allclose(singular_values(np.diag([2.0, 1.0])), [2.0, 1.0], atol=1e-14)

    def test_canonical_pair(self, canonical):
        # Columns 0 and 2 have Gram eigenvalues 1 +/- 1/sqrt(2).
        sub = canonical.matrix[:, [0, 2]]
        expected = np.sqrt([1.0 + 1.0 / np.sqrt(2.0), 1.0 - 1.0 / np.sqrt(2.0)])
        assert np.allclose(singular_values(sub), expected, atol=1e-14)

    @pytest.mark.parametrize("seed", range(25))
    def test_squares_match_gram_eigenvalues(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((int(rng.integers(2, 9)), int(rng.integers(2, 9))))
        sv = singular_values(a)
        eig = np.sort(np.linalg.eigvalsh(a.T @ a))[::-1][: len(sv)]
        assert np.allclose(sv**2, np.clip(eig, 0.0, None), rtol=1e-10, atol=1e-12)

    @pytest.mark.parametrize("seed", range(25))
    def test_transpose_invariance(self, seed):
        rng = np.random.default_rng(100 + seed)
        a = rng.standard_normal((int(rng.integers(2, 9)), int(rng.integers(2, 9))))
        s1 = singular_values(a)
        s2 = singular_values(a.T)
        keep = min(len(s1), len(s2))
        assert np.allclose(s1[:keep], s2[:keep], rtol=1e-10, atol=1e-12)


class TestOrthogonalProjector:
    def test_standard_axis(self):
        p = orthogonal_projector(np.array([[1.0], [0.0], [0.0]]))
        assert np.allclose(p, np.diag([1.0, 0.0, 0.0]), atol=1e-14)

    def test_identity(self):
        assert np.allclose(orthogonal_projector(np.eye(3)), np.eye(3), atol=1e-12)

    def test_ones_column(self):
        p = orthogonal_projector(np.array([[1.0], [1.0]]))
        assert np.allclose(p, [[0.5, 0.5], [0.5, 0.5]], atol=1e-14)

    def test_zero_columns_projects_to_nothing(self):
        assert np.array_equal(orthogonal_projector(np.empty((3, 0))), np.zeros((3, 3)))

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            orthogonal_projector(np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]))

    @pytest.mark.parametrize("seed", range(200))
    def test_idempotent_symmetric_fixes_columns(self, seed):
        rng = np.random.default_rng(seed)
        rows = int(rng.integers(2, 10))
        cols = int(rng.integers(1, rows + 1))
        a = rng.standard_normal((rows, cols))
        p = orthogonal_projector(a)
        assert np.allclose(p, p.T, atol=1e-10)
        assert np.allclose(p @ p, p, atol=1e-10)
        assert np.allclose(p @ a, a, atol=1e-10)


class TestAngleBetween:
    def test_orthogonal(self):
        assert angle_between([1.0, 0.0], [0.0, 1.0]) == pytest.approx(np.pi / 2, abs=1e-15)

    def test_parallel(self):
        assert angle_between([2.0, 1.0], [2.0, 1.0]) == pytest.approx(0.0, abs=1e-7)

    def test_quarter_turn(self):
        assert angle_between([1.0, 0.0], [1.0, 1.0]) == pytest.approx(np.pi / 4, abs=1e-14)

    def test_zero_vector(self):
        with pytest.raises(ZeroVector):
            angle_between([0.0, 0.0], [1.0, 0.0])

    def test_antiparallel_clamps(self):
        assert angle_between([1.0, 1e-8], [-1.0, -1e-8]) == pytest.approx(np.pi, abs=1e-7)

    @settings(max_examples=100, deadline=None)
    @given(
        alpha=st.floats(min_value=1e-3, max_value=1e3),
        beta=st.floats(min_value=1e-3, max_value=1e3),
        seed=st.integers(min_value=0, max_value=999),
    )
    def test_scale_invariant_and_symmetric(self, alpha, beta, seed):
        rng = np.random.default_rng(seed)
        u = rng.standard_normal(5)
        v = rng.standard_normal(5)
        base = angle_between(u, v)
        assert abs(angle_between(alpha * u, beta * v) - base) <= 1e-12
        assert abs(angle_between(v, u) - base) <= 1e-12
