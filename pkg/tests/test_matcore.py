import numpy as np
import pytest

from spconvex import (
    DimensionError,
    DomainError,
    LOG,
    ParameterError,
    SQUARE,
    abs_matrix,
    as_selfadjoint,
    eigh,
    eigvalsh,
    hs_inner,
    matrix_function,
    power_abs,
    schatten_norm,
    selfadjoint_embed,
    singular_values,
)
from spconvex.channels import random_unitary
from conftest import ginibre, selfadjoint


class TestEigh:
    def test_already_diagonal(self):
        dec = eigh(np.diag([1.0, 2.0]).astype(complex))
        np.testing.assert_allclose(dec.eigenvalues, [1.0, 2.0])
        np.testing.assert_allclose(dec.projections[0], np.diag([1.0, 0.0]), atol=1e-14)
        np.testing.assert_allclose(dec.projections[1], np.diag([0.0, 1.0]), atol=1e-14)

    def test_swap_matrix(self):
        dec = eigh(np.array([[0, 1], [1, 0]], dtype=complex))
        np.testing.assert_allclose(dec.eigenvalues, [-1.0, 1.0], atol=1e-14)

    def test_random_residuals(self, rng):
        H = selfadjoint(rng, 5)
        dec = eigh(H)
        res = dec.residuals(H)
        assert res["completeness"] <= 1e-10
        assert res["orthogonality"] <= 1e-10
        assert res["selfadjointness"] <= 1e-10
        assert res["reconstruction"] <= 1e-10

    def test_clustering_merges_near_duplicates(self):
        H = np.diag([1.0, 1.0 + 1e-12, 2.0]).astype(complex)
        dec = eigh(H)
        assert len(dec.eigenvalues) == 2
        assert dec.multiplicities().tolist() == [2, 1]
        gaps = np.diff(dec.eigenvalues)
        assert np.all(gaps > dec.cluster_tolerance)

    def test_explicit_zero_tolerance_keeps_distinct(self):
        H = np.diag([1.0, 1.0 + 1e-12, 2.0]).astype(complex)
        dec = eigh(H, cluster_tolerance=0.0)
        assert len(dec.eigenvalues) == 3

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            eigh(np.zeros((2, 3)))

    def test_rejects_non_selfadjoint(self):
        with pytest.raises(ValueError):
            eigh(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_rejects_nan(self):
        M = np.eye(2, dtype=complex)
        M[0, 0] = np.nan
        with pytest.raises(ValueError):
            eigh(M)

    def test_negative_cluster_tolerance(self):
        with pytest.raises(ParameterError):
            eigh(np.eye(2, dtype=complex), cluster_tolerance=-1.0)


class TestMatrixFunction:
    def test_square_of_diagonal(self):
        out = matrix_function(SQUARE, np.diag([1.0, 3.0]).astype(complex))
        np.testing.assert_allclose(out, np.diag([1.0, 9.0]), atol=1e-14)

    def test_abs_matrix(self):
        out = abs_matrix(np.diag([-2.0, 2.0]).astype(complex))
        np.testing.assert_allclose(out, np.diag([2.0, 2.0]), atol=1e-12)

    def test_cayley_exponential_is_unitary(self, rng):
        H = selfadjoint(rng, 4)
        U = matrix_function(lambda x: np.exp(1j * x), H)
        np.testing.assert_allclose(U.conj().T @ U, np.eye(4), atol=1e-10)

    def test_commutes_with_argument(self, rng):
        H = selfadjoint(rng, 4)
        out = matrix_function(SQUARE, H)
        np.testing.assert_allclose(out @ H, H @ out, atol=1e-10)

    def test_composition(self, rng):
        # (|x|)^2 equals x^2 on self-adjoint input
        H = selfadjoint(rng, 4)
        via_abs = matrix_function(SQUARE, as_selfadjoint(abs_matrix(H)))
        direct = matrix_function(SQUARE, H)
        np.testing.assert_allclose(via_abs, direct, atol=1e-10)

    def test_domain_error_for_log(self):
        with pytest.raises(DomainError):
            matrix_function(LOG, np.diag([1.0, -1.0]).astype(complex))

    def test_power_abs_rejects_singular(self):
        with pytest.raises(DomainError):
            matrix_function(power_abs(1.5), np.diag([0.0, 1.0]).astype(complex))


class TestSchattenNorm:
    def test_frobenius_diagonal(self):
        assert schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5.0, abs=1e-12)

    def test_single_singular_value(self):
        # [[0,2],[0,0]] has the lone singular value 2
        M = np.array([[0, 2], [0, 0]], dtype=complex)
        assert schatten_norm(M, 1.5) == pytest.approx(2.0, abs=1e-10)
        np.testing.assert_allclose(singular_values(M), [0.0, 2.0], atol=1e-12)

    def test_identity_fractional(self):
        assert schatten_norm(np.eye(2), 1.5) == pytest.approx(2 ** (2 / 3), abs=1e-12)

    def test_zero_matrix(self):
        assert schatten_norm(np.zeros((3, 3)), 1.3) == 0.0

    def test_p_below_one_rejected(self):
        with pytest.raises(ParameterError):
            schatten_norm(np.eye(2), 0.9)

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
    def test_unitary_invariance(self, rng, p):
        M = ginibre(rng, 4)
        U = random_unitary(4, rng)
        V = random_unitary(4, rng)
        assert schatten_norm(U @ M @ V, p) == pytest.approx(schatten_norm(M, p), abs=1e-10)

    @pytest.mark.parametrize("p", [1.0, 1.4, 2.0, 2.7])
    def test_triangle_inequality(self, rng, p):
        for _ in range(20):
            A = ginibre(rng, 3)
            B = ginibre(rng, 3)
            assert schatten_norm(A + B, p) <= schatten_norm(A, p) + schatten_norm(B, p) + 1e-10


class TestHSInner:
    def test_identity(self):
        assert hs_inner(np.eye(2), np.eye(2)) == pytest.approx(2.0)

    def test_conjugate_symmetry(self, rng):
        A = ginibre(rng, 3)
        B = ginibre(rng, 3)
        assert hs_inner(A, B) == pytest.approx(np.conj(hs_inner(B, A)), abs=1e-12)

    def test_diagonal_example(self):
        assert hs_inner(np.diag([1.0, 2.0]), np.diag([3.0, 4.0])) == pytest.approx(11.0)

    def test_positive_on_diagonal_argument(self, rng):
        A = ginibre(rng, 3)
        val = hs_inner(A, A)
        assert val.imag == pytest.approx(0.0, abs=1e-12)
        assert val.real >= 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            hs_inner(np.eye(2), np.eye(3))


class TestEmbed:
    def test_scalar(self):
        a = 1.0 + 2.0j
        E = selfadjoint_embed(np.array([[a]]))
        np.testing.assert_allclose(E, [[0, a], [np.conj(a), 0]])
        np.testing.assert_allclose(eigvalsh(E), [-abs(a), abs(a)], atol=1e-12)

    def test_identity_eigenvalues(self):
        E = selfadjoint_embed(np.eye(2))
        np.testing.assert_allclose(eigvalsh(E), [-1, -1, 1, 1], atol=1e-12)

    @pytest.mark.parametrize("p", [1.2, 1.7, 2.5])
    def test_norm_doubling(self, rng, p):
        A = ginibre(rng, 3)
        lhs = schatten_norm(selfadjoint_embed(A), p) ** p
        rhs = 2.0 * schatten_norm(A, p) ** p
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_eigh_batch_invariants():
    # 200 seeded random self-adjoint matrices, dims 2..6
    for k in range(200):
        rng = np.random.default_rng(1000 + k)
        n = 2 + k % 5
        H = selfadjoint(rng, n)
        dec = eigh(H)
        res = dec.residuals(H)
        assert max(res.values()) <= 1e-10, (k, res)
