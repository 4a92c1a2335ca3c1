import numpy as np
import pytest

from condsvd import frobenius_norm, full_svd, hermitian_psd_eig, is_unitary, reconstruct
from condsvd.errors import ConvergenceError, InputError, NotHermitianError, NotPSDError
from condsvd.instances import random_general, random_unitary
from condsvd.matrix import RectDiagonal, embed
from condsvd.svd import SvdFactors


def _gram_error(u):
    return frobenius_norm(u @ u.conj().T - np.eye(u.shape[0]))


def _check_factors(a, f, tol):
    m, n = a.shape
    assert f.U.shape == (m, m) and f.V.shape == (n, n)
    scale = max(1.0, frobenius_norm(a))
    # oracle: explicit product, independent of reconstruct()
    assert frobenius_norm(a - f.U @ embed(f.sigma) @ f.V.conj().T) <= tol * scale
    assert _gram_error(f.U) <= tol
    assert _gram_error(f.V) <= tol
    s = f.sigma.diag
    assert np.all(s >= 0)
    assert np.all(np.diff(s) <= 0)


class TestFullSvd:
    def test_diagonal_input(self):
        f = full_svd(np.diag([3.0, 1.0]))
        np.testing.assert_array_equal(f.sigma.diag, [3, 1])
        np.testing.assert_allclose(f.U, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(f.V, np.eye(2), atol=1e-15)

    def test_permuted_diagonal(self):
        np.testing.assert_allclose(full_svd([[0, 2], [1, 0]]).sigma.diag, [2, 1], rtol=1e-15)

    def test_random_tall(self):
        a = random_general(20, 10, seed=1)
        f = full_svd(a)
        _check_factors(a, f, 1e-12)

    @pytest.mark.parametrize("shape", [(1, 1), (1, 7), (7, 1), (3, 5), (5, 3), (12, 12), (2, 30)])
    def test_shapes(self, shape):
        a = random_general(*shape, seed=sum(shape))
        _check_factors(a, full_svd(a), 1e-12)

    def test_matches_lapack_values(self):
        a = random_general(15, 9, seed=4)
        np.testing.assert_allclose(full_svd(a).sigma.diag, np.linalg.svd(a, compute_uv=False), rtol=1e-12)

    def test_rank_deficient_completes_null_space(self):
        g = random_general(9, 3, seed=5) @ random_general(3, 6, seed=6)
        f = full_svd(g)
        _check_factors(g, f, 1e-12)
        assert np.all(f.sigma.diag[3:] < 1e-13 * f.sigma.diag[0])

    def test_zero_matrix(self):
        f = full_svd(np.zeros((3, 2)))
        np.testing.assert_array_equal(f.sigma.diag, [0, 0])
        assert is_unitary(f.U, 1e-14) and is_unitary(f.V, 1e-14)

    def test_repeated_singular_values(self):
        u, v = random_unitary(6, 1), random_unitary(4, 2)
        a = u @ embed(RectDiagonal(6, 4, [2, 2, 1, 1])) @ v.conj().T
        f = full_svd(a)
        _check_factors(a, f, 1e-12)
        np.testing.assert_allclose(f.sigma.diag, [2, 2, 1, 1], rtol=1e-13)

    def test_phase_convention(self):
        for shape in [(6, 4), (4, 6)]:
            f = full_svd(random_general(*shape, seed=8))
            for col in f.U.T:
                z = col[np.argmax(np.abs(col))]
                assert abs(z.imag) < 1e-15 and z.real > 0

    def test_deterministic(self):
        a = random_general(7, 5, seed=2)
        f1, f2 = full_svd(a), full_svd(a)
        np.testing.assert_array_equal(f1.U, f2.U)
        np.testing.assert_array_equal(f1.V, f2.V)

    def test_scale_equivariance(self):
        a = random_general(8, 5, seed=3)
        s = full_svd(a).sigma.diag
        for c in (1e-3, 2.5, 1e4):
            np.testing.assert_allclose(full_svd(c * a).sigma.diag, c * s, rtol=1e-12)

    def test_cross_check_with_eig(self):
        a = random_general(10, 6, seed=12)
        s = full_svd(a).sigma.diag
        lam = hermitian_psd_eig(a.conj().T @ a).lam
        np.testing.assert_allclose(s, np.sqrt(lam), rtol=1e-8)

    @pytest.mark.parametrize("scale", [1e-200, 1e200])
    def test_extreme_scale(self, scale):
        a = scale * random_general(12, 7, seed=13)
        f = full_svd(a)
        assert frobenius_norm(a - reconstruct(f)) <= 1e-12 * frobenius_norm(a)
        np.testing.assert_allclose(f.sigma.diag / scale, full_svd(a / scale).sigma.diag, rtol=1e-13)

    def test_non_finite_rejected(self):
        a = np.ones((2, 2))
        a[0, 1] = np.inf
        with pytest.raises(InputError, match="non-finite"):
            full_svd(a)

    def test_sweep_cap(self):
        with pytest.raises(ConvergenceError):
            full_svd(random_general(10, 10, seed=1), max_sweeps=1)


class TestReconstruct:
    def test_identity(self):
        np.testing.assert_allclose(reconstruct(full_svd(np.eye(2))), np.eye(2), atol=1e-15)

    def test_zero_sigma(self):
        f = SvdFactors(random_unitary(3, 1), RectDiagonal(3, 2, [0, 0]), random_unitary(2, 2))
        np.testing.assert_array_equal(reconstruct(f), np.zeros((3, 2)))

    def test_round_trip(self):
        a = random_general(7, 5, seed=2)
        assert frobenius_norm(a - reconstruct(full_svd(a))) <= 1e-12 * frobenius_norm(a)

    def test_dim_mismatch(self):
        f = SvdFactors(np.eye(3), RectDiagonal(2, 2, [1, 1]), np.eye(2))
        with pytest.raises(InputError):
            reconstruct(f)


class TestHermitianPsdEig:
    def test_identity(self):
        e = hermitian_psd_eig(np.eye(3))
        np.testing.assert_array_equal(e.lam, [1, 1, 1])
        np.testing.assert_allclose(np.abs(e.U), np.eye(3), atol=1e-15)

    def test_two_by_two(self):
        e = hermitian_psd_eig(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(e.lam, [3, 1], rtol=1e-15)
        np.testing.assert_allclose(np.abs(e.U), np.full((2, 2), 1 / np.sqrt(2)), rtol=1e-14)

    def test_random_psd_reconstruction(self):
        g = random_general(6, 6, seed=3)
        a = g @ g.conj().T
        e = hermitian_psd_eig(a)
        assert frobenius_norm(a - (e.U * e.lam) @ e.U.conj().T) <= 1e-10 * frobenius_norm(a)
        assert is_unitary(e.U, 1e-12)
        assert np.all(np.diff(e.lam) <= 0)

    def test_singular_psd_is_clamped(self):
        g = random_general(5, 2, seed=4)
        e = hermitian_psd_eig(g @ g.conj().T)
        assert np.all(e.lam >= 0)
        assert np.count_nonzero(e.lam > 1e-10) == 2

    def test_errors(self):
        with pytest.raises(InputError, match="square"):
            hermitian_psd_eig(np.ones((2, 3)))
        with pytest.raises(NotHermitianError):
            hermitian_psd_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))
        with pytest.raises(NotPSDError):
            hermitian_psd_eig(np.diag([1.0, -0.5]))
