import math

import numpy as np
import pytest

from subspec.linalg import (DenseMatrix, Spectrum, eigenvalues_hermitian, gram,
                            is_hermitian, numerical_rank, singular_values)


def dm(rows):
    return DenseMatrix(np.array(rows))


def random_symmetric_np(rng, n):
    a = rng.standard_normal((n, n))
    return dm(a + a.T)


def random_complex_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return DenseMatrix(a + a.conj().T)


class TestDenseMatrix:
    def test_shape_and_field(self):
        m = dm([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
        assert (m.rows, m.cols, m.field) == (3, 2, "real")
        assert m.entries.tolist() == [1, 2, 3, 4, 5, 6]

    def test_complex_entries_interleave(self):
        m = DenseMatrix(np.array([[1 + 2j, 3 - 4j]]))
        assert m.field == "complex"
        assert m.entries.tolist() == [1, 2, 3, -4]

    def test_rejects_nan_and_bad_shape(self):
        with pytest.raises(ValueError):
            dm([[np.nan, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            DenseMatrix(np.zeros((0, 3)))
        with pytest.raises(ValueError):
            DenseMatrix(np.zeros(4))

    def test_immutable(self):
        m = dm([[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            m.data[0, 0] = 5.0


class TestIsHermitian:
    def test_identity_zero_tol(self):
        assert is_hermitian(dm(np.eye(2)), 0.0)

    def test_strictly_triangular(self):
        assert not is_hermitian(dm([[0.0, 1.0], [0.0, 0.0]]), 1e-12)

    def test_textbook_complex(self):
        m = DenseMatrix(np.array([[1.0, 1j], [-1j, 2.0]]))
        assert is_hermitian(m, 1e-12)

    def test_not_square(self):
        with pytest.raises(ValueError, match="not square"):
            is_hermitian(dm([[1.0, 2.0, 3.0]]), 0.0)


class TestEigenvalues:
    def test_swap_matrix(self):
        spec = eigenvalues_hermitian(dm([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(spec.values, [-1.0, 1.0], atol=1e-14)

    def test_rw_covariance_2_against_quadratic_formula(self):
        # characteristic polynomial of [[1,1],[1,2]] is x^2 - 3x + 1
        lo = (3.0 - math.sqrt(5.0)) / 2.0
        hi = (3.0 + math.sqrt(5.0)) / 2.0
        spec = eigenvalues_hermitian(dm([[1.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(spec.values, [lo, hi], atol=1e-12)

    def test_diagonal(self):
        spec = eigenvalues_hermitian(dm(np.diag([1.0, 0.0, 1.0, 0.0])))
        assert spec.values.tolist() == [0.0, 0.0, 1.0, 1.0]

    def test_order_one(self):
        assert eigenvalues_hermitian(dm([[4.5]])).values.tolist() == [4.5]

    def test_not_hermitian_raises(self):
        with pytest.raises(ValueError, match="not Hermitian"):
            eigenvalues_hermitian(dm([[0.0, 1.0], [0.0, 0.0]]))

    def test_sweep_cap_raises(self, monkeypatch):
        from subspec import linalg as linalg_mod
        monkeypatch.setattr(linalg_mod, "JACOBI_MAX_SWEEPS", 0)
        with pytest.raises(RuntimeError, match="did not converge"):
            eigenvalues_hermitian(dm([[0.0, 1.0], [1.0, 0.0]]))

    def test_trace_identity(self):
        rng = np.random.default_rng(3)
        for n in (2, 5, 11, 40):
            m = random_symmetric_np(rng, n)
            spec = eigenvalues_hermitian(m)
            scale = m.max_abs()
            assert abs(spec.values.sum() - np.trace(m.data)) <= 1e-9 * n * scale

    def test_permutation_similarity(self):
        rng = np.random.default_rng(4)
        for n in (3, 8, 20):
            m = random_symmetric_np(rng, n)
            perm = rng.permutation(n)
            permuted = dm(m.data[np.ix_(perm, perm)])
            a = eigenvalues_hermitian(m).values
            b = eigenvalues_hermitian(permuted).values
            np.testing.assert_allclose(a, b, atol=1e-8 * m.max_abs())

    def test_weyl_shift(self):
        rng = np.random.default_rng(5)
        m = random_symmetric_np(rng, 9)
        eps = 0.625  # exactly representable
        shifted = dm(m.data + eps * np.eye(9))
        a = eigenvalues_hermitian(m).values
        b = eigenvalues_hermitian(shifted).values
        np.testing.assert_allclose(b - a, eps, atol=1e-9 * m.max_abs())

    def test_complex_doubling_halves_multiplicity(self):
        rng = np.random.default_rng(6)
        for n in (2, 5, 10):
            m = random_complex_hermitian(rng, n)
            spec = eigenvalues_hermitian(m)
            assert spec.count == n
            # the doubled real embedding must contain each eigenvalue twice
            x, y = m.data.real, m.data.imag
            embedded = dm(np.block([[x, -y], [y, x]]))
            doubled = eigenvalues_hermitian(embedded).values
            np.testing.assert_allclose(
                doubled, np.repeat(spec.values, 2), atol=1e-8 * m.max_abs())

    def test_complex_vs_numpy(self):
        rng = np.random.default_rng(7)
        m = random_complex_hermitian(rng, 6)
        ours = eigenvalues_hermitian(m).values
        ref = np.linalg.eigvalsh(m.data)
        np.testing.assert_allclose(ours, ref, atol=1e-10 * m.max_abs())

    def test_against_numpy_corpus(self):
        rng = np.random.default_rng(20)
        for n in (2, 3, 7, 16, 33, 64):
            for scale in (1.0, 1e-6, 1e6):
                m = random_symmetric_np(rng, n)
                m = dm(m.data * scale)
                ours = eigenvalues_hermitian(m).values
                ref = np.linalg.eigvalsh(m.data)
                np.testing.assert_allclose(ours, ref, atol=1e-11 * n * m.max_abs())

    def test_hilbert_matrix(self):
        # severely ill-conditioned PSD input
        n = 12
        h = dm(1.0 / (np.arange(n)[:, None] + np.arange(n)[None, :] + 1.0))
        ours = eigenvalues_hermitian(h).values
        ref = np.linalg.eigvalsh(h.data)
        np.testing.assert_allclose(ours, ref, atol=1e-13)
        assert np.all(ours >= -1e-15)

    def test_clustered_eigenvalues(self):
        base = np.diag([1.0, 1.0 + 1e-13, 1.0 + 2e-13, 5.0])
        rng = np.random.default_rng(21)
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        m = dm(q @ base @ q.T)
        ours = eigenvalues_hermitian(dm(0.5 * (m.data + m.data.T))).values
        np.testing.assert_allclose(ours, np.diag(base), atol=1e-11)

    def test_extreme_scale_guard(self):
        big = eigenvalues_hermitian(dm(np.diag([1e200, 2e200]))).values
        np.testing.assert_allclose(big, [1e200, 2e200], rtol=1e-12)
        tiny = eigenvalues_hermitian(dm(np.diag([3e-200, 1e-200]))).values
        np.testing.assert_allclose(tiny, [1e-200, 3e-200], rtol=1e-12)


class TestGram:
    def test_row_vector(self):
        g = gram(dm([[1.0, 2.0, 2.0]]))
        assert g.data.tolist() == [[9.0]]

    def test_identity(self):
        g = gram(dm(np.eye(2)))
        assert g.data.tolist() == np.eye(2).tolist()

    def test_orthogonal_rows(self):
        g = gram(dm([[1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]))
        assert g.data.tolist() == [[2.0, 0.0], [0.0, 1.0]]

    def test_complex_is_hermitian(self):
        rng = np.random.default_rng(8)
        a = DenseMatrix(rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5)))
        assert is_hermitian(gram(a), 0.0)


class TestSingularValues:
    def test_identity(self):
        assert singular_values(dm(np.eye(3))).values.tolist() == [1.0, 1.0, 1.0]

    def test_diagonal(self):
        assert singular_values(dm([[3.0, 0.0], [0.0, 4.0]])).values.tolist() == [3.0, 4.0]

    def test_rank_one_all_ones(self):
        # Gram of [[1,1],[1,1]] is [[2,2],[2,2]] with eigenvalues {0, 4}
        sv = singular_values(dm([[1.0, 1.0], [1.0, 1.0]])).values
        np.testing.assert_allclose(sv, [0.0, 2.0], atol=1e-12)

    def test_wide_and_tall_agree(self):
        rng = np.random.default_rng(9)
        a = rng.standard_normal((3, 7))
        wide = singular_values(dm(a)).values
        tall = singular_values(dm(a.T)).values
        np.testing.assert_allclose(wide, tall, atol=1e-10 * np.max(np.abs(a)))

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(10)
        a = rng.standard_normal((4, 6))
        sv = singular_values(dm(a)).values
        shuffled = singular_values(dm(a[rng.permutation(4), :])).values
        np.testing.assert_allclose(sv, shuffled, atol=1e-8 * np.max(np.abs(a)))

    def test_unimodular_row_scaling(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((4, 6)).astype(complex)
        sv = singular_values(DenseMatrix(a)).values
        b = a.copy()
        b[2, :] *= np.exp(1j * 0.7)
        scaled = singular_values(DenseMatrix(b)).values
        np.testing.assert_allclose(sv, scaled, atol=1e-8 * np.max(np.abs(a)))

    def test_hermitian_absolute_eigenvalues(self):
        rng = np.random.default_rng(12)
        m = random_symmetric_np(rng, 6)
        sv = singular_values(m).values
        absev = np.sort(np.abs(eigenvalues_hermitian(m).values))
        np.testing.assert_allclose(sv, absev, atol=1e-8 * m.max_abs())

    def test_zero_matrix(self):
        sv = singular_values(dm(np.zeros((3, 5)))).values
        assert sv.tolist() == [0.0, 0.0, 0.0]


class TestNumericalRank:
    def test_zero(self):
        assert numerical_rank(dm(np.zeros((4, 4))), 1e-12) == 0

    def test_identity(self):
        assert numerical_rank(dm(np.eye(4)), 1e-12) == 4

    def test_outer_product(self):
        v = np.array([1.0, 2.0, 3.0])
        assert numerical_rank(dm(np.outer(v, v)), 1e-12) == 1

    def test_rejects_negative_tol(self):
        with pytest.raises(ValueError):
            numerical_rank(dm(np.eye(2)), -1.0)


class TestSpectrum:
    def test_must_be_sorted(self):
        with pytest.raises(ValueError):
            Spectrum(np.array([2.0, 1.0]))

    def test_nonempty(self):
        with pytest.raises(ValueError):
            Spectrum(np.array([]))
