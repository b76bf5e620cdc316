"""Spectral contracts: residuals, ordering, sign convention, minors, norms."""
import math

import numpy as np
import pytest

from svlab.ensemble import EnsembleConfig, LawKind, TailLaw, sample_matrix
from svlab.spectra import (
    MinorSpec,
    SpectralError,
    full_svd,
    kth_smallest,
    operator_norm,
    smallest_singular_value,
    take_minor,
)


def _random_matrices(count=20, seed=5150):
    """Mixed-law tall matrices for oracle comparisons."""
    out = []
    rng = np.random.default_rng(seed)
    laws = [
        TailLaw(LawKind.SYMMETRIC_PARETO, alpha=0.8),
        TailLaw(LawKind.SYMMETRIC_PARETO, alpha=1.5),
        TailLaw(LawKind.STUDENT_T, alpha=2.5),
        TailLaw(LawKind.GAUSSIAN),
    ]
    for i in range(count):
        n = int(rng.integers(5, 40))
        aspect = float(rng.uniform(1.2, 3.0))
        law = laws[i % len(laws)]
        out.append(sample_matrix(EnsembleConfig(n=n, aspect=aspect, law=law, seed=1000 + i)))
    return out


class TestHandExamples:
    def test_rank_one_padded(self):
        x = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
        res = full_svd(x, k_bottom=2)
        assert res.singular_values[0] == pytest.approx(2.0, abs=1e-12)
        assert res.singular_values[1] == pytest.approx(0.0, abs=1e-12)
        u = res.bottom_right_vectors[0]
        assert np.allclose(np.abs(u), math.sqrt(0.5), atol=1e-12)
        assert u[int(np.argmax(np.abs(u)))] > 0  # sign convention

    def test_diagonal(self):
        x = np.vstack([np.diag([3.0, 1.0]), np.zeros((2, 2))])
        val, vec = kth_smallest(x, 1)
        assert val == 1.0
        assert np.allclose(vec, [0.0, 1.0], atol=1e-14)
        val2, vec2 = kth_smallest(x, 2)
        assert val2 == 3.0
        assert np.allclose(vec2, [1.0, 0.0], atol=1e-14)

    def test_smallest_equals_k1(self):
        for x in _random_matrices(6):
            v1, _ = kth_smallest(x, 1)
            assert v1 == smallest_singular_value(x)

    def test_zero_matrix(self):
        res = full_svd(np.zeros((4, 3)), k_bottom=3)
        assert np.all(res.singular_values == 0.0)


class TestContracts:
    def test_descending_order(self):
        for x in _random_matrices(8):
            s = full_svd(x).singular_values
            assert np.all(np.diff(s) <= 0)
            assert s[-1] >= 0

    def test_residual_bound_holds(self):
        for x in _random_matrices(12):
            res = full_svd(x, k_bottom=min(3, x.shape[1]))
            s1 = res.s_top
            assert float(res.residuals.max()) <= res.tolerance_used * s1 * s1

    def test_against_gram_eigen_oracle(self):
        # Independent route: eigenvalues of X^T X.
        for x in _random_matrices(12):
            s = full_svd(x).singular_values
            lam = np.linalg.eigvalsh(x.T @ x)[::-1]
            lam[lam < 0] = 0.0
            assert np.allclose(s, np.sqrt(lam), atol=1e-9 * max(s[0], 1.0))

    def test_min_max_probe_lower_bound(self, rng):
        # Any (n-k)-dim subspace gives min ||Xv|| <= s_{(k-th smallest)}:
        # random probes never exceed the reported value.
        x = sample_matrix(
            EnsembleConfig(n=8, aspect=2.0, law=TailLaw(LawKind.GAUSSIAN), seed=77)
        )
        for k in (1, 2, 3):
            val, _ = kth_smallest(x, k)
            best = 0.0
            for _ in range(2000):
                q, _ = np.linalg.qr(rng.standard_normal((8, 8 - k + 1)))
                probe = np.linalg.svd(x @ q, compute_uv=False)[-1]
                best = max(best, float(probe))
            assert best <= val + 1e-9 * float(np.linalg.norm(x, 2))

    def test_orthonormal_stored_vectors(self):
        for x in _random_matrices(8):
            k = min(4, x.shape[1])
            res = full_svd(x, k_bottom=k)
            block = np.vstack([res.bottom_right_vectors, res.top_right_vector[None, :]])
            gram = block @ block.T
            if k < x.shape[1]:
                assert np.abs(gram - np.eye(k + 1)).max() < 1e-10

    def test_unit_norm_vectors(self):
        for x in _random_matrices(4):
            res = full_svd(x, k_bottom=2)
            for u in (*res.bottom_right_vectors, res.top_right_vector):
                assert abs(np.linalg.norm(u) - 1.0) < 1e-12

    def test_sign_convention_all_vectors(self):
        for x in _random_matrices(10):
            res = full_svd(x, k_bottom=min(3, x.shape[1]))
            for u in (*res.bottom_right_vectors, res.top_right_vector):
                assert u[int(np.argmax(np.abs(u)))] > 0

    def test_deterministic_repeat(self):
        x = _random_matrices(1)[0]
        a = full_svd(x, k_bottom=2)
        b = full_svd(x, k_bottom=2)
        assert np.array_equal(a.singular_values, b.singular_values)
        assert np.array_equal(a.bottom_right_vectors, b.bottom_right_vectors)

    def test_column_permutation_equivariance(self, rng):
        x = sample_matrix(
            EnsembleConfig(n=9, aspect=2.0, law=TailLaw(LawKind.SYMMETRIC_PARETO, alpha=1.2), seed=3)
        )
        perm = rng.permutation(9)
        res_a = full_svd(x, k_bottom=1)
        res_b = full_svd(x[:, perm], k_bottom=1)
        assert np.allclose(res_a.singular_values, res_b.singular_values, rtol=1e-10)
        ua = np.abs(res_a.bottom_right_vectors[0][perm])
        ub = np.abs(res_b.bottom_right_vectors[0])
        assert np.allclose(ua, ub, atol=1e-9)


class TestDegenerateFlags:
    def test_well_separated_not_flagged(self):
        x = np.vstack([np.diag([5.0, 3.0, 1.0]), np.zeros((1, 3))])
        res = full_svd(x, k_bottom=3)
        assert res.degenerate_flags == [False, False, False]

    def test_near_tie_flagged(self):
        x = np.vstack([np.diag([5.0, 1.0, 1.0 + 1e-9]), np.zeros((1, 3))])
        res = full_svd(x, k_bottom=2)
        # gap 1e-9 < 1e-8 * s1 = 5e-8: both members of the near-pair flagged
        assert res.degenerate_flags == [True, True]

    def test_exact_tie_flagged(self):
        x = np.vstack([np.eye(2), np.eye(2)])
        res = full_svd(x, k_bottom=1)
        assert res.degenerate_flags == [True]


class TestValidation:
    def test_wide_rejected(self):
        with pytest.raises(ValueError):
            full_svd(np.ones((2, 3)))

    def test_single_column_rejected(self):
        with pytest.raises(ValueError):
            full_svd(np.ones((3, 1)))

    def test_nonfinite_rejected(self):
        x = np.ones((3, 2))
        x[0, 0] = np.nan
        with pytest.raises(ValueError):
            full_svd(x)

    def test_k_range(self):
        x = np.ones((3, 2)) + np.eye(3, 2)
        with pytest.raises(ValueError):
            full_svd(x, k_bottom=0)
        with pytest.raises(ValueError):
            full_svd(x, k_bottom=3)

    def test_spectral_error_has_residual_field(self):
        err = SpectralError("boom", worst_residual=3.5)
        assert err.worst_residual == 3.5


class TestMinor:
    def test_hand_minor(self):
        x = np.arange(12.0).reshape(4, 3)
        m = take_minor(x, MinorSpec(kept_rows=(0, 2), kept_cols=(1, 2)))
        assert np.array_equal(m, [[1.0, 2.0], [7.0, 8.0]])

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            MinorSpec(kept_rows=(), kept_cols=(0,))
        with pytest.raises(ValueError):
            MinorSpec(kept_rows=(2, 1), kept_cols=(0,))
        with pytest.raises(ValueError):
            MinorSpec(kept_rows=(0, 0), kept_cols=(0,))
        with pytest.raises(ValueError):
            MinorSpec(kept_rows=(-1,), kept_cols=(0,))

    def test_out_of_range(self):
        x = np.ones((3, 2))
        with pytest.raises(ValueError):
            take_minor(x, MinorSpec(kept_rows=(0, 3), kept_cols=(0,)))


class TestOperatorNorm:
    def test_matches_lapack_on_randoms(self):
        for x in _random_matrices(10):
            want = float(np.linalg.norm(x, 2))
            got = operator_norm(x)
            assert got == pytest.approx(want, rel=1e-8)

    def test_wide_matrix(self, rng):
        x = rng.standard_normal((4, 30))
        assert operator_norm(x) == pytest.approx(float(np.linalg.norm(x, 2)), rel=1e-8)

    def test_ones_in_kernel(self):
        x = np.array([[1.0, -1.0], [-1.0, 1.0]])
        assert operator_norm(x) == pytest.approx(2.0, rel=1e-9)

    def test_ones_is_bottom_eigenvector(self):
        # all-ones start converges to the small eigenvalue; the restart from
        # the biggest column must recover the true norm
        x = np.array([[1.5, -0.5], [-0.5, 1.5]])
        assert operator_norm(x) == pytest.approx(2.0, rel=1e-9)

    def test_single_column_and_zero(self):
        assert operator_norm(np.array([[3.0], [4.0]])) == pytest.approx(5.0, rel=1e-12)
        assert operator_norm(np.zeros((3, 2))) == 0.0

    def test_rank_one_exact(self):
        u = np.array([1.0, 2.0, 2.0])[:, None]
        v = np.array([[3.0, 4.0]])
        assert operator_norm(u @ v) == pytest.approx(15.0, rel=1e-10)
