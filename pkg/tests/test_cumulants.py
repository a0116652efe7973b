"""Cumulant estimation, Khatri-Rao structure, Poisson weight recovery."""

import numpy as np
import pytest

from heavymix.cumulants import (
    CumulantTensor,
    PoissonReduction,
    estimate_cumulant,
    khatri_rao_power,
    multilinear_kr2,
    poisson_cumulant_tensor,
    recover_weights,
    recover_weights_from_tensor,
    sample_reduction,
    simplex_project,
    tensor_from_vector,
    vectorize_tensor,
)


class TestCumulantTensorType:
    def test_symmetrized_on_construction(self):
        vals = np.arange(8.0).reshape(2, 2, 2)
        t = CumulantTensor(3, 2, vals)
        for perm in [(0, 2, 1), (1, 0, 2), (2, 1, 0)]:
            np.testing.assert_allclose(t.values, t.values.transpose(perm))

    def test_rejects_bad_order_and_shape(self):
        with pytest.raises(ValueError):
            CumulantTensor(5, 2, np.zeros((2,) * 5))
        with pytest.raises(ValueError):
            CumulantTensor(2, 3, np.zeros((2, 2)))

    def test_vectorize_round_trip(self):
        t = CumulantTensor(2, 2, np.array([[1.0, 0.0], [0.0, 1.0]]))
        v = vectorize_tensor(t)
        np.testing.assert_array_equal(v, [1.0, 0.0, 0.0, 1.0])
        back = tensor_from_vector(v, 2, 2)
        np.testing.assert_array_equal(back.values, t.values)

    def test_vectorize_preserves_inner_product(self):
        rng = np.random.default_rng(0)
        a = CumulantTensor(3, 3, rng.normal(size=(3, 3, 3)))
        b = CumulantTensor(3, 3, rng.normal(size=(3, 3, 3)))
        assert np.dot(vectorize_tensor(a), vectorize_tensor(b)) == pytest.approx(
            float(np.sum(a.values * b.values)), rel=1e-12)


class TestEstimateCumulant:
    def test_gaussian_fourth_cumulant_vanishes(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((200_000, 3))
        k4 = estimate_cumulant(x, 4).values
        # diagonal estimator SE is sqrt(96/N); keep 5 sigma slack
        assert np.abs(k4).max() <= 5 * np.sqrt(96 / 200_000)

    def test_poisson_low_order_cumulants_equal_mean(self):
        rng = np.random.default_rng(2)
        x = rng.poisson(2.0, size=(1_000_000, 1)).astype(float)
        k2 = estimate_cumulant(x, 2).values[0, 0]
        k3 = estimate_cumulant(x, 3).values[0, 0, 0]
        assert k2 == pytest.approx(2.0, abs=0.02)
        assert k3 == pytest.approx(2.0, abs=0.05)

    def test_shift_invariance(self):
        rng = np.random.default_rng(3)
        x = rng.exponential(1.0, size=(20_000, 3))
        shift = np.array([5.0, -2.0, 11.0])
        for order in (2, 3, 4):
            a = estimate_cumulant(x, order).values
            b = estimate_cumulant(x + shift, order).values
            # exact in exact arithmetic; centering leaves ulp-level residue
            np.testing.assert_allclose(a, b, atol=1e-11)

    def test_multilinearity_exact_for_power_of_two(self):
        rng = np.random.default_rng(4)
        x = rng.normal(size=(5_000, 2)) + 1.0
        for order in (2, 3, 4):
            a = estimate_cumulant(2.0 * x, order).values
            b = (2.0 ** order) * estimate_cumulant(x, order).values
            np.testing.assert_array_equal(a, b)

    def test_multilinearity_general_scalar(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=(5_000, 2))
        c = 1.7
        a = estimate_cumulant(c * x, 3).values
        b = c ** 3 * estimate_cumulant(x, 3).values
        np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-14)

    def test_independence_annihilation(self):
        rng = np.random.default_rng(6)
        x = rng.exponential(1.0, size=(500_000, 3))  # skewed, independent
        k3 = estimate_cumulant(x, 3).values
        off = k3.copy()
        for i in range(3):
            off[i, i, i] = 0.0
        # exponential kappa_3 = 2 on the diagonal; cross terms vanish
        assert np.abs(np.diag(k3.reshape(3, 9)[:, ::4]) - 2.0).max() < 0.1
        assert np.abs(off).max() <= 5 * np.sqrt(50 / 500_000)

    def test_gaussian_noise_invariance(self):
        rng = np.random.default_rng(7)
        base = rng.poisson(1.5, size=(400_000, 2)).astype(float)
        noisy = base + rng.standard_normal(base.shape)
        for order in (3, 4):
            a = estimate_cumulant(base, order).values
            b = estimate_cumulant(noisy, order).values
            assert np.abs(a - b).max() <= 5 * 0.05

    def test_order_and_sample_count_validation(self):
        x = np.zeros((100, 2))
        with pytest.raises(ValueError):
            estimate_cumulant(x, 5)
        with pytest.raises(ValueError):
            estimate_cumulant(np.zeros((20, 2)), 3)


class TestKhatriRao:
    def test_basis_column(self):
        a = np.array([[1.0], [0.0]])
        np.testing.assert_array_equal(khatri_rao_power(a, 2).ravel(), [1, 0, 0, 0])

    def test_column_norms_are_powers(self):
        rng = np.random.default_rng(8)
        a = rng.normal(size=(4, 3))
        for order in (2, 3):
            kr = khatri_rao_power(a, order)
            for k in range(3):
                assert np.linalg.norm(kr[:, k]) == pytest.approx(
                    np.linalg.norm(a[:, k]) ** order, rel=1e-12)

    def test_flattening_matches_tensor_power(self):
        rng = np.random.default_rng(9)
        a = rng.normal(size=(3, 2))
        kr = khatri_rao_power(a, 3)
        col = a[:, 1]
        outer = np.einsum("i,j,k->ijk", col, col, col).reshape(-1)
        np.testing.assert_allclose(kr[:, 1], outer, rtol=1e-14)

    def test_analytic_identity_with_poisson_cumulants(self):
        rng = np.random.default_rng(10)
        a = rng.normal(size=(3, 3))
        w = rng.dirichlet(np.ones(3))
        model = PoissonReduction(a, w, lam=4.0)
        t = poisson_cumulant_tensor(model, 3)
        np.testing.assert_allclose(
            vectorize_tensor(t), khatri_rao_power(a, 3) @ (4.0 * w), rtol=1e-12)

    def test_pseudo_inverse_consistency(self):
        rng = np.random.default_rng(11)
        a = rng.normal(size=(4, 4))
        kr = khatri_rao_power(a, 3)
        gram = np.linalg.pinv(kr) @ kr
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-10)


class TestMultilinearKR2:
    def test_basis_column_vanishes(self):
        a = np.array([[1.0], [0.0], [0.0]])
        np.testing.assert_array_equal(multilinear_kr2(a).ravel(), [0, 0, 0])

    def test_all_ones_column(self):
        a = np.ones((3, 1))
        np.testing.assert_array_equal(multilinear_kr2(a).ravel(), [1, 1, 1])

    def test_row_order_lexicographic(self):
        a = np.array([[1.0], [2.0], [3.0]])
        # rows (1,2), (1,3), (2,3)
        np.testing.assert_array_equal(multilinear_kr2(a).ravel(), [2, 3, 6])

    def test_full_square_dominates_multilinear(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            a = rng.normal(size=(4, 4))
            s_full = np.linalg.svd(khatri_rao_power(a, 2), compute_uv=False)[-1]
            s_multi = np.linalg.svd(multilinear_kr2(a), compute_uv=False)[-1]
            assert s_full >= s_multi - 1e-12

    def test_needs_two_rows(self):
        with pytest.raises(ValueError):
            multilinear_kr2(np.array([[1.0, 2.0]]))


class TestPoissonReduction:
    def test_validation(self):
        with pytest.raises(ValueError):
            PoissonReduction(np.eye(2), [0.5, 0.6], lam=1.0)
        with pytest.raises(ValueError):
            PoissonReduction(np.eye(2), [0.5, 0.5], lam=0.0)
        with pytest.raises(ValueError):
            PoissonReduction(np.eye(2), [0.5, 0.5], lam=1.0, noise_tau=-1.0)

    def test_zero_matrix_zero_noise_gives_zero_samples(self):
        model = PoissonReduction(np.zeros((2, 2)) , [0.5, 0.5], lam=3.0)
        x = sample_reduction(model, 100, np.random.default_rng(0))
        np.testing.assert_array_equal(x, np.zeros((100, 2)))

    def test_sample_mean_matches_poisson_identity(self):
        rng = np.random.default_rng(13)
        a = np.array([[1.0, -0.5], [0.3, 2.0]])
        model = PoissonReduction(a, [0.4, 0.6], lam=5.0, noise_tau=0.5)
        x = sample_reduction(model, 1_000_000, rng)
        expect = a @ (np.array([0.4, 0.6]) * 5.0)
        np.testing.assert_allclose(x.mean(axis=0), expect, atol=0.02)

    def test_sample_covariance_matches_poisson_identity(self):
        rng = np.random.default_rng(14)
        a = np.array([[1.0, -0.5], [0.3, 2.0]])
        model = PoissonReduction(a, [0.4, 0.6], lam=5.0, noise_tau=1.0)
        x = sample_reduction(model, 1_000_000, rng)
        expect = a @ np.diag(np.array([0.4, 0.6]) * 5.0) @ a.T + np.eye(2)
        np.testing.assert_allclose(np.cov(x.T), expect, atol=0.05)


class TestWeightRecovery:
    def test_analytic_tensor_exact(self):
        rng = np.random.default_rng(15)
        for order in (3, 4):
            a = rng.normal(size=(4, 4))
            w = rng.dirichlet(np.ones(4))
            model = PoissonReduction(a, w, lam=2.5)
            est = recover_weights_from_tensor(
                poisson_cumulant_tensor(model, order), a, 2.5)
            np.testing.assert_allclose(est.raw, w, atol=1e-10)

    def test_single_component(self):
        a = np.array([[0.7], [-1.2]])
        model = PoissonReduction(a, [1.0], lam=3.0)
        est = recover_weights_from_tensor(poisson_cumulant_tensor(model, 3), a, 3.0)
        assert est.raw == pytest.approx([1.0], abs=1e-12)

    def test_rank_deficiency_reported(self):
        a = np.array([[1.0, 1.0], [0.5, 0.5]])  # duplicate columns
        t = tensor_from_vector(np.zeros(8), 3, 2)
        with pytest.raises(ValueError, match="rank deficient"):
            recover_weights_from_tensor(t, a, 1.0)

    def test_sampled_identity_mixing(self):
        model = PoissonReduction(np.eye(3), [0.2, 0.3, 0.5], lam=5.0, noise_tau=1.0)
        x = sample_reduction(model, 500_000, np.random.default_rng(16))
        est = recover_weights(x, model.mixing_matrix, 5.0, 3)
        assert np.abs(est.raw - model.weights).max() <= 0.05
        assert est.projected.sum() == pytest.approx(1.0)
        assert np.all(est.projected >= 0)

    def test_simplex_projection(self):
        v = np.array([0.3, -0.1, 0.9])
        p = simplex_project(v)
        assert p.sum() == pytest.approx(1.0)
        assert np.all(p >= 0)
        # projection of a simplex point is itself
        w = np.array([0.2, 0.3, 0.5])
        np.testing.assert_allclose(simplex_project(w), w, atol=1e-12)
