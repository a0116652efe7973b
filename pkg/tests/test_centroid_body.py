"""Zonotope membership, Minkowski functional, sampling oracle."""

import math

import mpmath
import numpy as np
import pytest

from heavymix.centroid_body import (
    ICAModelSpec,
    OracleParams,
    SampledCentroidBody,
    approximation_check,
    approximation_sample_size,
    dual_witness,
    innerball_sample_size,
    membership,
    membership_solution,
    minkowski_functional,
    oracle_conservative_radius,
    oracle_sample_size,
    polygon_contains,
    support_function,
    weak_membership_oracle,
    zonotope_polygon_2d,
)
from heavymix.heavy_tail import HeavyTailSpec, UniformSource


def random_body(rng, n=2, max_points=10):
    count = int(rng.integers(1, max_points + 1))
    return SampledCentroidBody(rng.normal(size=(count, n)))


class TestSupportFunction:
    def test_single_segment(self):
        b = SampledCentroidBody([[1.0, 0.0]])
        assert support_function(b, [0.0, 1.0]) == 0.0
        assert support_function(b, [1.0, 0.0]) == 1.0

    def test_two_point_diagonal(self):
        b = SampledCentroidBody([[1.0, 0.0], [0.0, 1.0]])
        assert support_function(b, [1.0, 1.0]) == pytest.approx(1 / math.sqrt(2))

    def test_zero_direction_rejected(self):
        b = SampledCentroidBody([[1.0, 0.0]])
        with pytest.raises(ValueError):
            support_function(b, [0.0, 0.0])

    def test_membership_implies_support_bound(self):
        rng = np.random.default_rng(17)
        b = SampledCentroidBody(rng.normal(size=(8, 3)))
        inside = [q for q in rng.uniform(-0.5, 0.5, size=(40, 3)) if membership(b, q)]
        assert inside, "expected some interior queries"
        for q in inside[:10]:
            for theta in rng.normal(size=(100, 3)):
                u = theta / np.linalg.norm(theta)
                assert np.dot(q, u) <= support_function(b, u) + 1e-9


class TestMembership:
    def test_origin_always_inside(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            assert membership(random_body(rng, n=3), np.zeros(3))

    def test_outside_single_segment(self):
        b = SampledCentroidBody([[1.0, 0.0]])
        assert not membership(b, [1.5, 0.0])
        assert membership(b, [1.0, 0.0])

    def test_dimension_mismatch(self):
        b = SampledCentroidBody([[1.0, 0.0]])
        with pytest.raises(ValueError):
            membership(b, [1.0, 0.0, 0.0])

    def test_agrees_with_polygon_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(150):
            b = random_body(rng, n=2, max_points=10)
            poly = zonotope_polygon_2d(b)
            scale = float(np.abs(b.points).sum() / b.count) + 0.1
            q = rng.uniform(-scale, scale, size=2)
            assert membership(b, q) == polygon_contains(poly, q)

    def test_symmetry(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            b = random_body(rng, n=3, max_points=8)
            q = rng.uniform(-1, 1, size=3)
            assert membership(b, q) == membership(b, -q)

    def test_equivariance_under_invertible_maps(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            b = random_body(rng, n=2, max_points=8)
            q = rng.uniform(-0.8, 0.8, size=2)
            t = rng.normal(size=(2, 2)) + 2 * np.eye(2)
            mapped = SampledCentroidBody(b.points @ t.T)
            assert membership(mapped, t @ q) == membership(b, q)


class TestMinkowskiFunctional:
    def test_halfway_along_segment(self):
        b = SampledCentroidBody([[1.0, 0.0]])
        assert minkowski_functional(b, [0.5, 0.0]) == pytest.approx(0.5, abs=1e-9)

    def test_origin(self):
        b = SampledCentroidBody([[1.0, 0.0]])
        assert minkowski_functional(b, [0.0, 0.0]) == 0.0

    def test_off_span_is_infinite(self):
        b = SampledCentroidBody([[1.0, 0.0]])
        assert minkowski_functional(b, [0.0, 0.3]) == np.inf

    def test_consistent_with_membership(self):
        rng = np.random.default_rng(2)
        for _ in range(150):
            b = random_body(rng, n=2, max_points=8)
            q = rng.uniform(-1.0, 1.0, size=2)
            phi = minkowski_functional(b, q)
            if abs(phi - 1.0) < 1e-8:
                continue  # boundary band excluded
            assert (phi <= 1.0) == membership(b, q)

    def test_positive_homogeneity(self):
        rng = np.random.default_rng(3)
        b = random_body(rng, n=3, max_points=10)
        q = rng.uniform(-0.3, 0.3, size=3)
        phi = minkowski_functional(b, q)
        for c in (0.5, 2.0, 7.5):
            assert minkowski_functional(b, c * q) == pytest.approx(c * phi, abs=1e-8)


class TestDualWitness:
    def test_origin_witness(self):
        b = SampledCentroidBody([[1.0, 0.0], [0.0, 1.0]])
        lam = dual_witness(b, [0.0, 0.0])
        assert lam is not None
        assert np.abs(lam).max() <= 1 + 1e-12

    def test_segment_witness_value(self):
        b = SampledCentroidBody([[1.0, 0.0]])
        lam = dual_witness(b, [0.5, 0.0])
        assert lam == pytest.approx([0.5], abs=1e-9)

    def test_absent_outside(self):
        b = SampledCentroidBody([[1.0, 0.0]])
        assert dual_witness(b, [1.5, 0.0]) is None

    def test_reconstruction_residual(self):
        rng = np.random.default_rng(4)
        done = 0
        while done < 100:
            b = random_body(rng, n=3, max_points=12)
            q = rng.uniform(-0.4, 0.4, size=3)
            lam = dual_witness(b, q)
            if lam is None:
                continue
            done += 1
            assert np.abs(lam).max() <= 1 + 1e-9
            recon = b.points.T @ lam / b.count
            assert np.linalg.norm(recon - q) <= 1e-8


class TestZonotopePolygon:
    def test_single_generator_segment(self):
        poly = zonotope_polygon_2d(SampledCentroidBody([[1.0, 0.0]]))
        assert sorted(poly.tolist()) == [[-1.0, -0.0], [1.0, 0.0]]

    def test_axis_square(self):
        poly = zonotope_polygon_2d(SampledCentroidBody([[1.0, 0.0], [0.0, 1.0]]))
        assert sorted(map(tuple, np.round(poly, 12).tolist())) == [
            (-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)]

    def test_vertex_count_bound(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            b = random_body(rng, n=2, max_points=12)
            poly = zonotope_polygon_2d(b)
            assert poly.shape[0] <= 2 * b.count

    def test_rejects_wrong_dimension(self):
        with pytest.raises(ValueError):
            zonotope_polygon_2d(SampledCentroidBody([[1.0, 0.0, 0.0]]))

    def test_polygon_vertices_on_boundary(self):
        # every vertex has Minkowski functional 1
        rng = np.random.default_rng(12)
        b = random_body(rng, n=2, max_points=6)
        for v in zonotope_polygon_2d(b):
            if np.linalg.norm(v) < 1e-12:
                continue
            assert minkowski_functional(b, v) == pytest.approx(1.0, abs=1e-7)


class TestSampleSizeFormulas:
    def params(self, **kw):
        base = dict(epsilon=0.2, delta=0.1, s_max=2.0, s_min=0.5,
                    gamma=0.5, moment_bound=1.5)
        base.update(kw)
        return OracleParams(**base)

    def test_monotone_in_epsilon(self):
        n_small = oracle_sample_size(self.params(epsilon=0.1), 3)
        n_large = oracle_sample_size(self.params(epsilon=0.2), 3)
        assert n_small > n_large

    def test_against_high_precision_arithmetic(self):
        p = self.params(gamma=0.9)
        n = 3
        with mpmath.workdps(60):
            eps, delta = mpmath.mpf("0.2"), mpmath.mpf("0.1")
            sm, sM, g, M = mpmath.mpf("0.5"), mpmath.mpf("2.0"), mpmath.mpf("0.9"), mpmath.mpf("1.5")
            r = eps * sm / (2 * n * sM)
            base = 8 * M * n * sM ** (1 + g)
            b1 = (base / (r ** 2 * delta)) ** (3 / g)
            b2 = (base / r) ** (mpmath.mpf(1) / 2 + 1 / g)
            expect = float(max(b1, b2))
        # values near 1e24 sit far beyond integer float resolution, so the
        # float implementation can only match to relative precision
        assert oracle_sample_size(p, n) == pytest.approx(expect, rel=1e-12)

    def test_well_conditioned_radius(self):
        # s_max = s_min: r = eps/(2n)
        p = self.params(s_max=1.0, s_min=1.0, epsilon=0.3)
        assert oracle_conservative_radius(p, 5) == pytest.approx(0.3 / 10.0)
        r = 0.3 / 10.0
        base = 8 * 1.5 * 5 * 1.0
        expect = max((base / (r ** 2 * 0.1)) ** 6.0, (base / r) ** 2.5)
        assert oracle_sample_size(p, 5) == math.ceil(expect)

    def test_approximation_and_innerball_formulas(self):
        n = approximation_sample_size(0.5, 0.5, 2, 1.5, 0.9)
        expect = (8 * 1.5 * 4 / (0.25 * 0.5)) ** (0.5 + 3 / 0.9)
        assert n == math.ceil(expect)
        m = innerball_sample_size(0.5, 0.5, 2, 1.5, 0.9)
        expect = (16 * 1.5 * 16 / (0.25 * 0.5)) ** (0.5 + 3 / 0.9)
        assert m == math.ceil(expect)

    def test_rejects_bad_params(self):
        with pytest.raises(ValueError):
            self.params(delta=0.0)
        with pytest.raises(ValueError):
            self.params(s_min=3.0)  # above s_max
        with pytest.raises(ValueError):
            self.params(moment_bound=0.9)


def uniform_model(n):
    return ICAModelSpec(np.eye(n), tuple(UniformSource() for _ in range(n)))


class TestWeakMembershipOracle:
    def oracle_params(self):
        # uniform sources have E|S|^(1+g) = 2^(1+g)/(2+g)
        g = 0.9
        return OracleParams(epsilon=0.15, delta=0.1, s_max=1.0, s_min=1.0,
                            gamma=g, moment_bound=2 ** (1 + g) / (2 + g))

    def test_origin_always_yes(self):
        model = uniform_model(3)
        for seed in range(5):
            assert weak_membership_oracle(np.zeros(3), model, self.oracle_params(),
                                          np.random.default_rng(seed), n_samples=500)

    def test_far_outside_mostly_no(self):
        # GS sits inside [-1,1]^n, so q = 10 e1 is far outside
        model = uniform_model(3)
        q = np.array([10.0, 0.0, 0.0])
        answers = [weak_membership_oracle(q, model, self.oracle_params(),
                                          np.random.default_rng(seed), n_samples=400)
                   for seed in range(40)]
        assert sum(answers) == 0

    def test_deep_inside_mostly_yes(self):
        # (1-eps') e1 lies inside the inner l1 ball of the population body
        model = uniform_model(3)
        q = np.array([0.8, 0.0, 0.0])
        answers = [weak_membership_oracle(q, model, self.oracle_params(),
                                          np.random.default_rng(seed), n_samples=4000)
                   for seed in range(20)]
        assert sum(answers) >= 18

    def test_heavy_tailed_sources_supported(self):
        src = HeavyTailSpec(gamma=0.5)
        model = ICAModelSpec(np.eye(2), (src, src))
        assert weak_membership_oracle(np.zeros(2), model, self.oracle_params(),
                                      np.random.default_rng(0), n_samples=300)

    def test_membership_solution_reports_iterations(self):
        rng = np.random.default_rng(21)
        b = SampledCentroidBody(rng.uniform(-2, 2, size=(500, 3)))
        sol = membership_solution(b, np.array([0.5, 0.0, 0.0]))
        assert sol.iterations > 0


class TestApproximationCheck:
    def test_origin_always_true(self):
        model = uniform_model(2)
        assert approximation_check(model, np.zeros(2), 0.05, 0.1,
                                   np.random.default_rng(0), n_samples=200)

    def test_mean_of_symmetric_sources_is_origin(self):
        # lambda = 1 gives p = E[X] = 0, same as the origin case
        model = uniform_model(2)
        x = model.sample(100_000, np.random.default_rng(1))
        p = x.mean(axis=0)
        assert np.linalg.norm(p) < 0.02
        assert approximation_check(model, p, 0.05, 0.1,
                                   np.random.default_rng(2), n_samples=500)

    def test_sign_witness_success_rate(self):
        # lambda(x) = sign(x_1): p = (E|X_1|, 0) = e1 for normalized uniform
        model = uniform_model(2)
        p = np.array([1.0, 0.0])
        hits = sum(
            approximation_check(model, p, 0.1, 0.1,
                                np.random.default_rng(seed), n_samples=2000)
            for seed in range(200))
        assert hits >= 180  # 1 - delta with delta = 0.1

    def test_formula_count_requires_moment_data(self):
        model = uniform_model(2)
        with pytest.raises(ValueError):
            approximation_check(model, np.zeros(2), 0.1, 0.1,
                                np.random.default_rng(0))


class TestModelSpec:
    def test_rejects_singular_mixing(self):
        with pytest.raises(ValueError):
            ICAModelSpec(np.zeros((2, 2)), (UniformSource(), UniformSource()))

    def test_rejects_source_count_mismatch(self):
        with pytest.raises(ValueError):
            ICAModelSpec(np.eye(2), (UniformSource(),))

    def test_sample_shape_and_mixing(self):
        a = np.array([[2.0, 0.0], [0.0, 1.0]])
        model = ICAModelSpec(a, (UniformSource(), UniformSource()))
        x = model.sample(50_000, np.random.default_rng(3))
        assert x.shape == (50_000, 2)
        # first coordinate is 2x a unit-abs-mean uniform
        assert np.abs(x[:, 0]).mean() == pytest.approx(2.0, abs=0.05)
