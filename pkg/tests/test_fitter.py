import math
import time

import numpy as np
import pytest

from lorentz_encode import fitter
from lorentz_encode import locfuncs as lf
from lorentz_encode.fitter import DegenerateBasisError, FitConfig, TargetFunction


def lf_target(n_q, a, k_c):
    return TargetFunction(n_q, np.roll(lf.lorentzian_vector(n_q, a), k_c))


class TestGVector:
    def test_self_overlap_is_one(self):
        target = lf_target(4, 0.7, 5)
        g = fitter.g_vector(target, [0.7], [5])
        assert g[0] == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_target_gives_zero(self):
        base = np.roll(lf.lorentzian_vector(4, 0.7), 5)
        other = np.roll(lf.lorentzian_vector(4, 1.4), 12)
        perp = other - (other @ base) * base
        target = TargetFunction(4, perp)
        assert abs(fitter.g_vector(target, [0.7], [5])[0]) < 1e-12

    def test_matches_brute_force(self, rng):
        samples = rng.normal(size=16)
        target = TargetFunction(4, samples)
        a = [0.4, 0.9, 1.7]
        k_c = [2, 9, 13]
        g = fitter.g_vector(target, a, k_c)
        for l in range(3):
            brute = sum(
                target.samples[j] * lf.lorentzian_value(4, a[l], j - k_c[l]) for j in range(16)
            )
            assert g[l] == pytest.approx(brute, abs=1e-12)


class TestBuildMatrices:
    def test_single_term(self):
        target = lf_target(4, 0.7, 5)
        G, S = fitter.build_matrices(target, [0.9], [5])
        g = fitter.g_vector(target, [0.9], [5])
        assert G.shape == (1, 1) and S.shape == (1, 1)
        assert G[0, 0] == pytest.approx(g[0] ** 2, abs=1e-14)
        assert S[0, 0] == pytest.approx(1.0, abs=1e-13)

    def test_duplicate_terms_rejected(self):
        target = lf_target(4, 0.7, 5)
        with pytest.raises(DegenerateBasisError):
            fitter.build_matrices(target, [0.8, 0.8], [3, 3])

    def test_overlap_entries_match_brute_force(self):
        target = TargetFunction(5, fitter.two_gaussian_samples(5))
        a = [0.360, 0.490, 1.672]
        k_c = [8, 16, 12]
        _, S = fitter.build_matrices(target, a, k_c)
        for i in range(3):
            vi = np.roll(lf.lorentzian_vector(5, a[i]), k_c[i])
            for j in range(3):
                vj = np.roll(lf.lorentzian_vector(5, a[j]), k_c[j])
                assert S[i, j] == pytest.approx(float(vi @ vj), abs=1e-12)


class TestOptimalCoeffs:
    def test_single_term(self):
        target = lf_target(4, 0.7, 5)
        G, S = fitter.build_matrices(target, [0.7], [5])
        d, f = fitter.optimal_coeffs(G, S)
        assert abs(d[0]) == pytest.approx(1.0, abs=1e-10)
        assert f == pytest.approx(1.0, abs=1e-10)

    def test_orthonormal_limit(self):
        # far-separated narrow terms: S ~ I so d tracks g
        target = TargetFunction(5, fitter.two_gaussian_samples(5))
        a = [0.05, 0.05]
        k_c = [8, 16]
        G, S = fitter.build_matrices(target, a, k_c)
        g = fitter.g_vector(target, a, k_c)
        d, f = fitter.optimal_coeffs(G, S)
        assert np.max(np.abs(S - np.eye(2))) < 0.01
        assert abs(f - float(g @ g)) < 0.01
        assert np.max(np.abs(d - g / np.linalg.norm(g))) < 0.02

    def test_rank1_matches_dense_eigensolver(self, rng):
        for _ in range(8):
            target = TargetFunction(4, rng.normal(size=16))
            a = sorted(rng.uniform(0.2, 2.5, 4))
            k_c = rng.choice(16, size=4, replace=False)
            G, S = fitter.build_matrices(target, a, k_c)
            d1, f1 = fitter.optimal_coeffs(G, S)
            d2, f2 = fitter.optimal_coeffs_eig(G, S)
            assert abs(f1 - f2) < 1e-10
            assert abs(float(d1 @ S @ d1) - 1.0) < 1e-10
            assert abs(float(d2 @ S @ d2) - 1.0) < 1e-10
            assert np.max(np.abs(np.abs(d1) - np.abs(d2))) < 1e-7

    def test_overlap_bounded_by_one(self, rng):
        for _ in range(10):
            target = TargetFunction(4, rng.normal(size=16))
            a = sorted(rng.uniform(0.2, 2.5, 3))
            k_c = rng.choice(16, size=3, replace=False)
            _, f = fitter.optimal_coeffs(*fitter.build_matrices(target, a, k_c))
            assert -1e-12 <= f <= 1.0 + 1e-12


class TestOptimizeDecayRates:
    def test_recovers_known_rate(self):
        target = lf_target(5, 0.7, 11)
        a, d, f = fitter.optimize_decay_rates(target, [11], [1.5], n_iters=3)
        assert abs(a[0] - 0.7) < 1e-3
        assert f > 1 - 1e-6
        assert abs(d[0]) == pytest.approx(1.0, abs=1e-6)

    def test_single_iteration_runs(self):
        target = TargetFunction(5, fitter.two_gaussian_samples(5))
        a, d, f = fitter.optimize_decay_rates(target, [8, 16], [1.0, 1.0], n_iters=1)
        assert 0.0 <= f <= 1.0

    def test_monotone_in_iteration_count(self, rng):
        for seed in range(10):
            r = np.random.default_rng(seed)
            target = TargetFunction(4, r.normal(size=16))
            k_c = list(r.choice(16, size=2, replace=False))
            fs = [
                fitter.optimize_decay_rates(target, k_c, [1.0, 1.0], n_iters=n)[2]
                for n in (1, 2, 3)
            ]
            assert fs[0] <= fs[1] + 1e-12
            assert fs[1] <= fs[2] + 1e-12


class TestFit:
    def test_self_fit_single_lorentzian(self):
        target = lf_target(5, 0.9, 7)
        cfg = FitConfig(n_loc=1, n_metropolis=20, n_rate_iters=2, seed=3)
        res = fitter.fit(target, cfg)
        assert res.F > 1 - 1e-6
        assert res.k_c[0] == 7

    def test_two_gaussian_demo_reaches_reported_quality(self):
        target = TargetFunction(5, fitter.two_gaussian_samples(5))
        res = fitter.fit(target, FitConfig(n_loc=3, seed=1))
        assert res.F >= 0.99

    def test_greedy_limit_never_accepts_downhill(self):
        target = TargetFunction(5, fitter.two_gaussian_samples(5))
        res = fitter.fit(target, FitConfig(n_loc=2, beta=1e9, n_metropolis=40, seed=5))
        accepted = [f for f, ok in res.trace if ok]
        assert all(b >= a - 1e-12 for a, b in zip(accepted, accepted[1:]))

    def test_seed_reproducibility(self):
        target = TargetFunction(5, fitter.two_gaussian_samples(5))
        cfg = FitConfig(n_loc=2, n_metropolis=30, seed=11)
        r1 = fitter.fit(target, cfg)
        r2 = fitter.fit(target, cfg)
        assert np.array_equal(r1.d, r2.d)
        assert np.array_equal(r1.a, r2.a)
        assert np.array_equal(r1.k_c, r2.k_c)
        assert r1.F == r2.F
        assert r1.trace == r2.trace

    def test_best_so_far_dominates_trace(self):
        target = TargetFunction(5, fitter.two_gaussian_samples(5))
        res = fitter.fit(target, FitConfig(n_loc=2, n_metropolis=40, seed=2))
        finite = [f for f, _ in res.trace if math.isfinite(f)]
        assert res.F == max(finite)

    def test_coefficients_normalized_against_gram(self):
        target = TargetFunction(5, fitter.two_gaussian_samples(5))
        res = fitter.fit(target, FitConfig(n_loc=2, n_metropolis=30, seed=4))
        _, S = fitter.build_matrices(target, list(res.a), list(res.k_c))
        assert abs(float(res.d @ S @ res.d) - 1.0) < 1e-10


class TestComplexityEnvelope:
    def test_coefficient_solve_stays_polynomial(self, rng):
        # catches accidental exponential blowup only; generous constants
        times = {}
        for n_loc in (8, 16, 32):
            g = rng.normal(size=n_loc)
            S = np.eye(n_loc) + 0.05 * np.ones((n_loc, n_loc))  # SPD, well conditioned
            G = np.outer(g, g)
            t0 = time.perf_counter()
            for _ in range(50):
                fitter.optimal_coeffs(G, S)
            times[n_loc] = max(time.perf_counter() - t0, 1e-6)
        assert times[32] <= 64 * 20 * times[8] + 0.5

    def test_projection_build_scales_with_grid(self, rng):
        # g-vector work is n_loc passes over the grid
        times = {}
        for n_q in (6, 8):
            target = TargetFunction(n_q, rng.normal(size=1 << n_q))
            a = list(np.linspace(0.3, 2.5, 8))
            k_c = list(range(0, 1 << n_q, (1 << n_q) // 8))
            t0 = time.perf_counter()
            for _ in range(20):
                fitter.g_vector(target, a, k_c)
            times[n_q] = max(time.perf_counter() - t0, 1e-6)
        assert times[8] <= 16 * 20 * times[6] + 0.5


class TestIngestion:
    def test_csv_roundtrip(self, tmp_path):
        samples = fitter.two_gaussian_samples(5)
        path = tmp_path / "t.csv"
        path.write_text(
            "index,value\n" + "\n".join(f"{j},{v:.17g}" for j, v in enumerate(samples)) + "\n"
        )
        target = fitter.load_target_csv(path)
        assert target.n_q == 5
        assert np.allclose(target.samples, samples / np.linalg.norm(samples))

    def test_json_array(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text("[1.0, 2.0, 2.0, 1.0]")
        target = fitter.load_target_json(path)
        assert target.n_q == 2
        assert abs(np.linalg.norm(target.samples) - 1.0) < 1e-12

    def test_bad_length_rejected(self, tmp_path):
        path = tmp_path / "t.json"
        path.write_text("[1.0, 2.0, 3.0]")
        with pytest.raises(ValueError, match="power of two"):
            fitter.load_target_json(path)

    def test_duplicate_index_rejected(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("0,1.0\n0,2.0\n1,0.5\n2,0.5\n")
        with pytest.raises(ValueError, match="duplicate"):
            fitter.load_target_csv(path)

    def test_zero_target_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            TargetFunction(2, np.zeros(4))
