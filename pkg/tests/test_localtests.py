"""Local p-value functions and the even-df chi-square tail."""

import math

import numpy as np
import pytest
import scipy.stats

from mtcherry import (
    BUILTIN_TESTS,
    bonferroni_local_p,
    chi2_even_sf,
    chi2_even_sf_many,
    fisher_local_p,
    get_test,
    simes_local_p,
)

from conftest import oracle_local_p


class TestBonferroni:
    def test_two_values(self):
        assert bonferroni_local_p([0.01, 0.04]) == 0.02

    def test_singleton_identity(self):
        assert bonferroni_local_p([0.6]) == 0.6

    def test_cap_at_one(self):
        assert bonferroni_local_p([0.5, 0.9, 0.7]) == 1.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            bonferroni_local_p([])


class TestSimes:
    def test_two_values(self):
        assert simes_local_p([0.02, 0.04]) == 0.04

    def test_three_values(self):
        assert simes_local_p([0.01, 0.02, 0.30]) == pytest.approx(0.03, abs=1e-15)

    def test_singleton_identity(self):
        assert simes_local_p([0.6]) == 0.6

    def test_order_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            v = rng.random(6)
            assert simes_local_p(v) == simes_local_p(v[::-1])


class TestFisher:
    def test_singleton_identity_across_grid(self):
        for p in (1e-12, 1e-4, 0.05, 0.3, 0.97, 1.0):
            assert fisher_local_p([p]) == pytest.approx(p, rel=1e-12)

    def test_all_ones(self):
        assert fisher_local_p([1.0, 1.0]) == 1.0

    def test_two_equal_values(self):
        # independent oracle: scipy.stats.chi2.sf(-4 ln 0.05, 4)
        assert fisher_local_p([0.05, 0.05]) == pytest.approx(
            0.017478661367769956, rel=1e-12
        )

    def test_zero_p_clamped(self):
        assert 0.0 <= fisher_local_p([0.0, 0.5]) <= 1.0


class TestChi2EvenSf:
    def test_zero_statistic(self):
        assert chi2_even_sf(1, 0.0) == 1.0

    def test_m1_closed_form(self):
        # exp(-s/2) exactly, not merely approximately
        for s in (0.0, 1.0, 5.9915, 40.0):
            assert chi2_even_sf(1, s) == math.exp(-s / 2)
        assert chi2_even_sf(1, 5.9915) == pytest.approx(0.049999113685555166, rel=1e-12)

    def test_rounded_fisher_statistic(self):
        assert chi2_even_sf(2, 11.9829) == pytest.approx(
            float(scipy.stats.chi2.sf(11.9829, 4)), rel=1e-12
        )

    def test_matches_scipy_over_grid(self):
        rng = np.random.default_rng(7)
        ms = np.concatenate([np.arange(1, 40), rng.integers(40, 5000, 60)])
        for m in ms:
            m = int(m)
            # spread statistics around the bulk of the distribution
            ss = np.concatenate(
                [
                    rng.random(5) * 4 * m,
                    [0.0, 0.5, 2.0 * m, max(0.0, 2.0 * m - 6 * math.sqrt(m))],
                ]
            )
            mine = chi2_even_sf_many(np.full(ss.size, m), ss)
            ref = scipy.stats.chi2.sf(ss, 2 * m)
            np.testing.assert_allclose(mine, ref, rtol=0, atol=1e-11)

    def test_extreme_tails_clamp(self):
        assert chi2_even_sf(3, 1e6) == 0.0
        assert chi2_even_sf(1000, 1e-8) == 1.0

    def test_strictly_decreasing_in_s(self):
        s = np.linspace(20.0, 300.0, 80)
        vals = chi2_even_sf_many(np.full(s.size, 30), s)
        assert np.all(np.diff(vals) < 0)

    def test_vector_agrees_with_scalar(self):
        ms = np.array([1, 2, 5, 64, 300])
        ss = np.array([0.0, 3.0, 11.0, 120.0, 650.0])
        many = chi2_even_sf_many(ms, ss)
        each = [chi2_even_sf(int(m), float(s)) for m, s in zip(ms, ss)]
        np.testing.assert_array_equal(many, np.array(each))

    def test_input_validation(self):
        with pytest.raises(ValueError):
            chi2_even_sf(0, 1.0)
        with pytest.raises(ValueError):
            chi2_even_sf(1, -1.0)
        with pytest.raises(ValueError):
            chi2_even_sf(1, float("nan"))


class TestCapabilities:
    def test_builtin_flags(self):
        for kind in BUILTIN_TESTS:
            spec = get_test(kind)
            assert spec.symmetric
            assert spec.coordinate_monotone
            assert spec.singleton_faithful

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            get_test("tippett")


class TestSharedProperties:
    """The capability flags, verified behaviorally."""

    def test_singleton_faithful(self):
        rng = np.random.default_rng(1)
        for kind in BUILTIN_TESTS:
            spec = get_test(kind)
            for p in rng.random(20):
                assert spec.local_p([p]) == pytest.approx(p, abs=1e-12)

    def test_coordinate_monotone(self):
        rng = np.random.default_rng(2)
        for kind in BUILTIN_TESTS:
            spec = get_test(kind)
            for _ in range(60):
                v = rng.random(int(rng.integers(1, 8)))
                i = int(rng.integers(v.size))
                w = v.copy()
                w[i] = v[i] + (1.0 - v[i]) * rng.random()
                assert spec.local_p(w) >= spec.local_p(v) - 1e-15

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for kind in BUILTIN_TESTS:
            spec = get_test(kind)
            for _ in range(30):
                v = rng.random(6)
                w = rng.permutation(v)
                assert spec.local_p(v) == spec.local_p(w)

    def test_simes_dominates_bonferroni(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            v = rng.random(int(rng.integers(1, 10)))
            assert simes_local_p(v) <= bonferroni_local_p(v)

    def test_matches_independent_oracle(self):
        rng = np.random.default_rng(5)
        for kind in BUILTIN_TESTS:
            spec = get_test(kind)
            for _ in range(80):
                v = rng.random(int(rng.integers(1, 12)))
                if rng.random() < 0.5:
                    v = v * 0.05
                assert spec.local_p(v) == pytest.approx(
                    oracle_local_p(kind, v), rel=1e-11, abs=1e-13
                )

    def test_rejects_bad_inputs(self):
        for kind in BUILTIN_TESTS:
            spec = get_test(kind)
            with pytest.raises(ValueError):
                spec.local_p([])
            with pytest.raises(ValueError):
                spec.local_p([0.5, 1.5])
            with pytest.raises(ValueError):
                spec.local_p([float("nan")])
