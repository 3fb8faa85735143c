import math
from itertools import combinations

import numpy as np
import pytest
import scipy.stats as scipy_stats

from cxrkit.metrics import (
    accuracy_ci,
    agreement_ratio,
    icc,
    mann_whitney,
    mean_ci,
    paired_t,
)


class TestPairedT:
    def test_mean_zero_differences(self):
        assert paired_t([1, -1, 2, -2], [0, 0, 0, 0]) == pytest.approx(1.0)

    def test_123_case(self):
        # differences [1,2,3]: t = 3.4641, df 2
        assert paired_t([1, 2, 3], [0, 0, 0]) == pytest.approx(0.0742, abs=5e-4)

    def test_degenerate_equal_samples(self):
        with pytest.raises(ValueError, match="degenerate"):
            paired_t([1, 2, 3], [1, 2, 3])

    def test_matches_scipy_on_random_cases(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(3, 30))
            a = rng.normal(size=n)
            b = rng.normal(size=n)
            expected = scipy_stats.ttest_rel(a, b).pvalue
            assert paired_t(a.tolist(), b.tolist()) == pytest.approx(expected, abs=1e-9)


def exact_mw_p(a, b):
    """Independent enumeration oracle over all group labelings."""
    pooled = list(a) + list(b)
    n1 = len(a)

    def u_stat(ga, gb):
        return sum(1.0 if x > y else (0.5 if x == y else 0.0) for x in ga for y in gb)

    u_obs = u_stat(a, b)
    le = ge = total = 0
    for combo in combinations(range(len(pooled)), n1):
        chosen = set(combo)
        ga = [pooled[i] for i in range(len(pooled)) if i in chosen]
        gb = [pooled[i] for i in range(len(pooled)) if i not in chosen]
        u = u_stat(ga, gb)
        total += 1
        le += u <= u_obs
        ge += u >= u_obs
    return min(1.0, 2.0 * min(le / total, ge / total))


class TestMannWhitney:
    def test_extreme_separation(self):
        assert mann_whitney([1, 2], [3, 4]) == pytest.approx(2 / 6)

    def test_balanced(self):
        assert mann_whitney([1, 4], [2, 3]) == pytest.approx(1.0)

    def test_interleaved(self):
        assert mann_whitney([1, 3], [2, 4]) == pytest.approx(2 / 3)

    def test_exact_matches_enumeration_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n1 = int(rng.integers(2, 6))
            n2 = int(rng.integers(2, 6))
            a = rng.permutation(100)[:n1].tolist()
            b = rng.permutation(np.arange(100, 200))[:n2].tolist()
            assert mann_whitney(a, b) == pytest.approx(exact_mw_p(a, b), abs=1e-12)

    def test_approximation_close_to_exact_for_n6_to_8(self):
        from cxrkit.metrics.stats import _normal_sf, _u_statistic

        rng = np.random.default_rng(9)
        for _ in range(30):
            n1 = int(rng.integers(6, 9))
            n2 = int(rng.integers(6, 9))
            values = rng.permutation(1000)[: n1 + n2]
            a = values[:n1].tolist()
            b = values[n1:].tolist()
            exact = exact_mw_p(a, b)
            u1 = _u_statistic(a, b)
            mu = n1 * n2 / 2
            sigma = math.sqrt(n1 * n2 * (n1 + n2 + 1) / 12)
            z = max((abs(u1 - mu) - 0.5) / sigma, 0.0)
            approx = min(1.0, 2 * _normal_sf(z))
            assert abs(approx - exact) <= 0.05

    def test_ties_use_corrected_normal_approximation(self):
        a = [1, 2, 2, 3, 5, 5, 6]
        b = [2, 3, 3, 4, 5, 7, 8]
        expected = scipy_stats.mannwhitneyu(a, b, alternative="two-sided",
                                            method="asymptotic", use_continuity=True).pvalue
        assert mann_whitney(a, b) == pytest.approx(expected, abs=1e-9)

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            mann_whitney([], [1])


class TestICC:
    def test_identical_columns(self):
        assert icc([[1, 1], [2, 2], [3, 3]]) == pytest.approx(1.0)

    def test_hand_computed_anova(self):
        # [[1,2],[3,4],[5,6]]: MSR=8, MSC=1.5, MSE=0 -> 8/9
        assert icc([[1, 2], [3, 4], [5, 6]]) == pytest.approx(8 / 9)

    def test_constant_matrix_degenerate(self):
        with pytest.raises(ValueError):
            icc([[2, 2], [2, 2]])

    def test_shape_requirements(self):
        with pytest.raises(ValueError):
            icc([[1, 2]])
        with pytest.raises(ValueError):
            icc([[1], [2]])


class TestAgreementRatio:
    def test_all_agree(self):
        assert agreement_ratio([10, 10, 10]) == 1.0

    def test_mixed(self):
        # agree-or-strongly-agree means value >= 5
        assert agreement_ratio([5, 0, -5, 10]) == 0.5

    def test_single_disagree(self):
        assert agreement_ratio([-10]) == 0.0

    def test_rejects_off_scale(self):
        with pytest.raises(ValueError):
            agreement_ratio([3])

    def test_empty(self):
        with pytest.raises(ValueError):
            agreement_ratio([])


class TestBootstrap:
    def test_all_true(self):
        r = accuracy_ci([True] * 10, seed=0)
        assert (r.point, r.lo, r.hi) == (1.0, 1.0, 1.0)

    def test_two_sample_endpoints_from_resample_space(self):
        r = accuracy_ci([True, False], seed=3)
        assert r.point == 0.5
        assert r.lo in (0.0, 0.5, 1.0) and r.hi in (0.0, 0.5, 1.0)

    def test_seeded_determinism(self):
        a = accuracy_ci([True, False, True], resamples=1000, seed=11)
        b = accuracy_ci([True, False, True], resamples=1000, seed=11)
        assert a == b

    def test_interval_brackets_point(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            vals = rng.normal(size=int(rng.integers(2, 40))).tolist()
            r = mean_ci(vals, seed=2)
            assert r.lo <= r.point <= r.hi

    def test_empty_errors(self):
        with pytest.raises(ValueError):
            accuracy_ci([])
