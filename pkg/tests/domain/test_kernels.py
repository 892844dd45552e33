"""Tests for the SIR, OSIR and CUME kernel matrices"""

import unittest

import numpy as np
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from domain.errors import InvalidInputError, UnsupportedLevelError
from domain.estimate import Method
from domain.kernels import (
    bundle_moments, cume_kernel, cumulative_overlap_kernel, cumulative_slicing_kernel,
    level_two_equal_count_form, osir_difference_form, osir_kernel, sir_kernel
)
from domain.matrices import sample_mean
from domain.slicing import SliceStats, assign_slices, slice_stats


def random_sample(rng: np.random.Generator, n: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    X = rng.standard_normal((n, p))
    y = X[:, 0] + 0.5 * X[:, -1] ** 2 + 0.3 * rng.standard_normal(n)
    return X, y


def stats_for(X: np.ndarray, y: np.ndarray, H: int) -> tuple[SliceStats, np.ndarray]:
    return slice_stats(X, assign_slices(y, H)), sample_mean(X)


def three_slice_line() -> SliceStats:
    """Equal-count slices with scalar means -1, 0, 1."""
    return SliceStats(probs=np.full(3, 1.0 / 3.0), means=np.array([[-1.0], [0.0], [1.0]]))


class TestSirKernel(unittest.TestCase):
    """Test the weighted covariance of slice means"""

    def test_hand_computed_value(self):
        """Should weight squared deviations by slice probabilities"""
        kernel = sir_kernel(three_slice_line(), [0.0])

        assert_allclose(kernel.matrix, [[2.0 / 3.0]])
        self.assertIs(kernel.method, Method.SIR)

    def test_one_slice_is_zero(self):
        """Should vanish when all observations share one slice"""
        rng = np.random.default_rng(0)
        X, y = random_sample(rng, 20, 3)
        stats, xbar = stats_for(X, y, 1)

        assert_allclose(sir_kernel(stats, xbar).matrix, np.zeros((3, 3)), atol=1e-14)

    def test_two_slice_example(self):
        X = np.array([[0.0], [2.0], [4.0], [6.0]])
        stats, xbar = stats_for(X, np.array([1.0, 2.0, 3.0, 4.0]), 2)

        # slice means 1 and 5 around xbar = 3
        assert_allclose(sir_kernel(stats, xbar).matrix, [[4.0]])

    def test_matches_per_slice_accumulation(self):
        """Should match an explicit loop over slice members"""
        rng = np.random.default_rng(40)
        X, y = random_sample(rng, 40, 5)
        assignment = assign_slices(y, 8)
        xbar = X.mean(axis=0)

        expected = np.zeros((5, 5))
        for h in range(8):
            members = X[assignment.members(h)]
            d = members.mean(axis=0) - xbar
            expected += members.shape[0] / 40 * np.outer(d, d)
        assert_allclose(sir_kernel(slice_stats(X, assignment), xbar).matrix, expected, rtol=0, atol=1e-12)


class TestBundleMoments(unittest.TestCase):
    """Test overlapping bundle probabilities and means"""

    def test_three_slice_level_two_bundles(self):
        """Should include ghost slices at both ends"""
        probs, means = bundle_moments(three_slice_line(), 2)

        assert_allclose(probs, [1 / 9, 2 / 9, 1 / 3, 2 / 9, 1 / 9])
        assert_allclose(means[:, 0], [-1.0, -0.5, 0.0, 0.5, 1.0])

    def test_probabilities_sum_to_one_for_every_level(self):
        """Should normalize bundle probabilities for 1 <= L <= H-1"""
        rng = np.random.default_rng(11)
        X, y = random_sample(rng, 53, 3)
        for H in range(2, 12):
            stats, _ = stats_for(X, y, H)
            for level in range(1, H):
                probs, _ = bundle_moments(stats, level)
                self.assertEqual(probs.size, H + level)
                self.assertAlmostEqual(probs.sum(), 1.0, places=12)


class TestOsirKernel(unittest.TestCase):
    """Test the overlapping kernel and its difference forms"""

    def test_level_zero_equals_sir(self):
        """Should reproduce the SIR kernel at L = 0"""
        rng = np.random.default_rng(1)
        X, y = random_sample(rng, 40, 4)
        stats, xbar = stats_for(X, y, 5)

        assert_allclose(osir_kernel(stats, xbar, 0).matrix, sir_kernel(stats, xbar).matrix)

    def test_level_one_matches_difference_form(self):
        """Should agree with Gamma_H minus the weighted first differences"""
        rng = np.random.default_rng(101)
        for _ in range(100):
            n, p, H = int(rng.integers(20, 201)), int(rng.integers(2, 9)), int(rng.integers(3, 11))
            X, y = random_sample(rng, n, p)
            stats, xbar = stats_for(X, y, H)

            deviation = osir_kernel(stats, xbar, 1).matrix - osir_difference_form(stats, xbar, 1).matrix
            self.assertLessEqual(np.max(np.abs(deviation)), 1e-10)

    def test_level_two_matches_difference_form(self):
        """Should agree with the second-order difference form"""
        rng = np.random.default_rng(202)
        for _ in range(100):
            n, p, H = int(rng.integers(20, 201)), int(rng.integers(2, 9)), int(rng.integers(3, 11))
            X, y = random_sample(rng, n, p)
            stats, xbar = stats_for(X, y, H)

            deviation = osir_kernel(stats, xbar, 2).matrix - osir_difference_form(stats, xbar, 2).matrix
            self.assertLessEqual(np.max(np.abs(deviation)), 1e-10)

    def test_level_two_equal_count_form(self):
        """Should agree with the level-2 kernel when slice counts are equal"""
        rng = np.random.default_rng(303)
        for _ in range(50):
            H = int(rng.integers(3, 11))
            n, p = H * int(rng.integers(2, 20)), int(rng.integers(2, 9))
            X, y = random_sample(rng, n, p)
            stats, xbar = stats_for(X, y, H)

            deviation = osir_kernel(stats, xbar, 2).matrix - level_two_equal_count_form(stats, xbar).matrix
            self.assertLessEqual(np.max(np.abs(deviation)), 1e-10)

    def test_level_two_edge_weight_one_over_two_h_disagrees(self):
        """Should show that an edge weight of 1/(2H) misses the level-2 kernel"""
        stats = three_slice_line()

        assert_allclose(osir_kernel(stats, [0.0], 2).matrix, [[1.0 / 3.0]])
        assert_allclose(level_two_equal_count_form(stats, [0.0]).matrix, [[1.0 / 3.0]])
        assert_allclose(level_two_equal_count_form(stats, [0.0], edge_weight=1.0 / 6.0).matrix, [[5.0 / 9.0]])

    def test_equal_count_form_rejects_unequal_slices(self):
        rng = np.random.default_rng(4)
        X, y = random_sample(rng, 10, 2)
        stats, xbar = stats_for(X, y, 3)

        with self.assertRaises(InvalidInputError):
            level_two_equal_count_form(stats, xbar)

    def test_difference_form_rejects_level_three(self):
        """Should only support levels 1 and 2"""
        rng = np.random.default_rng(5)
        X, y = random_sample(rng, 30, 2)
        stats, xbar = stats_for(X, y, 6)

        with self.assertRaises(UnsupportedLevelError):
            osir_difference_form(stats, xbar, 3)

    def test_rejects_level_at_least_h(self):
        rng = np.random.default_rng(6)
        X, y = random_sample(rng, 30, 2)
        stats, xbar = stats_for(X, y, 4)

        with self.assertRaises(InvalidInputError):
            osir_kernel(stats, xbar, 4)
        with self.assertRaises(InvalidInputError):
            osir_kernel(stats, xbar, -1)

    def test_level_one_is_dominated_by_sir(self):
        """Should satisfy Gamma_H^(1) <= Gamma_H in the PSD order"""
        rng = np.random.default_rng(7)
        for _ in range(30):
            X, y = random_sample(rng, int(rng.integers(20, 120)), 4)
            stats, xbar = stats_for(X, y, int(rng.integers(2, 11)))

            gap = sir_kernel(stats, xbar).matrix - osir_kernel(stats, xbar, 1).matrix
            self.assertGreaterEqual(np.min(np.linalg.eigvalsh(gap)), -1e-12)


class TestCumulativeKernels(unittest.TestCase):
    """Test CUME and the maximal-overlap closed form"""

    def test_cume_hand_computed_value(self):
        """Should average outer products of cumulative mean deviations"""
        X = np.array([[0.0], [2.0], [4.0]])
        y = np.array([1.0, 2.0, 3.0])

        # cumulative means 0, 1, 2 around xbar = 2
        assert_allclose(cume_kernel(X, y).matrix, [[5.0 / 3.0]])

    def test_cume_ties_share_cumulative_mean(self):
        """Should use the same cumulative mean for tied responses"""
        X = np.array([[0.0], [2.0], [4.0]])
        y = np.array([1.0, 1.0, 3.0])

        # cumulative means 1, 1, 2 around xbar = 2
        assert_allclose(cume_kernel(X, y).matrix, [[2.0 / 3.0]])

    def test_cume_two_points(self):
        X = np.array([[0.0], [2.0]])
        y = np.array([1.0, 2.0])

        # cumulative means 0, 1 around xbar = 1
        assert_allclose(cume_kernel(X, y).matrix, [[0.5]])

    def test_single_observation_is_zero(self):
        X, y = np.array([[3.0, -1.0]]), np.array([2.0])

        assert_allclose(cume_kernel(X, y).matrix, np.zeros((2, 2)))
        assert_allclose(cumulative_slicing_kernel(X, y).matrix, np.zeros((2, 2)))

    def test_cume_matches_brute_force(self):
        """Should match the O(n^2) cumulative-mean construction"""
        rng = np.random.default_rng(25)
        X, y = random_sample(rng, 25, 4)
        xbar = X.mean(axis=0)

        expected = np.zeros((4, 4))
        for yi in y:
            below = X[y <= yi]
            d = below.mean(axis=0) - xbar
            expected += np.outer(d, d) / y.size
        assert_allclose(cume_kernel(X, y).matrix, expected, rtol=0, atol=1e-12)

    def test_cumulative_slicing_hand_computed_value(self):
        """Should weight cumulative deviations by the share of the cumulative set"""
        X = np.array([[0.0], [2.0], [4.0]])

        # m = -2/3, -2/3, 0
        assert_allclose(cumulative_slicing_kernel(X, np.array([1.0, 2.0, 3.0])).matrix, [[8.0 / 27.0]])
        # tied responses share m = -2/3
        assert_allclose(cumulative_slicing_kernel(X, np.array([1.0, 1.0, 3.0])).matrix, [[8.0 / 27.0]])

    def test_cumulative_slicing_matches_brute_force(self):
        """Should match the O(n^2) cumulative-sum construction, ties included"""
        rng = np.random.default_rng(26)
        X, _ = random_sample(rng, 30, 3)
        y = rng.integers(0, 12, size=30).astype(float)
        n, xbar = y.size, X.mean(axis=0)

        expected = np.zeros((3, 3))
        for yi in y:
            m = (X[y <= yi] - xbar).sum(axis=0) / n
            expected += np.outer(m, m) / n
        assert_allclose(cumulative_slicing_kernel(X, y).matrix, expected, rtol=0, atol=1e-12)

    def test_cumulative_forms_differ_by_set_share(self):
        """Should equal the mean form reweighted by (k/n)^2 for distinct responses"""
        rng = np.random.default_rng(27)
        X, y = random_sample(rng, 20, 2)
        n = y.size
        order = np.argsort(y)
        deviations = np.cumsum(X[order], axis=0) / np.arange(1, n + 1)[:, None] - X.mean(axis=0)
        shares = np.arange(1, n + 1) / n

        expected = (deviations.T * shares ** 2) @ deviations / n
        assert_allclose(cumulative_slicing_kernel(X, y).matrix, expected, atol=1e-12)
        self.assertFalse(np.allclose(cumulative_slicing_kernel(X, y).matrix, cume_kernel(X, y).matrix))

    def test_maximal_overlap_matches_closed_form(self):
        """Should equal the H = n, L = n-1 overlapping kernel"""
        rng = np.random.default_rng(404)
        for _ in range(50):
            n, p = int(rng.integers(2, 40)), int(rng.integers(1, 5))
            X = rng.standard_normal((n, p))
            y = rng.permutation(n).astype(float)
            stats, xbar = stats_for(X, y, n)

            deviation = osir_kernel(stats, xbar, n - 1).matrix - cumulative_overlap_kernel(X, y).matrix
            self.assertLessEqual(np.max(np.abs(deviation)), 1e-10)

    def test_maximal_overlap_is_not_twice_cume(self):
        """Should equal CUME itself, not twice CUME, for two observations"""
        X = np.array([[1.0, -2.0], [3.0, 5.0]])
        y = np.array([0.0, 1.0])
        stats, xbar = stats_for(X, y, 2)

        overlap = osir_kernel(stats, xbar, 1).matrix
        assert_allclose(overlap, cume_kernel(X, y).matrix, atol=1e-14)
        self.assertFalse(np.allclose(overlap, 2.0 * cume_kernel(X, y).matrix))


class TestKernelProperties(unittest.TestCase):
    """Randomized invariants of every kernel"""

    @settings(derandomize=True, max_examples=60, deadline=None)
    @given(
        seed=st.integers(0, 2 ** 32 - 1),
        n=st.integers(12, 80),
        p=st.integers(1, 5),
        H=st.integers(2, 10),
        shift=st.floats(-50.0, 50.0),
    )
    def test_translation_invariance(self, seed, n, p, H, shift):
        """Should not change when every predictor is shifted by a constant"""
        rng = np.random.default_rng(seed)
        X, y = random_sample(rng, n, p)
        moved = X + shift * rng.standard_normal(p)
        level = int(rng.integers(0, H))

        for kernel in (
            lambda Z: sir_kernel(*stats_for(Z, y, H)),
            lambda Z: osir_kernel(*stats_for(Z, y, H), level),
            lambda Z: cume_kernel(Z, y),
            lambda Z: cumulative_slicing_kernel(Z, y),
        ):
            assert_allclose(kernel(moved).matrix, kernel(X).matrix, atol=1e-9)

    @settings(derandomize=True, max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(12, 80), H=st.integers(2, 10))
    def test_permutation_invariance(self, seed, n, H):
        """Should not depend on the order of observations with distinct responses"""
        rng = np.random.default_rng(seed)
        X, y = random_sample(rng, n, 3)
        perm = rng.permutation(n)
        level = int(rng.integers(0, H))

        assert_allclose(
            osir_kernel(*stats_for(X[perm], y[perm], H), level).matrix,
            osir_kernel(*stats_for(X, y, H), level).matrix,
            atol=1e-12,
        )
        assert_allclose(
            cumulative_slicing_kernel(X[perm], y[perm]).matrix,
            cumulative_slicing_kernel(X, y).matrix,
            atol=1e-12,
        )

    @settings(derandomize=True, max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(10, 80), H=st.integers(2, 10))
    def test_bundle_normalization(self, seed, n, H):
        """Should keep bundle probabilities summing to one"""
        rng = np.random.default_rng(seed)
        X, y = random_sample(rng, n, 2)
        stats, _ = stats_for(X, y, H)
        for level in range(1, H):
            self.assertAlmostEqual(bundle_moments(stats, level)[0].sum(), 1.0, places=12)

    @settings(derandomize=True, max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(10, 100), H=st.integers(2, 10))
    def test_level_one_psd_order(self, seed, n, H):
        rng = np.random.default_rng(seed)
        X, y = random_sample(rng, n, 3)
        stats, xbar = stats_for(X, y, H)

        gap = sir_kernel(stats, xbar).matrix - osir_kernel(stats, xbar, 1).matrix
        self.assertGreaterEqual(np.min(np.linalg.eigvalsh(gap)), -1e-12)


if __name__ == '__main__':
    unittest.main()
