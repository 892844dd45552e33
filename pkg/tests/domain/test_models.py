"""Tests for the benchmark models and reference values"""

import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from domain.errors import InvalidInputError
from domain.metrics import trace_correlation, SubspaceBasis
from domain.models import ModelSpec, generate_model, replication_rng, response
from domain.reference_values import (
    DIMENSION_FREQUENCIES, HOUSING, TRACE_CORRELATION,
    accuracy_divergence, dimension_divergence, dimension_reference, trace_correlation_reference
)


class TestModelSpec(unittest.TestCase):
    """Test model settings"""

    def test_published_settings(self):
        spec = ModelSpec.published(3)

        self.assertEqual((spec.n, spec.p, spec.true_dimension), (400, 10, 2))

    def test_overrides(self):
        spec = ModelSpec.published(1, n=50, p=8)

        self.assertEqual((spec.n, spec.p), (50, 8))

    def test_rejects_unknown_model(self):
        with self.assertRaises(InvalidInputError):
            ModelSpec.published(5)

    def test_rejects_too_few_predictors(self):
        with self.assertRaises(InvalidInputError):
            ModelSpec(1, 100, 3)

    def test_model_one_direction(self):
        """Should put equal weight on the first four coordinates"""
        basis = ModelSpec.published(1).true_basis()

        assert_allclose(basis.columns[:, 0], [0.5, 0.5, 0.5, 0.5, 0.0])


class TestResponses(unittest.TestCase):
    """Test the model equations on fixed inputs"""

    def setUp(self):
        self.X = np.array([[1.0, 2.0, 3.0, 4.0, 5.0], [0.0, -1.0, 0.0, 1.0, 2.0]])
        self.e = np.array([0.5, 0.0])

    def test_linear_model(self):
        assert_allclose(response(1, self.X, self.e), [10.5, 0.0])

    def test_exponential_model(self):
        assert_allclose(response(2, self.X, self.e), [np.exp(2.0), 1.0])

    def test_quadratic_model(self):
        assert_allclose(response(3, self.X, self.e), [4.5, 0.0])

    def test_rational_model(self):
        assert_allclose(response(4, self.X, self.e), [1.0 / 12.75 + 0.5, 0.0])


class TestGenerateModel(unittest.TestCase):
    """Test reproducible data generation"""

    def test_same_stream_gives_same_data(self):
        first, _ = generate_model(ModelSpec(2, 30, 5, seed=4, replication=7))
        second, _ = generate_model(ModelSpec(2, 30, 5, seed=4, replication=7))

        assert_array_equal(first.X, second.X)
        assert_array_equal(first.y, second.y)

    def test_replications_differ(self):
        first, _ = generate_model(ModelSpec(2, 30, 5, seed=4, replication=0))
        second, _ = generate_model(ModelSpec(2, 30, 5, seed=4, replication=1))

        self.assertFalse(np.allclose(first.X, second.X))

    def test_noise_free_response(self):
        """Should evaluate the model exactly when the noise scale is zero"""
        data, truth = generate_model(ModelSpec(3, 25, 4, seed=1), noise_scale=0.0)

        x1, x2 = data.X[:, 0], data.X[:, 1]
        assert_allclose(data.y, x1 * (x1 + x2 + 1.0))
        self.assertAlmostEqual(trace_correlation(truth, SubspaceBasis.coordinate(4, (0, 1))), 1.0)

    def test_streams_are_keyed(self):
        a = replication_rng(0, 1, 2).standard_normal(3)
        b = replication_rng(0, 2, 1).standard_normal(3)

        self.assertFalse(np.allclose(a, b))


class TestReferenceValues(unittest.TestCase):

    def test_lookup(self):
        self.assertEqual(trace_correlation_reference(10, "SIR", 1), (0.9855, 0.0011))
        self.assertEqual(trace_correlation_reference(None, "CUME", 3), (0.7802, 0.0088))
        self.assertEqual(dimension_reference("OSIR_5", 1), (0, 0.986, 0.014))

    def test_known_divergences(self):
        self.assertIsNotNone(accuracy_divergence(10, "SIR", 2))
        self.assertIsNone(accuracy_divergence(5, "SIR", 2))
        self.assertIsNotNone(dimension_divergence("SIR", 1))
        self.assertIsNone(dimension_divergence("OSIR_5", 1))

    def test_tables_are_complete(self):
        """Should cover H=5 and H=10 sweeps, all four models and the housing sweep"""
        self.assertEqual(len(TRACE_CORRELATION), 5 + 10 + 1)
        self.assertTrue(all(len(rows) == 4 for rows in TRACE_CORRELATION.values()))
        self.assertEqual(len(DIMENSION_FREQUENCIES), 11)
        self.assertIn("OSIR_19", HOUSING)


if __name__ == '__main__':
    unittest.main()
