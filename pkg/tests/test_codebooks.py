"""
Unit tests for the DFT and polar-domain codebooks and training overheads.
"""

import unittest

import numpy as np
from pydantic import ValidationError

from conftest import TestConstants, TestDataFactory
from models.schemas import Codebook, CodebookKind, PolarSamplingParams, Scheme
from tools.array_model import near_steering_matrix
from tools.codebooks import (
    build_dft_codebook,
    build_polar_codebook,
    dft_angles,
    polar_index,
    polar_range_labels,
    training_overhead,
)


class TestDftCodebook(unittest.TestCase):
    """Far-field codebook on the uniform spatial-angle grid."""

    def setUp(self):
        self.cfg = TestDataFactory.create_array()
        self.codebook = build_dft_codebook(self.cfg)

    def test_two_element_grid(self):
        np.testing.assert_allclose(dft_angles(2), [-0.5, 0.5])

    def test_grid_is_symmetric_and_uniform(self):
        angles = self.codebook.angles
        self.assertEqual(angles.shape, (256,))
        np.testing.assert_allclose(angles, -angles[::-1], atol=1e-15)
        np.testing.assert_allclose(np.diff(angles), 2.0 / 256, atol=1e-15)
        self.assertAlmostEqual(float(angles[TestConstants.ON_GRID_INDEX]), 1.0 / 256, places=15)

    def test_codewords_are_orthonormal(self):
        gram = self.codebook.vectors @ self.codebook.vectors.conj().T
        np.testing.assert_allclose(gram, np.eye(256), atol=1e-10)

    def test_dft_entries_have_no_range(self):
        self.assertEqual(self.codebook.kind, CodebookKind.DFT)
        self.assertTrue(np.all(np.isnan(self.codebook.ranges)))
        self.assertIsNone(self.codebook.range_label(0))

    def test_codebook_is_read_only(self):
        with self.assertRaises(ValueError):
            self.codebook.vectors[0, 0] = 0.0

    def test_build_is_cached(self):
        self.assertIs(build_dft_codebook(self.cfg), self.codebook)


class TestPolarCodebook(unittest.TestCase):
    """Angle-uniform, range-nonuniform benchmark codebook."""

    @classmethod
    def setUpClass(cls):
        cls.cfg = TestDataFactory.create_array()
        cls.params = PolarSamplingParams(beta_delta=1.4, n_ranges=5)
        cls.codebook = build_polar_codebook(cls.cfg, cls.params)

    def test_size_and_kind(self):
        self.assertEqual(self.codebook.size, 256 * 5)
        self.assertEqual(self.codebook.kind, CodebookKind.POLAR)
        self.assertEqual(self.codebook.n_ranges, 5)

    def test_ordering(self):
        angles = self.codebook.angles.reshape(256, 5)
        ranges = self.codebook.ranges.reshape(256, 5)
        np.testing.assert_array_equal(angles[:, 0], dft_angles(256))
        self.assertTrue(np.all(angles == angles[:, :1]))
        self.assertTrue(np.all(np.diff(ranges, axis=1) < 0))

    def test_range_labels(self):
        alpha = self.params.alpha_delta(self.cfg)
        theta = float(dft_angles(256)[200])
        expected = alpha * (1 - theta ** 2) / np.arange(1, 6)
        np.testing.assert_allclose(polar_range_labels(self.cfg, self.params, theta), expected)

    def test_polar_index_addresses_codeword(self):
        row = polar_index(200, 2, 5)
        theta = float(dft_angles(256)[200])
        r = self.codebook.range_label(row)
        self.assertEqual(float(self.codebook.angles[row]), theta)
        expected = near_steering_matrix(self.cfg, theta, np.array([r]))[0]
        np.testing.assert_allclose(self.codebook.vectors[row], expected, atol=1e-15)

    def test_subset_keeps_labels(self):
        rows = [polar_index(10, j, 5) for j in range(5)]
        sub = self.codebook.subset(rows)
        self.assertEqual(sub.size, 5)
        np.testing.assert_array_equal(sub.ranges, self.codebook.ranges[rows])

    def test_codewords_unit_norm(self):
        norms = np.linalg.norm(self.codebook.vectors, axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-12)


class TestCodebookValidation(unittest.TestCase):

    def test_mismatched_shapes_rejected(self):
        with self.assertRaises(ValidationError):
            Codebook(
                kind=CodebookKind.DFT,
                n_antennas=4,
                vectors=np.zeros((3, 4), dtype=complex),
                angles=np.zeros(2),
                ranges=np.zeros(2),
            )
        with self.assertRaises(ValidationError):
            Codebook(
                kind=CodebookKind.DFT,
                n_antennas=4,
                vectors=np.zeros((2, 4), dtype=complex),
                angles=np.zeros(2),
                ranges=np.zeros(3),
            )


class TestTrainingOverhead(unittest.TestCase):
    """Symbol budgets at N=256, K=3, S=5."""

    def test_reference_budgets(self):
        self.assertEqual(training_overhead(Scheme.ASW_JE, 256, k=3, s=5), TestConstants.OVERHEAD_PROPOSED)
        self.assertEqual(training_overhead(Scheme.PRMSE_JE, 256, k=3, s=5), TestConstants.OVERHEAD_PROPOSED)
        self.assertEqual(training_overhead(Scheme.TWO_PHASE, 256, k=3, s=5), TestConstants.OVERHEAD_TWO_PHASE)
        self.assertEqual(training_overhead(Scheme.EXHAUSTIVE, 256, k=3, s=5), TestConstants.OVERHEAD_EXHAUSTIVE)

    def test_benchmarks(self):
        self.assertEqual(training_overhead(Scheme.FAR_FIELD, 256), 256)
        self.assertEqual(training_overhead(Scheme.PERFECT_CSI, 256, k=3, s=5), 0)

    def test_accepts_scheme_names(self):
        self.assertEqual(training_overhead("prmse-je", 256, k=1), 257)

    def test_invalid_arguments(self):
        with self.assertRaises(ValueError):
            training_overhead(Scheme.ASW_JE, 256, k=0)
        with self.assertRaises(ValueError):
            training_overhead(Scheme.TWO_PHASE, 256, s=0)
        with self.assertRaises(ValueError):
            training_overhead("beam-sweep", 256)


if __name__ == "__main__":
    unittest.main()
