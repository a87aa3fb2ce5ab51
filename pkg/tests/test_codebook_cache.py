"""
Unit tests for the on-disk codebook cache.
"""

import tempfile
import unittest
from pathlib import Path

import numpy as np

from conftest import TestDataFactory
from models.errors import CodebookCacheError
from models.schemas import CodebookKind, PolarSamplingParams
from storage.codebook_cache import (
    FORMAT_VERSION,
    HEADER_DTYPE,
    MAGIC,
    CodebookCache,
    describe,
    read_codebook,
    write_codebook,
)
from tools.codebooks import build_dft_codebook, build_polar_codebook


class TestCodebookFile(unittest.TestCase):
    """Binary layout of a serialized codebook."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.cfg = TestDataFactory.create_array(n_antennas=32)

    def tearDown(self):
        self.tmp.cleanup()

    def test_header_layout(self):
        self.assertEqual(HEADER_DTYPE.itemsize, 17)
        path = write_codebook(build_dft_codebook(self.cfg), self.dir / "dft.nfcb")
        raw = path.read_bytes()
        self.assertEqual(raw[:4], MAGIC)
        self.assertEqual(len(raw), 17 + 32 * (2 + 2 * 32) * 8)

    def test_polar_file_reproduces_codebook(self):
        params = PolarSamplingParams(n_ranges=3)
        original = build_polar_codebook(self.cfg, params)
        loaded = read_codebook(write_codebook(original, self.dir / "polar.nfcb"))
        self.assertEqual(loaded.kind, CodebookKind.POLAR)
        self.assertEqual(loaded.n_ranges, 3)
        np.testing.assert_array_equal(loaded.vectors, original.vectors)
        np.testing.assert_array_equal(loaded.ranges, original.ranges)

    def test_dft_ranges_stay_nan(self):
        loaded = read_codebook(write_codebook(build_dft_codebook(self.cfg), self.dir / "dft.nfcb"))
        self.assertTrue(np.all(np.isnan(loaded.ranges)))

    def _corrupt(self, mutate):
        path = write_codebook(build_dft_codebook(self.cfg), self.dir / "bad.nfcb")
        raw = bytearray(path.read_bytes())
        path.write_bytes(bytes(mutate(raw)))
        return path

    def test_bad_magic(self):
        path = self._corrupt(lambda raw: b"XXXX" + raw[4:])
        with self.assertRaisesRegex(CodebookCacheError, "magic"):
            read_codebook(path)

    def test_bad_version(self):
        def bump(raw):
            raw[4] = FORMAT_VERSION + 1
            return raw
        with self.assertRaisesRegex(CodebookCacheError, "version"):
            read_codebook(self._corrupt(bump))

    def test_unknown_kind(self):
        def retag(raw):
            raw[8] = 7
            return raw
        with self.assertRaisesRegex(CodebookCacheError, "kind"):
            read_codebook(self._corrupt(retag))

    def test_truncated_files(self):
        with self.assertRaisesRegex(CodebookCacheError, "truncated"):
            read_codebook(self._corrupt(lambda raw: raw[:10]))
        with self.assertRaisesRegex(CodebookCacheError, "records"):
            read_codebook(self._corrupt(lambda raw: raw[:-8]))


class TestCodebookCache(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.cache = CodebookCache(str(Path(self.tmp.name) / "codebooks"))
        self.cfg = TestDataFactory.create_array(n_antennas=32)

    def tearDown(self):
        self.tmp.cleanup()

    def test_paths_encode_parameters(self):
        dft = self.cache.path_for(self.cfg, CodebookKind.DFT)
        polar = self.cache.path_for(self.cfg, CodebookKind.POLAR, PolarSamplingParams(n_ranges=4))
        self.assertEqual(dft.name, "dft_N32_f30GHz_d0.005.nfcb")
        self.assertIn("_S4_b1.4", polar.name)
        self.assertNotEqual(dft, polar)

    def test_get_builds_then_loads(self):
        first = self.cache.get_dft(self.cfg)
        self.assertEqual(len(self.cache.list_entries()), 1)
        second = self.cache.get_dft(self.cfg)
        self.assertIsNot(first, second)
        np.testing.assert_array_equal(first.vectors, second.vectors)

    def test_get_polar_checks_size(self):
        params = PolarSamplingParams(n_ranges=2)
        path = self.cache.path_for(self.cfg, CodebookKind.POLAR, params)
        write_codebook(build_polar_codebook(self.cfg, PolarSamplingParams(n_ranges=1)), path)
        with self.assertRaises(CodebookCacheError):
            self.cache.get_polar(self.cfg, params)

    def test_verify(self):
        reference = build_dft_codebook(self.cfg)
        path = self.cache.save(reference, self.cache.path_for(self.cfg, CodebookKind.DFT))
        self.assertTrue(self.cache.verify(path, reference))
        other = build_polar_codebook(self.cfg, PolarSamplingParams(n_ranges=1))
        self.assertFalse(self.cache.verify(path, other))

    def test_clear(self):
        self.cache.get_dft(self.cfg)
        self.cache.get_polar(self.cfg)
        self.assertEqual(self.cache.clear(), 2)
        self.assertEqual(self.cache.list_entries(), [])

    def test_describe(self):
        text = describe(build_polar_codebook(self.cfg, PolarSamplingParams(n_ranges=2)))
        self.assertTrue(text.startswith("polar: 64 codewords, N=32"))
        self.assertNotIn("ranges", describe(build_dft_codebook(self.cfg)))


if __name__ == "__main__":
    unittest.main()
