"""
Tests for interval exchange transformations and the recurrence diagnostics.
"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).parent.parent))

from src.exceptions import DomainError, OutOfDomain
from src.iet.iet import (
    IETData,
    apply,
    epsilon_n,
    epsilon_profile,
    has_connection,
    recurrence_diagnostic,
    rotation_iet,
)
from tests.oracles import epsilon_oracle, iet_map

GOLDEN = 0.5 * (math.sqrt(5.0) - 1.0)


class TestIETData(unittest.TestCase):
    """Construction, endpoints and evaluation."""

    def setUp(self):
        self.iet = IETData.from_lengths((0.2, 0.3, 0.5), (3, 1, 2))

    def test_endpoints(self):
        np.testing.assert_allclose(self.iet.b, [0.2, 0.5, 1.0])
        np.testing.assert_allclose(self.iet.t, [0.3, 0.8, 1.0])
        np.testing.assert_allclose(self.iet.discontinuities, [0.2, 0.5])

    def test_apply(self):
        self.assertAlmostEqual(apply(self.iet, 0.1), 0.9, places=15)
        self.assertAlmostEqual(apply(self.iet, 0.3), 0.1, places=15)
        self.assertAlmostEqual(apply(self.iet, 0.6), 0.4, places=15)

    def test_apply_matches_definition(self):
        xs = np.linspace(0.0, 0.999, 37)
        images = apply(self.iet, xs)
        expected = [iet_map(self.iet.lengths, self.iet.permutation, x) for x in xs]
        np.testing.assert_allclose(images, expected, atol=1e-14)

    def test_identity(self):
        iet = IETData.from_lengths((0.4, 0.6), (1, 2))
        for x in (0.0, 0.3, 0.4, 0.99):
            self.assertEqual(apply(iet, x), x)

    def test_bijection_preserves_measure(self):
        xs = (np.arange(1000) + 0.5) / 1000
        images = np.sort(apply(self.iet, xs))
        self.assertTrue(np.all(np.diff(images) > 0))
        self.assertTrue(np.all((images >= 0.0) & (images < 1.0)))

    def test_out_of_domain(self):
        with self.assertRaises(OutOfDomain):
            apply(self.iet, 1.0)
        with self.assertRaises(OutOfDomain):
            apply(self.iet, -0.1)

    def test_invalid(self):
        with self.assertRaises(DomainError):
            IETData.from_lengths((0.5, 0.5), (1, 1))
        with self.assertRaises(DomainError):
            IETData.from_lengths((0.5, -0.5), (2, 1))
        with self.assertRaises(DomainError):
            IETData.from_lengths((1.0,), (1,))

    def test_orbit_and_normalize(self):
        iet = IETData.from_lengths((2.0, 3.0), (2, 1)).normalize()
        self.assertAlmostEqual(iet.total, 1.0)
        orbit = iet.orbit(0.1, 3)
        self.assertEqual(len(orbit), 4)
        self.assertAlmostEqual(orbit[1], 0.7, places=15)

    def test_rotation(self):
        iet = rotation_iet(0.3)
        self.assertAlmostEqual(apply(iet, 0.5), 0.8, places=15)
        self.assertAlmostEqual(apply(iet, 0.8), 0.1, places=15)
        with self.assertRaises(DomainError):
            rotation_iet(1.0)


class TestEpsilon(unittest.TestCase):
    """ε_n from the one-pass profile, the direct formula and the oracle."""

    def setUp(self):
        self.iet = IETData.from_lengths((0.1234, 0.2718, 0.3141, 0.2907), (3, 1, 4, 2))

    def test_profile_against_oracle(self):
        N = 150
        profile = epsilon_profile(self.iet, N)
        expected = epsilon_oracle(self.iet.lengths, self.iet.permutation, N)
        np.testing.assert_allclose(profile, expected, atol=1e-12)

    def test_profile_against_direct(self):
        profile = epsilon_profile(self.iet, 60)
        for n in (0, 1, 7, 33, 60):
            self.assertAlmostEqual(profile[n], epsilon_n(self.iet, n), places=14)

    def test_profile_is_non_increasing(self):
        profile = epsilon_profile(self.iet, 300)
        self.assertTrue(np.all(np.diff(profile) <= 0))

    def test_endpoints_option(self):
        with_ends = epsilon_profile(self.iet, 40, include_endpoints=True)
        without = epsilon_profile(self.iet, 40)
        self.assertTrue(np.all(with_ends <= without))
        self.assertAlmostEqual(with_ends[40], epsilon_n(self.iet, 40, include_endpoints=True), places=14)

    def test_single_point(self):
        iet = rotation_iet(GOLDEN)
        self.assertEqual(epsilon_n(iet, 0), iet.total)
        self.assertEqual(epsilon_profile(iet, 0)[0], iet.total)

    def test_negative_n(self):
        with self.assertRaises(DomainError):
            epsilon_n(self.iet, -1)


class TestRecurrence(unittest.TestCase):
    """n·ε_n tails and connections."""

    def test_golden_rotation(self):
        record = recurrence_diagnostic(rotation_iet(GOLDEN), 10_000, 5_000)
        self.assertGreaterEqual(record.min_tail, 0.2)
        self.assertFalse(record.connection_found)
        self.assertTrue(5_000 <= record.argmin_n <= 10_000)

    def test_nearly_rational_rotation(self):
        record = recurrence_diagnostic(rotation_iet(0.1 + 1e-7), 1_000, 500)
        self.assertLess(record.min_tail, 0.01)
        self.assertFalse(record.connection_found)

    def test_rational_rotation(self):
        record = recurrence_diagnostic(rotation_iet(2.0 / 7.0), 50, 10)
        self.assertTrue(record.connection_found)
        found = has_connection(rotation_iet(2.0 / 7.0), 50)
        self.assertIsNotNone(found)
        self.assertLessEqual(found[0], 7)

    def test_window_bounds(self):
        with self.assertRaises(DomainError):
            recurrence_diagnostic(rotation_iet(GOLDEN), 10, 11)

    def test_scale_invariance(self):
        base = IETData.from_lengths((0.3, 0.45, 0.25), (3, 2, 1))
        scaled = IETData.from_lengths((3.0, 4.5, 2.5), (3, 2, 1))
        first = recurrence_diagnostic(base, 200, 100)
        second = recurrence_diagnostic(scaled, 200, 100)
        self.assertAlmostEqual(first.min_tail, second.min_tail, places=10)


class TestConnections(unittest.TestCase):
    """First coincidences T^n b_i = b_j."""

    def test_half_swap(self):
        iet = IETData.from_lengths((0.5, 0.5), (2, 1))
        self.assertEqual(has_connection(iet, 10), (2, 1, 1))

    def test_identity(self):
        iet = IETData.from_lengths((0.5, 0.5), (1, 2))
        self.assertEqual(has_connection(iet, 5), (1, 1, 1))

    def test_golden_has_none(self):
        self.assertIsNone(has_connection(rotation_iet(GOLDEN), 10_000))

    def test_relative_tolerance(self):
        iet = IETData.from_lengths((500.0, 500.0), (2, 1))
        self.assertEqual(has_connection(iet, 3), (2, 1, 1))

    def test_requires_positive_n(self):
        with self.assertRaises(DomainError):
            has_connection(rotation_iet(GOLDEN), 0)


if __name__ == "__main__":
    unittest.main()
