"""
Tests for the parameter partition, the flattened polygons 𝐏(s) and the map σ_s.
"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).parent.parent))

from src.billiards.conics import cartesian_point
from src.billiards.physical_flow import billiard_trace, sample_start
from src.billiards.tables import NibbledEllipse
from src.exceptions import DegenerateCaustic, DomainError, OutsideComponent
from src.flattening.flat_polygon import (
    build_flat_polygon,
    flat_image,
    flatten_point,
    in_caustic_component,
    xy_families,
)
from src.flattening.partition import check_margin, interval_case, interval_partition, l_index, regime
from src.polygons.generalized import combinatorial_data
from src.quadrature.integrals import AffineCombination, ell, xi
from tests.fixtures import asymmetric_table, symmetric_table


def nibbled_k2_table() -> NibbledEllipse:
    quadrant = {"alphas": [2.0, 1.5, 1.0], "betas": [0.0, 0.3, 0.6]}
    return NibbledEllipse.from_dict({"a": 2.0, "b": 1.0, "quadrants": {q: dict(quadrant) for q in ("pp", "pm", "mp", "mm")}})


class TestPartition(unittest.TestCase):
    """Breakpoints, regimes and cases of the parameter intervals."""

    def test_symmetric_breakpoints(self):
        partition = interval_partition(symmetric_table())
        self.assertEqual(partition.breakpoints, (0.5, 1.0, 2.0))
        self.assertEqual(partition.intervals, [(0.5, 1.0), (1.0, 2.0)])

    def test_hyperbolic_nibble_breakpoint(self):
        partition = interval_partition(nibbled_k2_table())
        self.assertEqual(partition.breakpoints, (0.3, 0.6, 1.0, 1.5, 2.0))

    def test_shared_marks_are_merged(self):
        partition = interval_partition(asymmetric_table())
        self.assertEqual(partition.breakpoints, (0.2, 0.3, 0.6, 0.7, 1.0, 1.3, 1.4, 1.5, 1.6, 2.0))
        self.assertTrue(all(hi > lo for lo, hi in partition.intervals))

    def test_locate_and_index(self):
        partition = interval_partition(symmetric_table())
        self.assertEqual(partition.locate(0.75), (0.5, 1.0))
        self.assertEqual(partition.index((1.0, 2.0)), 1)
        with self.assertRaises(DegenerateCaustic):
            partition.locate(1.0)
        with self.assertRaises(DomainError):
            partition.index((0.5, 2.0))

    def test_cases(self):
        table = asymmetric_table()
        expected = {
            (0.2, 0.3): "i",
            (0.3, 0.6): "ii-a",
            (0.6, 0.7): "ii-b",
            (0.7, 1.0): "ii-c",
            (1.0, 1.3): "iii",
        }
        for J, case in expected.items():
            with self.subTest(J=J):
                self.assertEqual(interval_case(table, J), case)

    def test_regime(self):
        table = symmetric_table()
        self.assertEqual(regime(table, (0.5, 1.0)), "elliptic")
        self.assertEqual(regime(table, (1.0, 2.0)), "hyperbolic")
        with self.assertRaises(DegenerateCaustic):
            regime(table, (0.5, 2.0))

    def test_l_index(self):
        table = asymmetric_table()
        self.assertEqual(l_index(table, "pp", (0.2, 0.3)), 1)
        self.assertEqual(l_index(table, "pm", (0.2, 0.3)), 0)
        self.assertEqual(l_index(table, "mm", (0.6, 0.7)), 2)
        self.assertEqual(l_index(table, "pp", (1.6, 2.0)), 1)
        self.assertEqual(l_index(table, "pp", (1.0, 1.3)), 2)

    def test_margin(self):
        check_margin((0.5, 1.0), 0.75)
        with self.assertRaises(DegenerateCaustic):
            check_margin((0.5, 1.0), 0.5 + 1e-9)
        with self.assertRaises(DegenerateCaustic):
            check_margin((0.5, 1.0), 0.5 + 5e-7)
        with self.assertRaises(DegenerateCaustic):
            check_margin((0.6, 0.7), 0.7 - 9e-7)
        check_margin((0.6, 0.7), 0.6 + 2e-6)


class TestXYFamilies(unittest.TestCase):
    """The symbolic families 𝒳, 𝒴 and ℓ."""

    def setUp(self):
        self.table = symmetric_table()
        self.family = self.table.family

    def test_hyperbolic(self):
        symbolic = xy_families(self.table, (1.0, 2.0))
        self.assertEqual(symbolic.xs_symbolic, ())
        self.assertEqual(symbolic.ys_symbolic, (AffineCombination.of_interval(self.family, 0.5, 1.0),))
        self.assertTrue(symbolic.ell_symbolic.is_ell)
        self.assertEqual(len(symbolic.functions()), 2)

    def test_elliptic(self):
        symbolic = xy_families(self.table, (0.5, 1.0))
        self.assertEqual(symbolic.xs_symbolic, ())
        expected = AffineCombination.of_ell(self.family) - AffineCombination.of_interval(self.family, -math.inf, 0.5)
        self.assertEqual(symbolic.ys_symbolic, (expected,))

    def test_nibbled_elliptic(self):
        table = nibbled_k2_table()
        symbolic = xy_families(table, (0.6, 1.0))
        self.assertEqual(symbolic.xs_symbolic, (AffineCombination.of_interval(table.family, 1.5, 2.0),))
        self.assertEqual(len(symbolic.ys_symbolic), 2)

    def test_profiles_evaluate(self):
        symbolic = xy_families(self.table, (0.5, 1.0))
        profiles = symbolic.evaluate(0.75)
        self.assertEqual(sorted(profiles), ["mm", "mp", "pm", "pp"])
        profile = profiles["pp"]
        self.assertAlmostEqual(profile.x(1), ell(self.family, 0.75), places=12)
        self.assertAlmostEqual(profile.y(1) / xi((0.5, 0.75), self.family, 0.75), 1.0, delta=1e-8)


class TestFlatPolygon(unittest.TestCase):
    """𝐏(s) in every case."""

    def test_case_ii_c(self):
        flat = build_flat_polygon(symmetric_table(), (0.5, 1.0), 0.75)
        self.assertEqual(flat.case, "ii-c")
        data = combinatorial_data(flat.polygon)
        self.assertEqual(data.labels, ("mm", "mp", "pm", "pp"))
        self.assertEqual(data.relation("V"), frozenset({("pp", "mp"), ("mp", "pp"), ("mm", "pm"), ("pm", "mm")}))
        self.assertEqual(data.relation("v"), frozenset({("mp", "mm"), ("mm", "mp"), ("pm", "pp"), ("pp", "pm")}))
        self.assertTrue(flat.connected)
        self.assertEqual(flat.offsets["pm"], 2.0 * flat.ell)

    def test_case_iii(self):
        flat = build_flat_polygon(symmetric_table(), (1.0, 2.0), 1.5)
        self.assertEqual(flat.case, "iii")
        self.assertEqual(len(flat.polygon.parts), 4)
        data = combinatorial_data(flat.polygon)
        self.assertIn(("mp", "mm"), data.relation("H"))
        self.assertIn(("pp", "pm"), data.relation("H"))
        for part in flat.polygon.parts.values():
            self.assertAlmostEqual(part.profile.xs[-1], ell(flat.table.family, 1.5), places=12)

    def test_case_i(self):
        flat = build_flat_polygon(asymmetric_table(), (0.2, 0.3), 0.25)
        self.assertEqual(flat.case, "i")
        self.assertEqual(sorted(flat.polygon.parts), ["mp", "pp"])
        self.assertTrue(flat.connected)

    def test_case_ii_a_is_disconnected(self):
        flat = build_flat_polygon(asymmetric_table(), (0.3, 0.6), 0.45)
        self.assertEqual(flat.case, "ii-a")
        self.assertFalse(flat.connected)
        self.assertEqual(len(flat.components), 2)

    def test_case_ii_b(self):
        flat = build_flat_polygon(asymmetric_table(), (0.6, 0.7), 0.65)
        self.assertEqual(flat.case, "ii-b")
        self.assertEqual(flat.polygon.parts["mp"].k, 2)
        self.assertEqual(flat.polygon.parts["pp"].k, 1)
        self.assertTrue(flat.connected)

    def test_asymmetric_hyperbolic(self):
        flat = build_flat_polygon(asymmetric_table(), (1.0, 1.3), 1.15)
        self.assertEqual(flat.case, "iii")
        self.assertTrue(all(part.k == 2 for part in flat.polygon.parts.values()))

    def test_margin_is_enforced(self):
        with self.assertRaises(DegenerateCaustic):
            build_flat_polygon(symmetric_table(), (0.5, 1.0), 1.0 - 1e-12)


class TestFlattenPoint(unittest.TestCase):
    """The change of variables σ_s on points and chords."""

    def setUp(self):
        self.table = symmetric_table()
        self.family = self.table.family

    def test_vertical_axis_maps_to_zero(self):
        flat = flatten_point(self.table, 0.75, (0.0, 0.6))
        self.assertEqual(flat.quadrant, "pp")
        self.assertAlmostEqual(flat.chart[0], 0.0, places=12)

    def test_caustic_maps_to_zero_height(self):
        point = cartesian_point(self.family, 1.5, 0.75)
        flat = flatten_point(self.table, 0.75, point)
        self.assertAlmostEqual(flat.chart[1], 0.0, places=6)

    def test_hyperbolic_range(self):
        s = 1.5
        bound = ell(self.family, s)
        for point in [(0.2, 0.3), (-0.3, 0.2), (0.1, -0.5), (-0.4, -0.1)]:
            flat = flatten_point(self.table, s, point)
            self.assertLessEqual(abs(flat.chart[0]), bound + 1e-9)
            self.assertLessEqual(abs(flat.chart[1]), bound + 1e-9)

    def test_outside_component(self):
        self.assertFalse(in_caustic_component(self.table, 0.75, (0.0, 0.0)))
        with self.assertRaises(OutsideComponent):
            flatten_point(self.table, 0.75, (0.0, 0.0))

    def test_below_lowest_mark(self):
        with self.assertRaises(DegenerateCaustic):
            flatten_point(self.table, 0.4, (0.0, 0.7))

    def test_chords_become_diagonal(self):
        for table, s in ((asymmetric_table(), 0.5), (symmetric_table(), 0.75), (symmetric_table(), 1.5)):
            bound = 1e-6 * ell(table.family, s)
            trajectory = billiard_trace(table, sample_start(table, s), horizon=10.0)
            for n, segment in enumerate(trajectory.segments):
                if segment.length < 1e-3:
                    continue
                for polyline in flat_image(table, s, segment.start, segment.end, samples=40):
                    if len(polyline) < 3:
                        continue
                    with self.subTest(s=s, segment=n):
                        slope, intercept = np.polyfit(polyline[:, 0], polyline[:, 1], 1)
                        deviation = np.abs(polyline[:, 1] - (slope * polyline[:, 0] + intercept))
                        if np.ptp(polyline[:, 0]) > 1e-2:
                            self.assertAlmostEqual(abs(slope), 1.0, delta=1e-5)
                        self.assertLessEqual(float(deviation.max()), bound)


if __name__ == "__main__":
    unittest.main()
