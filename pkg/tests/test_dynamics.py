"""
Tests for the translation flow and the first-return interval exchange.
"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.append(str(Path(__file__).parent.parent))

from src.dynamics.first_return import Transversal, first_return_iet, shear
from src.dynamics.translation_flow import (
    birkhoff_average,
    birkhoff_averages,
    find_saddle_connections,
    golden_start,
    incoming_separatrices,
    outgoing_separatrices,
    polygon_boxes,
    trace,
)
from src.exceptions import DomainError, HitSingularity
from src.flattening.flat_polygon import build_flat_polygon
from src.flattening.partition import interval_partition
from src.iet.iet import has_connection, recurrence_diagnostic
from src.polygons.generalized import build_generalized
from src.polygons.staircase import GammaElement, StaircaseProfile, build_basic
from src.surfaces.geometry import SurfacePoint
from src.surfaces.translation_surface import unfold
from tests.fixtures import asymmetric_table, symmetric_table, two_rectangle_polygon

GOLDEN_DIRECTION = math.atan(2.0 / (1.0 + math.sqrt(5.0)))


def l_shape_surface():
    return unfold(build_generalized([build_basic(StaircaseProfile((1.0, 2.0), (2.0, 1.0)))]))


class TestTrace(unittest.TestCase):
    """Straight-line flow across the polygon sides."""

    def setUp(self):
        # the 7 × 2 rectangular torus
        self.surface = unfold(two_rectangle_polygon())
        self.start = SurfacePoint((1, GammaElement.ID), complex(0.5, 0.5))

    def test_periodic_orbit_closes(self):
        trajectory = trace(self.surface, self.start, 14.0 * math.sqrt(2.0))
        self.assertEqual(trajectory.status, "complete")
        self.assertEqual(trajectory.end.polygon, self.start.polygon)
        self.assertAlmostEqual(abs(trajectory.end.z - self.start.z), 0.0, places=9)
        self.assertGreater(len(trajectory.crossings), 0)

    def test_pieces_are_contiguous(self):
        trajectory = trace(self.surface, self.start, 5.0)
        self.assertAlmostEqual(trajectory.total_length, 5.0)
        for first, second in zip(trajectory.pieces, trajectory.pieces[1:]):
            self.assertAlmostEqual(first.t1, second.t0, places=12)
        frame = trajectory.to_frame()
        self.assertEqual(list(frame.columns), ["t", "polygon", "x", "y"])
        self.assertEqual(len(frame), 2 * len(trajectory.pieces))

    def test_invalid_start(self):
        with self.assertRaises(DomainError):
            trace(self.surface, self.start, 0.0)
        outside = SurfacePoint((1, GammaElement.ID), complex(-0.5, 0.5))
        with self.assertRaises(DomainError):
            trace(self.surface, outside, 1.0)

    def test_hits_singularity(self):
        surface = l_shape_surface()
        key = surface.keys[0]
        polygon = surface.polygons[key]
        singular = [ref for ref in surface.singularities[0].identity if ref.polygon == key]
        for ref in singular:
            corner = surface.corner_point(key, ref.index)
            start = corner - 0.25 * (1 + 1j)
            if polygon.interior((start.real, start.imag)):
                break
        else:
            self.skipTest("no singular corner reachable at 45° in the first polygon")
        with self.assertRaises(HitSingularity) as caught:
            trace(surface, SurfacePoint(key, start), 10.0)
        self.assertAlmostEqual(caught.exception.length, 0.25 * math.sqrt(2.0), places=9)
        self.assertEqual(caught.exception.partial.status, "singular")


class TestSeparatrices(unittest.TestCase):
    """Separatrices and saddle connections of the L-shaped surface."""

    def setUp(self):
        self.surface = l_shape_surface()

    def test_six_pi_point_has_three_of_each(self):
        self.assertEqual(len(outgoing_separatrices(self.surface)), 3)
        self.assertEqual(len(incoming_separatrices(self.surface)), 3)

    def test_rational_direction_is_all_connections(self):
        connections = find_saddle_connections(self.surface, math.pi / 4, max_length=100.0)
        self.assertEqual(len(connections), 3)
        for connection in connections:
            self.assertEqual(connection.source, connection.target)
            self.assertAlmostEqual(connection.holonomy.real, round(connection.holonomy.real), places=8)
            self.assertAlmostEqual(connection.holonomy.imag, round(connection.holonomy.imag), places=8)


class TestBirkhoff(unittest.TestCase):
    """Time averages over the column boxes."""

    def test_boxes_tile_the_surface(self):
        surface = unfold(two_rectangle_polygon())
        boxes = polygon_boxes(surface)
        self.assertAlmostEqual(sum(box.area for box in boxes), surface.area)
        averages = birkhoff_averages(surface, boxes, golden_start(surface), 50.0)
        self.assertAlmostEqual(float(np.sum(averages)), 1.0, places=9)

    def test_equidistribution(self):
        surface = l_shape_surface()
        start = golden_start(surface)
        key = surface.keys[3]
        boxes = [box for box in polygon_boxes(surface) if box.polygon == key]
        averages = birkhoff_averages(surface, boxes, start, 5000.0, GOLDEN_DIRECTION)
        target = sum(box.area for box in boxes) / surface.area
        self.assertAlmostEqual(float(np.sum(averages)), target, delta=0.02)

    def test_single_box(self):
        surface = unfold(two_rectangle_polygon())
        box = polygon_boxes(surface)[0]
        value = birkhoff_average(surface, box, golden_start(surface), 20.0)
        self.assertTrue(0.0 <= value <= 1.0)

    def test_singular_orbit_reports_partial_averages(self):
        surface = l_shape_surface()
        key = surface.keys[0]
        polygon = surface.polygons[key]
        for ref in surface.singularities[0].identity:
            if ref.polygon != key:
                continue
            corner = surface.corner_point(key, ref.index)
            start = corner - 0.25 * (1 + 1j)
            if polygon.interior((start.real, start.imag)):
                break
        else:
            self.skipTest("no singular corner reachable at 45° in the first polygon")
        with self.assertRaises(HitSingularity) as caught:
            birkhoff_averages(surface, polygon_boxes(surface), SurfacePoint(key, start), 10.0)
        self.assertAlmostEqual(float(np.sum(caught.exception.partial)), 1.0, places=9)


class TestFirstReturn(unittest.TestCase):
    """Return maps to a horizontal transversal."""

    def test_torus_slope_one(self):
        surface = unfold(two_rectangle_polygon())
        system = first_return_iet(surface)
        self.assertEqual(system.iet.permutation, (3, 2, 1))
        np.testing.assert_allclose(system.iet.lengths, [0.98, 0.02, 0.98], atol=1e-9)
        root2 = math.sqrt(2.0)
        np.testing.assert_allclose(system.return_times, [8 * root2, 14 * root2, 6 * root2], rtol=1e-9)
        # the middle interval is fixed: b_1 returns to itself
        self.assertEqual(has_connection(system.iet, 5), (1, 1, 1))

    def test_flux_equals_area(self):
        for surface, direction in ((unfold(two_rectangle_polygon()), math.pi / 4), (l_shape_surface(), GOLDEN_DIRECTION)):
            with self.subTest(area=surface.area):
                system = first_return_iet(surface, direction=direction)
                flux = sum(
                    length * time * math.sin(direction)
                    for length, time in zip(system.iet.lengths, system.return_times)
                )
                self.assertAlmostEqual(flux / surface.area, 1.0, delta=1e-8)

    def test_homology_displacements(self):
        system = first_return_iet(l_shape_surface(), direction=GOLDEN_DIRECTION)
        iet = system.iet
        for j, value in enumerate(system.homology_displacements):
            expected = iet.b[j] - iet.t[iet.permutation[j] - 1]
            self.assertAlmostEqual(value.real, expected, places=9)
            self.assertAlmostEqual(value.imag, system.return_times[j], places=9)
        self.assertGreaterEqual(iet.d, 3)

    def test_shear(self):
        direction = math.pi / 3
        z = 2.0 * complex(math.cos(direction), math.sin(direction))
        sheared = shear(z, direction)
        self.assertAlmostEqual(sheared.real, 0.0, places=12)
        self.assertAlmostEqual(sheared.imag, 2.0, places=12)

    def test_invalid_input(self):
        surface = unfold(two_rectangle_polygon())
        with self.assertRaises(DomainError):
            first_return_iet(surface, direction=2.0)
        with self.assertRaises(DomainError):
            Transversal(host=surface.keys[0], left=0.5j, width=0.0)
        with self.assertRaises(DomainError):
            Transversal(host=surface.keys[0], left=complex(0.5, 0.5), width=5.0).validate(surface)


class TestTableSurfaces(unittest.TestCase):
    """Return maps and equidistribution on surfaces unfolded from flattened tables."""

    SAMPLES = (
        (symmetric_table, 0.75),
        (symmetric_table, 1.5),
        (asymmetric_table, 0.5),
        (asymmetric_table, 0.65),
        (asymmetric_table, 1.15),
    )

    @classmethod
    def setUpClass(cls):
        cls.surfaces = {}
        for make_table, s in cls.SAMPLES:
            table = make_table()
            J = interval_partition(table).locate(s)
            flat = build_flat_polygon(table, J, s)
            cls.surfaces[(make_table.__name__, s)] = [unfold(component) for component in flat.components]

    def test_homology_displacements(self):
        for (name, s), surfaces in self.surfaces.items():
            for c, surface in enumerate(surfaces):
                with self.subTest(table=name, s=s, component=c):
                    system = first_return_iet(surface)
                    iet = system.iet
                    self.assertEqual(len(system.homology_displacements), iet.d)
                    for j, value in enumerate(system.homology_displacements):
                        expected = iet.b[j] - iet.t[iet.permutation[j] - 1]
                        self.assertLessEqual(abs(value.real - expected), 1e-9)
                        self.assertAlmostEqual(value.imag, system.return_times[j], places=9)
                        self.assertEqual(shear(system.loop_pairings[j]), value)

    def test_recurrence_on_generic_caustics(self):
        for s in (0.5, 0.65, 1.15):
            for c, surface in enumerate(self.surfaces[("asymmetric_table", s)]):
                with self.subTest(s=s, component=c):
                    iet = first_return_iet(surface).iet
                    record = recurrence_diagnostic(iet, 10000, 5000)
                    self.assertFalse(record.connection_found)
                    self.assertGreaterEqual(record.min_tail, 1e-2)
                    self.assertTrue(5000 <= record.argmin_n <= 10000)

    def test_birkhoff_averages_match_area_fractions(self):
        for s in (0.5, 1.15):
            for c, surface in enumerate(self.surfaces[("asymmetric_table", s)]):
                boxes = polygon_boxes(surface)
                targets = np.array([box.area for box in boxes]) / surface.area
                horizon = 2000.0 * surface.diameter
                runs = [birkhoff_averages(surface, boxes, golden_start(surface, seed=seed), horizon) for seed in range(3)]
                with self.subTest(s=s, component=c):
                    for averages in runs:
                        self.assertLessEqual(float(np.max(np.abs(averages - targets))), 5e-2)
                    spread = np.max(runs, axis=0) - np.min(runs, axis=0)
                    self.assertLessEqual(float(np.max(spread)), 5e-2)


if __name__ == "__main__":
    unittest.main()
