"""
Tests for the unfolded translation surface, its cone points, D/B/E sets and the pairing.
"""
import json
import math
import sys
import unittest
from pathlib import Path
from unittest.mock import patch

sys.path.append(str(Path(__file__).parent.parent))

from src.exceptions import CornerCrossing, DisconnectedSurface, DomainError, GeometryFailure
from src.flattening.flat_polygon import build_flat_polygon
from src.polygons.generalized import build_generalized
from src.polygons.staircase import GammaElement, StaircaseProfile, build_basic
from src.surfaces.crossings import enumerate_DBE, probe_DBE
from src.surfaces.geometry import SurfacePoint, in_sector, pass_regular_corner, unit
from src.surfaces.paths import SurfacePath, develop, holonomy, pairing
from src.surfaces.singularities import euler_characteristic, genus, relation_cycle_closes
from src.surfaces.translation_surface import unfold
from tests.fixtures import asymmetric_table, symmetric_table, ten_part_polygon, two_rectangle_polygon


def l_shape_polygon():
    return build_generalized([build_basic(StaircaseProfile((1.0, 2.0), (2.0, 1.0)))])


class TestUnfold(unittest.TestCase):
    """Polygons and identifications of M(𝐏)."""

    def setUp(self):
        self.surface = unfold(two_rectangle_polygon())

    def test_counts(self):
        self.assertEqual(len(self.surface.polygons), 8)
        total_sides = sum(len(self.surface.sides(key)) for key in self.surface.polygons)
        self.assertEqual(total_sides, 32)
        self.assertEqual(len(self.surface.identifications), 16)
        self.assertTrue(self.surface.connected)
        self.assertAlmostEqual(self.surface.area, 4 * 3.5)

    def test_translations_are_antisymmetric(self):
        for ident in self.surface.identifications:
            back, translation = self.surface.glued(ident.second.polygon, ident.second.index)
            self.assertEqual(back, ident.first)
            self.assertEqual(translation, -ident.translation)
            self.assertAlmostEqual(abs(ident.second.start - (ident.first.end + ident.translation)), 0.0, places=12)

    def test_long_sides_have_zero_translation(self):
        for ident in self.surface.identifications:
            if ident.case in ("iii_v", "iii_h"):
                self.assertAlmostEqual(abs(ident.translation), 0.0, places=12)

    def test_json(self):
        text = json.dumps(self.surface.to_dict())
        self.assertIn("identifications", json.loads(text))


class TestSingularities(unittest.TestCase):
    """Cone angles, genus and the relation-cycle test."""

    def test_two_rectangles_are_a_torus(self):
        surface = unfold(two_rectangle_polygon())
        self.assertEqual(surface.singularities, [])
        self.assertEqual(genus(surface), 1)
        self.assertEqual(euler_characteristic(surface), 0)
        self.assertEqual(surface.cycle_disagreements, [])

    def test_l_shape_has_one_cone_point(self):
        surface = unfold(l_shape_polygon())
        self.assertEqual(len(surface.singularities), 1)
        self.assertAlmostEqual(surface.singularities[0].cone_angle, 6 * math.pi)
        self.assertEqual(genus(surface), 2)

    def test_reflex_corners_are_six_pi(self):
        surface = unfold(ten_part_polygon())
        for vertex in surface.vertices:
            names = {corner.name for corner in vertex.identity}
            if (1, 2) in names:
                self.assertEqual(vertex.multiplicity, 3)
                self.assertTrue(vertex.is_singular)
            if names <= {(1, 1), (2, 2)}:
                self.assertEqual(vertex.multiplicity, 1)
        g = genus(surface)
        self.assertEqual(euler_characteristic(surface), 2 - 2 * g)
        self.assertGreaterEqual(g, 2)

    def test_relation_cycle(self):
        polygon = two_rectangle_polygon()
        self.assertTrue(relation_cycle_closes(polygon, 1, "V", "H"))
        self.assertTrue(relation_cycle_closes(polygon, 2, "v", "h"))

    def test_flat_table_genus(self):
        flat = build_flat_polygon(symmetric_table(), (1.0, 2.0), 1.5)
        surface = unfold(flat.polygon)
        g = genus(surface)
        self.assertEqual(euler_characteristic(surface), 2 - 2 * g)

    def test_disconnected(self):
        flat = build_flat_polygon(asymmetric_table(), (0.3, 0.6), 0.45)
        surface = unfold(flat.polygon)
        self.assertFalse(surface.connected)
        with self.assertRaises(DisconnectedSurface):
            genus(surface)


class TestDBE(unittest.TestCase):
    """Case tables agree with the probe scan."""

    def test_two_rectangles(self):
        surface = unfold(two_rectangle_polygon())
        table = enumerate_DBE(surface)
        probe = probe_DBE(surface)
        self.assertTrue(table.matches(probe))
        self.assertEqual(table.B, [])
        self.assertEqual(table.E, [])

    def test_ten_parts(self):
        surface = unfold(ten_part_polygon())
        table = enumerate_DBE(surface)
        self.assertTrue(table.matches(probe_DBE(surface)))
        self.assertEqual(len(table.B), len(table.E))
        self.assertGreater(len(table.B), 0)

    def test_l_shape(self):
        surface = unfold(l_shape_polygon())
        self.assertTrue(enumerate_DBE(surface).matches(probe_DBE(surface)))

    def test_step_vectors(self):
        surface = unfold(l_shape_polygon())
        vectors = {(d.side_class, d.vector) for d in enumerate_DBE(surface).D}
        self.assertIn(("i_v", complex(2.0, 0.0)), vectors)
        self.assertIn(("i_h", complex(0.0, 2.0)), vectors)
        for side_class, vector in vectors:
            if side_class in ("iii_v", "iii_h"):
                self.assertEqual(vector, 0j)

    def test_serializable(self):
        surface = unfold(ten_part_polygon())
        json.dumps(enumerate_DBE(surface).to_dict())


class TestPairing(unittest.TestCase):
    """Crossing sums along closed paths."""

    def setUp(self):
        self.surface = unfold(two_rectangle_polygon())
        self.start = SurfacePoint((1, GammaElement.ID), complex(0.5, 0.5))

    def test_contractible_loop(self):
        path = SurfacePath(self.start, [0.5, 0.2j, -0.5, -0.2j])
        self.assertAlmostEqual(abs(pairing(self.surface, path)), 0.0, places=12)

    def test_vertical_loop(self):
        path = SurfacePath(self.start, [2.0j])
        value = pairing(self.surface, path)
        self.assertAlmostEqual(value.real, 0.0, places=12)
        self.assertAlmostEqual(value.imag, 2.0, places=12)
        self.assertAlmostEqual(abs(value - holonomy(path)), 0.0, places=12)

    def test_horizontal_loop(self):
        path = SurfacePath(self.start, [7.0])
        developed = develop(self.surface, path)
        self.assertEqual(len(developed.crossings), 4)
        self.assertAlmostEqual(abs(pairing(self.surface, path) - 7.0), 0.0, places=12)

    def test_open_path_is_refused(self):
        with self.assertRaises(DomainError):
            pairing(self.surface, SurfacePath(self.start, [1.0]))

    def test_corner_crossing(self):
        path = SurfacePath(self.start, [complex(1.5, 0.5), complex(-1.5, -0.5)])
        with self.assertRaises(CornerCrossing):
            develop(self.surface, path)


class TestRegularCorners(unittest.TestCase):
    """Passing a ray through a corner with total angle 2π."""

    def setUp(self):
        self.surface = unfold(two_rectangle_polygon())

    def arrivals(self, u):
        for vertex in self.surface.vertices:
            for ref in vertex.identity:
                if in_sector(self.surface, ref.polygon, ref.index, -u):
                    yield vertex, (ref.polygon, ref.index)

    def test_rays_beside_the_corner_agree(self):
        for direction in (math.pi / 4, math.atan(2.0 / (1.0 + math.sqrt(5.0)))):
            u = unit(direction)
            arrivals = list(self.arrivals(u))
            self.assertTrue(arrivals)
            for vertex, arrival in arrivals:
                with self.subTest(direction=direction, arrival=arrival):
                    self.assertFalse(vertex.is_singular)
                    passed = pass_regular_corner(self.surface, vertex, u, arrival=arrival)
                    ahead = passed.z + 1e-6 * u
                    self.assertTrue(self.surface.polygons[passed.polygon].interior((ahead.real, ahead.imag)))

    def test_wrong_sector_is_detected(self):
        u = unit(math.pi / 4)
        vertex, arrival = next(self.arrivals(u))

        def outside_sector(surface, key, index, v, tol=0.0):
            return not in_sector(surface, key, index, v, tol)

        with patch("src.surfaces.geometry.in_sector", side_effect=outside_sector):
            with self.assertRaises(GeometryFailure):
                pass_regular_corner(self.surface, vertex, u, arrival=arrival)


if __name__ == "__main__":
    unittest.main()
