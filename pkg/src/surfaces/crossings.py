"""
Crossing data of the translation flow: side crossings (D) and separatrix endpoints (B, E).

``enumerate_DBE`` reads everything from the part profiles and the gluing
relations; ``probe_DBE`` shoots short rays across every side and out of
every singular corner of the unfolded surface. The two must agree.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

from src.exceptions import DomainError
from src.polygons.staircase import SideKind
from src.surfaces.geometry import cross, first_exit, unit
from src.surfaces.translation_surface import (
    SIDE_CASES,
    SIDE_RULES,
    PolygonKey,
    TranslationSurface,
    key_order,
    polygon_name,
)
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

DEFAULT_DIRECTION = 0.25 * math.pi
PROBE_STEP = 1e-6


@dataclass(frozen=True)
class CrossingDatum:
    """The flow leaves ``from_polygon`` and enters ``to_polygon``; ``vector`` is ζ_from(x) − ζ_to(x)."""

    from_polygon: PolygonKey
    to_polygon: PolygonKey
    side_class: str
    vector: complex
    side_index: int

    @property
    def key(self) -> Tuple[PolygonKey, int]:
        return (self.from_polygon, self.side_index)

    def describe(self) -> str:
        return f"{polygon_name(self.from_polygon)}->{polygon_name(self.to_polygon)} ({self.side_class})"


@dataclass(frozen=True)
class CornerDatum:
    """A separatrix endpoint: the corner of ``polygon`` and its value (−ζ for B, ζ for E)."""

    polygon: PolygonKey
    corner_index: int
    corner_name: Tuple[int, int]
    value: complex


@dataclass
class DBESets:
    D: List[CrossingDatum]
    B: List[CornerDatum]
    E: List[CornerDatum]

    def matches(self, other: "DBESets", tol: float = 1e-12) -> bool:
        """Same triples and same values within ``tol``."""

        def crossing_map(items):
            return {(c.from_polygon, c.side_index, c.to_polygon): c.vector for c in items}

        def corner_map(items):
            return {(c.polygon, c.corner_index): c.value for c in items}

        for mine, theirs in (
            (crossing_map(self.D), crossing_map(other.D)),
            (corner_map(self.B), corner_map(other.B)),
            (corner_map(self.E), corner_map(other.E)),
        ):
            if set(mine) != set(theirs):
                return False
            if any(abs(mine[k] - theirs[k]) > tol for k in mine):
                return False
        return True

    def to_dict(self) -> Dict[str, list]:
        def point(z: complex) -> List[float]:
            return [round(z.real, 12), round(z.imag, 12)]

        return {
            "D": [[polygon_name(c.from_polygon), polygon_name(c.to_polygon), c.side_class, point(c.vector)] for c in self.D],
            "B": [[polygon_name(c.polygon), list(c.corner_name), point(c.value)] for c in self.B],
            "E": [[polygon_name(c.polygon), list(c.corner_name), point(c.value)] for c in self.E],
        }


def _corner_order(datum: CornerDatum):
    return (key_order(datum.polygon), datum.corner_index)


def _check_direction(direction: float) -> None:
    if not 0.0 < direction % (2.0 * math.pi) < 0.5 * math.pi:
        raise DomainError(f"Crossing data are tabulated for directions in (0, π/2), got {direction}")


def _exits(kind: SideKind, sx: int, sy: int) -> bool:
    # a first-quadrant flow leaves through right-facing and top-facing sides
    if kind in (SideKind.STEP_V, SideKind.SHORT_V):
        return sx > 0
    if kind == SideKind.LONG_V:
        return sx < 0
    if kind in (SideKind.STEP_H, SideKind.SHORT_H):
        return sy > 0
    return sy < 0


def _side_vector(surface: TranslationSurface, m, kind: SideKind, tag: int) -> complex:
    polygon = surface.source
    profile = polygon.parts[m].profile
    if kind == SideKind.STEP_V:
        return complex(2.0 * profile.x(tag), 0.0)
    if kind == SideKind.STEP_H:
        return complex(0.0, 2.0 * profile.y(tag))
    if kind == SideKind.SHORT_V:
        other = polygon.parts[polygon.partner("v", m)].profile
        return complex(profile.xs[-1] + other.xs[-1], 0.0)
    if kind == SideKind.SHORT_H:
        other = polygon.parts[polygon.partner("h", m)].profile
        return complex(0.0, profile.ys[0] + other.ys[0])
    return 0j


def _corner_value(surface: TranslationSurface, key: PolygonKey, name: Tuple[int, int], incoming: bool):
    """Value of a singular corner in B (outgoing) or E (incoming), or None when the flow misses it."""
    m, gamma = key
    profile = surface.polygons[key].profile
    k = profile.k
    i, j = name
    if 1 <= i < k and j == i + 1:
        allowed = ("id", "h", "v") if incoming else ("h", "v", "vh")
        if gamma.label not in allowed:
            return None
        zeta = complex(gamma.sx * profile.x(i), gamma.sy * profile.y(j))
        return zeta if incoming else -zeta
    if name == (0, 1):
        return complex(0.0, profile.y(1)) if gamma.label == ("v" if incoming else "h") else None
    if name == (k, 0):
        return complex(profile.x(k), 0.0) if gamma.label == ("h" if incoming else "v") else None
    if name == (0, 0):
        return 0j if gamma.label == ("vh" if incoming else "id") else None
    if i == j:
        # V_{i,i} is regular for legal gluings; listed for completeness
        if gamma.label != ("id" if incoming else "vh"):
            return None
        return complex(profile.x(i), profile.y(i))
    return None


def enumerate_DBE(surface: TranslationSurface, direction: float = DEFAULT_DIRECTION) -> DBESets:
    """Crossing vectors and separatrix endpoints from the case tables.

    Side crossings: step sides 2x_j (vertical) and 2y_j·i (horizontal),
    short sides x_k^m + x_k^{m′} and (y_1^m + y_1^{m′})·i, long sides 0.
    Outgoing separatrices leave reflex corners of the h, v, vh copies and
    the corners V_{0,0}, V_{0,1}, V_{k,0} of the id, h, v copies when those
    are singular; incoming ones mirror this through the origin.
    """
    _check_direction(direction)
    D: List[CrossingDatum] = []
    for key in surface.keys:
        m, gamma = key
        for side in surface.sides(key):
            if not _exits(side.kind, gamma.sx, gamma.sy):
                continue
            relation, mirror = SIDE_RULES[side.kind]
            partner = m if relation is None else surface.source.partner(relation, m)
            D.append(
                CrossingDatum(
                    from_polygon=key,
                    to_polygon=(partner, mirror.compose(gamma)),
                    side_class=SIDE_CASES[side.kind],
                    vector=_side_vector(surface, m, side.kind, side.tag),
                    side_index=side.index,
                )
            )
    B: List[CornerDatum] = []
    E: List[CornerDatum] = []
    for vertex in surface.singularities:
        for corner in vertex.identity:
            for incoming, bucket in ((False, B), (True, E)):
                value = _corner_value(surface, corner.polygon, corner.name, incoming)
                if value is not None:
                    bucket.append(CornerDatum(corner.polygon, corner.index, corner.name, value))
    return DBESets(D=D, B=sorted(B, key=_corner_order), E=sorted(E, key=_corner_order))


def probe_DBE(surface: TranslationSurface, direction: float = DEFAULT_DIRECTION) -> DBESets:
    """The same sets found by shooting short rays of the flow across the surface."""
    _check_direction(direction)
    u = unit(direction)
    D: List[CrossingDatum] = []
    for key in surface.keys:
        polygon = surface.polygons[key]
        for side in surface.sides(key):
            mid = 0.5 * (side.start + side.end)
            probe = mid - PROBE_STEP * side.length * u
            if not polygon.interior((probe.real, probe.imag), tol=0.0):
                continue
            hit = first_exit(surface, key, probe, u, 0.0)
            if hit.side.index != side.index:
                continue
            partner, entry, _ = cross(surface, hit)
            D.append(
                CrossingDatum(
                    from_polygon=key,
                    to_polygon=partner.polygon,
                    side_class=SIDE_CASES[side.kind],
                    vector=hit.point - entry,
                    side_index=side.index,
                )
            )
    B: List[CornerDatum] = []
    E: List[CornerDatum] = []
    for vertex in surface.singularities:
        for corner in vertex.identity:
            polygon = surface.polygons[corner.polygon]
            zeta = surface.corner_point(corner.polygon, corner.index)
            step = PROBE_STEP * polygon.profile.xs[0] * u
            for sign, bucket, value in ((1.0, B, -zeta), (-1.0, E, zeta)):
                probe = zeta + sign * step
                if polygon.interior((probe.real, probe.imag), tol=0.0):
                    bucket.append(CornerDatum(corner.polygon, corner.index, corner.name, value))
    logger.debug(f"Probe scan: |D|={len(D)}, |B|={len(B)}, |E|={len(E)}")
    return DBESets(D=D, B=sorted(B, key=_corner_order), E=sorted(E, key=_corner_order))
