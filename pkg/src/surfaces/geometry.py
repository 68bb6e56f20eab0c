"""
Straight-line kernel on M(𝐏): exits through polygon sides, crossings and regular-corner passage.
"""
import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from src.config import settings
from src.exceptions import CornerAmbiguity, GeometryFailure
from src.surfaces.singularities import SingularPoint
from src.surfaces.translation_surface import PolygonKey, SurfaceSide, TranslationSurface, polygon_name
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

SECTOR_TOLERANCE = 1e-12
# below this |cos| or |sin| of the direction the rays beside a corner are not re-traced
MIN_CHECK_SLOPE = 1e-6


@dataclass(frozen=True)
class SurfacePoint:
    polygon: PolygonKey
    z: complex


@dataclass(frozen=True)
class SideExit:
    """First boundary hit of a ray; ``corner`` is set when the hit lies within tolerance of a corner."""

    side: SurfaceSide
    t: float
    point: complex
    corner: Optional[int] = None


def unit(direction: float) -> complex:
    return cmath.exp(1j * direction)


def first_exit(
    surface: TranslationSurface,
    key: PolygonKey,
    z: complex,
    u: complex,
    corner_tolerance: float,
) -> SideExit:
    """Leave polygon ``key`` from ``z`` along the unit vector ``u``.

    Only sides whose outward normal has positive component along ``u`` can
    be exit sides; the nearest such hit is the exit.
    """
    best = None
    for side in surface.sides(key):
        normal = side.outward_normal
        if normal.real * u.real + normal.imag * u.imag <= 0.0:
            continue
        if side.vertical:
            t = (side.start.real - z.real) / u.real
            along, lo, hi = z.imag + t * u.imag, side.start.imag, side.end.imag
        else:
            t = (side.start.imag - z.imag) / u.imag
            along, lo, hi = z.real + t * u.real, side.start.real, side.end.real
        if t <= 0.0:
            continue
        lo, hi = min(lo, hi), max(lo, hi)
        if along < lo - corner_tolerance or along > hi + corner_tolerance:
            continue
        if best is None or t < best[0]:
            best = (t, side, along)
    if best is None:
        logger.error(f"Ray from {z} along {u} found no exit from {polygon_name(key)}")
        raise GeometryFailure(f"No exit side from polygon {polygon_name(key)}")
    t, side, along = best
    point = complex(side.start.real, along) if side.vertical else complex(along, side.start.imag)
    corner = None
    if abs(point - side.start) <= corner_tolerance:
        corner = side.index
    elif abs(point - side.end) <= corner_tolerance:
        corner = (side.index + 1) % len(surface.sides(key))
    return SideExit(side=side, t=t, point=point, corner=corner)


def cross(surface: TranslationSurface, hit: SideExit) -> Tuple[SurfaceSide, complex, complex]:
    """Partner side, entry point and translation for a crossing through ``hit.side``."""
    partner, translation = surface.glued(hit.side.polygon, hit.side.index)
    entry = hit.point + translation
    # snap onto the partner side
    if partner.vertical:
        entry = complex(partner.start.real, entry.imag)
    else:
        entry = complex(entry.real, partner.start.imag)
    return partner, entry, translation


def corner_sector(surface: TranslationSurface, key: PolygonKey, corner_index: int) -> Tuple[float, float]:
    """Polar angle of the outgoing side and the interior angle at a polygon corner."""
    side = surface.sides(key)[corner_index]
    edge = side.end - side.start
    return math.atan2(edge.imag, edge.real), surface.polygons[key].corners()[corner_index].angle


def in_sector(surface: TranslationSurface, key: PolygonKey, corner_index: int, u: complex, tol: float = 0.0) -> bool:
    """Whether the direction ``u`` points strictly into the polygon at the corner."""
    start, opening = corner_sector(surface, key, corner_index)
    offset = (math.atan2(u.imag, u.real) - start) % (2.0 * math.pi)
    return tol < offset < opening - tol


def _flow_beside_corner(
    surface: TranslationSurface, key: PolygonKey, corner: complex, u: complex, offset: float, step: float
) -> SurfacePoint:
    """Follow the ray parallel to ``u`` at signed distance ``offset`` from the corner, from ``step`` before it to ``step`` after."""
    z = corner - step * u + offset * 1j * u
    remaining = 2.0 * step
    for _ in range(8):
        hit = first_exit(surface, key, z, u, 0.0)
        if hit.t >= remaining:
            return SurfacePoint(key, z + remaining * u)
        partner, entry, _ = cross(surface, hit)
        key, z = partner.polygon, entry
        remaining -= hit.t
    raise GeometryFailure(f"Ray beside corner {corner} of {polygon_name(key)} keeps crossing sides")


def pass_regular_corner(
    surface: TranslationSurface,
    vertex: SingularPoint,
    u: complex,
    arrival: Optional[Tuple[PolygonKey, int]] = None,
) -> SurfacePoint:
    """Continue a ray through a regular corner: the polygon whose sector contains ``u``.

    With ``arrival`` (the polygon and corner the ray came in through) the
    choice is checked against the two rays passing ``regular_corner_tolerance``
    to either side of the corner: both must come out next to the chosen
    corner, in the chosen polygon.

    Raises:
        CornerAmbiguity: ``u`` runs along a side at the corner.
        GeometryFailure: the rays beside the corner disagree with the sector lookup.
    """
    chosen = None
    for corner in vertex.identity:
        if in_sector(surface, corner.polygon, corner.index, u, SECTOR_TOLERANCE):
            chosen = SurfacePoint(corner.polygon, surface.corner_point(corner.polygon, corner.index))
            break
    if chosen is None:
        raise CornerAmbiguity(f"Direction {u} runs along a side at corner {vertex.representative.name}")
    slope = min(abs(u.real), abs(u.imag))
    if arrival is None or slope < MIN_CHECK_SLOPE:
        return chosen

    key, index = arrival
    offset = settings.regular_corner_tolerance
    step = 4.0 * offset / slope
    corner = surface.corner_point(key, index)
    expected = chosen.z + step * u
    for sign in (1.0, -1.0):
        beside = _flow_beside_corner(surface, key, corner, u, sign * offset, step)
        if beside.polygon != chosen.polygon or abs(beside.z - expected) > 2.0 * offset:
            logger.error(
                f"Corner passage at {vertex.representative.name}: sector gives {polygon_name(chosen.polygon)}, "
                f"the ray at offset {sign * offset:.0e} reaches {polygon_name(beside.polygon)} at {beside.z}"
            )
            raise GeometryFailure(f"Regular corner {vertex.representative.name} is passed inconsistently")
    return chosen
