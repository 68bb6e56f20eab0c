"""
Piecewise-linear paths on M(𝐏), their holonomy and the crossing-sum pairing.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from src.config import settings
from src.exceptions import CornerCrossing, DomainError
from src.surfaces.crossings import CrossingDatum
from src.surfaces.geometry import SurfacePoint, cross, first_exit, in_sector
from src.surfaces.translation_surface import SIDE_CASES, TranslationSurface, polygon_name
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass
class SurfacePath:
    """A path given by its start and a list of straight moves (complex displacements).

    ``start_singular``/``end_singular`` mark paths that begin or end at a
    singular corner; all other paths must close up.
    """

    start: SurfacePoint
    moves: Sequence[complex]
    start_singular: bool = False
    end_singular: bool = False


@dataclass
class PathCrossing:
    datum: CrossingDatum
    point: complex


@dataclass
class DevelopedPath:
    crossings: List[PathCrossing] = field(default_factory=list)
    end: Optional[SurfacePoint] = None


def holonomy(path: SurfacePath) -> complex:
    """∫ω along the path: the sum of its moves."""
    return complex(sum(path.moves))


def _corner_index(surface: TranslationSurface, point: SurfacePoint, tol: float) -> Optional[int]:
    for j, side in enumerate(surface.sides(point.polygon)):
        if abs(side.start - point.z) <= tol:
            return j
    return None


def _require_singular_corner(surface: TranslationSurface, point: SurfacePoint, tol: float) -> int:
    j = _corner_index(surface, point, tol)
    if j is None or not surface.vertex(point.polygon, j).is_singular:
        raise DomainError(f"{point.z} is not a singular corner of polygon {polygon_name(point.polygon)}")
    return j


def develop(surface: TranslationSurface, path: SurfacePath, corner_tolerance: Optional[float] = None) -> DevelopedPath:
    """Follow the path across the polygons, logging every side crossing.

    Raises:
        CornerCrossing: the path meets a polygon corner, or a move ends on a
            side, within the tolerance.
    """
    tol = settings.pairing_corner_tolerance if corner_tolerance is None else corner_tolerance
    key, z = path.start.polygon, complex(path.start.z)
    if path.start_singular:
        j = _require_singular_corner(surface, path.start, tol)
        z = surface.corner_point(key, j)
        first = next((m for m in path.moves if m != 0), None)
        if first is None or not in_sector(surface, key, j, first / abs(first)):
            raise DomainError("The first move of a singular-start path must point into the start polygon")
    elif not surface.polygons[key].interior((z.real, z.imag), tol=tol):
        raise CornerCrossing(f"Start point {z} is not interior to polygon {polygon_name(key)}")

    developed = DevelopedPath()
    moves = [complex(m) for m in path.moves if m != 0]
    for n, move in enumerate(moves):
        remaining = abs(move)
        u = move / remaining
        last = n == len(moves) - 1
        while True:
            hit = first_exit(surface, key, z, u, tol)
            if hit.t > remaining + tol:
                z = z + remaining * u
                break
            if hit.t >= remaining - tol:
                if last and path.end_singular and hit.corner is not None:
                    z = surface.corner_point(key, hit.corner)
                    break
                raise CornerCrossing(f"Move {n} ends on the boundary of polygon {polygon_name(key)}")
            if hit.corner is not None:
                raise CornerCrossing(
                    f"Path meets corner {hit.corner} of polygon {polygon_name(key)} at {hit.point}"
                )
            partner, entry, translation = cross(surface, hit)
            datum = CrossingDatum(key, partner.polygon, SIDE_CASES[hit.side.kind], -translation, hit.side.index)
            developed.crossings.append(PathCrossing(datum, hit.point))
            remaining -= hit.t
            key, z = partner.polygon, entry
    developed.end = SurfacePoint(key, z)
    if path.end_singular:
        _require_singular_corner(surface, developed.end, tol)
    return developed


def pairing(surface: TranslationSurface, path: SurfacePath, corner_tolerance: Optional[float] = None) -> complex:
    """Crossing-sum pairing ⟨ω, γ⟩ of the path.

    Each crossing from P_β into P_α at x contributes ζ_β(x) − ζ_α(x); a
    singular start contributes −ζ(start), a singular end +ζ(end).

    Raises:
        DomainError: the path neither closes up nor runs between singularities.
        CornerCrossing: the path meets a corner.
    """
    tol = settings.pairing_corner_tolerance if corner_tolerance is None else corner_tolerance
    if path.start_singular != path.end_singular:
        raise DomainError("A path must run between two singularities or close up")
    developed = develop(surface, path, tol)
    total = sum((c.datum.vector for c in developed.crossings), 0j)
    if path.start_singular:
        total -= surface.corner_point(path.start.polygon, _corner_index(surface, path.start, tol))
    if path.end_singular:
        total += developed.end.z
    else:
        end = developed.end
        scale = max(1.0, abs(end.z))
        if end.polygon != path.start.polygon or abs(end.z - path.start.z) > tol * scale:
            raise DomainError(
                f"Path from {polygon_name(path.start.polygon)} does not close up "
                f"(ends in {polygon_name(end.polygon)} at {end.z})"
            )
    logger.debug(f"Pairing over {len(developed.crossings)} crossings: {total}")
    return total
