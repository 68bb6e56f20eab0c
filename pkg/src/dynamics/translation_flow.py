"""
Translation flow on M(𝐏): tracing, separatrices, saddle connections and Birkhoff averages.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from src.config import settings
from src.exceptions import DomainError, HitSingularity
from src.surfaces.crossings import DEFAULT_DIRECTION, CrossingDatum, enumerate_DBE
from src.surfaces.geometry import SurfacePoint, cross, first_exit, in_sector, pass_regular_corner, unit
from src.surfaces.singularities import SingularPoint
from src.surfaces.translation_surface import SIDE_CASES, PolygonKey, TranslationSurface, polygon_name
from src.utils.logging_config import get_logger
from src.utils.metrics import metrics_collector

logger = get_logger(__name__)

# (polygon, position, unit direction, longest time) -> time of an early stop or None
StopRule = Callable[[PolygonKey, complex, complex, float], Optional[float]]


@dataclass(frozen=True)
class FlowCrossing:
    datum: CrossingDatum
    point: complex
    entry: complex
    time: float


@dataclass(frozen=True)
class FlowPiece:
    """Straight stretch of the flow inside one polygon."""

    polygon: PolygonKey
    start: complex
    end: complex
    t0: float
    t1: float


@dataclass
class FlatTrajectory:
    """A traced orbit segment.

    ``status`` is ``complete`` when the requested length was flown,
    ``stopped`` when a stop rule fired, ``singular`` when a singularity was
    reached and ``capped`` when the crossing cap was hit.
    """

    start: SurfacePoint
    direction: float
    crossings: List[FlowCrossing] = field(default_factory=list)
    pieces: List[FlowPiece] = field(default_factory=list)
    end: Optional[SurfacePoint] = None
    total_length: float = 0.0
    status: str = "complete"
    singularity: Optional[SingularPoint] = None
    singular_corner: Optional[Tuple[PolygonKey, int]] = None

    @property
    def endpoints(self):
        return (self.start, self.end)

    def visited(self) -> Set[PolygonKey]:
        return {piece.polygon for piece in self.pieces}

    def to_frame(self) -> pd.DataFrame:
        """One row per piece endpoint: ``t, polygon, x, y``."""
        rows = []
        for piece in self.pieces:
            rows.append((piece.t0, polygon_name(piece.polygon), piece.start.real, piece.start.imag))
            rows.append((piece.t1, polygon_name(piece.polygon), piece.end.real, piece.end.imag))
        return pd.DataFrame(rows, columns=["t", "polygon", "x", "y"])

    def to_csv(self, path: str):
        self.to_frame().to_csv(path, index=False, float_format="%.12g")


@dataclass(frozen=True)
class Separatrix:
    vertex: int
    polygon: PolygonKey
    corner_index: int
    point: complex


@dataclass(frozen=True)
class SaddleConnection:
    source: int
    target: int
    length: float
    holonomy: complex


def _flow(
    surface: TranslationSurface,
    start: SurfacePoint,
    length: float,
    direction: float,
    corner_tolerance: float,
    stop: Optional[StopRule] = None,
    max_crossings: Optional[int] = None,
) -> FlatTrajectory:
    u = unit(direction)
    key, z = start.polygon, complex(start.z)
    trajectory = FlatTrajectory(start=SurfacePoint(key, z), direction=direction)
    elapsed = 0.0
    while True:
        hit = first_exit(surface, key, z, u, corner_tolerance)
        span = min(hit.t, length - elapsed)
        if stop is not None:
            t_stop = stop(key, z, u, span)
            if t_stop is not None:
                end = z + t_stop * u
                trajectory.pieces.append(FlowPiece(key, z, end, elapsed, elapsed + t_stop))
                elapsed += t_stop
                trajectory.status = "stopped"
                z = end
                break
        if hit.t >= length - elapsed:
            end = z + (length - elapsed) * u
            trajectory.pieces.append(FlowPiece(key, z, end, elapsed, length))
            elapsed, z = length, end
            trajectory.status = "complete"
            break
        trajectory.pieces.append(FlowPiece(key, z, hit.point, elapsed, elapsed + hit.t))
        elapsed += hit.t
        if hit.corner is not None:
            vertex = surface.vertex(key, hit.corner)
            corner = surface.corner_point(key, hit.corner)
            if vertex.is_singular:
                trajectory.status = "singular"
                trajectory.singularity = vertex
                trajectory.singular_corner = (key, hit.corner)
                z = corner
                break
            nxt = pass_regular_corner(surface, vertex, u, arrival=(key, hit.corner))
            datum = CrossingDatum(key, nxt.polygon, "corner", corner - nxt.z, -1)
            trajectory.crossings.append(FlowCrossing(datum, corner, nxt.z, elapsed))
            key, z = nxt.polygon, nxt.z
        else:
            partner, entry, translation = cross(surface, hit)
            datum = CrossingDatum(key, partner.polygon, SIDE_CASES[hit.side.kind], -translation, hit.side.index)
            trajectory.crossings.append(FlowCrossing(datum, hit.point, entry, elapsed))
            key, z = partner.polygon, entry
        if max_crossings is not None and len(trajectory.crossings) >= max_crossings:
            trajectory.status = "capped"
            break
    trajectory.end = SurfacePoint(key, z)
    trajectory.total_length = elapsed
    metrics_collector.record_segments(len(trajectory.pieces))
    return trajectory


def trace(
    surface: TranslationSurface,
    start: SurfacePoint,
    length: float,
    direction: float = DEFAULT_DIRECTION,
    corner_tolerance: Optional[float] = None,
) -> FlatTrajectory:
    """Flow for time ``length`` from an interior point.

    Regular corners met within ``corner_tolerance`` are passed into the
    polygon whose sector contains the direction.

    Raises:
        HitSingularity: a singular point was reached first; ``partial``
            holds the trajectory up to it.
    """
    if length <= 0:
        raise DomainError("Trace length must be positive")
    tol = settings.regular_corner_tolerance if corner_tolerance is None else corner_tolerance
    polygon = surface.polygons[start.polygon]
    if not polygon.interior((start.z.real, start.z.imag), tol=tol):
        raise DomainError(f"Start {start.z} is not interior to polygon {polygon_name(start.polygon)}")
    trajectory = _flow(surface, start, length, direction, tol)
    if trajectory.status == "singular":
        logger.info(f"Flow from {start.z} reached a singular point at length {trajectory.total_length:.6g}")
        raise HitSingularity(
            f"Singular point reached at length {trajectory.total_length}",
            length=trajectory.total_length,
            partial=trajectory,
        )
    logger.debug(f"Traced length {length} with {len(trajectory.crossings)} crossings")
    return trajectory


def _corner_separatrices(surface: TranslationSurface, corners) -> List[Separatrix]:
    return [
        Separatrix(
            vertex=surface.vertex_number(c.polygon, c.corner_index),
            polygon=c.polygon,
            corner_index=c.corner_index,
            point=surface.corner_point(c.polygon, c.corner_index),
        )
        for c in corners
    ]


def outgoing_separatrices(surface: TranslationSurface, direction: float = DEFAULT_DIRECTION) -> List[Separatrix]:
    return _corner_separatrices(surface, enumerate_DBE(surface, direction).B)


def incoming_separatrices(surface: TranslationSurface, direction: float = DEFAULT_DIRECTION) -> List[Separatrix]:
    return _corner_separatrices(surface, enumerate_DBE(surface, direction).E)


def trace_separatrix(
    surface: TranslationSurface,
    separatrix: Separatrix,
    length: float,
    direction: float,
    corner_tolerance: float,
    stop: Optional[StopRule] = None,
    max_crossings: Optional[int] = None,
) -> FlatTrajectory:
    """Flow out of a singular corner; ``direction`` must point into the corner's polygon."""
    u = unit(direction)
    if not in_sector(surface, separatrix.polygon, separatrix.corner_index, u):
        raise DomainError(f"Direction {direction} does not leave corner {separatrix.corner_index} into its polygon")
    start = SurfacePoint(separatrix.polygon, separatrix.point)
    return _flow(surface, start, length, direction, corner_tolerance, stop=stop, max_crossings=max_crossings)


def find_saddle_connections(
    surface: TranslationSurface,
    direction: float = DEFAULT_DIRECTION,
    max_length: float = 10.0,
    tolerance: Optional[float] = None,
) -> List[SaddleConnection]:
    """Outgoing separatrices that reach a singular point within ``max_length``."""
    tolerance = settings.saddle_tolerance if tolerance is None else tolerance
    connections = []
    for separatrix in outgoing_separatrices(surface, direction):
        trajectory = trace_separatrix(surface, separatrix, max_length, direction, tolerance)
        if trajectory.status == "singular":
            connections.append(
                SaddleConnection(
                    source=separatrix.vertex,
                    target=surface.vertex_number(*trajectory.singular_corner),
                    length=trajectory.total_length,
                    holonomy=trajectory.total_length * unit(direction),
                )
            )
    logger.info(f"Found {len(connections)} saddle connection(s) up to length {max_length}")
    return connections


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle ``[x0, x1] × [y0, y1]`` inside one polygon."""

    polygon: PolygonKey
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def dwell(self, start: complex, end: complex) -> float:
        """Fraction of the segment ``start → end`` inside the box."""
        lo, hi = 0.0, 1.0
        delta = end - start
        for origin, step, a, b in ((start.real, delta.real, self.x0, self.x1), (start.imag, delta.imag, self.y0, self.y1)):
            if step == 0.0:
                if not a <= origin <= b:
                    return 0.0
                continue
            t_a, t_b = (a - origin) / step, (b - origin) / step
            lo, hi = max(lo, min(t_a, t_b)), min(hi, max(t_a, t_b))
        return max(0.0, hi - lo)


def polygon_boxes(surface: TranslationSurface) -> List[Box]:
    """The column rectangles of every polygon; together they tile the surface."""
    return [Box(key, *rect) for key in surface.keys for rect in surface.polygons[key].rectangles()]


def _averages(trajectory: FlatTrajectory, boxes: Sequence[Box]) -> np.ndarray:
    by_polygon: Dict[PolygonKey, List[int]] = {}
    for n, box in enumerate(boxes):
        by_polygon.setdefault(box.polygon, []).append(n)
    dwell = np.zeros(len(boxes))
    for piece in trajectory.pieces:
        duration = piece.t1 - piece.t0
        for n in by_polygon.get(piece.polygon, ()):
            dwell[n] += duration * boxes[n].dwell(piece.start, piece.end)
    return dwell / trajectory.total_length if trajectory.total_length > 0 else dwell


def birkhoff_averages(
    surface: TranslationSurface,
    boxes: Sequence[Box],
    start: SurfacePoint,
    horizon: float,
    direction: float = DEFAULT_DIRECTION,
) -> np.ndarray:
    """Fraction of time ``[0, horizon]`` the orbit of ``start`` spends in each box.

    Raises:
        HitSingularity: the orbit reached a singularity; ``partial`` holds the
            averages over the time flown.
    """
    try:
        trajectory = trace(surface, start, horizon, direction)
    except HitSingularity as e:
        partial = _averages(e.partial, boxes)
        logger.error(f"Birkhoff orbit hit a singularity at time {e.length:.6g}")
        raise HitSingularity(str(e), length=e.length, partial=partial) from e
    return _averages(trajectory, boxes)


def birkhoff_average(
    surface: TranslationSurface,
    box: Box,
    start: SurfacePoint,
    horizon: float,
    direction: float = DEFAULT_DIRECTION,
) -> float:
    """Time fraction in a single box; the equidistribution target is ``box.area / surface.area``."""
    return float(birkhoff_averages(surface, [box], start, horizon, direction)[0])


def visited_polygons(
    surface: TranslationSurface,
    start: SurfacePoint,
    length: float,
    direction: float = DEFAULT_DIRECTION,
) -> Set[PolygonKey]:
    return trace(surface, start, length, direction).visited()


def golden_start(surface: TranslationSurface, key: Optional[PolygonKey] = None, seed: int = 0) -> SurfacePoint:
    """A start point inside the first column of ``key`` at irrational-ratio offsets."""
    key = key or surface.keys[0]
    polygon = surface.polygons[key]
    phi = 0.5 * (1.0 + math.sqrt(5.0))
    fx = (0.5 + seed / phi) % 1.0
    fy = (0.5 + seed * math.sqrt(2.0)) % 1.0
    x = polygon.profile.xs[0] * (0.05 + 0.9 * fx)
    y = polygon.profile.ys[-1] * (0.05 + 0.9 * fy)
    return SurfacePoint(key, complex(*polygon.gamma.apply((x, y))))
