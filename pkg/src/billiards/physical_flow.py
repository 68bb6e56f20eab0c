"""
Unit-speed billiard flow inside a nibbled ellipse with caustic tracking.
"""
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.billiards.conics import ConicFamily, cartesian_point, elliptic_coords, tangent_conic_parameter
from src.billiards.tables import QUADRANT_SIGNS, BoundaryArc, NibbledEllipse
from src.config import settings
from src.exceptions import CornerHit, DomainError, FocusSingularity, GeometryFailure
from src.utils.logging_config import get_logger
from src.utils.metrics import metrics_collector

logger = get_logger(__name__)

ARC_TOLERANCE = 1e-9


@dataclass(frozen=True)
class BilliardState:
    """A unit tangent vector: a position and a unit direction."""

    position: Tuple[float, float]
    direction: Tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))
        object.__setattr__(self, "direction", (float(self.direction[0]), float(self.direction[1])))
        if abs(math.hypot(*self.direction) - 1.0) > 1e-12:
            raise DomainError(f"Direction {self.direction} is not a unit vector")

    @classmethod
    def from_vectors(cls, position: Sequence[float], direction: Sequence[float]) -> "BilliardState":
        norm = math.hypot(direction[0], direction[1])
        if norm == 0.0:
            raise DomainError("Billiard direction must be nonzero")
        return cls(tuple(position), (direction[0] / norm, direction[1] / norm))


@dataclass(frozen=True)
class TrajectorySegment:
    start: Tuple[float, float]
    end: Tuple[float, float]
    caustic: float

    @property
    def length(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])


@dataclass
class PhysicalTrajectory:
    """Polyline of a traced billiard orbit.

    ``status`` is ``time_exhausted`` when the horizon was consumed,
    ``died_at_corner`` when a reflection landed on a corner and ``alive``
    when the segment cap stopped the trace first.
    """

    segments: List[TrajectorySegment] = field(default_factory=list)
    status: str = "alive"
    tangencies: int = 0

    @property
    def length(self) -> float:
        return float(sum(seg.length for seg in self.segments))

    @property
    def caustics(self) -> np.ndarray:
        return np.array([seg.caustic for seg in self.segments])

    def vertices(self) -> List[Tuple[float, float]]:
        if not self.segments:
            return []
        return [self.segments[0].start] + [seg.end for seg in self.segments]


def caustic_parameter(state: BilliardState, family: ConicFamily) -> float:
    """Parameter of the confocal conic the line of ``state`` is tangent to."""
    return tangent_conic_parameter(state.position, state.direction, family)


def reflect(
    state: BilliardState,
    arc: BoundaryArc,
    family: ConicFamily,
    corner_tolerance: Optional[float] = None,
) -> BilliardState:
    """Mirror the direction in the tangent of ``arc`` at the state's position.

    Raises:
        CornerHit: the position is within the corner tolerance of a corner
            endpoint of the arc.
    """
    corner_tolerance = settings.corner_tolerance if corner_tolerance is None else corner_tolerance
    position = np.asarray(state.position)
    for corner in arc.corners(family):
        if np.hypot(*(position - corner)) <= corner_tolerance:
            raise CornerHit(f"Reflection point {tuple(position)} is a table corner", corner=corner)
    if arc.kind == "vertical_axis":
        normal = family.normal(family.a, position)
    elif arc.kind == "horizontal_axis":
        normal = family.normal(family.b, position)
    else:
        normal = family.normal(arc.lam, position)
    d = np.asarray(state.direction)
    reflected = d - 2.0 * np.dot(d, normal) * normal
    return BilliardState.from_vectors(state.position, reflected)


def _on_arc(point: np.ndarray, arc: BoundaryArc, family: ConicFamily) -> bool:
    sx, sy = QUADRANT_SIGNS[arc.quadrant]
    if sx * point[0] < -ARC_TOLERANCE or sy * point[1] < -ARC_TOLERANCE:
        return False
    lo, hi = arc.span
    if arc.kind == "vertical_axis":
        return lo - ARC_TOLERANCE <= point[1] <= hi + ARC_TOLERANCE
    if arc.kind == "horizontal_axis":
        return lo - ARC_TOLERANCE <= point[0] <= hi + ARC_TOLERANCE
    try:
        lam1, lam2 = elliptic_coords((abs(point[0]), abs(point[1])), family)
    except FocusSingularity:
        return False
    free = lam1 if arc.kind == "ellipse" else lam2
    return lo - ARC_TOLERANCE <= free <= hi + ARC_TOLERANCE


def _ray_hits(
    position: np.ndarray,
    direction: np.ndarray,
    arc: BoundaryArc,
    family: ConicFamily,
    t_min: float,
) -> Tuple[List[float], Optional[float]]:
    """Ray parameters where the ray crosses the arc's conic, and a grazing parameter if any."""
    px, py = position
    dx, dy = direction
    if arc.kind == "vertical_axis":
        return ([-px / dx] if dx != 0.0 else []), None
    if arc.kind == "horizontal_axis":
        return ([-py / dy] if dy != 0.0 else []), None
    alpha, beta = family.a - arc.lam, family.b - arc.lam
    qa = dx * dx / alpha + dy * dy / beta
    qb = 2.0 * (px * dx / alpha + py * dy / beta)
    qc = px * px / alpha + py * py / beta - 1.0
    if qa == 0.0:
        return ([-qc / qb] if qb != 0.0 else []), None
    half = qb / (2.0 * qa)
    disc = half * half - qc / qa
    if abs(disc) <= settings.tangency_tolerance * (half * half + abs(qc / qa) + 1.0):
        return [], -half
    if disc < 0:
        return [], None
    root = math.sqrt(disc)
    roots = []
    for t in (-half - root, -half + root):
        slope = 2.0 * qa * t + qb
        if slope != 0.0:
            t -= (qa * t * t + qb * t + qc) / slope
        if t > t_min:
            roots.append(t)
    return roots, None


def _next_hit(table: NibbledEllipse, position: np.ndarray, direction: np.ndarray, t_min: float):
    best = None
    grazed = False
    for arc in table.boundary_arcs():
        roots, graze = _ray_hits(position, direction, arc, table.family, t_min)
        if graze is not None and graze > t_min and _on_arc(position + graze * direction, arc, table.family):
            grazed = True
        for t in roots:
            point = position + t * direction
            if _on_arc(point, arc, table.family) and (best is None or t < best[0]):
                best = (t, arc, point)
    return best, grazed


def billiard_trace(
    table: NibbledEllipse,
    state: BilliardState,
    horizon: float,
    max_segments: Optional[int] = None,
) -> PhysicalTrajectory:
    """Trace the billiard flow for time ``horizon``.

    Args:
        table: The table.
        state: Start state, interior or on the boundary heading inward.
        horizon: Total flight time (unit speed).
        max_segments: Optional cap on the number of segments.

    Returns:
        The trajectory with per-segment caustic parameters.
    """
    if horizon <= 0:
        raise DomainError("Horizon must be positive")
    trajectory = PhysicalTrajectory()
    position = np.asarray(state.position, dtype=float)
    direction = np.asarray(state.direction, dtype=float)
    remaining = float(horizon)
    t_min = 1e-10 * math.sqrt(table.a)
    corners = [np.asarray(c) for c in table.corners()]

    while True:
        if max_segments is not None and len(trajectory.segments) >= max_segments:
            trajectory.status = "alive"
            break
        hit, tangent = _next_hit(table, position, direction, t_min)
        if tangent:
            trajectory.tangencies += 1
            logger.warning(f"Grazing tangency skipped at {tuple(position)} heading {tuple(direction)}")
        if hit is None:
            logger.error(f"No boundary intersection from {tuple(position)} heading {tuple(direction)}")
            raise GeometryFailure("Ray left the table without meeting its boundary")
        t, arc, point = hit
        caustic = tangent_conic_parameter(position, direction, table.family)
        if remaining <= t:
            end = position + remaining * direction
            trajectory.segments.append(TrajectorySegment(tuple(position), tuple(end), caustic))
            trajectory.status = "time_exhausted"
            break
        trajectory.segments.append(TrajectorySegment(tuple(position), tuple(point), caustic))
        remaining -= t
        if any(np.hypot(*(point - c)) <= settings.corner_tolerance for c in corners):
            trajectory.status = "died_at_corner"
            logger.info(f"Billiard flow died at corner {tuple(point)} after {len(trajectory.segments)} segments")
            break
        try:
            reflected = reflect(BilliardState.from_vectors(point, direction), arc, table.family)
        except CornerHit:
            trajectory.status = "died_at_corner"
            break
        position = point
        direction = np.asarray(reflected.direction)

    metrics_collector.record_segments(len(trajectory.segments))
    logger.debug(f"Traced {len(trajectory.segments)} segments, status {trajectory.status}")
    return trajectory


def launch_state(family: ConicFamily, s: float, point: Sequence[float], branch: int = 1) -> BilliardState:
    """A unit direction at ``point`` whose line is tangent to ``C_s``.

    Solves ``dx²(b−y²−s) + 2xy·dx·dy + dy²(a−x²−s) = 0``; ``branch`` picks
    one of the two tangents.
    """
    x, y = float(point[0]), float(point[1])
    qa = family.b - y * y - s
    qb = 2.0 * x * y
    qc = family.a - x * x - s
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0:
        raise DomainError(f"No line through {tuple(point)} is tangent to the conic of parameter {s}")
    root = math.sqrt(disc)
    sign = 1.0 if branch >= 0 else -1.0
    if abs(qa) >= abs(qc):
        dx = (-qb + sign * root) / (2.0 * qa)
        return BilliardState.from_vectors((x, y), (dx, 1.0))
    if qc == 0.0:
        return BilliardState.from_vectors((x, y), (1.0, 0.0))
    dy = (-qb + sign * root) / (2.0 * qc)
    return BilliardState.from_vectors((x, y), (1.0, dy))


def sample_start(table: NibbledEllipse, s: float, seed: int = 0) -> BilliardState:
    """A start state on the caustic ``C_s`` inside the first column of the pp quadrant.

    The point is chosen at irrational-ratio fractions of the admissible
    ``(λ1, λ2)`` box and the tangent branch alternates with ``seed``.
    """
    theta = table.quadrants["pp"]
    a, b = table.a, table.b
    if not table.beta_top < s < a or s == b:
        raise DomainError(f"No caustic component for s={s}")
    phi = 0.5 * (1.0 + math.sqrt(5.0))
    fx = 0.1 + 0.8 * ((0.5 + seed / phi) % 1.0)
    fy = 0.1 + 0.8 * ((0.5 + seed * math.sqrt(2.0)) % 1.0)
    if s < b:
        lam1 = theta.alpha(1) + fx * (a - theta.alpha(1))
        lam2 = theta.beta(1) + fy * (s - theta.beta(1))
    else:
        low = max(theta.alpha(1), s)
        lam1 = low + fx * (a - low)
        lam2 = theta.beta(1) + fy * (b - theta.beta(1))
    point = cartesian_point(table.family, lam1, lam2)
    return launch_state(table.family, s, point, branch=1 if seed % 2 == 0 else -1)
