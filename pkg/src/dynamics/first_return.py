"""
First-return interval exchange of the translation flow on a horizontal transversal.
"""
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional

from src.config import settings
from src.dynamics.translation_flow import (
    FlatTrajectory,
    _flow,
    incoming_separatrices,
    trace_separatrix,
)
from src.exceptions import (
    ConsistencyFailure,
    CornerCrossing,
    DomainError,
    GeometryFailure,
    NotGlobalTransversal,
    SeparatrixHitsCorner,
)
from src.iet.iet import IETData
from src.surfaces.crossings import DEFAULT_DIRECTION
from src.surfaces.geometry import SurfacePoint, unit
from src.surfaces.paths import SurfacePath, holonomy, pairing
from src.surfaces.translation_surface import PolygonKey, TranslationSurface, polygon_name
from src.utils.logging_config import get_logger
from src.utils.metrics import measure_time

logger = get_logger(__name__)

GOLDEN = 0.5 * (1.0 + math.sqrt(5.0))

# offsets (fractions of an interval) tried for the loop base point
BASE_OFFSETS = (0.5, 0.5 + 0.1 / GOLDEN, 0.5 - 0.1 / GOLDEN, 0.25, 0.75)


@dataclass(frozen=True)
class Transversal:
    """Horizontal segment ``[left, left + width]`` inside polygon ``host``."""

    host: PolygonKey
    left: complex
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise DomainError("Transversal width must be positive")

    def point(self, x: float) -> complex:
        return self.left + x

    def coordinate(self, z: complex) -> float:
        return z.real - self.left.real

    def hit_time(self, key: PolygonKey, z: complex, u: complex, longest: float) -> Optional[float]:
        """Time at which the ray first meets the open segment, if within ``longest``."""
        if key != self.host or u.imag == 0.0:
            return None
        t = (self.left.imag - z.imag) / u.imag
        if not 0.0 < t <= longest:
            return None
        x = z.real + t * u.real - self.left.real
        return t if 0.0 < x < self.width else None

    def validate(self, surface: TranslationSurface):
        """Require the closed segment to lie in the interior of the host polygon."""
        polygon = surface.polygons[self.host]
        xs = [self.left.real, self.left.real + self.width]
        xs += [corner.point[0] for corner in polygon.corners() if xs[0] < corner.point[0] < xs[1]]
        xs = sorted(xs)
        probes = xs + [0.5 * (a + b) for a, b in zip(xs, xs[1:])]
        for x in probes:
            if not polygon.interior((x, self.left.imag), tol=settings.regular_corner_tolerance):
                raise DomainError(f"Transversal leaves polygon {polygon_name(self.host)} near x={x}")


def default_transversal(surface: TranslationSurface, host: Optional[PolygonKey] = None) -> Transversal:
    """Bottom-row segment of the host at height ``y_k/φ`` spanning 99% of ``[0, x_k]``."""
    host = host or surface.keys[0]
    polygon = surface.polygons[host]
    xk, yk = polygon.profile.xs[-1], polygon.profile.ys[-1]
    sx, sy = polygon.gamma.sx, polygon.gamma.sy
    left = min(sx * 0.005 * xk, sx * 0.995 * xk)
    transversal = Transversal(host=host, left=complex(left, sy * yk / GOLDEN), width=0.99 * xk)
    transversal.validate(surface)
    return transversal


def shear(z: complex, direction: float = DEFAULT_DIRECTION) -> complex:
    """Frame in which the flow is vertical and horizontal lengths are kept."""
    return complex(z.real - z.imag / math.tan(direction), z.imag / math.sin(direction))


@dataclass
class ReturnSystem:
    """The return map as an IET with per-interval return data.

    ``homology_displacements[j]`` is the pairing of the loop through interval
    ``j`` (flow to the return point, then back along the transversal) in the
    sheared frame: its real part is ``b_j − t_{π(j)}`` and its imaginary part
    the return time.
    """

    transversal: Transversal
    iet: IETData
    discontinuities: List[float]
    return_times: List[float] = field(default_factory=list)
    crossing_counts: List[Counter] = field(default_factory=list)
    loop_pairings: List[complex] = field(default_factory=list)
    homology_displacements: List[complex] = field(default_factory=list)


def _backward_hits(
    surface: TranslationSurface,
    transversal: Transversal,
    direction: float,
    max_crossings: int,
) -> List[float]:
    """Points of the transversal whose orbit meets a singularity or an end of I before returning."""
    backward = direction + math.pi
    cap_length = max_crossings * surface.diameter
    tol = settings.regular_corner_tolerance
    hits = []
    for separatrix in incoming_separatrices(surface, direction):
        trajectory = trace_separatrix(
            surface, separatrix, cap_length, backward, tol, stop=transversal.hit_time, max_crossings=max_crossings
        )
        hits.append(_landing(trajectory, transversal, f"incoming separatrix at vertex {separatrix.vertex}"))
    for x in (0.0, transversal.width):
        start = SurfacePoint(transversal.host, transversal.point(x))
        trajectory = _flow(surface, start, cap_length, backward, tol, stop=transversal.hit_time, max_crossings=max_crossings)
        hits.append(_landing(trajectory, transversal, f"transversal end {x}"))
    return [h for h in hits if h is not None]


def _landing(trajectory: FlatTrajectory, transversal: Transversal, what: str) -> Optional[float]:
    if trajectory.status == "stopped":
        return transversal.coordinate(trajectory.end.z)
    if trajectory.status == "singular":
        logger.warning(f"Backward orbit of {what} ends in a singular point: saddle connection")
        return None
    logger.error(f"Backward orbit of {what} did not reach the transversal ({trajectory.status})")
    raise NotGlobalTransversal(f"Orbit of {what} does not return to the transversal")


def _return_loop(
    surface: TranslationSurface,
    transversal: Transversal,
    x: float,
    direction: float,
    max_crossings: int,
):
    start = SurfacePoint(transversal.host, transversal.point(x))
    trajectory = _flow(
        surface,
        start,
        max_crossings * surface.diameter,
        direction,
        settings.regular_corner_tolerance,
        stop=transversal.hit_time,
        max_crossings=max_crossings,
    )
    if trajectory.status != "stopped":
        logger.error(f"Forward orbit of x={x} ended with status {trajectory.status}")
        raise NotGlobalTransversal(f"Forward orbit of x={x} does not return within {max_crossings} crossings")
    landing = transversal.coordinate(trajectory.end.z)
    path = SurfacePath(start=start, moves=[trajectory.total_length * unit(direction), complex(x - landing, 0.0)])
    return trajectory, landing, path


@measure_time
def first_return_iet(
    surface: TranslationSurface,
    transversal: Optional[Transversal] = None,
    direction: float = DEFAULT_DIRECTION,
    max_crossings: Optional[int] = None,
) -> ReturnSystem:
    """Extract the first-return map of the flow to ``transversal`` as an IET.

    Discontinuities are the first backward hits of the incoming separatrices
    and of the two ends of the transversal. Every interval between them is
    followed once from a base point; its return time, crossing multiset and
    loop pairing are recorded.

    Raises:
        NotGlobalTransversal: some orbit does not come back within
            ``max_crossings`` crossings.
        SeparatrixHitsCorner: two discontinuities closer than the minimal
            interval length.
        ConsistencyFailure: the loop pairing disagrees with the traced return.
    """
    transversal = transversal or default_transversal(surface)
    transversal.validate(surface)
    if not 0.0 < direction < 0.5 * math.pi:
        raise DomainError(f"Return maps are built for directions in (0, π/2), got {direction}")
    max_crossings = max_crossings or settings.max_crossings
    width = transversal.width

    cuts = sorted(x for x in _backward_hits(surface, transversal, direction, max_crossings) if 0.0 <= x <= width)
    merged: List[float] = []
    for x in [0.0] + cuts + [width]:
        if merged and x - merged[-1] <= settings.discontinuity_tolerance * width:
            continue
        merged.append(x)
    merged[-1] = width
    for a, b in zip(merged, merged[1:]):
        if b - a < settings.min_iet_interval * width:
            raise SeparatrixHitsCorner(f"Return-map interval [{a}, {b}] is shorter than the resolution")

    intervals = []
    for a, b in zip(merged, merged[1:]):
        for offset in BASE_OFFSETS:
            x = a + offset * (b - a)
            trajectory, landing, path = _return_loop(surface, transversal, x, direction, max_crossings)
            try:
                value = pairing(surface, path)
            except CornerCrossing:
                continue
            intervals.append((a, b, landing - x, trajectory, value, path))
            break
        else:
            raise SeparatrixHitsCorner(f"Every return loop through [{a}, {b}] meets a polygon corner")

    # adjacent pieces with equal translation are one interval
    joined = []
    for item in intervals:
        if joined and abs(joined[-1][2] - item[2]) <= settings.discontinuity_tolerance * width:
            joined[-1] = (joined[-1][0], item[1]) + joined[-1][2:]
            continue
        joined.append(item)

    lengths = [b - a for a, b, *_ in joined]
    images = [a + shift for a, _, shift, *_ in joined]
    order = sorted(range(len(joined)), key=lambda j: images[j])
    permutation = [0] * len(joined)
    for rank, j in enumerate(order):
        permutation[j] = rank + 1
    position = 0.0
    for j in order:
        if abs(images[j] - position) > 1e-9 * width:
            logger.error(f"Image intervals do not tile the transversal at {position} (next image {images[j]})")
            raise GeometryFailure("First-return images do not tile the transversal")
        position += lengths[j]

    if len(joined) == 1:
        raise NotGlobalTransversal("The return map is a single translation of the whole transversal")
    iet = IETData(permutation=tuple(permutation), lengths=tuple(lengths))

    system = ReturnSystem(transversal=transversal, iet=iet, discontinuities=list(iet.b[:-1]))
    for j, (a, b, shift, trajectory, value, path) in enumerate(joined):
        direct = holonomy(path)
        if abs(value - direct) > 1e-10 * max(1.0, abs(direct)):
            raise ConsistencyFailure(f"Loop {j}: crossing pairing {value} differs from holonomy {direct}")
        sheared = shear(value, direction)
        expected = iet.b[j] - iet.t[permutation[j] - 1]
        if abs(sheared.real - expected) > 1e-9 * max(1.0, width):
            raise ConsistencyFailure(f"Loop {j}: Re ⟨ω,ξ⟩ = {sheared.real} but b_j − t_π(j) = {expected}")
        system.return_times.append(trajectory.total_length)
        system.crossing_counts.append(Counter(c.datum for c in trajectory.crossings))
        system.loop_pairings.append(value)
        system.homology_displacements.append(sheared)
    logger.info(
        f"First-return IET on {polygon_name(transversal.host)}: d={iet.d}, permutation {iet.permutation}"
    )
    return system
