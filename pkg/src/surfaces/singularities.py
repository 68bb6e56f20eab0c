"""
Cone points of M(𝐏): corner classes, cone angles, relation-cycle tests and genus.
"""
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Dict, Hashable, List, Tuple

from src.exceptions import DisconnectedSurface, EulerMismatch, InconsistentAngle
from src.polygons.generalized import GeneralizedPolygon
from src.utils.logging_config import get_logger

if TYPE_CHECKING:
    from src.surfaces.translation_surface import PolygonKey, TranslationSurface

logger = get_logger(__name__)

TWO_PI = 2.0 * math.pi
ANGLE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CornerRef:
    polygon: "PolygonKey"
    index: int
    name: Tuple[int, int]
    angle: float


@dataclass(frozen=True)
class SingularPoint:
    """An equivalence class of polygon corners, listed in walking order."""

    identity: Tuple[CornerRef, ...]
    cone_angle: float
    is_singular: bool

    @property
    def multiplicity(self) -> int:
        """Cone angle in units of 2π."""
        return int(round(self.cone_angle / TWO_PI))

    @property
    def representative(self) -> CornerRef:
        return self.identity[0]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "cone_angle_over_2pi": self.multiplicity,
            "singular": self.is_singular,
            "corners": [[f"{c.polygon[0]}/{c.polygon[1].label}", list(c.name)] for c in self.identity],
        }


def walk_vertex(surface: "TranslationSurface", key: "PolygonKey", corner_index: int) -> List[CornerRef]:
    """Corners met while turning around the vertex at corner ``corner_index`` of ``key``.

    Side ``j`` starts at corner ``j``; its partner side ``p`` ends at corner
    ``p + 1`` of the partner polygon, which is the next corner of the walk.
    """
    limit = sum(len(surface.sides(k)) for k in surface.polygons) + 1
    start = (key, corner_index)
    current = start
    walk: List[CornerRef] = []
    for _ in range(limit):
        polygon = surface.polygons[current[0]]
        corner = polygon.corners()[current[1]]
        walk.append(CornerRef(current[0], current[1], corner.name, corner.angle))
        partner, _ = surface.glued(*current)
        n = len(surface.sides(partner.polygon))
        current = (partner.polygon, (partner.index + 1) % n)
        if current == start:
            return walk
    logger.error(f"Corner walk from {key} corner {corner_index} did not close after {limit} steps")
    raise InconsistentAngle(f"Corner walk around {key}, corner {corner_index} does not close")


def classify_corners(surface: "TranslationSurface") -> List[SingularPoint]:
    """Group all polygon corners into points of the surface and compute their cone angles.

    Raises:
        InconsistentAngle: a walk does not close or a cone angle is not a
            multiple of 2π.
    """
    seen = set()
    points: List[SingularPoint] = []
    for key in sorted(surface.polygons, key=lambda k: (str(type(k[0]).__name__), str(k[0]), k[1].value)):
        for j in range(len(surface.sides(key))):
            if (key, j) in seen:
                continue
            walk = walk_vertex(surface, key, j)
            seen.update((c.polygon, c.index) for c in walk)
            angle = sum(c.angle for c in walk)
            turns = angle / TWO_PI
            if abs(turns - round(turns)) > ANGLE_TOLERANCE:
                raise InconsistentAngle(f"Cone angle {angle} at {key} corner {walk[0].name} is not a multiple of 2π")
            points.append(SingularPoint(tuple(walk), angle, round(turns) > 1))
    logger.debug(f"Classified {len(points)} surface points, {sum(p.is_singular for p in points)} singular")
    return points


def _corner_relations(k: int) -> Dict[Tuple[int, int], Tuple[str, str]]:
    # relations of the two sides incident to each corner
    return {(0, 0): ("V", "H"), (k, 0): ("v", "H"), (0, 1): ("V", "h")}


def relation_cycle_closes(polygon: GeneralizedPolygon, label: Hashable, first: str, second: str) -> bool:
    """Whether ``m ∼first m′ ∼second m″ ∼first m‴ ∼second m`` closes up."""
    current = label
    for kind in (first, second, first, second):
        current = polygon.partner(kind, current)
    return current == label


def cycle_disagreements(surface: "TranslationSurface") -> List[Tuple["PolygonKey", Tuple[int, int]]]:
    """Corners V_{0,0}, V_{k,0}, V_{0,1} whose relation-cycle verdict contradicts the corner walk."""
    disagreements = []
    for vertex in surface.vertices:
        for corner in vertex.identity:
            m, gamma = corner.polygon
            if gamma.label != "id":
                continue
            relations = _corner_relations(surface.polygons[corner.polygon].k)
            if corner.name not in relations:
                continue
            first, second = relations[corner.name]
            regular = relation_cycle_closes(surface.source, m, first, second)
            if regular == vertex.is_singular:
                logger.warning(
                    f"Relation cycle {first}/{second} at part {m!r} corner {corner.name} says "
                    f"{'regular' if regular else 'singular'}, corner walk gives cone angle "
                    f"{vertex.multiplicity}·2π"
                )
                disagreements.append((corner.polygon, corner.name))
    return disagreements


def euler_characteristic(surface: "TranslationSurface") -> int:
    """V − E + F of the polygon cell complex."""
    return len(surface.vertices) - len(surface.identifications) + len(surface.polygons)


def genus(surface: "TranslationSurface") -> int:
    """Genus from Σ(cone_angle/2π − 1) = 2g − 2, cross-checked with the Euler characteristic.

    Raises:
        DisconnectedSurface: the surface has several components.
        EulerMismatch: the two computations disagree.
    """
    if not surface.connected:
        raise DisconnectedSurface(f"Surface has {len(surface.components())} components; genus is per component")
    excess = sum(v.multiplicity - 1 for v in surface.vertices)
    if excess % 2:
        raise EulerMismatch(f"Total cone excess {excess} is odd")
    g = 1 + excess // 2
    chi = euler_characteristic(surface)
    if chi != 2 - 2 * g:
        logger.error(f"Gauss-Bonnet genus {g} disagrees with Euler characteristic {chi}")
        raise EulerMismatch(f"Gauss-Bonnet gives genus {g}, Euler characteristic {chi}")
    logger.info(f"Surface genus {g} with {len(surface.singularities)} singular point(s)")
    return g
