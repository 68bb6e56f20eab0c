"""
Translation surface M(𝐏): the four reflected copies of every part, glued by translations.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Hashable, List, Optional, Tuple

from src.config import settings
from src.exceptions import UnglSide
from src.polygons.generalized import GeneralizedPolygon, _sort_key
from src.polygons.staircase import BasicPolygon, GammaElement, SideKind
from src.surfaces.singularities import (
    SingularPoint,
    classify_corners,
    cycle_disagreements,
)
from src.utils.logging_config import get_logger
from src.utils.metrics import measure_time

logger = get_logger(__name__)

PolygonKey = Tuple[Hashable, GammaElement]

GAMMA_ORDER = tuple(GammaElement)

# side kind -> (relation giving the partner part, reflection giving the partner type)
SIDE_RULES = {
    SideKind.STEP_V: (None, GammaElement.V),
    SideKind.STEP_H: (None, GammaElement.H),
    SideKind.LONG_V: ("V", GammaElement.V),
    SideKind.LONG_H: ("H", GammaElement.H),
    SideKind.SHORT_V: ("v", GammaElement.V),
    SideKind.SHORT_H: ("h", GammaElement.H),
}

# side kind -> case name of the crossing-vector table
SIDE_CASES = {
    SideKind.STEP_H: "i_h",
    SideKind.SHORT_H: "ii_h",
    SideKind.LONG_H: "iii_h",
    SideKind.STEP_V: "i_v",
    SideKind.SHORT_V: "ii_v",
    SideKind.LONG_V: "iii_v",
}


def key_order(key: PolygonKey) -> Tuple:
    return (_sort_key(key[0]), GAMMA_ORDER.index(key[1]))


def polygon_name(key: PolygonKey) -> str:
    return f"{key[0]}/{key[1].label}"


@dataclass(frozen=True)
class SurfaceSide:
    """Side ``index`` of polygon ``polygon``, traversed counter-clockwise."""

    polygon: PolygonKey
    index: int
    kind: SideKind
    tag: int
    start: complex
    end: complex

    @property
    def vertical(self) -> bool:
        return self.kind.vertical

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    @property
    def outward_normal(self) -> complex:
        edge = (self.end - self.start) / self.length
        return complex(edge.imag, -edge.real)


@dataclass(frozen=True)
class Identification:
    """``second`` is ``first`` moved by ``translation``; orientations are opposite."""

    first: SurfaceSide
    second: SurfaceSide
    translation: complex
    case: str


@dataclass
class TranslationSurface:
    source: GeneralizedPolygon
    polygons: Dict[PolygonKey, BasicPolygon]
    identifications: List[Identification]
    vertices: List[SingularPoint] = field(default_factory=list)
    cycle_disagreements: List[Tuple[PolygonKey, Tuple[int, int]]] = field(default_factory=list)
    _sides: Dict[PolygonKey, List[SurfaceSide]] = field(init=False, repr=False)
    _glue: Dict[Tuple[PolygonKey, int], Tuple[SurfaceSide, complex]] = field(init=False, repr=False)
    _vertex_of: Dict[Tuple[PolygonKey, int], int] = field(init=False, repr=False)

    def __post_init__(self):
        self._sides = {key: surface_sides(polygon) for key, polygon in self.polygons.items()}
        self._glue = {}
        for ident in self.identifications:
            self._glue[(ident.first.polygon, ident.first.index)] = (ident.second, ident.translation)
            self._glue[(ident.second.polygon, ident.second.index)] = (ident.first, -ident.translation)
        self._index_vertices()

    def _index_vertices(self):
        self._vertex_of = {}
        for n, vertex in enumerate(self.vertices):
            for corner in vertex.identity:
                self._vertex_of[(corner.polygon, corner.index)] = n

    def set_vertices(self, vertices: List[SingularPoint]):
        self.vertices = list(vertices)
        self._index_vertices()

    @property
    def keys(self) -> List[PolygonKey]:
        return sorted(self.polygons, key=key_order)

    @property
    def singularities(self) -> List[SingularPoint]:
        return [v for v in self.vertices if v.is_singular]

    @property
    def area(self) -> float:
        return float(sum(p.area for p in self.polygons.values()))

    def sides(self, key: PolygonKey) -> List[SurfaceSide]:
        return self._sides[key]

    def glued(self, key: PolygonKey, index: int) -> Tuple[SurfaceSide, complex]:
        """Partner side of side ``index`` of ``key`` and the translation into the partner's chart."""
        return self._glue[(key, index)]

    def vertex(self, key: PolygonKey, corner_index: int) -> SingularPoint:
        return self.vertices[self._vertex_of[(key, corner_index)]]

    def vertex_number(self, key: PolygonKey, corner_index: int) -> int:
        """Position of the corner's point in ``vertices``."""
        return self._vertex_of[(key, corner_index)]

    def corner_point(self, key: PolygonKey, corner_index: int) -> complex:
        return self._sides[key][corner_index].start

    def components(self) -> List[FrozenSet[PolygonKey]]:
        parent = {key: key for key in self.polygons}

        def find(key):
            while parent[key] != key:
                parent[key] = parent[parent[key]]
                key = parent[key]
            return key

        for ident in self.identifications:
            parent[find(ident.first.polygon)] = find(ident.second.polygon)
        groups: Dict[PolygonKey, set] = {}
        for key in self.polygons:
            groups.setdefault(find(key), set()).add(key)
        return sorted((frozenset(g) for g in groups.values()), key=lambda g: min(key_order(k) for k in g))

    @property
    def connected(self) -> bool:
        return len(self.components()) == 1

    @property
    def diameter(self) -> float:
        """Sum of polygon diameters; an upper bound for the surface diameter."""
        total = 0.0
        for polygon in self.polygons.values():
            total += abs(complex(polygon.profile.xs[-1], polygon.profile.ys[0]))
        return total

    def to_dict(self) -> Dict[str, Any]:
        def point(z: complex) -> List[float]:
            return [round(z.real, 12), round(z.imag, 12)]

        return {
            "polygons": [
                {
                    "name": polygon_name(key),
                    "part": key[0],
                    "gamma": key[1].label,
                    "vertices": [list(v) for v in self.polygons[key].vertices()],
                }
                for key in self.keys
            ],
            "identifications": [
                {
                    "first": [polygon_name(ident.first.polygon), ident.first.index],
                    "second": [polygon_name(ident.second.polygon), ident.second.index],
                    "case": ident.case,
                    "translation": point(ident.translation),
                }
                for ident in self.identifications
            ],
            "vertices": [vertex.to_dict() for vertex in self.vertices],
            "cycle_disagreements": [[polygon_name(k), list(name)] for k, name in self.cycle_disagreements],
        }


def surface_sides(polygon: BasicPolygon) -> List[SurfaceSide]:
    return [
        SurfaceSide(
            polygon=polygon.label,
            index=j,
            kind=side.kind,
            tag=side.index,
            start=complex(*side.start),
            end=complex(*side.end),
        )
        for j, side in enumerate(polygon.sides())
    ]


def _find_side(sides: List[SurfaceSide], kind: SideKind, tag: int) -> Optional[SurfaceSide]:
    for side in sides:
        if side.kind == kind and side.tag == tag:
            return side
    return None


def _partner_key(polygon: GeneralizedPolygon, key: PolygonKey, kind: SideKind) -> PolygonKey:
    relation, mirror = SIDE_RULES[kind]
    m, gamma = key
    partner = m if relation is None else polygon.partner(relation, m)
    return (partner, mirror.compose(gamma))


@measure_time
def unfold(polygon: GeneralizedPolygon) -> TranslationSurface:
    """Unfold a generalized polygon into the translation surface M(𝐏).

    Every part ``m`` gives the four polygons ``(m, γ)``, γ ∈ Γ, each drawn as
    P(γ(x̄,ȳ)) in its own chart. Step sides are glued to the mirror copy of
    the same part, long and short sides to the mirror copy of the part
    related by V, H, v or h. Translations are read off the matched sides.

    Raises:
        UnglSide: a side has no partner or the partner does not match.
    """
    polygons: Dict[PolygonKey, BasicPolygon] = {}
    for m in polygon.labels:
        part = polygon.parts[m]
        for gamma in GammaElement:
            polygons[(m, gamma)] = BasicPolygon(label=(m, gamma), profile=part.profile, gamma=gamma)
    sides = {key: surface_sides(p) for key, p in polygons.items()}

    tolerance = settings.side_length_tolerance
    matched = set()
    identifications: List[Identification] = []
    for key in sorted(polygons, key=key_order):
        for side in sides[key]:
            if (key, side.index) in matched:
                continue
            partner_key = _partner_key(polygon, key, side.kind)
            partner = _find_side(sides.get(partner_key, []), side.kind, side.tag)
            if partner is None or (partner_key, partner.index) in matched:
                logger.error(f"Side {side.kind.value}[{side.tag}] of {polygon_name(key)} has no free partner")
                raise UnglSide(f"Side {side.index} of polygon {polygon_name(key)} is left unidentified")
            translation = partner.end - side.start
            if abs(partner.start - (side.end + translation)) > tolerance * max(1.0, side.length):
                raise UnglSide(
                    f"Side {side.index} of {polygon_name(key)} and side {partner.index} of "
                    f"{polygon_name(partner_key)} are not translates"
                )
            matched.add((key, side.index))
            matched.add((partner_key, partner.index))
            identifications.append(Identification(side, partner, translation, SIDE_CASES[side.kind]))

    total = sum(len(s) for s in sides.values())
    if len(matched) != total:
        raise UnglSide(f"{total - len(matched)} sides left unidentified")

    surface = TranslationSurface(source=polygon, polygons=polygons, identifications=identifications)
    surface.set_vertices(classify_corners(surface))
    surface.cycle_disagreements = cycle_disagreements(surface)
    logger.info(
        f"Unfolded {len(polygon.labels)} parts into {len(polygons)} polygons, "
        f"{len(identifications)} identifications, {len(surface.singularities)} singular point(s)"
    )
    return surface
