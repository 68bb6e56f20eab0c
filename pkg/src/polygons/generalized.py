"""
Generalized polygons: labelled staircase parts glued by the relations V, H, v, h.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Tuple, Union

from src.config import settings
from src.exceptions import DomainError, RelationNotSymmetric, SideLengthMismatch, TypeMismatch
from src.polygons.staircase import BasicPolygon, GammaElement, StaircaseProfile, build_basic
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

RELATION_KINDS = ("V", "H", "v", "h")

Pair = Tuple[Hashable, Hashable]


def _glued_length(part: BasicPolygon, kind: str) -> float:
    """Length of the side a relation of the given kind glues."""
    profile = part.profile
    return {
        "V": profile.ys[0],
        "H": profile.xs[-1],
        "v": profile.ys[-1],
        "h": profile.xs[0],
    }[kind]


def _types_compatible(kind: str, first: GammaElement, second: GammaElement) -> bool:
    # (V)/(v): opposite x-signs, equal y-signs; (H)/(h): the other way round
    if kind in ("V", "v"):
        return first.sx == -second.sx and first.sy == second.sy
    return first.sx == second.sx and first.sy == -second.sy


def _sort_key(label: Hashable) -> Tuple[str, str]:
    return (type(label).__name__, str(label))


@dataclass(frozen=True)
class GluingRelations:
    """The four symmetric relations, each stored with its self-loops."""

    pairs: Mapping[str, FrozenSet[Pair]]

    @classmethod
    def from_pairs(cls, **kinds: Iterable[Pair]) -> Dict[str, List[Pair]]:
        """Symmetrize unordered pairs into the ordered form ``build_generalized`` expects."""
        closed: Dict[str, List[Pair]] = {}
        for kind in RELATION_KINDS:
            ordered = set()
            for m, n in kinds.get(kind, ()):
                ordered.add((m, n))
                ordered.add((n, m))
            closed[kind] = sorted(ordered, key=lambda p: (_sort_key(p[0]), _sort_key(p[1])))
        return closed

    def partner(self, kind: str, label: Hashable) -> Hashable:
        for m, n in self.pairs[kind]:
            if m == label:
                return n
        return label

    def as_lists(self) -> Dict[str, List[List[Hashable]]]:
        return {
            kind: [list(p) for p in sorted(self.pairs[kind], key=lambda p: (_sort_key(p[0]), _sort_key(p[1])))]
            for kind in RELATION_KINDS
        }


@dataclass(frozen=True)
class CombinatorialData:
    """The record {ℐ, (γ_m), (k_m), ∼V, ∼H, ∼v, ∼h}; equality is structural."""

    labels: Tuple[Hashable, ...]
    gammas: Tuple[GammaElement, ...]
    ks: Tuple[int, ...]
    relations: Tuple[Tuple[str, FrozenSet[Pair]], ...]

    def relation(self, kind: str) -> FrozenSet[Pair]:
        return dict(self.relations)[kind]


@dataclass(frozen=True)
class GeneralizedPolygon:
    """A validated member of the family of generalized polygons.

    No global embedding is stored; every part lives in its own chart and the
    relations carry all gluing information.
    """

    parts: Mapping[Hashable, BasicPolygon]
    relations: GluingRelations
    component_labels: Tuple[FrozenSet[Hashable], ...] = field(default=())

    @property
    def labels(self) -> List[Hashable]:
        return sorted(self.parts, key=_sort_key)

    @property
    def area(self) -> float:
        return float(sum(part.area for part in self.parts.values()))

    def partner(self, kind: str, label: Hashable) -> Hashable:
        return self.relations.partner(kind, label)

    def components(self) -> List["GeneralizedPolygon"]:
        """Connected components as separate generalized polygons."""
        if len(self.component_labels) <= 1:
            return [self]
        return [self.restrict(labels) for labels in self.component_labels]

    @property
    def connected(self) -> bool:
        return len(self.component_labels) <= 1

    def restrict(self, labels: Iterable[Hashable]) -> "GeneralizedPolygon":
        keep = set(labels)
        relations = {
            kind: [p for p in self.relations.pairs[kind] if p[0] in keep and p[1] in keep]
            for kind in RELATION_KINDS
        }
        return build_generalized([self.parts[m] for m in keep], relations)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "parts": [
                {
                    "label": m,
                    "gamma": self.parts[m].gamma.label,
                    "xs": list(self.parts[m].profile.xs),
                    "ys": list(self.parts[m].profile.ys),
                }
                for m in self.labels
            ],
            "relations": self.relations.as_lists(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GeneralizedPolygon":
        parts = [
            build_basic(StaircaseProfile(tuple(p["xs"]), tuple(p["ys"])), GammaElement.from_label(p["gamma"]), p["label"])
            for p in data["parts"]
        ]
        relations = {kind: [tuple(pair) for pair in data.get("relations", {}).get(kind, [])] for kind in RELATION_KINDS}
        return build_generalized(parts, relations)


def _components(labels: List[Hashable], relations: Mapping[str, FrozenSet[Pair]]) -> Tuple[FrozenSet[Hashable], ...]:
    parent = {m: m for m in labels}

    def find(m):
        while parent[m] != m:
            parent[m] = parent[parent[m]]
            m = parent[m]
        return m

    for kind in RELATION_KINDS:
        for m, n in relations[kind]:
            parent[find(m)] = find(n)
    groups: Dict[Hashable, set] = {}
    for m in labels:
        groups.setdefault(find(m), set()).add(m)
    ordered = sorted((frozenset(g) for g in groups.values()), key=lambda g: min(_sort_key(m) for m in g))
    return tuple(ordered)


def build_generalized(
    parts: Union[Iterable[BasicPolygon], Mapping[Hashable, BasicPolygon]],
    relations: Optional[Mapping[str, Iterable[Pair]]] = None,
    tolerance: Optional[float] = None,
) -> GeneralizedPolygon:
    """Validate gluing data and build a generalized polygon.

    Args:
        parts: Basic polygons, keyed by or carrying their labels.
        relations: For each of ``V``, ``H``, ``v``, ``h`` the ordered pairs of
            related labels. Every pair must appear in both orders; labels left
            out are related to themselves.
        tolerance: Side-length matching tolerance (settings default 1e-10).

    Returns:
        The validated generalized polygon with its connected components.
    """
    tolerance = settings.side_length_tolerance if tolerance is None else tolerance
    if isinstance(parts, Mapping):
        part_map = dict(parts)
    else:
        part_map = {}
        for part in parts:
            if part.label in part_map:
                raise DomainError(f"Duplicate part label {part.label!r}")
            part_map[part.label] = part
    if not part_map:
        raise DomainError("A generalized polygon needs at least one part")
    relations = relations or {}

    closed: Dict[str, FrozenSet[Pair]] = {}
    for kind in RELATION_KINDS:
        given = {tuple(p) for p in relations.get(kind, ())}
        for m, n in given:
            if m not in part_map or n not in part_map:
                raise DomainError(f"Relation {kind} mentions unknown label in {(m, n)}")
            if (n, m) not in given:
                raise RelationNotSymmetric(f"Relation {kind} contains {(m, n)} but not {(n, m)}")
        partners: Dict[Hashable, Hashable] = {}
        for m, n in given:
            if m == n:
                continue
            if partners.get(m, n) != n:
                raise TypeMismatch(f"Label {m!r} is {kind}-related to two different parts")
            partners[m] = n
            first, second = part_map[m], part_map[n]
            if not _types_compatible(kind, first.gamma, second.gamma):
                raise TypeMismatch(
                    f"Case ({kind}) cannot glue types {first.gamma.label} and {second.gamma.label} ({m!r}~{n!r})"
                )
            gap = abs(_glued_length(first, kind) - _glued_length(second, kind))
            if gap > tolerance:
                raise SideLengthMismatch(f"Case ({kind}) sides of {m!r} and {n!r} differ by {gap:.3e}")
        loops = {(m, m) for m in part_map if m not in partners}
        closed[kind] = frozenset({p for p in given if p[0] != p[1]} | loops)

    labels = sorted(part_map, key=_sort_key)
    components = _components(labels, closed)
    polygon = GeneralizedPolygon(parts=part_map, relations=GluingRelations(closed), component_labels=components)
    logger.debug(f"Built generalized polygon with {len(labels)} parts and {len(components)} component(s)")
    return polygon


def combinatorial_data(polygon: GeneralizedPolygon) -> CombinatorialData:
    """Return the combinatorial data {ℐ, (γ_m), (k_m), ∼V, ∼H, ∼v, ∼h}."""
    labels = tuple(polygon.labels)
    return CombinatorialData(
        labels=labels,
        gammas=tuple(polygon.parts[m].gamma for m in labels),
        ks=tuple(polygon.parts[m].k for m in labels),
        relations=tuple((kind, polygon.relations.pairs[kind]) for kind in RELATION_KINDS),
    )
