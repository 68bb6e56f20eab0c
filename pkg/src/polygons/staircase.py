"""
Right-angle staircase polygons and the four-element reflection group.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Hashable, List, Sequence, Tuple

import numpy as np

from src.exceptions import ProfileViolation

Point = Tuple[float, float]
CornerName = Tuple[int, int]

HALF_PI = 0.5 * np.pi


class GammaElement(Enum):
    """Element of the group generated by the vertical and horizontal reflections.

    The value is the pair of coordinate signs ``(sx, sy)`` the element applies.
    """

    ID = (1, 1)
    V = (-1, 1)
    H = (1, -1)
    VH = (-1, -1)

    @property
    def sx(self) -> int:
        return self.value[0]

    @property
    def sy(self) -> int:
        return self.value[1]

    @property
    def label(self) -> str:
        return {"ID": "id", "V": "v", "H": "h", "VH": "vh"}[self.name]

    @property
    def reverses_orientation(self) -> bool:
        return self.sx * self.sy < 0

    @classmethod
    def from_signs(cls, sx: int, sy: int) -> "GammaElement":
        return cls((1 if sx > 0 else -1, 1 if sy > 0 else -1))

    @classmethod
    def from_label(cls, label: str) -> "GammaElement":
        lookup = {"id": cls.ID, "v": cls.V, "h": cls.H, "vh": cls.VH, "hv": cls.VH}
        try:
            return lookup[label.lower()]
        except KeyError:
            raise ProfileViolation(f"Unknown reflection label {label!r}") from None

    def compose(self, other: "GammaElement") -> "GammaElement":
        """Return ``self ∘ other``; the group is abelian so the order is immaterial."""
        return GammaElement((self.sx * other.sx, self.sy * other.sy))

    def apply(self, point: Sequence[float]) -> Point:
        return (self.sx * point[0], self.sy * point[1])


class SideKind(str, Enum):
    LONG_V = "long_vertical"
    LONG_H = "long_horizontal"
    SHORT_V = "short_vertical"
    SHORT_H = "short_horizontal"
    STEP_V = "step_vertical"
    STEP_H = "step_horizontal"

    @property
    def vertical(self) -> bool:
        return self in (SideKind.LONG_V, SideKind.SHORT_V, SideKind.STEP_V)


@dataclass(frozen=True)
class StaircaseProfile:
    """A member of Ξ: ``0 < x_1 < ... < x_k`` and ``y_1 > ... > y_k > 0``."""

    xs: Tuple[float, ...]
    ys: Tuple[float, ...]

    def __post_init__(self):
        xs = tuple(float(x) for x in self.xs)
        ys = tuple(float(y) for y in self.ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if len(xs) == 0 or len(xs) != len(ys):
            raise ProfileViolation(f"Profile needs k >= 1 equal-length sequences, got {len(xs)} and {len(ys)}")
        if xs[0] <= 0 or any(x1 >= x2 for x1, x2 in zip(xs, xs[1:])):
            raise ProfileViolation(f"x-sequence must be positive and increasing: {xs}")
        if ys[-1] <= 0 or any(y1 <= y2 for y1, y2 in zip(ys, ys[1:])):
            raise ProfileViolation(f"y-sequence must be positive and decreasing: {ys}")

    @property
    def k(self) -> int:
        return len(self.xs)

    def x(self, i: int) -> float:
        """x_i with the convention x_0 = 0."""
        return 0.0 if i == 0 else self.xs[i - 1]

    def y(self, j: int) -> float:
        """y_j with the conventions y_0 = 0 and y_{k+1} = 0."""
        return 0.0 if j == 0 or j == self.k + 1 else self.ys[j - 1]

    @property
    def area(self) -> float:
        return float(sum(self.x(i) * (self.y(i) - self.y(i + 1)) for i in range(1, self.k + 1)))


@dataclass(frozen=True)
class PolygonCorner:
    name: CornerName
    point: Point
    angle: float


@dataclass(frozen=True)
class PolygonSide:
    """A side traversed counter-clockwise from ``start`` to ``end``."""

    kind: SideKind
    index: int
    start: Point
    end: Point
    start_corner: CornerName
    end_corner: CornerName

    @property
    def vertical(self) -> bool:
        return self.kind.vertical

    @property
    def length(self) -> float:
        return float(abs(self.end[0] - self.start[0]) + abs(self.end[1] - self.start[1]))

    @property
    def midpoint(self) -> Point:
        return (0.5 * (self.start[0] + self.end[0]), 0.5 * (self.start[1] + self.end[1]))


def _canonical_chain(profile: StaircaseProfile) -> List[Tuple[CornerName, Point]]:
    """Corners of P(x̄,ȳ) in the listed order (0,0),(0,y_1),(x_1,y_1),…,(x_k,0)."""
    chain: List[Tuple[CornerName, Point]] = [((0, 0), (0.0, 0.0)), ((0, 1), (0.0, profile.y(1)))]
    for i in range(1, profile.k + 1):
        chain.append(((i, i), (profile.x(i), profile.y(i))))
        if i < profile.k:
            chain.append(((i, i + 1), (profile.x(i), profile.y(i + 1))))
    chain.append(((profile.k, 0), (profile.x(profile.k), 0.0)))
    return chain


def _side_tag(start: CornerName, end: CornerName, k: int) -> Tuple[SideKind, int]:
    pair = frozenset((start, end))
    if pair == frozenset(((0, 0), (0, 1))):
        return SideKind.LONG_V, 0
    if pair == frozenset(((0, 0), (k, 0))):
        return SideKind.LONG_H, 0
    if pair == frozenset(((k, k), (k, 0))):
        return SideKind.SHORT_V, 0
    if pair == frozenset(((0, 1), (1, 1))):
        return SideKind.SHORT_H, 0
    for i in range(1, k):
        if pair == frozenset(((i, i), (i, i + 1))):
            return SideKind.STEP_V, i
        if pair == frozenset(((i, i + 1), (i + 1, i + 1))):
            return SideKind.STEP_H, i + 1
    raise ProfileViolation(f"Corners {start} and {end} are not adjacent")


@dataclass(frozen=True)
class BasicPolygon:
    """The staircase polygon P(γ(x̄,ȳ)) carrying an explicit label."""

    label: Hashable
    profile: StaircaseProfile
    gamma: GammaElement = GammaElement.ID

    @property
    def k(self) -> int:
        return self.profile.k

    @property
    def area(self) -> float:
        return self.profile.area

    def vertices(self) -> List[Point]:
        """Vertex chain in the listed order, transformed by gamma."""
        return [self.gamma.apply(p) for _, p in _canonical_chain(self.profile)]

    def corners(self) -> List[PolygonCorner]:
        """Corners in counter-clockwise order.

        The listed chain of P(x̄,ȳ) runs clockwise; a reflection reverses it.
        """
        chain = _canonical_chain(self.profile)
        if not self.gamma.reverses_orientation:
            chain = [chain[0]] + chain[:0:-1]
        return [
            PolygonCorner(
                name=name,
                point=self.gamma.apply(p),
                angle=3 * HALF_PI if name[1] == name[0] + 1 and name[0] >= 1 else HALF_PI,
            )
            for name, p in chain
        ]

    def sides(self) -> List[PolygonSide]:
        """Sides in counter-clockwise order; side ``j`` starts at corner ``j``."""
        corners = self.corners()
        sides = []
        for j, corner in enumerate(corners):
            nxt = corners[(j + 1) % len(corners)]
            kind, index = _side_tag(corner.name, nxt.name, self.k)
            sides.append(PolygonSide(kind, index, corner.point, nxt.point, corner.name, nxt.name))
        return sides

    def corner_point(self, name: CornerName) -> Point:
        i, j = name
        return self.gamma.apply((self.profile.x(i), self.profile.y(j)))

    def rectangles(self) -> List[Tuple[float, float, float, float]]:
        """Disjoint boxes ``(x0, x1, y0, y1)`` whose union is the polygon."""
        boxes = []
        for i in range(1, self.k + 1):
            xa, xb = sorted((self.gamma.sx * self.profile.x(i - 1), self.gamma.sx * self.profile.x(i)))
            ya, yb = sorted((0.0, self.gamma.sy * self.profile.y(i)))
            boxes.append((xa, xb, ya, yb))
        return boxes

    def contains(self, point: Sequence[float], tol: float = 0.0) -> bool:
        """Closed membership, enlarged by ``tol`` (negative ``tol`` shrinks)."""
        u = self.gamma.sx * point[0]
        v = self.gamma.sy * point[1]
        if u < -tol or u > self.profile.xs[-1] + tol or v < -tol:
            return False
        for i in range(1, self.k + 1):
            if self.profile.x(i - 1) - tol <= u <= self.profile.x(i) + tol and v <= self.profile.y(i) + tol:
                return True
        return False

    def interior(self, point: Sequence[float], tol: float = 1e-13) -> bool:
        """Strict interior membership at distance more than ``tol`` from the boundary."""
        u = self.gamma.sx * point[0]
        v = self.gamma.sy * point[1]
        if not (tol < u < self.profile.xs[-1] - tol and tol < v):
            return False
        # where two columns meet, only the lower one is interior
        heights = [
            self.profile.y(i)
            for i in range(1, self.k + 1)
            if self.profile.x(i - 1) - tol <= u <= self.profile.x(i) + tol
        ]
        return bool(heights) and v < min(heights) - tol


def build_basic(profile: StaircaseProfile, gamma: GammaElement = GammaElement.ID, label: Hashable = 1) -> BasicPolygon:
    """Build P(γ(x̄,ȳ)) with the given label.

    Args:
        profile: Validated staircase profile.
        gamma: Reflection type of the part.
        label: Index of the part inside a generalized polygon.

    Returns:
        The basic polygon; its area is ``Σ x_i (y_i − y_{i+1})``.
    """
    if not isinstance(profile, StaircaseProfile):
        profile = StaircaseProfile(*profile)
    return BasicPolygon(label=label, profile=profile, gamma=gamma)
