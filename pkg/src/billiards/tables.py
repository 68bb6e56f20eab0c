"""
Nibbled-ellipse tables built from four quadrant sequences of confocal parameters.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from src.billiards.conics import ConicFamily, cartesian_point, elliptic_coords
from src.exceptions import (
    CompatibilityViolation,
    EndpointMismatch,
    FocusSingularity,
    MonotonicityViolation,
)
from src.polygons.staircase import GammaElement
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

QUADRANTS = ("pp", "pm", "mp", "mm")
QUADRANT_SIGNS = {"pp": (1, 1), "pm": (1, -1), "mp": (-1, 1), "mm": (-1, -1)}
ENDPOINT_TOLERANCE = 1e-12


def quadrant_of(signs: Tuple[int, int]) -> str:
    return {v: k for k, v in QUADRANT_SIGNS.items()}[(1 if signs[0] >= 0 else -1, 1 if signs[1] >= 0 else -1)]


def reflect_quadrant(quadrant: str, gamma: GammaElement) -> str:
    sx, sy = QUADRANT_SIGNS[quadrant]
    return quadrant_of((sx * gamma.sx, sy * gamma.sy))


@dataclass(frozen=True)
class ThetaSequence:
    """``a = α_0 > α_1 > … > α_k = b > β_k > … > β_1 ≥ β_0 = 0``."""

    alphas: Tuple[float, ...]
    betas: Tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.alphas) - 1

    def alpha(self, i: int) -> float:
        return self.alphas[i]

    def beta(self, i: int) -> float:
        return self.betas[i]


def validate_theta(alphas: Sequence[float], betas: Sequence[float], family: ConicFamily) -> ThetaSequence:
    """Validate one quadrant's parameter chain.

    Args:
        alphas: ``α_0 … α_k`` (hyperbola parameters, ``α_0 = a``, ``α_k = b``).
        betas: ``β_0 … β_k`` (ellipse parameters, ``β_0 = 0``).
        family: The confocal family the parameters refer to.

    Returns:
        The sequence with its endpoints snapped to ``a``, ``b`` and ``0``.
    """
    alphas = [float(v) for v in alphas]
    betas = [float(v) for v in betas]
    if len(alphas) != len(betas) or len(alphas) < 2:
        raise MonotonicityViolation(
            f"Quadrant sequences need equal lengths k+1 with k >= 1, got {len(alphas)} and {len(betas)}"
        )
    a, b = family.a, family.b
    if abs(alphas[0] - a) > ENDPOINT_TOLERANCE or abs(alphas[-1] - b) > ENDPOINT_TOLERANCE:
        raise EndpointMismatch(f"Need α_0 = a = {a} and α_k = b = {b}, got {alphas[0]} and {alphas[-1]}")
    if abs(betas[0]) > ENDPOINT_TOLERANCE:
        raise EndpointMismatch(f"Need β_0 = 0, got {betas[0]}")
    alphas[0], alphas[-1], betas[0] = a, b, 0.0
    k = len(alphas) - 1
    if any(alphas[i] <= alphas[i + 1] for i in range(k)):
        raise MonotonicityViolation(f"α-sequence must strictly decrease from a to b: {alphas}")
    if not betas[k] < b:
        raise MonotonicityViolation(f"β_k = {betas[k]} must lie below b = {b}")
    if betas[1] < 0 or any(betas[i] >= betas[i + 1] for i in range(1, k)):
        raise MonotonicityViolation(f"β-sequence must satisfy 0 <= β_1 < … < β_k: {betas}")
    return ThetaSequence(tuple(alphas), tuple(betas))


@dataclass(frozen=True)
class BoundaryArc:
    """A confocal arc of the table boundary inside one closed quadrant.

    ``kind`` is ``ellipse`` (``C_λ`` with ``λ < b``, free coordinate λ1),
    ``hyperbola`` (``b < λ < a``, free coordinate λ2), or one of the axis
    segments ``vertical_axis`` (``C_a``) and ``horizontal_axis`` (``C_b``)
    whose span is a Cartesian coordinate range. ``corner_ends`` marks which
    endpoints are genuine corners rather than smooth junctions on an axis.
    """

    quadrant: str
    kind: str
    lam: float
    span: Tuple[float, float]
    corner_ends: Tuple[bool, bool] = (False, False)

    def endpoints(self, family: ConicFamily) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        signs = QUADRANT_SIGNS[self.quadrant]
        lo, hi = self.span
        if self.kind == "ellipse":
            return cartesian_point(family, lo, self.lam, signs), cartesian_point(family, hi, self.lam, signs)
        if self.kind == "hyperbola":
            return cartesian_point(family, self.lam, lo, signs), cartesian_point(family, self.lam, hi, signs)
        if self.kind == "vertical_axis":
            return (0.0, lo), (0.0, hi)
        return (lo, 0.0), (hi, 0.0)

    def corners(self, family: ConicFamily) -> List[Tuple[float, float]]:
        return [p for p, flag in zip(self.endpoints(family), self.corner_ends) if flag]


@dataclass(frozen=True)
class NibbledEllipse:
    """A nibbled-ellipse table with its caustic breakpoints β^t ≤ β^b ≤ β^l ≤ β^r."""

    family: ConicFamily
    quadrants: Mapping[str, ThetaSequence] = field(hash=False)
    beta_top: float = 0.0
    beta_bottom: float = 0.0
    beta_left: float = 0.0
    beta_right: float = 0.0
    applied_reflection: GammaElement = GammaElement.ID

    @property
    def a(self) -> float:
        return self.family.a

    @property
    def b(self) -> float:
        return self.family.b

    @property
    def caustic_marks(self) -> Dict[str, float]:
        return {"t": self.beta_top, "b": self.beta_bottom, "l": self.beta_left, "r": self.beta_right}

    def to_original(self, point: Sequence[float]) -> Tuple[float, float]:
        """Map a point of the normalized table back to the table as it was given."""
        return self.applied_reflection.apply(point)

    def boundary_arcs(self) -> List[BoundaryArc]:
        arcs = []
        for quadrant in QUADRANTS:
            theta = self.quadrants[quadrant]
            k = theta.k
            for i in range(1, k + 1):
                arcs.append(
                    BoundaryArc(
                        quadrant,
                        "ellipse",
                        theta.beta(i),
                        (theta.alpha(i), theta.alpha(i - 1)),
                        corner_ends=(i < k, i > 1),
                    )
                )
            for i in range(1, k):
                arcs.append(
                    BoundaryArc(quadrant, "hyperbola", theta.alpha(i), (theta.beta(i), theta.beta(i + 1)), (True, True))
                )
        return arcs

    def corners(self) -> List[Tuple[float, float]]:
        """The 2(k−1) corners of every quadrant, as Cartesian points."""
        points = []
        for quadrant in QUADRANTS:
            theta = self.quadrants[quadrant]
            signs = QUADRANT_SIGNS[quadrant]
            for i in range(1, theta.k):
                points.append(cartesian_point(self.family, theta.alpha(i), theta.beta(i), signs))
                points.append(cartesian_point(self.family, theta.alpha(i), theta.beta(i + 1), signs))
        return points

    def contains(self, point: Sequence[float], tol: float = 1e-12) -> bool:
        """Closed membership through the staircase region in elliptic coordinates."""
        quadrant = quadrant_of((1 if point[0] >= 0 else -1, 1 if point[1] >= 0 else -1))
        theta = self.quadrants[quadrant]
        try:
            lam1, lam2 = elliptic_coords((abs(point[0]), abs(point[1])), self.family)
        except FocusSingularity:
            return True
        for i in range(1, theta.k + 1):
            if theta.alpha(i) - tol <= lam1 <= theta.alpha(i - 1) + tol and lam2 >= theta.beta(i) - tol:
                return True
        return False

    def to_dict(self) -> Dict[str, Any]:
        """Table JSON in the quadrant layout, as given (before normalization)."""
        quadrants = {}
        for quadrant in QUADRANTS:
            theta = self.quadrants[reflect_quadrant(quadrant, self.applied_reflection)]
            quadrants[quadrant] = {"alphas": list(theta.alphas), "betas": list(theta.betas)}
        return {"a": self.a, "b": self.b, "quadrants": quadrants}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "NibbledEllipse":
        family = ConicFamily(data["a"], data["b"])
        raw = data["quadrants"]
        missing = [q for q in QUADRANTS if q not in raw]
        if missing:
            raise CompatibilityViolation(f"Table is missing quadrant(s) {missing}")
        sequences = {q: validate_theta(raw[q]["alphas"], raw[q]["betas"], family) for q in QUADRANTS}
        return build_table(family, sequences)


def _marks(quadrants: Mapping[str, ThetaSequence]) -> Dict[str, float]:
    pp, pm, mp, mm = (quadrants[q] for q in QUADRANTS)
    checks = {
        "t": (pp.beta(1), mp.beta(1)),
        "b": (pm.beta(1), mm.beta(1)),
        "r": (pp.beta(pp.k), pm.beta(pm.k)),
        "l": (mp.beta(mp.k), mm.beta(mm.k)),
    }
    for mark, (first, second) in checks.items():
        if abs(first - second) > ENDPOINT_TOLERANCE:
            raise CompatibilityViolation(f"Caustic mark β^{mark} differs across quadrants: {first} vs {second}")
    return {mark: pair[0] for mark, pair in checks.items()}


def build_table(family: ConicFamily, quadrants: Mapping[str, ThetaSequence]) -> NibbledEllipse:
    """Check compatibility and normalize so that β^t ≤ β^b ≤ β^l ≤ β^r.

    The horizontal reflection exchanges top and bottom marks, the vertical
    one exchanges left and right; the applied element is recorded on the
    table so that physical outputs can be mapped back.
    """
    missing = [q for q in QUADRANTS if q not in quadrants]
    if missing:
        raise CompatibilityViolation(f"Table is missing quadrant(s) {missing}")
    marks = _marks(quadrants)
    sx = -1 if marks["l"] > marks["r"] else 1
    sy = -1 if marks["t"] > marks["b"] else 1
    gamma = GammaElement.from_signs(sx, sy)
    normalized = {q: quadrants[reflect_quadrant(q, gamma)] for q in QUADRANTS}
    marks = _marks(normalized)
    if not (marks["t"] <= marks["b"] <= marks["l"] <= marks["r"]):
        raise CompatibilityViolation(f"Caustic marks cannot be ordered: {marks}")
    table = NibbledEllipse(
        family=family,
        quadrants=normalized,
        beta_top=marks["t"],
        beta_bottom=marks["b"],
        beta_left=marks["l"],
        beta_right=marks["r"],
        applied_reflection=gamma,
    )
    logger.info(
        f"Built nibbled ellipse a={family.a}, b={family.b}, k={[normalized[q].k for q in QUADRANTS]}, "
        f"marks={marks}, reflection={gamma.label}"
    )
    return table
