"""
The change of variables σ_s and the flattened generalized polygon 𝐏(s) of a caustic component.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Sequence, Tuple

import numpy as np

from src.billiards.conics import elliptic_coords
from src.billiards.tables import QUADRANTS, NibbledEllipse, quadrant_of
from src.config import settings
from src.exceptions import DegenerateCaustic, DomainError, OutsideComponent, QuadratureFailure
from src.flattening.partition import Interval, check_margin, interval_case, l_index, regime
from src.polygons.generalized import GeneralizedPolygon, build_generalized
from src.polygons.staircase import GammaElement, StaircaseProfile, build_basic
from src.quadrature.integrals import ELLIPTIC, HYPERBOLIC, AffineCombination, caustic_regime, ell, xi
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

PART_TYPES = {
    ELLIPTIC: {"pp": GammaElement.ID, "mp": GammaElement.V, "pm": GammaElement.V, "mm": GammaElement.ID},
    HYPERBOLIC: {"pp": GammaElement.ID, "mp": GammaElement.V, "pm": GammaElement.H, "mm": GammaElement.VH},
}

CASE_RELATIONS = {
    "i": {"V": [("pp", "mp")]},
    "ii-a": {"V": [("pp", "mp"), ("pm", "mm")]},
    "ii-b": {"V": [("pp", "mp"), ("mm", "pm")], "v": [("mp", "mm")]},
    "ii-c": {"V": [("pp", "mp"), ("mm", "pm")], "v": [("mp", "mm"), ("pm", "pp")]},
    "iii": {"V": [("pp", "mp"), ("mm", "pm")], "H": [("mp", "mm"), ("pm", "pp")]},
}

COMPONENT_TOLERANCE = 1e-9

Symbols = Tuple[AffineCombination, ...]


@dataclass(frozen=True)
class SymbolicProfile:
    """Per-part profiles as affine combinations of ξ_D and ℓ, with the families 𝒳, 𝒴 and ℓ."""

    xs_symbolic: Symbols
    ys_symbolic: Symbols
    ell_symbolic: AffineCombination
    parts: Mapping[str, Tuple[Symbols, Symbols]] = field(hash=False)

    def functions(self) -> List[AffineCombination]:
        """𝒳 ∪ 𝒴 ∪ {ℓ}, with ℓ first."""
        return [self.ell_symbolic, *self.xs_symbolic, *self.ys_symbolic]

    def evaluate(self, s: float) -> Dict[str, StaircaseProfile]:
        return {
            quadrant: StaircaseProfile(tuple(x.evaluate(s) for x in xs), tuple(y.evaluate(s) for y in ys))
            for quadrant, (xs, ys) in self.parts.items()
        }


def _unique(symbols) -> Symbols:
    return tuple(dict.fromkeys(symbols))


def _part_symbols(table: NibbledEllipse, quadrant: str, J: Interval) -> Tuple[Symbols, Symbols]:
    family = table.family
    theta = table.quadrants[quadrant]
    l = l_index(table, quadrant, J)
    ell_symbol = AffineCombination.of_ell(family)
    if regime(table, J) == ELLIPTIC:
        xs = tuple(
            ell_symbol if theta.alpha(i) == table.b else AffineCombination.of_interval(family, theta.alpha(i), table.a)
            for i in range(1, l + 1)
        )
        ys = tuple(ell_symbol - AffineCombination.of_interval(family, -math.inf, theta.beta(i)) for i in range(1, l + 1))
    else:
        xs = tuple(AffineCombination.of_interval(family, theta.alpha(i), table.a) for i in range(1, l)) + (ell_symbol,)
        ys = tuple(AffineCombination.of_interval(family, theta.beta(i), table.b) for i in range(1, l + 1))
    return xs, ys


def xy_families(table: NibbledEllipse, J: Interval) -> SymbolicProfile:
    """The families 𝒳, 𝒴 and ℓ describing the flattened polygons over ``J``.

    Elliptic intervals: 𝒳 ∪ {ℓ} = {ξ_(b,a), ξ_(α_i,a)} and 𝒴 = {ℓ − ξ_(−∞,β_j)}.
    Hyperbolic intervals: 𝒳 ∪ {ℓ} = {ξ_(−∞,b), ξ_(α_i,a)} and 𝒴 = {ξ_(β_j,b)}.
    Only the parameters of steps that survive on ``J`` take part.
    """
    parts = {}
    for quadrant in QUADRANTS:
        if l_index(table, quadrant, J) > 0:
            parts[quadrant] = _part_symbols(table, quadrant, J)
    ell_symbol = AffineCombination.of_ell(table.family)
    xs = _unique(x for xs, _ in parts.values() for x in xs if x != ell_symbol)
    ys = _unique(y for _, ys in parts.values() for y in ys)
    return SymbolicProfile(xs_symbolic=xs, ys_symbolic=ys, ell_symbolic=ell_symbol, parts=parts)


@dataclass(frozen=True)
class FlatTable:
    """The flattened generalized polygon 𝐏(s) with its placement in the σ_s chart.

    In the elliptic regime the chart is the cylinder ℝ/4ℓℤ × [0, ℓ); each part
    sits at ``offsets[quadrant]`` and ``wrapped`` lists the parts crossing the
    seam at 0. In the hyperbolic regime the chart is planar and all offsets
    vanish.
    """

    table: NibbledEllipse
    interval: Interval
    s: float
    case: str
    regime: str
    ell: float
    polygon: GeneralizedPolygon
    symbolic: SymbolicProfile
    offsets: Mapping[str, float] = field(hash=False)
    wrapped: FrozenSet[str] = frozenset()

    @property
    def components(self) -> List[GeneralizedPolygon]:
        return self.polygon.components()

    @property
    def connected(self) -> bool:
        return self.polygon.connected

    def chart_point(self, quadrant: str, local: Sequence[float]) -> Tuple[float, float]:
        """Part coordinates to σ_s chart coordinates."""
        if self.regime == ELLIPTIC:
            return (math.fmod(self.offsets[quadrant] + local[0] + 4.0 * self.ell, 4.0 * self.ell), local[1])
        return (float(local[0]), float(local[1]))


def _direct_checks(table: NibbledEllipse, quadrant: str, J: Interval, s: float, profile: StaircaseProfile):
    """Compare the profile against the direct integral forms of its entries."""
    theta = table.quadrants[quadrant]
    checks = []
    if regime(table, J) == ELLIPTIC:
        for i in range(1, profile.k + 1):
            checks.append((f"y_{i}", profile.y(i), xi((theta.beta(i), s), table.family, s)))
    else:
        checks.append((f"x_{profile.k}", profile.x(profile.k), xi((s, table.a), table.family, s)))
    for name, symbolic, direct in checks:
        if abs(symbolic - direct) > settings.symbolic_check_tol * max(1.0, abs(direct)):
            logger.error(f"{quadrant} {name} at s={s}: symbolic {symbolic!r} vs direct {direct!r}")
            raise QuadratureFailure(f"Profile entry {name} of {quadrant} disagrees with its direct integral at s={s}")


def build_flat_polygon(table: NibbledEllipse, J: Interval, s: float) -> FlatTable:
    """Build 𝐏(s) for ``s ∈ J`` following the case of ``J``.

    Args:
        table: Normalized nibbled ellipse.
        J: An interval of the parameter partition.
        s: Caustic parameter, interior to ``J`` with the configured margin.

    Returns:
        The flattened table; in case ii-a its two components are disjoint.

    Raises:
        DegenerateCaustic: ``s`` is too close to ∂J or equals ``b``.
        QuadratureFailure: the symbolic and direct forms of an entry disagree.
    """
    check_margin(J, s)
    case = interval_case(table, J)
    kind = regime(table, J)
    symbolic = xy_families(table, J)
    profiles = symbolic.evaluate(s)
    ell_value = ell(table.family, s)

    parts = []
    for quadrant, profile in profiles.items():
        _direct_checks(table, quadrant, J, s, profile)
        parts.append(build_basic(profile, PART_TYPES[kind][quadrant], quadrant))
    relations = {relation: [] for relation in ("V", "H", "v", "h")}
    for relation, pairs in CASE_RELATIONS[case].items():
        for m, n in pairs:
            relations[relation] += [(m, n), (n, m)]
    polygon = build_generalized(parts, relations)

    if kind == ELLIPTIC:
        offsets = {"pp": 0.0, "mp": 0.0, "pm": 2.0 * ell_value, "mm": 2.0 * ell_value}
        wrapped = frozenset(q for q in ("mp",) if q in profiles)
    else:
        offsets = {q: 0.0 for q in QUADRANTS}
        wrapped = frozenset()
    flat = FlatTable(
        table=table,
        interval=tuple(J),
        s=float(s),
        case=case,
        regime=kind,
        ell=ell_value,
        polygon=polygon,
        symbolic=symbolic,
        offsets={q: offsets[q] for q in profiles},
        wrapped=wrapped,
    )
    logger.debug(f"Flattened s={s} on {J}: case {case}, parts {sorted(profiles)}, ℓ={ell_value:.12g}")
    return flat


def _edge_integral(table: NibbledEllipse, s: float, root: float, point: float) -> float:
    """|∫ e| between a root of the integrand and a point of the same component of Δ_s."""
    gap = abs(point - root)
    if gap == 0.0:
        return 0.0
    if gap < settings.endpoint_guard:
        # leading term of the inverse square root singularity at the root
        others = [r for r in (table.a, table.b, s) if r != root]
        return 2.0 * math.sqrt(gap / abs((others[0] - root) * (others[1] - root)))
    lo, hi = sorted((root, point))
    return xi((lo, hi), table.family, s)


@dataclass(frozen=True)
class FlatPoint:
    quadrant: str
    local: Tuple[float, float]
    chart: Tuple[float, float]


def in_caustic_component(table: NibbledEllipse, s: float, point: Sequence[float], tol: float = COMPONENT_TOLERANCE) -> bool:
    """Membership in S_s: the table part outside the caustic ellipse, or between the caustic hyperbola's branches."""
    if not table.contains(point, tol):
        return False
    lam1, lam2 = elliptic_coords((abs(point[0]), abs(point[1])), table.family)
    if caustic_regime(table.family, s) == ELLIPTIC:
        return lam2 <= s + tol
    return lam1 >= s - tol


def flatten_point(table: NibbledEllipse, s: float, point: Sequence[float]) -> FlatPoint:
    """Apply σ_s to a point of the caustic component S_s.

    Elliptic caustics map into the cylinder [0, 4ℓ) × [0, ℓ), hyperbolic ones
    into [−ℓ, ℓ] × (−ℓ, ℓ).

    Raises:
        OutsideComponent: the point is not in S_s.
        DegenerateCaustic: ``s`` is excluded.
    """
    if s <= table.beta_top:
        raise DegenerateCaustic(f"Caustic parameter {s} lies below β^t={table.beta_top}")
    kind = caustic_regime(table.family, s)
    if not in_caustic_component(table, s, point):
        raise OutsideComponent(f"Point {tuple(point)} is not in the caustic component for s={s}")
    a, b = table.a, table.b
    lam1, lam2 = elliptic_coords((abs(point[0]), abs(point[1])), table.family)
    ell_value = ell(table.family, s)
    quadrant = quadrant_of((1 if point[0] >= 0 else -1, 1 if point[1] >= 0 else -1))
    gamma = PART_TYPES[kind][quadrant]
    if kind == ELLIPTIC:
        lam2 = min(lam2, s)
        if a - lam1 <= lam1 - b:
            X = _edge_integral(table, s, a, lam1)
        else:
            X = ell_value - _edge_integral(table, s, b, lam1)
        Y = _edge_integral(table, s, s, lam2)
        local = (gamma.sx * X, Y)
        offset = 0.0 if quadrant in ("pp", "mp") else 2.0 * ell_value
        chart = (math.fmod(offset + local[0] + 4.0 * ell_value, 4.0 * ell_value), Y)
    else:
        lam1 = max(lam1, s)
        if a - lam1 <= lam1 - s:
            X = _edge_integral(table, s, a, lam1)
        else:
            X = ell_value - _edge_integral(table, s, s, lam1)
        Y = _edge_integral(table, s, b, lam2)
        local = (gamma.sx * X, gamma.sy * Y)
        chart = local
    return FlatPoint(quadrant=quadrant, local=local, chart=chart)


def flat_image(
    table: NibbledEllipse, s: float, start: Sequence[float], end: Sequence[float], samples: int = 100
) -> List[np.ndarray]:
    """σ_s-image of a physical chord as polylines, split where the chord touches the caustic.

    Elliptic images are unwrapped across the cylinder seam so that every
    polyline is a single straight piece of slope ±1.
    """
    p0 = np.asarray(start, dtype=float)
    direction = np.asarray(end, dtype=float) - p0
    length = float(np.hypot(*direction))
    if length == 0.0:
        raise DomainError("flat_image needs a segment of positive length")
    direction /= length
    kind = caustic_regime(table.family, s)
    alpha, beta = table.a - s, table.b - s
    qa = direction[0] ** 2 / alpha + direction[1] ** 2 / beta
    qb = 2.0 * (p0[0] * direction[0] / alpha + p0[1] * direction[1] / beta)
    touch = -qb / (2.0 * qa)
    ts = np.linspace(0.0, length, samples)
    cuts = [touch] if 0.0 < touch < length else []
    ts = np.unique(np.concatenate([ts, cuts]))

    chart = np.array([flatten_point(table, s, p0 + t * direction).chart for t in ts])
    if kind == ELLIPTIC:
        period = 4.0 * ell(table.family, s)
        for j in range(1, len(chart)):
            chart[j, 0] += period * round((chart[j - 1, 0] - chart[j, 0]) / period)
    if not cuts:
        return [chart]
    split = int(np.searchsorted(ts, touch))
    return [chart[: split + 1], chart[split:]]
