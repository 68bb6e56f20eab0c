"""
Partition of the caustic parameter range (β^t, a) into intervals of constant combinatorics.
"""
from dataclasses import dataclass
from typing import List, Tuple

from src.billiards.tables import QUADRANTS, NibbledEllipse
from src.config import settings
from src.exceptions import DegenerateCaustic, DomainError
from src.quadrature.integrals import ELLIPTIC, HYPERBOLIC
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

Interval = Tuple[float, float]

BREAKPOINT_TOLERANCE = 1e-12

CASE_LABELS = ("i", "ii-a", "ii-b", "ii-c", "iii")


@dataclass(frozen=True)
class ParameterPartition:
    """Sorted breakpoints ``β^t < … < b < … < a`` and the open intervals between them."""

    breakpoints: Tuple[float, ...]

    @property
    def intervals(self) -> List[Interval]:
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:]))

    def locate(self, s: float) -> Interval:
        """The interval containing ``s``."""
        for J in self.intervals:
            if J[0] < s < J[1]:
                return J
        raise DegenerateCaustic(f"Caustic parameter {s} is a breakpoint or lies outside ({self.breakpoints[0]}, {self.breakpoints[-1]})")

    def index(self, J: Interval) -> int:
        for i, candidate in enumerate(self.intervals):
            if candidate == tuple(J):
                return i
        raise DomainError(f"{J} is not an interval of the partition")


def interval_partition(table: NibbledEllipse) -> ParameterPartition:
    """Cut ``(β^t, a)`` at every α_i, β_i of the four quadrants, at ``b`` and at ``a``.

    Values closer than 1e-12 are merged, so matching marks of neighbouring
    quadrants never produce zero-length intervals.
    """
    lower, a, b = table.beta_top, table.a, table.b
    values = {lower, b, a}
    for quadrant in QUADRANTS:
        theta = table.quadrants[quadrant]
        for i in range(1, theta.k + 1):
            for value in (theta.alpha(i), theta.beta(i)):
                if lower < value < a:
                    values.add(value)
    merged: List[float] = []
    for value in sorted(values):
        if merged and value - merged[-1] <= BREAKPOINT_TOLERANCE:
            continue
        merged.append(value)
    partition = ParameterPartition(tuple(merged))
    logger.debug(f"Parameter partition breakpoints: {partition.breakpoints}")
    return partition


def regime(table: NibbledEllipse, J: Interval) -> str:
    """``elliptic`` for intervals below ``b``, ``hyperbolic`` above."""
    if J[1] <= table.b:
        return ELLIPTIC
    if J[0] >= table.b:
        return HYPERBOLIC
    raise DegenerateCaustic(f"Interval {J} straddles the degenerate caustic b={table.b}")


def interval_case(table: NibbledEllipse, J: Interval) -> str:
    """Which of the cases i, ii-a, ii-b, ii-c, iii of the flattened polygon applies on ``J``."""
    if regime(table, J) == HYPERBOLIC:
        return "iii"
    s = 0.5 * (J[0] + J[1])
    if s < table.beta_bottom:
        return "i"
    if s < table.beta_left:
        return "ii-a"
    if s < table.beta_right:
        return "ii-b"
    return "ii-c"


def l_index(table: NibbledEllipse, quadrant: str, J: Interval) -> int:
    """Number of staircase steps of the quadrant that survive in the flattened part on ``J``.

    Elliptic intervals keep the steps whose ellipse lies inside the caustic
    (``β_i < s``), hyperbolic ones the steps reaching past the caustic
    hyperbola (``α_{i−1} > s``).
    """
    theta = table.quadrants[quadrant]
    s = 0.5 * (J[0] + J[1])
    if regime(table, J) == ELLIPTIC:
        return sum(1 for i in range(1, theta.k + 1) if theta.beta(i) < s)
    return sum(1 for i in range(theta.k) if theta.alpha(i) > s)


def check_margin(J: Interval, s: float) -> None:
    """Refuse ``s`` closer to ∂J than the interval margin."""
    margin = settings.interval_margin
    if not (J[0] + margin <= s <= J[1] - margin):
        raise DegenerateCaustic(f"s={s} is not interior to {J} with margin {margin:.2e}")
