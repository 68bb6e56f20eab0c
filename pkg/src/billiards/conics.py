"""
The confocal family x²/(a−λ) + y²/(b−λ) = 1 and its elliptic coordinates.
"""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.exceptions import DomainError, FocusSingularity

FOCUS_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ConicFamily:
    """Confocal conics with parameters ``0 < b < a``.

    ``C_λ`` is an ellipse for ``λ < b`` and a hyperbola for ``b < λ < a``;
    ``C_b`` degenerates to the x-axis and ``C_a`` to the y-axis.
    """

    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not (0 < self.b < self.a):
            raise DomainError(f"Confocal family needs 0 < b < a, got a={self.a}, b={self.b}")

    @property
    def focal_distance(self) -> float:
        return math.sqrt(self.a - self.b)

    @property
    def foci(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        c = self.focal_distance
        return (c, 0.0), (-c, 0.0)

    def conic_value(self, lam: float, point: Sequence[float]) -> float:
        """x²/(a−λ) + y²/(b−λ) − 1."""
        x, y = point
        return x * x / (self.a - lam) + y * y / (self.b - lam) - 1.0

    def normal(self, lam: float, point: Sequence[float]) -> np.ndarray:
        """Unit normal of ``C_λ`` at ``point``; the axes ``C_a``, ``C_b`` are lines."""
        if lam == self.a:
            return np.array([1.0, 0.0])
        if lam == self.b:
            return np.array([0.0, 1.0])
        x, y = point
        n = np.array([x / (self.a - lam), y / (self.b - lam)])
        return n / np.linalg.norm(n)


def elliptic_coords(point: Sequence[float], family: ConicFamily) -> Tuple[float, float]:
    """Elliptic coordinates ``(λ1, λ2)`` with ``λ1 ∈ [b, a]`` and ``λ2 ≤ b``.

    They are the roots of ``λ² − λ(a+b−x²−y²) + (ab − b·x² − a·y²) = 0``.
    The discriminant equals ``(a−b−x²+y²)² + (2xy)²`` and is evaluated in
    that form, which only vanishes at the foci.

    Raises:
        FocusSingularity: the point is a focus, where both roots equal ``b``.
    """
    x, y = float(point[0]), float(point[1])
    a, b = family.a, family.b
    c = family.focal_distance
    if abs(y) < FOCUS_TOLERANCE and abs(abs(x) - c) < FOCUS_TOLERANCE:
        raise FocusSingularity(f"Point ({x}, {y}) is a focus of the family")
    x2, y2 = x * x, y * y
    p = a + b - x2 - y2
    q = a * b - b * x2 - a * y2
    root = math.hypot(a - b - x2 + y2, 2.0 * x * y)
    lam1 = 0.5 * (p + root)
    # λ1 ≥ b > 0, so the product form avoids cancellation in the smaller root
    lam2 = q / lam1
    return min(max(lam1, b), a), min(lam2, b)


def cartesian_point(family: ConicFamily, lam1: float, lam2: float, signs: Tuple[int, int] = (1, 1)) -> Tuple[float, float]:
    """Inverse of :func:`elliptic_coords` in the quadrant given by ``signs``."""
    a, b = family.a, family.b
    x2 = (a - lam1) * (a - lam2) / (a - b)
    y2 = (lam1 - b) * (b - lam2) / (a - b)
    return signs[0] * math.sqrt(max(x2, 0.0)), signs[1] * math.sqrt(max(y2, 0.0))


def tangent_conic_parameter(position: Sequence[float], direction: Sequence[float], family: ConicFamily) -> float:
    """Parameter ``s`` of the confocal conic tangent to the line through ``position``.

    For ``y = kx + m`` the tangency condition ``m² = k²(a−s) + (b−s)`` gives
    ``s = (k²a + b − m²)/(k²+1)``; multiplied through by ``dx²`` this reads
    ``dy²a + dx²b − (x·dy − y·dx)²`` for a unit direction. A vertical line
    ``x = c`` gives ``s = a − c²``.
    """
    dx, dy = float(direction[0]), float(direction[1])
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        raise DomainError("Caustic parameter needs a nonzero direction")
    dx, dy = dx / norm, dy / norm
    x, y = float(position[0]), float(position[1])
    if dx == 0.0:
        return family.a - x * x
    moment = x * dy - y * dx
    return dy * dy * family.a + dx * dx * family.b - moment * moment
