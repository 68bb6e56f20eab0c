"""
Double-exponential quadrature for integrands with inverse-square-root endpoint singularities.

Finite intervals use the tanh-sinh substitution, left-infinite intervals
``(−∞, c)`` the exp-sinh substitution. Nodes carry their exact distances to
both endpoints so that factors vanishing at an endpoint are never formed by
cancellation.
"""
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from src.config import settings
from src.exceptions import NonConvergence
from src.utils.logging_config import get_logger
from src.utils.metrics import metrics_collector

logger = get_logger(__name__)

HALF_PI = 0.5 * math.pi
T_MAX = 5.0
ROUNDOFF_FLOOR = 1e-14

# integrand(lam, dist_to_lo, dist_to_hi) -> array of shape (orders, nodes)
NodeIntegrand = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureResult:
    """Values and error estimates for every order the integrand produces."""

    values: np.ndarray
    errors: np.ndarray
    levels: int


def tanh_sinh_nodes(lo: float, hi: float, t: np.ndarray) -> Tuple[np.ndarray, ...]:
    """Abscissae, endpoint distances and Jacobian of ``λ = c + h·tanh(π/2·sinh t)``."""
    half = 0.5 * (hi - lo)
    u = HALF_PI * np.sinh(t)
    with np.errstate(over="ignore", under="ignore"):
        d_lo = 2.0 * half / (1.0 + np.exp(-2.0 * u))
        d_hi = 2.0 * half / (1.0 + np.exp(2.0 * u))
        jacobian = half * HALF_PI * np.cosh(t) / np.cosh(u) ** 2
    lam = np.where(t < 0, lo + d_lo, hi - d_hi)
    return lam, d_lo, d_hi, jacobian


def exp_sinh_nodes(hi: float, t: np.ndarray) -> Tuple[np.ndarray, ...]:
    """Abscissae, endpoint distances and Jacobian of ``λ = c − exp(π/2·sinh t)``."""
    with np.errstate(over="ignore", under="ignore"):
        x = np.exp(HALF_PI * np.sinh(t))
        jacobian = x * HALF_PI * np.cosh(t)
    return hi - x, np.full_like(x, np.inf), x, jacobian


def _level_sum(integrand: NodeIntegrand, lo: float, hi: float, t: np.ndarray) -> np.ndarray:
    if math.isinf(lo):
        lam, d_lo, d_hi, jacobian = exp_sinh_nodes(hi, t)
    else:
        lam, d_lo, d_hi, jacobian = tanh_sinh_nodes(lo, hi, t)
    keep = jacobian > 0
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        values = integrand(lam[keep], d_lo[keep], d_hi[keep]) * jacobian[keep]
    values = np.where(np.isfinite(values), values, 0.0)
    return values.sum(axis=-1)


def integrate(
    integrand: NodeIntegrand,
    lo: float,
    hi: float,
    rtol: float = None,
    min_level: int = None,
    max_level: int = None,
) -> QuadratureResult:
    """Integrate every row of ``integrand`` over ``(lo, hi)``.

    Levels use the step ``h = 2^-L``; each level only evaluates the new odd
    nodes. The rule has converged once the relative change between two
    consecutive levels is at most ``rtol`` for all rows. Since the error of a
    double-exponential rule roughly squares from one level to the next, the
    reported error is ``|I|·max(change², 1e−14)``.

    Args:
        integrand: Vectorized integrand returning one row per order.
        lo: Left endpoint, possibly ``-inf``.
        hi: Finite right endpoint.
        rtol: Level-to-level tolerance (settings default).
        min_level: First level evaluated.
        max_level: Last level before giving up.

    Returns:
        Values and error estimates, one per row.

    Raises:
        NonConvergence: the tolerance was not reached at ``max_level``.
    """
    rtol = settings.quadrature_rtol if rtol is None else rtol
    min_level = settings.quadrature_min_level if min_level is None else min_level
    max_level = settings.quadrature_max_level if max_level is None else max_level

    h = 2.0 ** -min_level
    n = int(T_MAX / h)
    total = _level_sum(integrand, lo, hi, h * np.arange(-n, n + 1))
    estimate = h * total
    change = np.full_like(estimate, np.inf)
    for level in range(min_level + 1, max_level + 1):
        h *= 0.5
        n = int(T_MAX / h)
        odd = np.arange(-n + (1 - n % 2), n + 1, 2)
        total = total + _level_sum(integrand, lo, hi, h * odd)
        refined = h * total
        scale = np.maximum(np.abs(refined), np.finfo(float).tiny)
        change = np.abs(refined - estimate) / scale
        estimate = refined
        if np.all(change <= rtol):
            levels = level - min_level + 1
            metrics_collector.record_quadrature(levels)
            errors = np.abs(estimate) * np.maximum(change ** 2, ROUNDOFF_FLOOR)
            return QuadratureResult(values=estimate, errors=errors, levels=levels)

    metrics_collector.record_quadrature(max_level - min_level + 1, failed=True)
    logger.error(f"Double-exponential rule on ({lo}, {hi}) stalled at relative change {np.max(change):.3e}")
    raise NonConvergence(f"Quadrature on ({lo}, {hi}) did not reach rtol={rtol} by level {max_level}")
