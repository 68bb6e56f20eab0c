"""
Independent reference computations for the tests.

Gauss–Legendre quadrature with square-root substitutions at singular
endpoints, the double-integral form of the bracket and a sorted-insertion
computation of ε_n.
"""
import bisect
import math
import sys
from pathlib import Path
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.special import roots_legendre

sys.path.append(str(Path(__file__).parent.parent))

from src.billiards.conics import ConicFamily

GAUSS_POINTS = 20
_NODES, _WEIGHTS = roots_legendre(GAUSS_POINTS)


def _gauss(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    return float(half * np.dot(_WEIGHTS, f(0.5 * (hi + lo) + half * _NODES)))


def _adaptive(f, lo: float, hi: float, tol: float, depth: int = 0) -> float:
    whole = _gauss(f, lo, hi)
    mid = 0.5 * (lo + hi)
    left, right = _gauss(f, lo, mid), _gauss(f, mid, hi)
    if abs(left + right - whole) <= tol * max(1.0, abs(left + right)) or depth > 40:
        return left + right
    return _adaptive(f, lo, mid, tol, depth + 1) + _adaptive(f, mid, hi, tol, depth + 1)


def _weight(family: ConicFamily, s: float, k: int):
    def e(lam):
        base = 1.0 / np.sqrt(np.abs((family.a - lam) * (family.b - lam) * (s - lam)))
        return base / (lam - s) ** k

    return e


def _finite_pieces(family: ConicFamily, lo: float, hi: float, s: float) -> List[Tuple[Callable, float, float]]:
    """Integrands on [0, 1] after substitutions removing the endpoint singularities."""
    roots = (family.a, family.b, s)
    lo_singular = any(abs(lo - r) < 1e-15 for r in roots)
    hi_singular = any(abs(hi - r) < 1e-15 for r in roots)
    pieces = []
    if lo_singular and hi_singular:
        mid = 0.5 * (lo + hi)
        return _finite_pieces(family, lo, mid, s) + _finite_pieces(family, mid, hi, s)
    if lo_singular:
        width = hi - lo
        pieces.append((lambda v, lo=lo, width=width: (lo + width * v * v, 2.0 * width * v), 0.0, 1.0))
    elif hi_singular:
        width = hi - lo
        pieces.append((lambda v, hi=hi, width=width: (hi - width * v * v, 2.0 * width * v), 0.0, 1.0))
    else:
        pieces.append((lambda v, lo=lo, hi=hi: (lo + (hi - lo) * v, (hi - lo) * np.ones_like(v)), 0.0, 1.0))
    return pieces


def xi_oracle(family: ConicFamily, D: Tuple[float, float], s: float, k: int = 0, tol: float = 1e-13) -> float:
    """d^k/ds^k ∫_D e(λ,s) dλ by adaptive Gauss–Legendre."""
    lo, hi = D
    e = _weight(family, s, k)
    total = 0.0
    if math.isinf(lo):
        # (−∞, hi−1] through λ = hi − 1 − (1 − v²)/v², then the finite rest
        anchor = hi - 1.0

        def tail(v):
            v = np.maximum(v, 1e-300)
            lam = anchor - (1.0 - v * v) / (v * v)
            return e(lam) * 2.0 / v ** 3

        total += _adaptive(tail, 0.0, 1.0, tol)
        lo = anchor
    for transform, a, b in _finite_pieces(family, lo, hi, s):

        def integrand(v, transform=transform):
            lam, jac = transform(v)
            return e(lam) * jac

        total += _adaptive(integrand, a, b, tol)
    coefficient = 1.0
    for j in range(1, k + 1):
        coefficient *= (2 * j - 1) / 2.0
    return coefficient * total


def _nodes(family: ConicFamily, D: Tuple[float, float], s: float, panels: int = 64):
    """Composite Gauss nodes and weights for ∫_D g(λ) e(λ,s) dλ with g smooth."""
    lo, hi = D
    e = _weight(family, s, 0)
    lams, weights = [], []
    for transform, a, b in _finite_pieces(family, lo, hi, s):
        edges = np.linspace(a, b, panels + 1)
        for left, right in zip(edges[:-1], edges[1:]):
            half = 0.5 * (right - left)
            v = 0.5 * (left + right) + half * _NODES
            lam, jac = transform(v)
            lams.append(lam)
            weights.append(half * _WEIGHTS * jac * e(lam))
    return np.concatenate(lams), np.concatenate(weights)


def bracket_oracle(family: ConicFamily, D1: Tuple[float, float], D2: Tuple[float, float], s: float) -> float:
    """½∬_{D1×D2} e(λ1,s)e(λ2,s)(λ2−λ1)/((λ1−s)(λ2−s)) dλ1 dλ2 for finite intervals."""
    l1, w1 = _nodes(family, D1, s)
    l2, w2 = _nodes(family, D2, s)
    kernel = (l2[None, :] - l1[:, None]) / ((l1[:, None] - s) * (l2[None, :] - s))
    return float(0.5 * np.einsum("i,ij,j->", w1, kernel, w2))


def iet_map(lengths: Sequence[float], permutation: Sequence[int], x: float) -> float:
    """The exchange evaluated straight from the definition."""
    d = len(lengths)
    left = 0.0
    for j in range(d):
        if x < left + lengths[j] or j == d - 1:
            image_left = sum(lengths[i] for i in range(d) if permutation[i] < permutation[j])
            return image_left + (x - left)
        left += lengths[j]
    raise ValueError(x)


def epsilon_oracle(lengths: Sequence[float], permutation: Sequence[int], n: int) -> List[float]:
    """ε_0 … ε_n by inserting each new orbit point into a sorted list."""
    d = len(lengths)
    points = [sum(lengths[: i + 1]) for i in range(d - 1)]
    current = list(points)
    ordered: List[float] = []
    best = math.inf
    profile = []
    for step in range(n + 1):
        if step > 0:
            current = [iet_map(lengths, permutation, x) for x in current]
        for x in current:
            position = bisect.bisect_left(ordered, x)
            if position > 0:
                best = min(best, x - ordered[position - 1])
            if position < len(ordered):
                best = min(best, ordered[position] - x)
            ordered.insert(position, x)
        profile.append(best if math.isfinite(best) else float(sum(lengths)))
    return profile
