"""
The singular integrals ξ_D(s) = ∫_D e(λ,s) dλ, their s-derivatives and the period ℓ(s).

``e(λ,s) = 1/√((a−λ)(b−λ)(s−λ))`` and, for ``s`` outside the closure of a
fixed interval ``D``, ``d^k/ds^k ξ_D(s) = ((2k−1)!!/2^k) ∫_D e(λ,s)/(λ−s)^k dλ``.
"""
import math
import threading
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from src.billiards.conics import ConicFamily
from src.config import settings
from src.exceptions import ConsistencyFailure, DegenerateCaustic, DomainViolation
from src.quadrature.double_exponential import integrate
from src.utils.logging_config import get_logger
from src.utils.metrics import metrics_collector

logger = get_logger(__name__)

Interval = Tuple[float, float]

ELLIPTIC = "elliptic"
HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class Estimate:
    """A quadrature value with its absolute error estimate."""

    value: float
    error: float = 0.0

    def __add__(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value + other.value, self.error + other.error)

    def __sub__(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value - other.value, self.error + other.error)

    def __mul__(self, factor: float) -> "Estimate":
        return Estimate(factor * self.value, abs(factor) * self.error)

    __rmul__ = __mul__

    def __neg__(self) -> "Estimate":
        return Estimate(-self.value, self.error)


def derivative_coefficient(k: int) -> float:
    """``(2k−1)!!/2^k``; 1 for ``k = 0``."""
    coefficient = 1.0
    for j in range(1, k + 1):
        coefficient *= (2 * j - 1) / 2.0
    return coefficient


def caustic_regime(family: ConicFamily, s: float) -> str:
    """``elliptic`` for ``0 < s < b``, ``hyperbolic`` for ``b < s < a``.

    Raises:
        DegenerateCaustic: ``s = b`` or ``s`` outside ``(0, a)``.
    """
    if not (0.0 < s < family.a) or s == family.b:
        raise DegenerateCaustic(f"Caustic parameter {s} is excluded (need s in (0, {family.b}) or ({family.b}, {family.a}))")
    return ELLIPTIC if s < family.b else HYPERBOLIC


def positivity_domain(family: ConicFamily, s: float) -> List[Interval]:
    """The components of Δ_s, where ``(a−λ)(b−λ)(s−λ) > 0``."""
    a, b = family.a, family.b
    if s < b:
        return [(-math.inf, s), (b, a)]
    if s > b:
        return [(-math.inf, b), (s, a)]
    raise DegenerateCaustic("Δ_s is not defined for the degenerate caustic s = b")


def ell_interval(family: ConicFamily, s: float) -> Interval:
    """The s-independent interval whose ξ is ℓ in the regime of ``s``."""
    if caustic_regime(family, s) == ELLIPTIC:
        return (family.b, family.a)
    return (-math.inf, family.b)


def _check_domain(family: ConicFamily, D: Interval, s: float, k: int, guard: float):
    lo, hi = D
    if not lo < hi or math.isinf(hi):
        raise DomainViolation(f"Interval {D} must be open with a finite right endpoint")
    if s >= family.a:
        raise DomainViolation(f"Parameter s={s} lies beyond a={family.a}")
    if not any(c_lo <= lo and hi <= c_hi for c_lo, c_hi in positivity_domain(family, s)):
        raise DomainViolation(f"Interval {D} is not contained in Δ_s for s={s}")
    for end in (lo, hi):
        if math.isinf(end):
            continue
        gap = abs(s - end)
        if gap == 0.0 and k > 0:
            raise DomainViolation(f"Derivatives of ξ on {D} are undefined when s is the endpoint {end}")
        if 0.0 < gap < guard:
            raise DomainViolation(f"s={s} is within {gap:.2e} of the endpoint {end} of {D}; refusing to evaluate")


class SingularIntegrator:
    """Evaluates ξ_D and its first ``k_max`` derivatives for one confocal family.

    All orders of one ``(D, s)`` share a single node set and are cached
    together under exact key equality. The cache is guarded by a lock so one
    integrator can serve a thread pool.
    """

    def __init__(self, family: ConicFamily, k_max: Optional[int] = None, rtol: Optional[float] = None):
        self.family = family
        self.k_max = settings.k_max if k_max is None else int(k_max)
        self.rtol = settings.quadrature_rtol if rtol is None else rtol
        self._cache: Dict[Tuple[float, float, float], Tuple[Estimate, ...]] = {}
        self._lock = threading.Lock()

    def _integrand(self, D: Interval, s: float, max_order: int):
        a, b = self.family.a, self.family.b
        lo, hi = D
        orders = np.arange(max_order + 1)

        def factor(root, lam, d_lo, d_hi):
            # r − λ from the exact endpoint distance when r is an endpoint
            if root == hi:
                return d_hi
            if root == lo:
                return -d_lo
            return root - lam

        def evaluate(lam, d_lo, d_hi):
            fa = factor(a, lam, d_lo, d_hi)
            fb = factor(b, lam, d_lo, d_hi)
            fs = factor(s, lam, d_lo, d_hi)
            base = 1.0 / np.sqrt(np.abs(fa * fb * fs))
            inverse = -1.0 / fs
            return base[None, :] * inverse[None, :] ** orders[:, None]

        return evaluate

    def orders(self, D: Interval, s: float) -> Tuple[Estimate, ...]:
        """Estimates of ``d^k ξ_D/ds^k`` at ``s`` for ``k = 0 … k_max``."""
        D = (float(D[0]), float(D[1]))
        s = float(s)
        key = (D[0], D[1], s)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            metrics_collector.record_cache_hit()
            return cached
        metrics_collector.record_cache_miss()

        _check_domain(self.family, D, s, 0, settings.endpoint_guard)
        # only the order-0 row is integrable when s is an endpoint of D
        max_order = 0 if s in D else self.k_max
        result = integrate(self._integrand(D, s, max_order), D[0], D[1], rtol=self.rtol)
        estimates = tuple(
            Estimate(derivative_coefficient(k) * float(v), derivative_coefficient(k) * float(e))
            for k, (v, e) in enumerate(zip(result.values, result.errors))
        )
        logger.debug(f"ξ on {D} at s={s}: {estimates[0].value:.15g} after {result.levels} level(s)")
        with self._lock:
            if len(self._cache) >= settings.quadrature_cache_size:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = estimates
        return estimates

    def estimate(self, D: Interval, s: float, k: int = 0) -> Estimate:
        if k > self.k_max:
            raise DomainViolation(f"Derivative order {k} exceeds k_max={self.k_max} of this integrator")
        _check_domain(self.family, (float(D[0]), float(D[1])), float(s), k, settings.endpoint_guard)
        return self.orders(D, s)[k]

    def xi(self, D: Interval, s: float) -> float:
        return self.estimate(D, s, 0).value

    def xi_derivative(self, D: Interval, s: float, k: int) -> float:
        if k < 1:
            raise DomainViolation(f"Derivative order must be at least 1, got {k}")
        return self.estimate(D, s, k).value

    def ell_estimate(self, s: float, k: int = 0) -> Estimate:
        return self.estimate(ell_interval(self.family, s), s, k)

    def ell(self, s: float) -> float:
        """ℓ(s), cross-checked against the second period expression of its regime."""
        a, b = self.family.a, self.family.b
        primary = self.ell_estimate(s).value
        other = (-math.inf, s) if caustic_regime(self.family, s) == ELLIPTIC else (s, a)
        secondary = self.xi(other, s)
        gap = abs(primary - secondary) / primary
        if gap > settings.period_check_rtol:
            logger.error(f"Period expressions disagree at s={s} (a={a}, b={b}): {primary} vs {secondary}")
            raise ConsistencyFailure(f"ℓ({s}) expressions differ by {gap:.3e} relative")
        return primary

    def clear(self):
        with self._lock:
            self._cache.clear()


_registry: Dict[ConicFamily, SingularIntegrator] = {}
_registry_lock = threading.Lock()


def integrator_for(family: ConicFamily, k_max: int = 0) -> SingularIntegrator:
    """Shared integrator of ``family`` supporting at least ``k_max`` derivatives."""
    with _registry_lock:
        current = _registry.get(family)
        if current is None or current.k_max < k_max:
            current = SingularIntegrator(family, k_max=max(k_max, settings.k_max))
            _registry[family] = current
        return current


def xi(D: Interval, family: ConicFamily, s: float) -> float:
    """ξ_D(s) = ∫_D e(λ,s) dλ.

    Raises:
        DomainViolation: ``D`` is not inside Δ_s or ``s`` is too close to ∂D.
        NonConvergence: the quadrature did not converge.
    """
    return integrator_for(family).xi(D, s)


def xi_derivative(D: Interval, family: ConicFamily, s: float, k: int) -> float:
    """The k-th s-derivative of ξ_D at ``s``."""
    return integrator_for(family, k).xi_derivative(D, s, k)


def ell(family: ConicFamily, s: float) -> float:
    """The period ℓ(s), ``∫_b^a e`` for elliptic and ``∫_{−∞}^b e`` for hyperbolic caustics."""
    return integrator_for(family).ell(s)


@dataclass(frozen=True)
class IntervalIntegral:
    """The symbol ξ_D for a fixed open interval ``D = (lo, hi)``."""

    lo: float
    hi: float
    family: ConicFamily

    @property
    def D(self) -> Interval:
        return (self.lo, self.hi)

    def estimate(self, s: float, k: int = 0, integrator: Optional[SingularIntegrator] = None) -> Estimate:
        integrator = integrator or integrator_for(self.family, k)
        return integrator.estimate(self.D, s, k)

    def evaluate(self, s: float, k: int = 0) -> float:
        return self.estimate(s, k).value

    def __str__(self) -> str:
        return f"ξ({self.lo:g},{self.hi:g})"


def _merge(terms: Iterable[Tuple[float, IntervalIntegral]]) -> Tuple[Tuple[float, IntervalIntegral], ...]:
    merged: Dict[IntervalIntegral, float] = {}
    for coefficient, base in terms:
        merged[base] = merged.get(base, 0.0) + float(coefficient)
    kept = [(c, base) for base, c in merged.items() if c != 0.0]
    return tuple(sorted(kept, key=lambda term: (term[1].lo, term[1].hi)))


@dataclass(frozen=True)
class AffineCombination:
    """``Σ c_j·ξ_{D_j} + c_ℓ·ℓ``; ℓ is evaluated through its regime's interval."""

    family: ConicFamily
    terms: Tuple[Tuple[float, IntervalIntegral], ...] = ()
    ell_coefficient: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "terms", _merge(self.terms))
        object.__setattr__(self, "ell_coefficient", float(self.ell_coefficient))

    @classmethod
    def of_interval(cls, family: ConicFamily, lo: float, hi: float, coefficient: float = 1.0) -> "AffineCombination":
        return cls(family, ((coefficient, IntervalIntegral(lo, hi, family)),))

    @classmethod
    def of_ell(cls, family: ConicFamily, coefficient: float = 1.0) -> "AffineCombination":
        return cls(family, (), coefficient)

    @property
    def is_ell(self) -> bool:
        return not self.terms and self.ell_coefficient == 1.0

    def estimate(self, s: float, k: int = 0, integrator: Optional[SingularIntegrator] = None) -> Estimate:
        integrator = integrator or integrator_for(self.family, k)
        total = Estimate(0.0)
        for coefficient, base in self.terms:
            total = total + coefficient * integrator.estimate(base.D, s, k)
        if self.ell_coefficient:
            total = total + self.ell_coefficient * integrator.ell_estimate(s, k)
        return total

    def evaluate(self, s: float, k: int = 0) -> float:
        return self.estimate(s, k).value

    def __add__(self, other: "AffineCombination") -> "AffineCombination":
        return AffineCombination(self.family, self.terms + other.terms, self.ell_coefficient + other.ell_coefficient)

    def __neg__(self) -> "AffineCombination":
        return self * -1.0

    def __sub__(self, other: "AffineCombination") -> "AffineCombination":
        return self + (-other)

    def __mul__(self, factor: float) -> "AffineCombination":
        return AffineCombination(
            self.family, tuple((factor * c, base) for c, base in self.terms), factor * self.ell_coefficient
        )

    __rmul__ = __mul__

    def __str__(self) -> str:
        parts = [f"{c:+g}·{base}" for c, base in self.terms]
        if self.ell_coefficient:
            parts.insert(0, f"{self.ell_coefficient:+g}·ℓ")
        return " ".join(parts) if parts else "0"
