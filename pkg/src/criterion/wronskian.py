"""
Wronskians and brackets of affine combinations of the singular integrals ξ_D and ℓ.
"""
from typing import Optional, Sequence

import numpy as np

from src.exceptions import DomainError
from src.quadrature.integrals import AffineCombination, Estimate, SingularIntegrator, integrator_for
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


def derivative_matrix(
    fs: Sequence[AffineCombination], s: float, integrator: Optional[SingularIntegrator] = None
):
    """Rows ``j = 0 … n−1`` hold ``d^j f_k/ds^j (s)``; returns (values, errors)."""
    if not fs:
        raise DomainError("A Wronskian needs at least one function")
    n = len(fs)
    integrator = integrator or integrator_for(fs[0].family, n - 1)
    values = np.empty((n, n))
    errors = np.empty((n, n))
    for col, f in enumerate(fs):
        for row in range(n):
            estimate = f.estimate(s, row, integrator)
            values[row, col] = estimate.value
            errors[row, col] = estimate.error
    return values, errors


def reciprocal_condition(matrix: np.ndarray) -> float:
    """1/cond of the row- and column-equilibrated matrix; near 0 for dependent families."""
    tiny = np.finfo(float).tiny
    scaled = matrix / np.maximum(np.max(np.abs(matrix), axis=1, keepdims=True), tiny)
    scaled = scaled / np.maximum(np.max(np.abs(scaled), axis=0, keepdims=True), tiny)
    singular = np.linalg.svd(scaled, compute_uv=False)
    return float(singular[-1] / singular[0]) if singular[0] > 0 else 0.0


def determinant_estimate(values: np.ndarray, errors: np.ndarray) -> Estimate:
    """|det| with a first-order error bound.

    A perturbation δM of the matrix moves the determinant by
    ``det·tr(M⁻¹δM)``, so the error is bounded by
    ``|det|·Σ|M⁻ᵀ|·|δM|`` entrywise.
    """
    sign, logdet = np.linalg.slogdet(values)
    if sign == 0:
        return Estimate(0.0, float(np.sum(errors)))
    det = float(np.exp(logdet))
    try:
        inverse = np.linalg.inv(values)
    except np.linalg.LinAlgError:
        return Estimate(det, float(np.sum(errors)))
    error = det * float(np.sum(np.abs(inverse.T) * errors))
    return Estimate(det, error)


def wronskian_estimate(
    fs: Sequence[AffineCombination], s: float, integrator: Optional[SingularIntegrator] = None
) -> Estimate:
    """|W|(fs)(s) with its error bound."""
    return determinant_estimate(*derivative_matrix(fs, s, integrator))


def wronskian(fs: Sequence[AffineCombination], s: float) -> float:
    """``|det[d^{j−1}/ds^{j−1} f_k(s)]|``; does not depend on the order of ``fs``."""
    return wronskian_estimate(fs, s).value


def bracket_estimate(
    f: AffineCombination, g: AffineCombination, s: float, integrator: Optional[SingularIntegrator] = None
) -> Estimate:
    """``[f,g](s) = f′(s)g(s) − f(s)g′(s)`` with the propagated quadrature error."""
    integrator = integrator or integrator_for(f.family, 1)
    f0, f1 = f.estimate(s, 0, integrator), f.estimate(s, 1, integrator)
    g0, g1 = g.estimate(s, 0, integrator), g.estimate(s, 1, integrator)
    value = f1.value * g0.value - f0.value * g1.value
    error = (
        f1.error * abs(g0.value)
        + abs(f1.value) * g0.error
        + f0.error * abs(g1.value)
        + abs(f0.value) * g1.error
    )
    return Estimate(value, error)


def bracket(f: AffineCombination, g: AffineCombination, s: float) -> float:
    """The signed bracket ``[f,g](s)``; antisymmetric and bilinear."""
    return bracket_estimate(f, g, s).value
