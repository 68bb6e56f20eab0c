"""
Grid verification of the Wronskian and bracket conditions over a parameter interval.

For every grid point ``s`` of an interval ``J`` of the partition the scan
evaluates ``|W|(𝒳 ∪ 𝒴 ∪ {ℓ})(s)`` and the brackets ``[𝐱,ℓ](s)``,
``[𝐲,ℓ](s)``. Elliptic intervals must give ``[𝐱,ℓ] ≤ 0 < [𝐲,ℓ]``,
hyperbolic ones ``[𝐱,ℓ] ≥ 0 > [𝐲,ℓ]``. A strict sign only counts when it
clears the quadrature error by ``strict_sign_margin``; otherwise the point
is inconclusive.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field
from tqdm import tqdm

from src.billiards.tables import NibbledEllipse
from src.config import settings
from src.exceptions import DomainError, QuadratureFailure
from src.flattening.flat_polygon import xy_families
from src.flattening.partition import Interval, interval_case, interval_partition, regime
from src.criterion.wronskian import (
    bracket_estimate,
    derivative_matrix,
    determinant_estimate,
    reciprocal_condition,
)
from src.quadrature.integrals import ELLIPTIC, AffineCombination, integrator_for
from src.utils.logging_config import get_logger
from src.utils.metrics import measure_time

logger = get_logger(__name__)

OK = "ok"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"
FAILED = "failed"

SATISFIED = "satisfied"

# (sign required of [x,ℓ], sign required of [y,ℓ]); x is weak, y strict
BRANCH_SIGNS = {"ii-+": (-1, 1), "ii+-": (1, -1)}
REGIME_BRANCH = {ELLIPTIC: "ii-+", "hyperbolic": "ii+-"}

CSV_COLUMNS = [
    "interval",
    "s",
    "wronskian",
    "wronskian_err",
    "bracket_x_min",
    "bracket_x_max",
    "bracket_y_min",
    "bracket_y_max",
    "status",
]


class GridRow(BaseModel):
    """Values at one grid point."""

    s: float
    wronskian: Optional[float] = None
    wronskian_err: Optional[float] = None
    reciprocal_condition: Optional[float] = None
    brackets_x: List[float] = Field(default_factory=list)
    brackets_y: List[float] = Field(default_factory=list)
    status: str = OK
    message: str = ""

    @property
    def bracket_x_min(self) -> Optional[float]:
        return min(self.brackets_x) if self.brackets_x else None

    @property
    def bracket_x_max(self) -> Optional[float]:
        return max(self.brackets_x) if self.brackets_x else None

    @property
    def bracket_y_min(self) -> Optional[float]:
        return min(self.brackets_y) if self.brackets_y else None

    @property
    def bracket_y_max(self) -> Optional[float]:
        return max(self.brackets_y) if self.brackets_y else None


class CriterionReport(BaseModel):
    """Outcome of a criterion scan over one parameter interval."""

    interval: Tuple[float, float]
    regime: str
    case: str
    branch: Optional[str] = None
    grid: List[float]
    family_size: int
    wronskian_min: Optional[float] = None
    bracket_worst: Dict[str, Optional[float]] = Field(default_factory=dict)
    verdict: str
    violated_at: Optional[float] = None
    rows: List[GridRow] = Field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return self.verdict == SATISFIED

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def to_frame(self) -> pd.DataFrame:
        label = f"({self.interval[0]:.12g},{self.interval[1]:.12g})"
        records = [
            {
                "interval": label,
                "s": row.s,
                "wronskian": row.wronskian,
                "wronskian_err": row.wronskian_err,
                "bracket_x_min": row.bracket_x_min,
                "bracket_x_max": row.bracket_x_max,
                "bracket_y_min": row.bracket_y_min,
                "bracket_y_max": row.bracket_y_max,
                "status": row.status,
            }
            for row in self.rows
        ]
        return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)

    def to_csv(self, path=None, header: bool = True) -> Optional[str]:
        return self.to_frame().to_csv(path, index=False, header=header, float_format="%.12g")


@dataclass(frozen=True)
class CriterionFamily:
    """The functions whose Wronskian is tested and the two bracket families."""

    functions: Tuple[AffineCombination, ...]
    xs: Tuple[AffineCombination, ...]
    ys: Tuple[AffineCombination, ...]
    ell: AffineCombination

    @classmethod
    def of_table(cls, table: NibbledEllipse, J: Interval) -> "CriterionFamily":
        symbolic = xy_families(table, J)
        ell = symbolic.ell_symbolic
        return cls(
            functions=tuple(symbolic.functions()),
            xs=(ell,) + tuple(symbolic.xs_symbolic),
            ys=tuple(symbolic.ys_symbolic),
            ell=ell,
        )


def chebyshev_grid(J: Interval, n: int, margin: Optional[float] = None) -> List[float]:
    """``n`` Chebyshev points of ``[J0 + margin, J1 − margin]``, ascending."""
    if n < 1:
        raise DomainError("A grid needs at least one point")
    lo, hi = J
    margin = settings.interval_margin if margin is None else margin
    lo, hi = lo + margin, hi - margin
    if not lo < hi:
        raise DomainError(f"Margin {margin} leaves nothing of {J}")
    nodes = np.cos(np.pi * (2 * np.arange(n) + 1) / (2 * n))
    return sorted(float(0.5 * (lo + hi) + 0.5 * (hi - lo) * x) for x in nodes)


def _endpoint(symbol: AffineCombination, which: str) -> float:
    (_, base), = symbol.terms
    return getattr(base, which)


def disjoint_basis(table: NibbledEllipse, J: Interval) -> List[AffineCombination]:
    """ξ's over disjoint intervals spanning the same space as 𝒳 ∪ 𝒴 ∪ {ℓ} by unimodular column operations.

    Elliptic: ξ_(α_1,a), ξ_(α_2,α_1), …, ξ_(b,α_m), ξ_(−∞,β_1), ξ_(β_1,β_2), …
    Hyperbolic: ξ_(α_1,a), ξ_(α_2,α_1), …, ξ_(α_m,α_{m−1}) and
    ξ_(−∞,β_1), …, ξ_(β_n,b).
    """
    family = table.family
    symbolic = xy_families(table, J)
    alphas = sorted({_endpoint(x, "lo") for x in symbolic.xs_symbolic}, reverse=True)
    basis: List[AffineCombination] = []
    upper = table.a
    for alpha in alphas:
        basis.append(AffineCombination.of_interval(family, alpha, upper))
        upper = alpha
    if regime(table, J) == ELLIPTIC:
        basis.append(AffineCombination.of_interval(family, table.b, upper))
        # ℓ − ξ_(−∞,β) is the only term kept for each y
        betas = sorted({_endpoint(y - symbolic.ell_symbolic, "hi") for y in symbolic.ys_symbolic})
        lower = -math.inf
        for beta in betas:
            basis.append(AffineCombination.of_interval(family, lower, beta))
            lower = beta
    else:
        betas = sorted({_endpoint(y, "lo") for y in symbolic.ys_symbolic})
        lower = -math.inf
        for beta in betas + [table.b]:
            basis.append(AffineCombination.of_interval(family, lower, beta))
            lower = beta
    return basis


def _sign_status(value: float, error: float, sign: int, strict: bool) -> str:
    signed = sign * value
    margin = settings.strict_sign_margin * error
    if strict:
        if signed > 0 and signed > margin:
            return OK
        if signed < 0 and -signed > margin:
            return VIOLATED
        return INCONCLUSIVE
    if signed >= -settings.weak_sign_band:
        return OK
    return VIOLATED if -signed > margin else INCONCLUSIVE


def _worst(statuses: Sequence[str]) -> str:
    for status in (VIOLATED, FAILED, INCONCLUSIVE):
        if status in statuses:
            return status
    return OK


def evaluate_point(family: CriterionFamily, s: float, branch: str) -> GridRow:
    """|W| and both bracket families at ``s``, with the status under ``branch``."""
    x_sign, y_sign = BRANCH_SIGNS[branch]
    try:
        integrator = integrator_for(family.ell.family, len(family.functions) - 1)
        values, errors = derivative_matrix(family.functions, s, integrator)
        det = determinant_estimate(values, errors)
        rcond = reciprocal_condition(values)
        xs = [bracket_estimate(x, family.ell, s, integrator) for x in family.xs]
        ys = [bracket_estimate(y, family.ell, s, integrator) for y in family.ys]
    except QuadratureFailure as e:
        logger.warning(f"Quadrature failed at s={s}: {e}")
        return GridRow(s=s, status=FAILED, message=str(e))

    if rcond <= settings.weak_sign_band:
        w_status = VIOLATED
    elif det.value > settings.strict_sign_margin * det.error:
        w_status = OK
    else:
        w_status = INCONCLUSIVE
    statuses = [w_status]
    statuses += [_sign_status(b.value, b.error, x_sign, strict=False) for b in xs]
    statuses += [_sign_status(b.value, b.error, y_sign, strict=True) for b in ys]
    status = _worst(statuses)
    if status == INCONCLUSIVE:
        logger.warning(f"Criterion inconclusive at s={s}: |W|={det.value:.3e}±{det.error:.1e}")
    return GridRow(
        s=s,
        wronskian=det.value,
        wronskian_err=det.error,
        reciprocal_condition=rcond,
        brackets_x=[b.value for b in xs],
        brackets_y=[b.value for b in ys],
        status=status,
    )


def _check_interval(table: NibbledEllipse, J: Interval) -> Interval:
    J = (float(J[0]), float(J[1]))
    interval_partition(table).index(J)
    return J


def scan(
    family: CriterionFamily,
    J: Interval,
    J_regime: str,
    case: str,
    grid_size: Optional[int] = None,
    branch: Optional[str] = None,
    threads: Optional[int] = None,
    progress: bool = False,
) -> CriterionReport:
    """Evaluate ``family`` on a Chebyshev grid of ``J`` and summarize the verdict."""
    grid_size = grid_size or settings.grid_size
    branch = branch or REGIME_BRANCH[J_regime]
    x_sign, y_sign = BRANCH_SIGNS[branch]
    grid = chebyshev_grid(J, grid_size)
    threads = threads or settings.threads

    with ThreadPoolExecutor(max_workers=threads) as executor:
        rows = list(
            tqdm(
                executor.map(lambda s: evaluate_point(family, s, branch), grid),
                total=len(grid),
                desc=f"criterion {J[0]:.4g}..{J[1]:.4g}",
                disable=not progress,
            )
        )

    evaluated = [row for row in rows if row.status != FAILED]
    violated = next((row for row in rows if row.status == VIOLATED), None)
    if violated is not None:
        verdict = VIOLATED
    elif all(row.status == OK for row in rows):
        verdict = SATISFIED
    else:
        verdict = INCONCLUSIVE

    def worst(values: List[float], sign: int) -> Optional[float]:
        # the value closest to (or furthest past) the wrong side
        return min(values, key=lambda v: sign * v) if values else None

    report = CriterionReport(
        interval=J,
        regime=J_regime,
        case=case,
        branch=branch if verdict == SATISFIED else None,
        grid=grid,
        family_size=len(family.functions),
        wronskian_min=min((row.wronskian for row in evaluated), default=None),
        bracket_worst={
            "x": worst([v for row in evaluated for v in row.brackets_x], x_sign),
            "y": worst([v for row in evaluated for v in row.brackets_y], y_sign),
        },
        verdict=verdict,
        violated_at=violated.s if violated is not None else None,
        rows=rows,
    )
    logger.info(
        f"Criterion on J=({J[0]:.6g}, {J[1]:.6g}) [{J_regime}, case {case}]: {verdict}"
        + (f" at s={report.violated_at}" if report.violated_at is not None else "")
    )
    return report


@measure_time
def verify_wronbrack(
    table: NibbledEllipse,
    J: Interval,
    grid_size: Optional[int] = None,
    threads: Optional[int] = None,
    progress: bool = False,
) -> CriterionReport:
    """|W|(𝒳 ∪ 𝒴 ∪ {ℓ}) > 0 and the regime's bracket signs on a grid of ``J``.

    Raises:
        DomainError: ``J`` is not an interval of the table's partition.
    """
    J = _check_interval(table, J)
    family = CriterionFamily.of_table(table, J)
    return scan(family, J, regime(table, J), interval_case(table, J), grid_size, None, threads, progress)


@measure_time
def verify_mainsurf(
    table: NibbledEllipse,
    J: Interval,
    grid_size: Optional[int] = None,
    family: Optional[CriterionFamily] = None,
    threads: Optional[int] = None,
    progress: bool = False,
) -> CriterionReport:
    """Conditions (i) and (ii) of the unique-ergodicity theorem for the translation surfaces over ``J``.

    The branch tested is the one the regime predicts, (ii−+) for elliptic and
    (ii+−) for hyperbolic intervals. If it fails while the other branch holds
    on the whole grid, the report names the other branch instead. A custom
    ``family`` replaces 𝒳 ∪ 𝒴 ∪ {ℓ}.
    """
    J = _check_interval(table, J)
    family = family or CriterionFamily.of_table(table, J)
    J_regime, case = regime(table, J), interval_case(table, J)
    report = scan(family, J, J_regime, case, grid_size, None, threads, progress)
    if report.verdict == VIOLATED and report.rows and all(
        row.status != FAILED and row.wronskian is not None for row in report.rows
    ):
        other = next(b for b in BRANCH_SIGNS if b != REGIME_BRANCH[J_regime])
        alternative = scan(family, J, J_regime, case, grid_size, other, threads, progress)
        if alternative.satisfied:
            logger.warning(f"Branch {other} holds on J={J} although the regime predicts {REGIME_BRANCH[J_regime]}")
            return alternative
    return report


def verify_table(
    table: NibbledEllipse,
    grid_size: Optional[int] = None,
    intervals: Optional[Sequence[Interval]] = None,
    threads: Optional[int] = None,
    progress: bool = False,
) -> List[CriterionReport]:
    """``verify_wronbrack`` on every interval of the partition (or the given ones)."""
    intervals = intervals or interval_partition(table).intervals
    return [verify_wronbrack(table, J, grid_size, threads, progress) for J in intervals]
