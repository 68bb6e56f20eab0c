"""
Interval exchange transformations: evaluation, orbits, ε_n and connection tests.
"""
import heapq
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from src.config import settings
from src.exceptions import DomainError, OutOfDomain
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class IETData:
    """A d-interval exchange ``T_Λ`` on ``[0, |λ|)``.

    ``permutation[j−1] = π(j)`` is the position, counted from the left, of
    the image of the j-th interval.
    """

    permutation: Tuple[int, ...]
    lengths: Tuple[float, ...]

    def __post_init__(self):
        permutation = tuple(int(p) for p in self.permutation)
        lengths = tuple(float(x) for x in self.lengths)
        object.__setattr__(self, "permutation", permutation)
        object.__setattr__(self, "lengths", lengths)
        d = len(lengths)
        if d < 2 or len(permutation) != d:
            raise DomainError(f"An IET needs d >= 2 lengths and a matching permutation, got {d} and {len(permutation)}")
        if sorted(permutation) != list(range(1, d + 1)):
            raise DomainError(f"{permutation} is not a permutation of 1..{d}")
        if any(x <= 0 for x in lengths):
            raise DomainError(f"IET lengths must be positive: {lengths}")

    @classmethod
    def from_lengths(cls, lengths: Sequence[float], permutation: Sequence[int]) -> "IETData":
        return cls(permutation=tuple(permutation), lengths=tuple(lengths))

    @property
    def d(self) -> int:
        return len(self.lengths)

    @property
    def total(self) -> float:
        return float(sum(self.lengths))

    @property
    def b(self) -> np.ndarray:
        """Right endpoints b_1..b_d of the domain intervals."""
        return np.cumsum(self.lengths)

    @property
    def t(self) -> np.ndarray:
        """Right endpoints t_1..t_d of the image intervals."""
        inverse = np.argsort(self.permutation)
        return np.cumsum(np.asarray(self.lengths)[inverse])

    @property
    def translations(self) -> np.ndarray:
        """``t_{π(j)} − b_j`` for every interval j."""
        return self.t[np.asarray(self.permutation) - 1] - self.b

    @property
    def discontinuities(self) -> np.ndarray:
        return self.b[:-1]

    def normalize(self, total: float = 1.0) -> "IETData":
        scale = total / self.total
        return IETData(self.permutation, tuple(x * scale for x in self.lengths))

    def in_which_interval(self, x: ArrayLike) -> np.ndarray:
        """0-based index of the interval containing each point."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(x >= self.total):
            raise OutOfDomain(f"Points outside [0, {self.total})")
        return np.minimum(np.searchsorted(self.b, x, side="right"), self.d - 1)

    def orbit(self, x: float, n: int) -> np.ndarray:
        """``x, T x, …, T^n x``."""
        points = np.empty(n + 1)
        points[0] = x
        for k in range(n):
            points[k + 1] = apply(self, points[k])
        return points

    def to_dict(self) -> Dict[str, Any]:
        return {"permutation": list(self.permutation), "lengths": list(self.lengths)}


def apply(iet: IETData, x: ArrayLike) -> Union[float, np.ndarray]:
    """``T_Λ x = x + t_{π(j)} − b_j`` for ``x ∈ [b_{j−1}, b_j)``.

    Raises:
        OutOfDomain: a point lies outside ``[0, |λ|)``.
    """
    scalar = np.ndim(x) == 0
    points = np.asarray(x, dtype=float)
    image = points + iet.translations[iet.in_which_interval(points)]
    # rounding may push images onto the ends of the domain
    image = np.clip(image, 0.0, np.nextafter(iet.total, 0.0))
    return float(image) if scalar else image


def _orbit_table(iet: IETData, n: int) -> np.ndarray:
    """``T^k b_i`` for k = 0..n (rows) and i = 1..d−1 (columns)."""
    table = np.empty((n + 1, iet.d - 1))
    table[0] = iet.discontinuities
    for k in range(n):
        table[k + 1] = apply(iet, table[k])
    return table


def epsilon_n(iet: IETData, n: int, include_endpoints: bool = False) -> float:
    """Minimal distance between distinct points ``T^k b_i``, 0 ≤ k ≤ n, 1 ≤ i < d.

    With ``include_endpoints`` the ends 0 and |λ| join the point set. A
    single point (d = 2, n = 0) gives |λ|.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    points = _orbit_table(iet, n).ravel()
    if include_endpoints:
        points = np.concatenate([points, [0.0, iet.total]])
    if points.size < 2:
        return iet.total
    return float(np.min(np.diff(np.sort(points))))


def epsilon_profile(iet: IETData, N: int, include_endpoints: bool = False) -> np.ndarray:
    """ε_n for every n = 0..N in one pass.

    All orbit points up to step N are sorted once; the profile is then read
    off backwards, removing the points of step n after recording ε_n and
    keeping the neighbour gaps in a lazily pruned heap.
    """
    if N < 0:
        raise DomainError("N must be non-negative")
    table = _orbit_table(iet, N)
    values = table.ravel()
    steps = np.repeat(np.arange(N + 1), iet.d - 1)
    if include_endpoints:
        values = np.concatenate([values, [0.0, iet.total]])
        steps = np.concatenate([steps, [-1, -1]])
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    size = sorted_values.size
    prev = np.arange(-1, size - 1)
    nxt = np.arange(1, size + 1)
    nxt[-1] = -1
    alive = np.ones(size, dtype=bool)
    heap = [(sorted_values[i + 1] - sorted_values[i], i, i + 1) for i in range(size - 1)]
    heapq.heapify(heap)
    # sorted positions of the points introduced at each step
    by_step = [[] for _ in range(N + 1)]
    for position, original in enumerate(order):
        if steps[original] >= 0:
            by_step[steps[original]].append(position)

    profile = np.empty(N + 1)
    for n in range(N, -1, -1):
        while heap and not (alive[heap[0][1]] and alive[heap[0][2]] and nxt[heap[0][1]] == heap[0][2]):
            heapq.heappop(heap)
        profile[n] = heap[0][0] if heap else iet.total
        for position in by_step[n]:
            left, right = prev[position], nxt[position]
            alive[position] = False
            if left >= 0:
                nxt[left] = right
            if right >= 0:
                prev[right] = left
            if left >= 0 and right >= 0:
                heapq.heappush(heap, (sorted_values[right] - sorted_values[left], left, right))
    return profile


@dataclass(frozen=True)
class RecurrenceRecord:
    min_tail: float
    argmin_n: int
    connection_found: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"min_tail": self.min_tail, "argmin_n": self.argmin_n, "connection_found": self.connection_found}


def recurrence_diagnostic(
    iet: IETData,
    N: int,
    window: int,
    include_endpoints: bool = False,
    tolerance: Optional[float] = None,
) -> RecurrenceRecord:
    """min of n·ε_n over ``n ∈ [N − window, N]`` on the IET normalized to |λ| = 1.

    ``connection_found`` is set when some ε_n, n ≤ N, falls below the
    connection tolerance.
    """
    if not 1 <= window <= N:
        raise DomainError(f"Need N >= window >= 1, got N={N}, window={window}")
    tolerance = settings.connection_tolerance if tolerance is None else tolerance
    profile = epsilon_profile(iet.normalize(), N, include_endpoints)
    ns = np.arange(N - window, N + 1)
    tail = ns * profile[ns]
    best = int(np.argmin(tail))
    record = RecurrenceRecord(
        min_tail=float(tail[best]),
        argmin_n=int(ns[best]),
        connection_found=bool(np.min(profile) < tolerance),
    )
    logger.debug(f"Recurrence diagnostic d={iet.d}, N={N}: {record}")
    return record


def has_connection(iet: IETData, N: int, tol: Optional[float] = None) -> Optional[Tuple[int, int, int]]:
    """First ``(n, i, j)`` with ``|T^n b_i − b_j| ≤ tol``, n = 1..N, or None.

    ``tol`` is relative to |λ| (settings default 1e-12).
    """
    if N < 1:
        raise DomainError("N must be at least 1")
    tol = (settings.connection_tolerance if tol is None else tol) * iet.total
    targets = iet.discontinuities
    points = targets.copy()
    for n in range(1, N + 1):
        points = apply(iet, points)
        close = np.abs(points[:, None] - targets[None, :]) <= tol
        if np.any(close):
            i, j = np.argwhere(close)[0]
            return (n, int(i) + 1, int(j) + 1)
    return None


def rotation_iet(alpha: float) -> IETData:
    """The two-interval exchange acting as ``x ↦ x + alpha mod 1``."""
    alpha = float(alpha) % 1.0
    if alpha == 0.0:
        raise DomainError("Rotation by 0 is not a two-interval exchange")
    return IETData(permutation=(2, 1), lengths=(1.0 - alpha, alpha))
