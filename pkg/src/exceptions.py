"""
Error hierarchy shared by every package.

``DomainError`` covers bad input and excluded parameters (CLI exit code 1);
``InternalInconsistency`` covers failed cross-checks between independent
computations (CLI exit code 2).
"""
from typing import Any, Optional


class NibbledError(Exception):
    """Base class for all toolkit errors."""


class DomainError(NibbledError):
    """Input outside the domain of an operation."""

    exit_code = 1


class InternalInconsistency(NibbledError):
    """Two computations that must agree did not."""

    exit_code = 2


# conic tables
class MonotonicityViolation(DomainError):
    pass


class EndpointMismatch(DomainError):
    pass


class CompatibilityViolation(DomainError):
    pass


class FocusSingularity(DomainError):
    pass


class CornerHit(DomainError):
    """A boundary hit landed on a table corner; the billiard flow dies there."""

    def __init__(self, message: str, corner: Optional[Any] = None):
        super().__init__(message)
        self.corner = corner


class OutsideTable(DomainError):
    pass


class GeometryFailure(InternalInconsistency):
    pass


# quadrature
class DomainViolation(DomainError):
    pass


class DegenerateCaustic(DomainError):
    pass


class QuadratureFailure(InternalInconsistency):
    pass


class NonConvergence(QuadratureFailure):
    pass


class ConsistencyFailure(InternalInconsistency):
    pass


# polygons and flattening
class ProfileViolation(DomainError):
    pass


class SideLengthMismatch(DomainError):
    pass


class TypeMismatch(DomainError):
    pass


class RelationNotSymmetric(DomainError):
    pass


class OutsideComponent(DomainError):
    pass



# translation surfaces
class UnglSide(InternalInconsistency):
    pass


class InconsistentAngle(InternalInconsistency):
    pass


class EulerMismatch(InternalInconsistency):
    pass


class DisconnectedSurface(DomainError):
    pass


class CornerCrossing(DomainError):
    pass


# flow dynamics
class HitSingularity(DomainError):
    """The flow reached a singular point before the requested length."""

    def __init__(self, message: str, length: float, partial: Optional[Any] = None):
        super().__init__(message)
        self.length = length
        self.partial = partial


class CornerAmbiguity(DomainError):
    pass


class NotGlobalTransversal(DomainError):
    pass


class SeparatrixHitsCorner(DomainError):
    pass


# interval exchanges
class OutOfDomain(DomainError):
    pass
