"""Exception types shared across the engine.

Every error carries a stable machine-readable code (the class name) so the
CLI can surface failures without string parsing.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class DimensionMismatch(EngineError):
    """Operands have incompatible shapes or an odd quadrature dimension."""


class SingularBlock(EngineError):
    """A pivot block (or its Schur complement) is numerically singular."""


class NotPositiveDefinite(EngineError):
    """Matrix expected to be symmetric positive definite is not."""


class InvalidGraph(EngineError):
    """Adjacency matrix is not symmetric / zero-diagonal / finite."""


class NotOrthogonal(EngineError):
    """Supplied generation-freedom matrix is not orthogonal."""


class InvalidPartition(EngineError):
    """Node-role assignment is inconsistent with the graph."""


class InvalidWeight(EngineError):
    """Entangling-gate weight matrix must be symmetric with zero diagonal."""


class DegenerateAngles(EngineError):
    """Measurement angles hit a singular point (e.g. infinite squeeze)."""


class DegenerateD(EngineError):
    """Three-node denominator vanished; the weighted triangle is unusable."""


class DecompositionFailure(EngineError):
    """Input to a factorization routine is not symplectic."""


class OutOfBranch(EngineError):
    """Closed-form angle inversion has no real branch at these parameters."""


class SingularA12(EngineError):
    """Input-to-output coupling block is singular; inputs cannot be routed."""


class LayoutMismatch(EngineError):
    """Partition roles do not match the requested computation class."""


class DegenerateVariance(EngineError):
    """Measured quadrature has (numerically) zero variance."""


class TooLarge(EngineError):
    """Requested exhaustive enumeration exceeds the combinatorial guard."""


class ParseError(EngineError):
    """Configuration document is malformed."""
