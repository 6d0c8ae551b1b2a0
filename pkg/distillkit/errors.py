"""Exceptions raised by distillkit."""

from __future__ import annotations


class DistillkitError(Exception):
    """Base class for all distillkit errors."""


class DimensionMismatch(DistillkitError, ValueError):
    """Raised when vector or matrix sizes do not agree."""


class NotPositiveDefinite(DistillkitError):
    """Raised when a Gram matrix has a (numerically) null direction."""


class ConvergenceFailure(DistillkitError):
    """Raised when an iterative routine exhausts its iteration budget."""


class DomainViolation(DistillkitError, ValueError):
    """Raised when a kernel input lies outside the kernel domain."""


class InvalidDataset(DistillkitError, ValueError):
    """Raised when a dataset breaks its invariants (size, duplicates, shape)."""


class PreconditionViolation(DistillkitError, ValueError):
    """Raised when an operation is called outside its stated preconditions."""


class DegenerateSpectrum(DistillkitError):
    """Raised when adjacent eigenvalues coincide."""


class OutOfRange(DistillkitError, IndexError):
    """Raised when a round index is beyond the recorded trace."""


class CollapsedRound(DistillkitError):
    """Raised when a model is requested for a round that collapsed."""


class MatchFailure(DistillkitError):
    """Raised when no loss tolerance reproduces a requested training error."""


class BadConfig(DistillkitError, ValueError):
    """Raised when an experiment configuration is invalid."""


class InfeasibleTolerance(DistillkitError):
    """Raised when anchored labels alone exceed the loss tolerance."""

    def __init__(self, anchored_error: float, epsilon: float) -> None:
        """Store the residual that no model can remove."""
        super().__init__(
            f"anchored residual {anchored_error!r} leaves no budget below "
            f"epsilon={epsilon!r}"
        )
        self.anchored_error = anchored_error
        self.epsilon = epsilon


class CollapseCondition(DistillkitError):
    """Raised when ||y||^2 <= K * eps; the optimal function is f = 0."""

    def __init__(self, norm_sq: float, threshold: float, t: int | None = None) -> None:
        """Store the squared label norm and the collapse threshold K * eps."""
        where = "" if t is None else f" at round {t}"
        super().__init__(
            f"solution collapsed{where}: ||y||^2={norm_sq!r} <= K*eps={threshold!r}"
        )
        self.norm_sq = norm_sq
        self.threshold = threshold
        self.t = t
