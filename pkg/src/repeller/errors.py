"""Exception types shared across the package."""

from __future__ import annotations


class RepellerError(Exception):
    """Base class for every error raised by this package."""


class InvalidParam(RepellerError):
    """A construction parameter violates one of the admissibility conditions."""

    def __init__(self, field: str, reason: str):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


class IndexOutOfRange(RepellerError):
    """A partition or branch index outside its legal range."""


class OutOfDomain(RepellerError):
    """An evaluation point outside the domain of the requested map piece."""


class DepthExceeded(RepellerError):
    """A branch lookup or return-time search went past the configured depth cap."""


class VariantMismatch(RepellerError):
    """Operation only defined for the other construction variant."""


class NoConvergence(RepellerError):
    """The safeguarded root finder hit its iteration cap (indicates a bug)."""


class AtSingularPoint(RepellerError):
    """Derivative requested exactly at the cut point without a side flag."""


class ConstructionFailed(RepellerError):
    """A branch could not be assembled within the allowed shrink steps."""

    def __init__(self, n: int, reason: str):
        self.n = n
        self.reason = reason
        super().__init__(f"branch {n}: {reason}")
