"""Exception hierarchy shared by all modules."""


class PermMomentsError(Exception):
    """Base class for every error raised by this package."""


class SizeLimitError(PermMomentsError):
    """A size cap was exceeded (partition enumeration, brute-force group order, ...)."""


class DomainError(PermMomentsError):
    """An evaluation point or coefficient grid violates a domain precondition."""


class OrderError(PermMomentsError):
    """Truncated-series order mismatch, or coefficient index beyond the truncation order."""


class TruncationError(PermMomentsError):
    """A certified truncation bound exceeds the requested tolerance."""


class PoleError(DomainError):
    """Gamma evaluated at (or too close to) a non-positive integer."""
