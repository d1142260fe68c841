"""Exception types shared across the package."""

from __future__ import annotations


class TdforgeError(Exception):
    """Base class for errors raised by this package."""


class SizeExceeded(TdforgeError):
    """A requested construction would materialize more vertices than the cap allows.

    Carries the exact total so callers can report it even when it is huge.
    """

    def __init__(self, total: int, cap: int, what: str = "construction"):
        self.total = total
        self.cap = cap
        super().__init__(f"{what} needs {total} vertices, cap is {cap}")


class ScheduleTooLarge(TdforgeError):
    """A genuine schedule value is too large to materialize as an integer.

    The doubly exponential height recursion leaves the representable range
    after a few levels (at k=1 the fourth height already has ~10^78 digits),
    so values past the guard cannot be held in memory at all.
    """


class StructureViolation(TdforgeError):
    """A structural invariant of the reflected-tree recursion failed.

    Raised by the matching construction when a spanning tree does not split
    the way every spanning tree provably must (for example when neither or
    both copy restrictions are connected).
    """


class HypothesisViolated(TdforgeError):
    """A lower-bound check was invoked on inputs outside its hypotheses."""


class CertificateContradiction(TdforgeError):
    """A verified certificate and a valid anchored decomposition disagree.

    This means a matching edge has neither endpoint in the hub bag, which the
    certificate construction rules out; reaching it indicates a bug, not bad
    input.
    """


class ReductionInvalid(TdforgeError):
    """The anchoring reduction produced an invalid decomposition.

    Only possible for toy schedules. Carries the validation report describing
    which condition broke and where.
    """

    def __init__(self, report):
        self.report = report
        super().__init__(f"reduction output is not a valid decomposition: {report}")


class HostNotSpanning(TdforgeError):
    """The induced host of the anchoring reduction is not a spanning tree.

    Cannot happen for instances built by this package; treated as an internal
    error rather than a user-facing failure mode.
    """


class CapExceeded(TdforgeError):
    """An exact-search routine was asked to exceed its instance-size cap."""

    def __init__(self, size: int, cap: int, what: str = "instance"):
        self.size = size
        self.cap = cap
        super().__init__(f"{what} has size {size}, exact search is capped at {cap}")
