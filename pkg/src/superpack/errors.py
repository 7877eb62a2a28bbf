"""Exception types shared across modules."""


class DomainError(ValueError):
    """An argument lies outside the region where a formula is defined."""


class SolverError(RuntimeError):
    """A Newton-type iteration failed; ``reason`` is a short machine tag.

    Tags: ``max_iterations``, ``singular_jacobian``, ``left_region``,
    ``kink``, ``line_search``, ``nonpositive_det``.
    """

    def __init__(self, reason: str, message: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {message}" if message else reason)


class KinkError(SolverError):
    """Some coordinate of B u is (numerically) zero while p < 2."""

    def __init__(self, message: str = ""):
        super().__init__("kink", message)
