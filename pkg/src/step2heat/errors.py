"""Exception hierarchy for step2heat.

Validation failures derive from :class:`ValueError` and numerical failures from
:class:`RuntimeError`, so callers that only know the builtin types still catch
them. The command line tool maps the two families onto exit codes 2 and 3.
"""


class Step2HeatError(Exception):
    """Base class for every error raised by the library."""


class SpecParseError(Step2HeatError, ValueError):
    """The group document is not well-formed JSON of the expected shape."""


class SpecValidationError(Step2HeatError, ValueError):
    """A group spec violates one of its structural invariants.

    Attributes:
        invariant: Short name of the violated invariant, one of ``"dimension"``,
            ``"skew-symmetry"``, ``"linear-independence"`` or ``"nondegenerate"``.
    """

    def __init__(self, invariant: str, message: str) -> None:
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class NotHeisenbergTypeError(Step2HeatError, ValueError):
    """An operation restricted to groups of Heisenberg type got another group."""


class PoleError(Step2HeatError, ValueError):
    """A Green function was evaluated at its pole."""


class KalmanError(Step2HeatError, ValueError):
    """The covariance K(t) of an Ornstein-Uhlenbeck system is not positive definite."""


class ConvergenceError(Step2HeatError, RuntimeError):
    """A numerical integral did not reach its tolerance."""


class TruncationError(ConvergenceError):
    """An explicit truncation radius leaves a tail above the tolerance."""


class SmallTimeError(ConvergenceError):
    """The oscillation at this time needs more nodes than the configuration allows.

    Attributes:
        t_min: Smallest time resolvable with the configured node budget.
    """

    def __init__(self, t: float, t_min: float) -> None:
        super().__init__(
            f"time {t:.6g} is below the resolvable threshold t_min={t_min:.6g}; "
            "raise max_nodes_per_panel or evaluate at a larger time"
        )
        self.t = t
        self.t_min = t_min


class SpectralError(Step2HeatError, RuntimeError):
    """A matrix that is positive semidefinite by construction has a negative eigenvalue."""
