"""Exception hierarchy shared by the whole package.

Every error carries a ``category`` used by the service layer and the CLI to
map failures onto HTTP statuses and exit codes:

* ``validation``: the inputs violate a precondition or an invariant.
* ``infeasible``: the inputs are well formed but the requested guarantee
  cannot be met (budget exceeded, infinite cost).
* ``numerical``: a solver failed or an internal cross-check did not hold.
"""

from __future__ import annotations


class ControlError(Exception):
    """Base class for all package errors."""

    category: str = "numerical"

    def __init__(self, message: str, *, field: str | None = None,
                 category: str | None = None, **details):
        super().__init__(message)
        self.field = field
        if category is not None:
            self.category = category
        self.details = details


class InputError(ControlError):
    category = "validation"


class InfeasibleError(ControlError):
    category = "infeasible"


class NumericalError(ControlError):
    category = "numerical"


# --- input / precondition violations ---------------------------------------

class NonFinite(InputError):
    """A matrix or vector contains NaN or infinite entries."""


class NonSymmetric(InputError):
    """A matrix required to be symmetric is not, beyond tolerance."""


class DimensionMismatch(InputError):
    """Operands have incompatible shapes."""


class NotHurwitz(InputError):
    """A matrix required to be Hurwitz has an eigenvalue with Re >= 0."""


class NotStabilizable(InputError):
    """The pair (A, B) fails the eigenvalue rank (PBH) stabilizability test."""


class NotPositiveDefinite(InputError):
    """A weighting matrix required to be positive definite is not."""


class NotPositiveSemidefinite(InputError):
    """A weighting matrix required to be positive semi-definite is not."""


class InvalidGraph(InputError):
    """Self-loop, duplicate edge, or node index out of range."""


class NotConnected(InputError):
    """The graph has more than one connected component."""


class InvalidSpectralData(InputError):
    """Spectral inputs violate 0 < lambda_2 <= lambda_N."""


class COutOfRange(InputError):
    """The coupling scalar lies outside the admissible interval."""


class StepTooLarge(InputError):
    """Integration step exceeds the stability-safe bound (or horizon < dt)."""


class ConfigInvalid(InputError):
    """A problem configuration failed validation."""


# --- infeasibility outcomes --------------------------------------------------

class BudgetInfeasible(InfeasibleError):
    """The guaranteed cost bound does not fit under the requested budget."""


class CostInfinite(InfeasibleError):
    """A network mode is unstable, so the quadratic cost diverges."""


# --- numerical failures -------------------------------------------------------

class IllConditioned(NumericalError):
    """A dense solve succeeded formally but failed its residual checks."""


class InequalityNotStrict(NumericalError):
    """The designed solution does not satisfy its strict matrix inequality
    with the required margin (epsilon too small for the tolerance profile)."""
