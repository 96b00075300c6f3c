"""Exception hierarchy for the ef-family toolkit.

Operations that construct objects raise these. Operations that *certify*
inequalities never raise for a failed inequality; they return a
`CertReport` instead (see `effamily.certify.protocol`).
"""

from typing import Any


class EFError(Exception):
    """Base class for every error raised by the toolkit.

    Keyword arguments passed to the constructor are kept as `details` and
    surface in `to_dict()`, which the CLI prints as machine-readable JSON.
    """

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        """Machine-readable form: `{"error": <class>, "message": ..., **details}`."""
        return {"error": type(self).__name__, "message": self.message, **{k: str(v) for k, v in self.details.items()}}


class RationalFormatError(EFError, ValueError):
    """A rational string is not of the form "p/q" or "p"."""


class InvalidParams(EFError, ValueError):
    """Construction parameters violate their invariants."""


class InvalidExponents(InvalidParams):
    """Exponents are not integers with 1 <= alpha < beta."""


class InvalidDelta(InvalidParams):
    """delta is not a rational strictly between 0 and 1."""


class SeqInvalid(EFError, ValueError):
    """A sequence fails the u_n lemma and cannot back a phi function."""


class OutOfDomain(EFError, ValueError):
    """Evaluation point lies outside [0, 1]."""


class BelowResolution(EFError, ValueError):
    """Evaluation point lies in (0, 2^-N): phi is not determined there at depth N."""


class DepthExceeded(EFError, ValueError):
    """A coordinate needs a dyadic node deeper than the phi function provides."""


class GridViolation(EFError):
    """An exhaustive grid check found a counterexample."""


class NotWellDefined(EFError):
    """u_n - lambda*u_{n-1} left [0, 1], so kappa^beta is not defined."""


class SearchCapExceeded(EFError):
    """A witness search ran past its cap without finding an index."""


class LevelUnavailable(EFError, ValueError):
    """The requested string is longer than the built tree."""


class NotDistinct(EFError, ValueError):
    """Witnesses need two different strings."""


class ArchiveError(EFError):
    """An archive is malformed or its payload fails re-validation."""
