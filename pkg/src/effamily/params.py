"""Construction parameters and the exact rational wire format.

Every real quantity in the toolkit is a `fractions.Fraction`. The exponents
are integers, so lambda = 2^(alpha - beta) and every f-value at a dyadic
point stay exact.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from effamily.errors import InvalidDelta, InvalidExponents, InvalidParams, RationalFormatError

_RATIONAL_RE = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")

RationalLike = Fraction | int | str


@dataclass(frozen=True)
class Params:
    """Validated construction parameters.

    Attributes:
        alpha: Integer exponent, 1 <= alpha.
        beta: Integer exponent, alpha < beta.
        delta: Rational in (0, 1).
        lam: lambda = 2^(alpha - beta), an exact dyadic rational in (0, 1).
    """

    alpha: int
    beta: int
    delta: Fraction
    lam: Fraction

    @property
    def delta_prime(self) -> Fraction:
        """Per-doubling decay factor lambda + (1 - lambda) * delta."""
        return delta_prime(self)


def parse_rational(value: RationalLike) -> Fraction:
    """Parse "p/q" (or "p") into a canonical Fraction.

    Floats and decimal strings are rejected: nothing inexact enters the toolkit.

    Raises:
        RationalFormatError: On malformed text, a zero denominator, or a float.
    """
    if isinstance(value, bool):
        msg = f"Not a rational: {value!r}"
        raise RationalFormatError(msg, value=value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        msg = f"Not a rational: {value!r}"
        raise RationalFormatError(msg, value=value)
    match = _RATIONAL_RE.match(value)
    if match is None:
        msg = f"Expected a rational of the form 'p/q', got {value!r}"
        raise RationalFormatError(msg, value=value)
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        msg = f"Zero denominator in {value!r}"
        raise RationalFormatError(msg, value=value)
    return Fraction(numerator, denominator)


def format_rational(value: Fraction | int) -> str:
    """Render a rational as "p/q" in lowest terms ("3/4", "-1/2", "0/1", "5/1")."""
    q = Fraction(value)
    return f"{q.numerator}/{q.denominator}"


def make_params(alpha: int, beta: int, delta: RationalLike) -> Params:
    """Validate exponents and delta and derive lambda exactly.

    Args:
        alpha: Positive integer exponent.
        beta: Integer exponent strictly greater than alpha.
        delta: Rational in (0, 1), as a Fraction, int, or "p/q" string.

    Returns:
        Params with lam = 2^(alpha - beta).

    Raises:
        InvalidExponents: If not 1 <= alpha < beta (or either is not an integer).
        InvalidDelta: If delta is not in (0, 1).

    Example:
        ```python
        make_params(1, 2, "1/2")  # Params(alpha=1, beta=2, delta=1/2, lam=1/2)
        ```
    """
    for name, value in (("alpha", alpha), ("beta", beta)):
        if isinstance(value, bool) or not isinstance(value, int):
            msg = f"{name} must be an integer, got {value!r}"
            raise InvalidExponents(msg, alpha=alpha, beta=beta)
    if not 1 <= alpha < beta:
        msg = f"Exponents must satisfy 1 <= alpha < beta, got alpha={alpha}, beta={beta}"
        raise InvalidExponents(msg, alpha=alpha, beta=beta)
    try:
        d = parse_rational(delta)
    except RationalFormatError as e:
        raise InvalidDelta(e.message, delta=delta) from e
    if not 0 < d < 1:
        msg = f"delta must lie in (0, 1), got {format_rational(d)}"
        raise InvalidDelta(msg, delta=format_rational(d))
    return Params(alpha=alpha, beta=beta, delta=d, lam=Fraction(1, 2 ** (beta - alpha)))


def delta_prime(params: Params) -> Fraction:
    """lambda + (1 - lambda) * delta, which is < 1 for every valid Params."""
    return params.lam + (1 - params.lam) * params.delta


def params_to_dict(params: Params) -> dict[str, Any]:
    """JSON form: {"alpha": int, "beta": int, "delta": "p/q", "lambda": "p/q"}."""
    return {
        "alpha": params.alpha,
        "beta": params.beta,
        "delta": format_rational(params.delta),
        "lambda": format_rational(params.lam),
    }


def params_from_dict(data: dict[str, Any]) -> Params:
    """Rebuild Params through `make_params`; a stored lambda must agree.

    Raises:
        InvalidParams: If fields are missing or lambda disagrees with 2^(alpha-beta).
    """
    try:
        params = make_params(data["alpha"], data["beta"], data["delta"])
    except KeyError as e:
        msg = f"Params missing field {e.args[0]!r}"
        raise InvalidParams(msg) from e
    stored = data.get("lambda")
    if stored is not None and parse_rational(stored) != params.lam:
        msg = f"Stored lambda {stored} disagrees with 2^(alpha-beta) = {format_rational(params.lam)}"
        raise InvalidParams(msg, stored=stored)
    return params
