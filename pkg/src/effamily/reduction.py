"""The reduction theta_1 of R^omega / l_1 into E_f, truncated to finitely many coordinates.

Coordinate n of x is replicated as floor(|x_n| / f(c_n)) copies of
c_n = 2^-(n+1), placed at indices <0, n, k> for x_n >= 0 and <1, n, k> for
x_n < 0. The block of n then contributes |x_n - xhat_n| up to one copy per
sign, which gives the sandwich

    |x_n - xhat_n| - 2^(1-n) < sum over the block of f(|y_m - yhat_m|) < |x_n - xhat_n| + 2^(1-n).
"""

import logging
import math
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from typing import Any

from effamily.certify.protocol import CertReport, report_fail, report_pass
from effamily.errors import DepthExceeded, InvalidParams, SeqInvalid
from effamily.params import Params, RationalLike, format_rational, parse_rational
from effamily.phi import PhiFunction, eval_f

logger = logging.getLogger(__name__)

SparseUnitVec = dict[int, Fraction]
"""Finite-support vector in [0,1]^omega; absent indices are 0."""

RealVec = Sequence[Fraction]


def pair_index(i: int, n: int, k: int) -> int:
    """<i, n, k> = 2 * ((n + k)(n + k + 1)/2 + k) + i.

    Raises:
        ValueError: If i is not 0 or 1, or n or k is negative.
    """
    if i not in (0, 1) or n < 0 or k < 0:
        msg = f"pair_index needs i in {{0, 1}} and n, k >= 0, got ({i}, {n}, {k})"
        raise ValueError(msg)
    return 2 * ((n + k) * (n + k + 1) // 2 + k) + i


def unpair_index(m: int) -> tuple[int, int, int]:
    """Inverse of `pair_index`.

    Raises:
        ValueError: If m is negative.
    """
    if m < 0:
        msg = f"unpair_index needs m >= 0, got {m}"
        raise ValueError(msg)
    i, c = m % 2, m // 2
    w = (math.isqrt(8 * c + 1) - 1) // 2
    k = c - w * (w + 1) // 2
    return i, w - k, k


def _require_params(phi: PhiFunction, params: Params) -> None:
    if phi.params != params:
        msg = "params do not match the phi function they are used with"
        raise InvalidParams(msg)


def choose_cn(phi: PhiFunction, params: Params, n: int) -> Fraction:
    """c_n = 2^-(n+1), after checking 0 < f(c_n) < 2^-n exactly.

    Raises:
        DepthExceeded: If n + 1 > depth of phi.
        SeqInvalid: If f(c_n) falls outside (0, 2^-n), which a valid phi never does.
    """
    _require_params(phi, params)
    if n < 0 or n + 1 > phi.depth:
        msg = f"c_{n} = 2^-{n + 1} needs depth >= {n + 1}, got {phi.depth}"
        raise DepthExceeded(msg, n=n, depth=phi.depth)
    c = Fraction(1, 2 ** (n + 1))
    f_c = eval_f(phi, c)
    if not 0 < f_c < Fraction(1, 2**n):
        msg = f"f(c_{n}) = {format_rational(f_c)} is outside (0, 2^-{n})"
        raise SeqInvalid(msg, n=n)
    return c


def theta1(x: RealVec, phi: PhiFunction, params: Params) -> SparseUnitVec:
    """Image of the truncated vector `x` (coordinates n < len(x)).

    Raises:
        DepthExceeded: If len(x) > depth - 1.
    """
    _require_params(phi, params)
    if len(x) > phi.depth - 1:
        msg = f"theta_1 takes at most depth - 1 = {phi.depth - 1} coordinates, got {len(x)}"
        raise DepthExceeded(msg, n=len(x), depth=phi.depth)
    y: SparseUnitVec = {}
    for n, x_n in enumerate(x):
        c = choose_cn(phi, params, n)
        copies = math.floor(abs(x_n) / eval_f(phi, c))
        sign = 0 if x_n >= 0 else 1
        for k in range(copies):
            y[pair_index(sign, n, k)] = c
    return y


def _differences(y: Mapping[int, Fraction], yhat: Mapping[int, Fraction]) -> Iterable[tuple[int, Fraction]]:
    for m in y.keys() | yhat.keys():
        d = abs(y.get(m, Fraction(0)) - yhat.get(m, Fraction(0)))
        if d:
            yield m, d


def f_sum(y: Mapping[int, Fraction], yhat: Mapping[int, Fraction], phi: PhiFunction, params: Params) -> Fraction:
    """Exact sum of f(|y_m - yhat_m|) over the union of supports.

    Raises:
        BelowResolution: If some difference lies in (0, 2^-N).
    """
    _require_params(phi, params)
    counts = Counter(d for _, d in _differences(y, yhat))
    return sum((count * eval_f(phi, d) for d, count in counts.items()), Fraction(0))


def l1_distance(x: RealVec, xhat: RealVec) -> Fraction:
    """sum |x_n - xhat_n|, the shorter vector padded with zeros."""
    return sum((abs(a - b) for a, b in zip(*_padded(x, xhat), strict=True)), Fraction(0))


def _padded(x: RealVec, xhat: RealVec) -> tuple[list[Fraction], list[Fraction]]:
    length = max(len(x), len(xhat))
    zero = Fraction(0)
    return [*x, *[zero] * (length - len(x))], [*xhat, *[zero] * (length - len(xhat))]


def block_sums(x: RealVec, xhat: RealVec, phi: PhiFunction, params: Params) -> list[Fraction]:
    """Per coordinate n, the sum of f(|y_m - yhat_m|) over m = <i, n, k>."""
    x_full, xhat_full = _padded(x, xhat)
    y, yhat = theta1(x_full, phi, params), theta1(xhat_full, phi, params)
    # theta_1 places the same value on a whole block, so count before evaluating f
    counts = Counter((unpair_index(m)[1], d) for m, d in _differences(y, yhat))
    sums = [Fraction(0)] * len(x_full)
    for (n, d), count in counts.items():
        sums[n] += count * eval_f(phi, d)
    return sums


def verify_theta1_bounds(x: RealVec, xhat: RealVec, phi: PhiFunction, params: Params) -> CertReport:
    """Check the strict per-coordinate sandwich with margin 2^(1-n).

    A vector shorter than the other is padded with zeros.

    Raises:
        DepthExceeded: If the vectors need coordinates beyond depth - 1.
    """
    name = "theta1_bounds"
    x_full, xhat_full = _padded(x, xhat)
    sums = block_sums(x_full, xhat_full, phi, params)
    for n, (a, b, s) in enumerate(zip(x_full, xhat_full, sums, strict=True)):
        distance = abs(a - b)
        margin = Fraction(2, 2**n)
        if not distance - margin < s < distance + margin:
            return report_fail(
                name,
                n + 1,
                {"n": n, "blockSum": format_rational(s), "distance": format_rational(distance), "margin": format_rational(margin)},
            )
    logger.debug("Sandwich holds on %d coordinates", len(sums))
    return report_pass(name, len(sums), blockSums=[format_rational(s) for s in sums])


def parse_real_vec(text: str | Iterable[RationalLike]) -> tuple[Fraction, ...]:
    """Parse "3/4,-1/2,0" (or an iterable of rationals) into a RealVec.

    Raises:
        RationalFormatError: On a malformed entry.
    """
    if isinstance(text, str):
        entries: Iterable[RationalLike] = [e for e in text.split(",") if e.strip()]
    else:
        entries = text
    return tuple(parse_rational(e) for e in entries)


def sparse_to_dict(y: Mapping[int, Fraction]) -> dict[str, str]:
    """{"m": "p/q"} with decimal string keys."""
    return {str(m): format_rational(v) for m, v in sorted(y.items())}


def sparse_from_dict(data: Mapping[str, Any]) -> SparseUnitVec:
    """Inverse of `sparse_to_dict`."""
    return {int(m): parse_rational(v) for m, v in data.items()}
