"""The recursive dyadic sequence u_n = phi(1/2^n).

Starting from u_0 = u_1 = 1, each further term either holds the previous
value or applies the update

    u_n = lambda * u_{n-1} + (1 - lambda) * max_{1<=i<=n-1} delta * u_i * u_{n-i}.

Any mix of the two choices yields a sequence with

    u_{n-1} >= u_n >= max_{1<=i<=n-1} delta * u_i * u_{n-i},

which `verify_un_lemma` rechecks from the raw values alone.
"""

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import Any

from effamily.certify.protocol import CertReport, report_fail, report_pass
from effamily.errors import SeqInvalid
from effamily.params import Params, format_rational, params_from_dict, params_to_dict, parse_rational

logger = logging.getLogger(__name__)

ONE = Fraction(1)


class Choice(StrEnum):
    """Per-index branch of the recursion."""

    HOLD = "H"
    UPDATE = "U"


@dataclass(frozen=True)
class DyadicSeq:
    """Exact values u_0 ... u_N together with the mask that produced them.

    Attributes:
        values: u_0 ... u_N.
        mask: Choice for n = 2 ... N (so `len(mask) == len(values) - 2`).
        params: Parameters supplying lambda and delta.
    """

    values: tuple[Fraction, ...]
    mask: tuple[Choice, ...]
    params: Params

    @property
    def depth(self) -> int:
        """N, the index of the last term."""
        return len(self.values) - 1

    def __getitem__(self, n: int) -> Fraction:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


def initial_seq(params: Params) -> DyadicSeq:
    """The fixed start (u_0, u_1) = (1, 1) with an empty mask."""
    return DyadicSeq(values=(ONE, ONE), mask=(), params=params)


def max_product_term(values: Sequence[Fraction], n: int, delta: Fraction) -> Fraction:
    """max_{1<=i<=n-1} delta * u_i * u_{n-i}, scanning the symmetric half i <= n/2.

    `values` must hold at least u_0 ... u_{n-1}; n >= 2.
    """
    best = values[1] * values[n - 1]
    for i in range(2, n // 2 + 1):
        candidate = values[i] * values[n - i]
        if candidate > best:
            best = candidate
    return delta * best


def next_value(values: Sequence[Fraction], choice: Choice, params: Params) -> Fraction:
    """The term u_n for n = len(values) under `choice`."""
    n = len(values)
    previous = values[n - 1]
    if choice is Choice.HOLD:
        return previous
    return params.lam * previous + (1 - params.lam) * max_product_term(values, n, params.delta)


def extend_u(seq: DyadicSeq, choice: Choice) -> DyadicSeq:
    """Append u_{N+1} to `seq`: a copy of u_N for HOLD, the recursion for UPDATE."""
    choice = Choice(choice)
    value = next_value(seq.values, choice, seq.params)
    return DyadicSeq(values=(*seq.values, value), mask=(*seq.mask, choice), params=seq.params)


def parse_mask(mask: str | Iterable[str | Choice]) -> tuple[Choice, ...]:
    """Parse "HUHU", "HU HU" or an iterable of "H"/"U" entries.

    Raises:
        SeqInvalid: On any character other than H, U and whitespace.
    """
    entries = [c for c in mask if not c.isspace()] if isinstance(mask, str) else list(mask)
    try:
        return tuple(Choice(str(c).upper()) for c in entries)
    except ValueError as e:
        msg = f"Mask entries must be 'H' or 'U', got {mask!r}"
        raise SeqInvalid(msg) from e


def build_seq(params: Params, mask: str | Iterable[str | Choice]) -> DyadicSeq:
    """Iterate `extend_u` from (1, 1) along `mask` (entries for n = 2, 3, ...)."""
    choices = parse_mask(mask)
    values: list[Fraction] = [ONE, ONE]
    for choice in choices:
        values.append(next_value(values, choice, params))
    logger.debug("Built sequence of depth %d (%d updates)", len(values) - 1, sum(c is Choice.UPDATE for c in choices))
    return DyadicSeq(values=tuple(values), mask=choices, params=params)


def format_mask(mask: Iterable[Choice]) -> str:
    """Compact "HUUH" form of a mask."""
    return "".join(c.value for c in mask)


def verify_un_lemma(seq: DyadicSeq) -> CertReport:
    """Recheck u_0 = u_1 = 1 and, for 2 <= n <= N, u_{n-1} >= u_n >= max delta*u_i*u_{n-i}.

    The mask is ignored; only the raw values and delta are used. Also checks
    u_n > 0, which the lower bound implies for n >= 2 but is cheap to state.
    """
    name = "un_lemma"
    values = seq.values
    checked = 0
    for n in (0, 1):
        checked += 1
        if n >= len(values) or values[n] != ONE:
            got = format_rational(values[n]) if n < len(values) else None
            return report_fail(name, checked, {"n": n, "reason": "base", "lhs": got, "rhs": "1/1"})
    for n in range(2, len(values)):
        checked += 1
        u = values[n]
        if u > values[n - 1]:
            return report_fail(name, checked, {"n": n, "reason": "increase", "lhs": format_rational(u), "rhs": format_rational(values[n - 1])})
        bound = max_product_term(values, n, seq.params.delta)
        if u < bound:
            return report_fail(name, checked, {"n": n, "reason": "lower_bound", "lhs": format_rational(u), "rhs": format_rational(bound)})
        if u <= 0:
            return report_fail(name, checked, {"n": n, "reason": "nonpositive", "lhs": format_rational(u), "rhs": "0/1"})
    return report_pass(name, checked, depth=seq.depth)


def verify_mask_consistency(seq: DyadicSeq) -> CertReport:
    """Recompute every u_n from its prefix and mask entry and compare exactly."""
    name = "mask_consistency"
    if len(seq.mask) != max(len(seq.values) - 2, 0):
        return report_fail(name, 0, {"n": None, "reason": "mask_length", "lhs": str(len(seq.mask)), "rhs": str(len(seq.values) - 2)})
    checked = 0
    for n in range(2, len(seq.values)):
        checked += 1
        expected = next_value(seq.values[:n], seq.mask[n - 2], seq.params)
        if expected != seq.values[n]:
            return report_fail(
                name, checked, {"n": n, "reason": "recomputed", "lhs": format_rational(seq.values[n]), "rhs": format_rational(expected)}
            )
    return report_pass(name, checked)


def update_runs(mask: Sequence[Choice]) -> list[tuple[int, int]]:
    """Maximal UPDATE runs as inclusive index ranges (first_n, last_n), n counted from 2."""
    runs: list[tuple[int, int]] = []
    start: int | None = None
    for offset, choice in enumerate(mask):
        n = offset + 2
        if choice is Choice.UPDATE:
            if start is None:
                start = n
        elif start is not None:
            runs.append((start, n - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) + 1))
    return runs


def verify_doubling_decay(seq: DyadicSeq) -> CertReport:
    """Check u_{2n} <= delta' * u_n whenever every step in (n, 2n] is UPDATE and 2n <= N.

    Requires n >= 1. The bound follows from u_i * u_{2n-i} <= u_n, which holds
    on any sequence satisfying the u_n lemma.
    """
    name = "doubling_decay"
    factor = seq.params.delta_prime
    checked = 0
    for first, last in update_runs(seq.mask):
        # (n, 2n] inside [first, last]  <=>  n >= first - 1 and 2n <= last
        # a mask longer than the values is cut at N
        for n in range(max(first - 1, 1), min(last, len(seq.values) - 1) // 2 + 1):
            checked += 1
            lhs = seq.values[2 * n]
            rhs = factor * seq.values[n]
            if lhs > rhs:
                return report_fail(name, checked, {"n": n, "lhs": format_rational(lhs), "rhs": format_rational(rhs)})
    return report_pass(name, checked, deltaPrime=format_rational(factor))


def seq_to_dict(seq: DyadicSeq) -> dict[str, Any]:
    """JSON form {"params": ..., "mask": "HU...", "values": ["1/1", ...]}."""
    return {
        "params": params_to_dict(seq.params),
        "mask": format_mask(seq.mask),
        "values": [format_rational(v) for v in seq.values],
    }


def seq_from_dict(data: dict[str, Any]) -> DyadicSeq:
    """Rebuild a sequence from its JSON form without recomputing anything.

    Validation is the caller's business (`verify_un_lemma`,
    `verify_mask_consistency`); a tampered payload must load so it can be
    reported.

    Raises:
        SeqInvalid: If fields are missing or malformed.
    """
    try:
        params = params_from_dict(data["params"])
        values = tuple(parse_rational(v) for v in data["values"])
        mask = parse_mask(data.get("mask", ""))
    except KeyError as e:
        msg = f"Sequence payload missing field {e.args[0]!r}"
        raise SeqInvalid(msg) from e
    if len(values) < 2:
        msg = "A sequence needs at least u_0 and u_1"
        raise SeqInvalid(msg)
    return DyadicSeq(values=values, mask=mask, params=params)
