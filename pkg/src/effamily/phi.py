"""Piecewise-affine phi built from a dyadic sequence, and f(x) = x^alpha * phi(x).

phi takes the value u_n at 1/2^n and is affine on every [1/2^(n+1), 1/2^n]
with n < N. Below 2^-N nothing is determined at finite depth, so evaluation
there raises `BelowResolution`; the single exception is f(0) = 0.
"""

from dataclasses import dataclass
from fractions import Fraction

from effamily.errors import BelowResolution, OutOfDomain, SeqInvalid
from effamily.params import Params, format_rational
from effamily.sequence import DyadicSeq, verify_un_lemma

ZERO = Fraction(0)


@dataclass(frozen=True)
class PhiFunction:
    """phi determined by `seq` at the nodes 1/2^n, n <= depth."""

    seq: DyadicSeq
    depth: int

    @property
    def params(self) -> Params:
        return self.seq.params

    @property
    def resolution(self) -> Fraction:
        """2^-N, the smallest point where phi is defined."""
        return Fraction(1, 2**self.depth)

    def node(self, n: int) -> Fraction:
        """phi(1/2^n) = u_n.

        Raises:
            BelowResolution: If n > depth.
        """
        if not 0 <= n <= self.depth:
            msg = f"phi(1/2^{n}) is not determined at depth {self.depth}"
            raise BelowResolution(msg, n=n, depth=self.depth)
        return self.seq.values[n]

    def f_node(self, n: int) -> Fraction:
        """f(1/2^n) = u_n / 2^(n*alpha)."""
        return self.node(n) / 2 ** (n * self.params.alpha)


def build_phi(seq: DyadicSeq) -> PhiFunction:
    """The piecewise-affine extension of `seq` to [2^-N, 1].

    Raises:
        SeqInvalid: If `seq` fails the u_n lemma recheck.
    """
    report = verify_un_lemma(seq)
    if not report.passed:
        msg = f"Sequence fails the u_n lemma at n={report.first_index}"
        raise SeqInvalid(msg, violation=report.violation)
    return PhiFunction(seq=seq, depth=seq.depth)


def dyadic_band(x: Fraction) -> int:
    """The n >= 0 with 1/2^(n+1) < x <= 1/2^n, for 0 < x <= 1."""
    # 2^n <= 1/x  <=>  2^n <= floor(q/p)
    return (x.denominator // x.numerator).bit_length() - 1


def eval_phi(phi: PhiFunction, x: Fraction | int) -> Fraction:
    """Exact value of phi at x in [2^-N, 1].

    Raises:
        OutOfDomain: If x < 0 or x > 1.
        BelowResolution: If 0 <= x < 2^-N.
    """
    x = Fraction(x)
    if x < 0 or x > 1:
        msg = f"phi is defined on [0, 1], got x={format_rational(x)}"
        raise OutOfDomain(msg, x=format_rational(x))
    if x < phi.resolution:
        msg = f"x={format_rational(x)} is below the resolution 2^-{phi.depth}"
        raise BelowResolution(msg, x=format_rational(x), depth=phi.depth)
    n = dyadic_band(x)
    upper = phi.seq.values[n]
    scaled = x * 2 ** (n + 1)  # in (1, 2]
    if scaled == 2:
        return upper
    lower = phi.seq.values[n + 1]
    return lower + (scaled - 1) * (upper - lower)


def eval_f(phi: PhiFunction, x: Fraction | int) -> Fraction:
    """f(x) = x^alpha * phi(x), with f(0) = 0 exactly.

    Raises:
        OutOfDomain: If x < 0 or x > 1.
        BelowResolution: If 0 < x < 2^-N.
    """
    x = Fraction(x)
    if x == 0:
        return ZERO
    return x**phi.params.alpha * eval_phi(phi, x)
