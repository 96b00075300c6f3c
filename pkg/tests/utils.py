import random
from fractions import Fraction

from effamily.params import Params, make_params
from effamily.phi import PhiFunction, build_phi
from effamily.sequence import DyadicSeq, build_seq


def s_params() -> Params:
    """alpha=1, beta=2, delta=1/2: the l_1 to l_2 case."""
    return make_params(1, 2, "1/2")


def wide_params() -> Params:
    return make_params(2, 4, "1/4")


def constant_seq(params: Params, depth: int) -> DyadicSeq:
    """u == 1 up to `depth` (all HOLD)."""
    return build_seq(params, "H" * (depth - 1))


def update_seq(params: Params, depth: int) -> DyadicSeq:
    """All UPDATE up to `depth`; for s_params this is u_n = (3/4)^(n-1)."""
    return build_seq(params, "U" * (depth - 1))


def constant_phi(depth: int = 10) -> PhiFunction:
    return build_phi(constant_seq(s_params(), depth))


def update_phi(depth: int = 12) -> PhiFunction:
    return build_phi(update_seq(s_params(), depth))


def random_mask(rng: random.Random, depth: int) -> str:
    return "".join(rng.choice("HU") for _ in range(depth - 1))


def brute_force_next(values: list[Fraction], params: Params) -> Fraction:
    """UPDATE step with the max taken over every i, not the symmetric half."""
    n = len(values)
    best = max(params.delta * values[i] * values[n - i] for i in range(1, n))
    return params.lam * values[-1] + (1 - params.lam) * best


def interpolate(a: Fraction, fa: Fraction, b: Fraction, fb: Fraction, x: Fraction) -> Fraction:
    """Straight line through (a, fa) and (b, fb), evaluated at x."""
    return fa + (x - a) * (fb - fa) / (b - a)
