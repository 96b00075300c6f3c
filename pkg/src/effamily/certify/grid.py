"""Certificates that E_f is an equivalence relation and that (A1) holds.

The constants come from closed formulas in phi(1), phi(1/4) and delta:

    C   = max{1, 4^alpha phi(1) / phi(1/4), 4^alpha / (delta phi(1/4))}
    eps = (1/2) min{1 / phi(1), delta phi(1/4) / phi(1), delta^2 phi(1/4)}

and are then confirmed on a dyadic grid with exact arithmetic. A failed grid
inequality raises `GridViolation`: the constants are proven, so a failure
means the construction or the evaluator is wrong.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from effamily.certify.protocol import CertReport, report_fail, report_pass
from effamily.certify.utils import common_denominator, grid_numerators, grid_point, least_grid_numerator_above
from effamily.errors import BelowResolution, GridViolation, SeqInvalid
from effamily.params import format_rational
from effamily.phi import PhiFunction, eval_f, eval_phi
from effamily.sequence import max_product_term

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class R2Certificate:
    """Quasi-subadditivity constant C, confirmed on the grid of spacing 2^-grid_depth."""

    C: Fraction
    grid_depth: int
    depth: int
    pairs_checked: int

    @property
    def passed(self) -> bool:
        return self.C >= 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "R2",
            "C": format_rational(self.C),
            "gridDepth": self.grid_depth,
            "depth": self.depth,
            "pairsChecked": self.pairs_checked,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class A1Certificate:
    """Threshold epsilon (with M = 0), confirmed on the grid for 1 <= n <= n_max."""

    epsilon: Fraction
    M: int
    grid_depth: int
    n_max: int
    depth: int
    pairs_covered: int

    @property
    def passed(self) -> bool:
        return self.epsilon > 0 and self.M == 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "A1",
            "epsilon": format_rational(self.epsilon),
            "M": self.M,
            "gridDepth": self.grid_depth,
            "nMax": self.n_max,
            "depth": self.depth,
            "pairsCovered": self.pairs_covered,
            "passed": self.passed,
        }


def check_phi_hypothesis(phi: PhiFunction) -> CertReport:
    """Check phi(1/2^n) >= max_{1<=i<=n-1} delta phi(1/2^i) phi(1/2^(n-i)) for 2 <= n <= N.

    The side hypotheses are reported too: phi(1/2) > 0 (n = 1) and node values
    nonincreasing in n, which makes the affine extension nondecreasing in x.
    """
    name = "phi_hypothesis"
    values = phi.seq.values[: phi.depth + 1]
    delta = phi.params.delta
    checked = 1
    if phi.depth < 1 or values[1] <= 0:
        got = format_rational(values[1]) if phi.depth >= 1 else None
        return report_fail(name, checked, {"n": 1, "reason": "phi_half_positive", "lhs": got, "rhs": "0/1"})
    for n in range(1, len(values)):
        checked += 1
        if values[n] > values[n - 1]:
            return report_fail(name, checked, {"n": n, "reason": "increase", "lhs": format_rational(values[n]), "rhs": format_rational(values[n - 1])})
        if n >= 2:
            bound = max_product_term(values, n, delta)
            if values[n] < bound:
                return report_fail(name, checked, {"n": n, "reason": "lower_bound", "lhs": format_rational(values[n]), "rhs": format_rational(bound)})
    return report_pass(name, checked, depth=phi.depth)


def check_monotone(phi: PhiFunction, grid_depth: int) -> CertReport:
    """Check that phi and f are nondecreasing along the grid of spacing 2^-grid_depth."""
    name = "monotone"
    ks = grid_numerators(phi.depth, grid_depth)[1:]
    previous_phi: Fraction | None = None
    previous_f: Fraction | None = None
    for checked, k in enumerate(ks, start=1):
        x = grid_point(k, grid_depth)
        phi_x = eval_phi(phi, x)
        f_x = eval_f(phi, x)
        if previous_phi is not None and previous_f is not None and (phi_x < previous_phi or f_x < previous_f):
            return report_fail(name, checked, {"x": format_rational(x), "phi": format_rational(phi_x), "f": format_rational(f_x)})
        previous_phi, previous_f = phi_x, f_x
    return report_pass(name, len(ks), gridDepth=grid_depth)


def r2_constant(phi: PhiFunction) -> Fraction:
    """C = max{1, 4^alpha phi(1)/phi(1/4), 4^alpha/(delta phi(1/4))}."""
    four_alpha = Fraction(4**phi.params.alpha)
    phi_one, phi_quarter = phi.node(0), phi.node(2)
    return max(Fraction(1), four_alpha * phi_one / phi_quarter, four_alpha / (phi.params.delta * phi_quarter))


def a1_epsilon(phi: PhiFunction) -> Fraction:
    """Half of min{1/phi(1), delta phi(1/4)/phi(1), delta^2 phi(1/4)}."""
    delta = phi.params.delta
    phi_one, phi_quarter = phi.node(0), phi.node(2)
    return min(1 / phi_one, delta * phi_quarter / phi_one, delta**2 * phi_quarter) / 2


def _require_certifiable(phi: PhiFunction) -> None:
    if phi.depth < 2:
        msg = f"Certificates need phi(1/4), but depth is {phi.depth}"
        raise BelowResolution(msg, depth=phi.depth)
    report = check_phi_hypothesis(phi)
    if not report.passed:
        msg = f"phi fails its hypothesis at n={report.first_index}"
        raise SeqInvalid(msg, violation=report.violation)


def certify_R2(phi: PhiFunction, grid_depth: int) -> R2Certificate:  # noqa: N802
    """Compute C and confirm both (R2) inequalities on every admissible grid pair.

    For all grid x, y in [2^-N, 1] ∪ {0} with x + y <= 1:
    f(x+y) <= C (f(x) + f(y)) and f(x) <= C (f(x+y) + f(y)).

    Raises:
        BelowResolution: If depth < 2.
        SeqInvalid: If phi fails `check_phi_hypothesis`.
        GridViolation: On the first failing pair in lexicographic (x, y) order.
    """
    _require_certifiable(phi)
    c = r2_constant(phi)
    ks = grid_numerators(phi.depth, grid_depth)
    top = 2**grid_depth
    f_by_k = {k: eval_f(phi, grid_point(k, grid_depth)) for k in ks}
    scaled, _ = common_denominator([f_by_k[k] for k in ks])
    # Indexed by numerator; only admissible numerators are ever read.
    lhs_side = [0] * (top + 1)
    rhs_side = [0] * (top + 1)
    for k, v in zip(ks, scaled, strict=True):
        lhs_side[k] = v * c.denominator
        rhs_side[k] = v * c.numerator

    pairs = 0
    for a in ks:
        for b in ks:
            s = a + b
            if s > top:
                break
            pairs += 1
            if lhs_side[s] > rhs_side[a] + rhs_side[b] or lhs_side[a] > rhs_side[s] + rhs_side[b]:
                x, y = grid_point(a, grid_depth), grid_point(b, grid_depth)
                msg = f"(R2) fails at x={format_rational(x)}, y={format_rational(y)} with C={format_rational(c)}"
                raise GridViolation(msg, x=format_rational(x), y=format_rational(y))
    logger.info("(R2) certified: C=%s on %d pairs (grid depth %d)", format_rational(c), pairs, grid_depth)
    return R2Certificate(C=c, grid_depth=grid_depth, depth=phi.depth, pairs_checked=pairs)


def certify_A1(phi: PhiFunction, grid_depth: int, n_max: int) -> A1Certificate:  # noqa: N802
    """Set epsilon and confirm phi(x) <= eps phi(y) phi(1/2^n) => x <= y / 2^(n+1) on the grid.

    Covers all grid x, y in [2^-N, 1] ∪ {0} and 1 <= n <= n_max. For fixed
    (y, n) premise and conclusion are both downward closed in x once phi is
    nondecreasing on the grid (checked first), so only the least grid x above
    y / 2^(n+1) has to be tested. x = 0 always satisfies the conclusion. For
    y = 0, phi(0) is bounded above by phi at the smallest positive grid point.

    Raises:
        BelowResolution: If depth < 2 or n_max > depth.
        SeqInvalid: If phi fails its hypothesis or is not monotone on the grid.
        GridViolation: On the first failing (y, n), reported with its x.
    """
    _require_certifiable(phi)
    if n_max > phi.depth:
        msg = f"phi(1/2^n) for n up to {n_max} needs depth >= {n_max}, got {phi.depth}"
        raise BelowResolution(msg, n_max=n_max, depth=phi.depth)
    monotone = check_monotone(phi, grid_depth)
    if not monotone.passed:
        msg = "phi is not monotone on the grid"
        raise SeqInvalid(msg, violation=monotone.violation)

    eps = a1_epsilon(phi)
    ks = grid_numerators(phi.depth, grid_depth)
    k_min = ks[1]
    top = 2**grid_depth
    phi_by_k = {k: eval_phi(phi, grid_point(k, grid_depth)) for k in ks[1:]}
    phi_by_k[0] = phi_by_k[k_min]

    for k_y in ks:
        y = grid_point(k_y, grid_depth)
        for n in range(1, n_max + 1):
            k_x = least_grid_numerator_above(y / 2 ** (n + 1), grid_depth, k_min)
            if k_x > top:
                continue
            if phi_by_k[k_x] <= eps * phi_by_k[k_y] * phi.node(n):
                x = grid_point(k_x, grid_depth)
                msg = f"(A1) fails at x={format_rational(x)}, y={format_rational(y)}, n={n} with eps={format_rational(eps)}"
                raise GridViolation(msg, x=format_rational(x), y=format_rational(y), n=n)
    covered = len(ks) * len(ks) * n_max
    logger.info("(A1) certified: eps=%s, n <= %d (grid depth %d)", format_rational(eps), n_max, grid_depth)
    return A1Certificate(epsilon=eps, M=0, grid_depth=grid_depth, n_max=n_max, depth=phi.depth, pairs_covered=covered)
