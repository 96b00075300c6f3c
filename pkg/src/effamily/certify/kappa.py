"""The kappa decomposition behind the reduction of E_f into R^omega / l_beta.

kappa itself is irrational in general, so every quantity is kept as a
beta-th power:

    kappa(1)^beta     = 1
    kappa(1/2^n)^beta = (u_n - lambda u_{n-1}) / 2^(n alpha)    (n >= 1)

Comparisons x <= y of nonnegative numbers are done as x^beta <= y^beta. The
constant L = max{A, 2, (delta 2^alpha)^(-1/beta)} is never materialized:
"S <= L R" is decided as "S <= A R or S <= 2 R or S^beta <= R^beta / (delta 2^alpha)".
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from effamily.canonical import canonical_hash
from effamily.certify.protocol import CertReport, report_fail, report_pass
from effamily.errors import NotWellDefined, SeqInvalid
from effamily.params import Params, format_rational, params_to_dict
from effamily.sequence import DyadicSeq, seq_to_dict, verify_un_lemma

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LConstant:
    """The three candidates whose maximum is L.

    Attributes:
        A: sum_{k>=0} 2^(-k alpha) = 1 / (1 - 2^-alpha).
        two: The constant 2.
        third_beta: (delta 2^alpha)^-1, the beta-th power of the third candidate.
        beta: Exponent used when comparing against the third candidate.
    """

    A: Fraction
    two: Fraction
    third_beta: Fraction
    beta: int

    @property
    def effective(self) -> Fraction | None:
        """L as a rational when the third candidate does not dominate, else None."""
        best = max(self.A, self.two)
        return best if self.third_beta <= best**self.beta else None

    def bounds(self, lhs: Fraction, rhs: Fraction) -> bool:
        """lhs <= L * rhs for nonnegative lhs, rhs."""
        return lhs <= self.A * rhs or lhs <= self.two * rhs or lhs**self.beta <= self.third_beta * rhs**self.beta

    def bounds_powers(self, lhs_beta: Fraction, rhs_beta: Fraction) -> bool:
        """lhs <= L * rhs given lhs^beta and rhs^beta."""
        return (
            lhs_beta <= self.A**self.beta * rhs_beta
            or lhs_beta <= self.two**self.beta * rhs_beta
            or lhs_beta <= self.third_beta * rhs_beta
        )

    def to_dict(self) -> dict[str, Any]:
        effective = self.effective
        return {
            "A": format_rational(self.A),
            "two": format_rational(self.two),
            "thirdBeta": format_rational(self.third_beta),
            "effective": format_rational(effective) if effective is not None else None,
        }


@dataclass(frozen=True)
class KappaSeq:
    """kappa(1/2^n)^beta for n = 0 ... N, tied to the sequence it came from."""

    kappa_beta: tuple[Fraction, ...]
    params: Params
    seq: DyadicSeq

    def f_node(self, n: int) -> Fraction:
        """f(1/2^n) = u_n / 2^(n alpha) from the source sequence."""
        return self.seq.values[n] / 2 ** (n * self.params.alpha)


def l_constant(params: Params) -> LConstant:
    """Candidates of L for `params`."""
    return LConstant(
        A=1 / (1 - Fraction(1, 2**params.alpha)),
        two=Fraction(2),
        third_beta=1 / (params.delta * 2**params.alpha),
        beta=params.beta,
    )


def kappa_beta_seq(seq: DyadicSeq, params: Params) -> KappaSeq:
    """Exact kappa^beta values for every node of `seq`.

    Raises:
        SeqInvalid: If `seq` fails the u_n lemma recheck.
        NotWellDefined: If some u_n - lambda u_{n-1} leaves [0, 1].
    """
    report = verify_un_lemma(seq)
    if not report.passed:
        msg = f"Sequence fails the u_n lemma at n={report.first_index}"
        raise SeqInvalid(msg, violation=report.violation)
    u = seq.values
    entries = [u[0]]
    for n in range(1, len(u)):
        difference = u[n] - params.lam * u[n - 1]
        if not 0 <= difference <= 1:
            msg = f"u_{n} - lambda u_{n - 1} = {format_rational(difference)} is outside [0, 1]"
            raise NotWellDefined(msg, n=n)
        entries.append(difference / 2 ** (n * params.alpha))
    return KappaSeq(kappa_beta=tuple(entries), params=params, seq=seq)


def verify_condition_i(kappa: KappaSeq) -> CertReport:
    """f(1/2^n) == sum_{i<=n} kappa^beta(1/2^i) / 2^((n-i) beta) for every n, exactly."""
    name = "condition_i"
    scale = Fraction(1, 2**kappa.params.beta)
    running = Fraction(0)
    for n, k_beta in enumerate(kappa.kappa_beta):
        running = running * scale + k_beta
        f_value = kappa.f_node(n)
        if running != f_value:
            return report_fail(name, n + 1, {"n": n, "lhs": format_rational(f_value), "rhs": format_rational(running)})
    return report_pass(name, len(kappa.kappa_beta))


def tail_bound(kappa: KappaSeq) -> Fraction:
    """Certified bound for sum_{i>N} kappa^beta(1/2^i): u_N 2^(-(N+1) alpha) / (1 - 2^-alpha)."""
    alpha = kappa.params.alpha
    depth = len(kappa.kappa_beta) - 1
    return kappa.seq.values[depth] / 2 ** ((depth + 1) * alpha) / (1 - Fraction(1, 2**alpha))


def verify_condition_ii(kappa: KappaSeq, constant: LConstant) -> CertReport:
    """sum_{i>=n} kappa^beta(1/2^i) <= L f(1/2^n) for n <= N, with the infinite tail bounded.

    The remainder n > N cannot be checked at finite depth and is recorded in
    the report detail.
    """
    name = "condition_ii"
    tail = tail_bound(kappa)
    suffix = tail
    checked = 0
    for n in range(len(kappa.kappa_beta) - 1, -1, -1):
        suffix += kappa.kappa_beta[n]
        checked += 1
        f_value = kappa.f_node(n)
        if not constant.bounds(suffix, f_value):
            return report_fail(name, checked, {"n": n, "lhs": format_rational(suffix), "rhs": format_rational(f_value)})
    return report_pass(name, checked, tail=format_rational(tail), uncheckedTail="n > N")


def verify_condition_iii(kappa: KappaSeq, constant: LConstant) -> CertReport:
    """kappa(1/2) <= L kappa(1) / 2, and kappa^beta(1/2^n) <= kappa^beta(1/2^(n-1)) / (delta 2^alpha) for n >= 2."""
    name = "condition_iii"
    values = kappa.kappa_beta
    if len(values) < 2:
        return report_pass(name, 0)
    half_beta = Fraction(1, 2**kappa.params.beta)
    if not constant.bounds_powers(values[1], values[0] * half_beta):
        return report_fail(name, 1, {"n": 1, "lhs": format_rational(values[1]), "rhs": format_rational(values[0] * half_beta)})
    step = 1 / (kappa.params.delta * 2**kappa.params.alpha)
    for n in range(2, len(values)):
        rhs = values[n - 1] * step
        if values[n] > rhs:
            return report_fail(name, n, {"n": n, "lhs": format_rational(values[n]), "rhs": format_rational(rhs)})
    return report_pass(name, len(values) - 1)


def verify_condition_iii_direct(kappa: KappaSeq, constant: LConstant) -> CertReport:
    """kappa(1/2^n) <= L max_{i<n} kappa(1/2^i) / 2^(n-i) for 1 <= n <= N, in beta-th powers.

    Reported apart from `verify_condition_iii`: the per-step bound there gives
    kappa(1/2^n) <= (delta 2^alpha)^(-1/beta) kappa(1/2^(n-1)), which reaches
    the literal statement only when L >= 2 (delta 2^alpha)^(-1/beta).
    """
    name = "condition_iii_direct"
    values = kappa.kappa_beta
    scale = Fraction(1, 2**kappa.params.beta)
    best = Fraction(0)
    for n in range(1, len(values)):
        # max_{i<n} kappa^beta_i / 2^((n-i) beta), carried forward one index at a time
        best = max(best, values[n - 1]) * scale
        if not constant.bounds_powers(values[n], best):
            return report_fail(name, n, {"n": n, "lhs": format_rational(values[n]), "rhs": format_rational(best)})
    return report_pass(name, max(len(values) - 1, 0))


def verify_domination(kappa: KappaSeq) -> CertReport:
    """kappa^beta(1/2^n) <= f(1/2^n) for every n."""
    name = "domination"
    for n, k_beta in enumerate(kappa.kappa_beta):
        f_value = kappa.f_node(n)
        if k_beta > f_value:
            return report_fail(name, n + 1, {"n": n, "lhs": format_rational(k_beta), "rhs": format_rational(f_value)})
    return report_pass(name, len(kappa.kappa_beta))


def certify_kappa(seq: DyadicSeq) -> list[CertReport]:
    """Every kappa check for `seq` under its own params, in a fixed order."""
    kappa = kappa_beta_seq(seq, seq.params)
    constant = l_constant(seq.params)
    reports = [
        verify_condition_i(kappa),
        verify_condition_ii(kappa, constant),
        verify_condition_iii(kappa, constant),
        verify_domination(kappa),
    ]
    logger.debug("kappa checks: %s", {r.name: r.passed for r in reports})
    return reports


def kappa_to_dict(kappa: KappaSeq) -> dict[str, Any]:
    """JSON form, carrying the SHA-256 of the source sequence for traceability."""
    return {
        "params": params_to_dict(kappa.params),
        "kappaBeta": [format_rational(v) for v in kappa.kappa_beta],
        "L": l_constant(kappa.params).to_dict(),
        "seqHash": canonical_hash(seq_to_dict(kappa.seq)),
    }
