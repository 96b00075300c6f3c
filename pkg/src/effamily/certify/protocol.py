"""Report and certificate types shared by every certifying check.

Checks never raise on a failed inequality. They return a `CertReport` with
`passed=False` and the first violation, so that callers (the validator, the
CLI `verify` command) can collect all results and decide what to do.
"""

from dataclasses import dataclass, field
from typing import Any, Protocol, runtime_checkable


@dataclass(frozen=True)
class CertReport:
    """Outcome of one exact certification pass.

    Attributes:
        name: Short identifier of the check, e.g. "un_lemma" or "condition_ii".
        passed: True iff no violation was found.
        checked: Number of individual inequalities evaluated.
        violation: First violation (by the check's own iteration order), None on pass.
            Holds the failing index or point plus the two compared sides as "p/q".
        detail: Extra context recorded with the result (constants, grid sizes,
            documented unchecked remainders).

    Examples:
        >>> CertReport(name="un_lemma", passed=True, checked=12)
        >>> CertReport(name="un_lemma", passed=False, checked=3, violation={"n": 3, "lhs": "1/100", "rhs": "3/8"})
    """

    name: str
    passed: bool
    checked: int = 0
    violation: dict[str, Any] | None = None
    detail: dict[str, Any] = field(default_factory=dict)

    @property
    def first_index(self) -> int | None:
        """Index `n` of the first violation, when the check is indexed by n."""
        if self.violation is None:
            return None
        n = self.violation.get("n")
        return int(n) if n is not None else None

    def to_dict(self) -> dict[str, Any]:
        """JSON form; the `kind` field lets archives tell certificate types apart."""
        data: dict[str, Any] = {"kind": "report", "name": self.name, "passed": self.passed, "checked": self.checked, "detail": self.detail}
        if self.violation is not None:
            data["violation"] = self.violation
        return data


def report_pass(name: str, checked: int, **detail: Any) -> CertReport:
    """Build a passing report."""
    return CertReport(name=name, passed=True, checked=checked, detail=detail)


def report_fail(name: str, checked: int, violation: dict[str, Any], **detail: Any) -> CertReport:
    """Build a failing report carrying its first violation."""
    return CertReport(name=name, passed=False, checked=checked, violation=violation, detail=detail)


@runtime_checkable
class CertificateProtocol(Protocol):
    """Anything an archive can store under `certificates`.

    `CertReport`, `R2Certificate`, `A1Certificate` and `WitnessReport` all
    satisfy it.
    """

    @property
    def passed(self) -> bool:
        """Whether the certificate's checks all succeeded."""
        ...

    def to_dict(self) -> dict[str, Any]:
        """Canonical JSON-ready form with rationals as "p/q"."""
        ...
