"""UI rendering and display utilities for the CLI."""

import logging
from collections.abc import Sequence
from typing import Any

from rich import box
from rich.logging import RichHandler
from rich.panel import Panel
from rich.table import Table

from effamily.canonical import canonical_json
from effamily.certify.protocol import CertificateProtocol

from .config import COLORS, console, stdout


def setup_logging(level: str) -> None:
    """Route library logging through rich on stderr."""
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False, rich_tracebacks=True)],
        force=True,
    )


def emit_json(data: Any) -> None:
    """Write canonical JSON to stdout, unstyled."""
    stdout.out(canonical_json(data), highlight=False)


def emit_text(text: str) -> None:
    """Write raw text (CSV) to stdout, unstyled."""
    stdout.out(text, end="", highlight=False)


def _violation_summary(data: dict[str, Any]) -> str:
    violation = data.get("violation")
    if not violation:
        return ""
    return ", ".join(f"{k}={v}" for k, v in violation.items())


def render_certificates(certificates: Sequence[CertificateProtocol], title: str) -> None:
    """Table of certificates with pass/fail and the first violation."""
    table = Table(title=title, box=box.SIMPLE_HEAD, title_style=f"bold {COLORS['primary']}")
    table.add_column("subject", style=COLORS["dim"])
    table.add_column("check")
    table.add_column("result")
    table.add_column("checked", justify="right")
    table.add_column("violation", overflow="fold")
    for certificate in certificates:
        data = certificate.to_dict()
        ok = certificate.passed
        table.add_row(
            str(data.get("subject", "")),
            str(data.get("name", data.get("kind", ""))),
            f"[{COLORS['pass']}]pass[/]" if ok else f"[{COLORS['fail']}]FAIL[/]",
            str(data.get("checked", data.get("pairsChecked", data.get("pairsCovered", "")))),
            _violation_summary(data),
        )
    console.print(table)
    passed = sum(c.passed for c in certificates)
    style = COLORS["pass"] if passed == len(certificates) else COLORS["fail"]
    console.print(f"{passed}/{len(certificates)} certificates pass", style=style)


def render_witness(report: dict[str, Any]) -> None:
    """Per-level witness ratios in both directions."""
    table = Table(
        title=f"witness xi={report['xi']} zeta={report['zeta']}",
        box=box.SIMPLE_HEAD,
        title_style=f"bold {COLORS['primary']}",
    )
    for column in ("level", "s", "n_s", "w_s/w_t", "t", "n_t", "w_t/w_s", "bound"):
        table.add_column(column)
    for entry in report["entries"]:
        table.add_row(
            str(entry["level"]),
            entry["s"],
            str(entry["nS"]),
            entry["ratioST"],
            entry["t"],
            str(entry["nT"]),
            entry["ratioTS"],
            entry["bound"],
        )
    console.print(table)


def render_error(error: dict[str, Any]) -> None:
    """Error panel on stderr."""
    console.print(
        Panel(
            error.get("message", ""),
            title=f"[bold]{error.get('error', 'Error')}[/bold]",
            border_style=COLORS["fail"],
            box=box.ROUNDED,
        )
    )
