"""Subcommand handlers. Each returns the process exit status."""

import argparse
import itertools
import logging
from pathlib import Path

from effamily.archive import (
    certify_payload,
    export_table,
    load_archive,
    make_archive,
    member_seq,
    read_archive,
    serialize_archive,
    verify_archive,
    write_archive,
)
from effamily.errors import LevelUnavailable
from effamily.params import format_rational, make_params
from effamily.phi import build_phi
from effamily.reduction import f_sum, l1_distance, parse_real_vec, sparse_to_dict, theta1, verify_theta1_bounds
from effamily.sequence import build_seq, parse_mask
from effamily.tree import FamilyTree, build_tree, ratio_profile, witness

from .config import COLORS, EXIT_FAILED, EXIT_OK, Settings, console
from .ui import emit_json, emit_text, render_certificates, render_witness

logger = logging.getLogger(__name__)


def _status(passed: bool) -> int:  # noqa: FBT001
    return EXIT_OK if passed else EXIT_FAILED


def build_command(args: argparse.Namespace, settings: Settings, argv: list[str]) -> int:
    """Build a family tree, certify it and write the archive."""
    params = make_params(args.alpha, args.beta, args.delta)
    search_cap = args.search_cap if args.search_cap is not None else settings.search_cap
    with console.status(f"Building levels 0..{args.levels}", spinner="dots"):
        tree = build_tree(params, args.levels, search_cap)
        certificates = certify_payload(tree)
    archive = make_archive(tree, certificates, argv, settings.created_at)
    path = write_archive(archive, args.out)
    logger.info("Built %d levels, k = %s", tree.max_level, [r.k for r in tree.levels])
    render_certificates(certificates, f"tree archive {path}")
    passed = all(c.passed for c in certificates)
    emit_json({"archive": str(path), "kind": archive.kind, "k": [r.k for r in tree.levels], "passed": passed})
    return _status(passed)


def _cycled_mask(mask: str, depth: int | None) -> str:
    """Entries for n = 2 ... depth, repeating `mask` as needed."""
    entries = "".join(c.value for c in parse_mask(mask))
    if depth is None:
        return entries
    if not entries:
        entries = "H"
    return "".join(itertools.islice(itertools.cycle(entries), max(depth - 1, 0)))


def seq_command(args: argparse.Namespace, settings: Settings, argv: list[str]) -> int:
    """Build a standalone sequence and certify it."""
    params = make_params(args.alpha, args.beta, args.delta)
    seq = build_seq(params, _cycled_mask(args.mask, args.depth))
    certificates = certify_payload(seq)
    archive = make_archive(seq, certificates, argv, settings.created_at)
    render_certificates(certificates, f"sequence of depth {seq.depth}")
    if args.out:
        write_archive(archive, args.out)
        emit_json({"archive": str(args.out), "kind": archive.kind, "depth": seq.depth, "passed": all(c.passed for c in certificates)})
    else:
        emit_text(serialize_archive(archive).decode("utf-8") + "\n")
    return _status(all(c.passed for c in certificates))


def verify_command(args: argparse.Namespace, settings: Settings, argv: list[str]) -> int:  # noqa: ARG001
    """Recompute every certificate of an archive from its raw payload."""
    archive = read_archive(args.file)
    results = verify_archive(archive)
    render_certificates(results, f"verify {args.file}")
    passed = all(c.passed for c in results)
    failures = [c.to_dict() for c in results if not c.passed]
    emit_json({"archive": str(args.file), "kind": archive.kind, "passed": passed, "failures": failures, "checked": len(results)})
    return _status(passed)


def _tree_of(path: str | Path) -> FamilyTree:
    archive = load_archive(path)
    if not isinstance(archive.payload, FamilyTree):
        msg = f"{path} holds a {archive.kind} archive; this command needs a tree archive"
        raise LevelUnavailable(msg, archive=str(path))
    return archive.payload


def witness_command(args: argparse.Namespace, settings: Settings, argv: list[str]) -> int:  # noqa: ARG001
    """Emit certified ratios for two members of a tree archive."""
    tree = _tree_of(args.file)
    report = witness(tree, args.xi, args.zeta)
    profile = ratio_profile(tree, args.xi, args.zeta)
    data = report.to_dict()
    render_witness(data)
    emit_json({**data, "bandMinima": profile.to_dict()["bandMinima"]})
    return _status(report.passed)


def reduce_command(args: argparse.Namespace, settings: Settings, argv: list[str]) -> int:  # noqa: ARG001
    """Apply theta_1 to x and xhat under one member and check the sandwich."""
    archive = load_archive(args.file)
    seq = member_seq(archive, args.xi)
    phi = build_phi(seq)
    x, xhat = parse_real_vec(args.x), parse_real_vec(args.xhat)
    y, yhat = theta1(x, phi, seq.params), theta1(xhat, phi, seq.params)
    report = verify_theta1_bounds(x, xhat, phi, seq.params)
    render_certificates([report], f"theta_1 under member {args.xi or '(seq)'}")
    emit_json(
        {
            "member": args.xi,
            "y": sparse_to_dict(y),
            "yhat": sparse_to_dict(yhat),
            "l1Distance": format_rational(l1_distance(x, xhat)),
            "fSum": format_rational(f_sum(y, yhat, phi, seq.params)),
            "report": report,
        }
    )
    return _status(report.passed)


def export_command(args: argparse.Namespace, settings: Settings, argv: list[str]) -> int:  # noqa: ARG001
    """Write a plot-ready table for one member to stdout."""
    archive = load_archive(args.file)
    table = export_table(archive, args.format, args.xi)
    emit_text(table if table.endswith("\n") else table + "\n")
    console.print(f"Exported {args.format} table from {args.file}", style=COLORS["dim"])
    return EXIT_OK
