"""Self-validating archives and plot-ready export tables.

An archive is one canonical JSON document:

    {
      "version": "ef-family/1",
      "kind": "seq" | "tree",
      "params": {...},
      "payload": <seq or tree JSON>,
      "settings": {"gridDepth": G, "nMax": n},
      "certificates": [...],
      "provenance": {"argv": [...], "createdAt": "..."}
    }

Reading an archive only parses it. `verify_archive` recomputes every
certificate from the raw payload and compares the result with what the
archive claims; `load_archive` does both and rejects anything that fails.
"""

import csv
import io
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from datetime import UTC, datetime
from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Literal

from effamily.canonical import canonical_bytes, loads, normalize
from effamily.certify.grid import certify_A1, certify_R2, check_phi_hypothesis
from effamily.certify.kappa import certify_kappa, kappa_beta_seq
from effamily.certify.protocol import CertificateProtocol, report_fail, report_pass
from effamily.errors import ArchiveError, EFError, LevelUnavailable
from effamily.params import Params, format_rational, params_from_dict, params_to_dict
from effamily.phi import PhiFunction, build_phi
from effamily.sequence import DyadicSeq, seq_from_dict, seq_to_dict, verify_doubling_decay, verify_mask_consistency, verify_un_lemma
from effamily.tree import FamilyTree, string_seq, tree_from_dict, tree_to_dict, validate_tree, witness

logger = logging.getLogger(__name__)

ARCHIVE_VERSION = "ef-family/1"
DEFAULT_GRID_DEPTH = 10
DEFAULT_N_MAX = 10
CSV_DIGITS = 20

ArchiveKind = Literal["seq", "tree"]
ExportFormat = Literal["json", "csv"]


@dataclass(frozen=True)
class ScopedCertificate:
    """A certificate together with the payload member it was computed for.

    `subject` is "seq" for a standalone sequence, the bit string of a tree
    member, "tree" for the tree validator, or "xi|zeta" for a witness.
    """

    subject: str
    certificate: CertificateProtocol

    @property
    def passed(self) -> bool:
        return self.certificate.passed

    def to_dict(self) -> dict[str, Any]:
        return {"subject": self.subject, **self.certificate.to_dict()}


@dataclass(frozen=True)
class Archive:
    """A parsed archive. Certificates are kept in their stored JSON form."""

    kind: ArchiveKind
    payload: DyadicSeq | FamilyTree
    certificates: tuple[dict[str, Any], ...]
    argv: tuple[str, ...] = ()
    created_at: str = ""
    grid_depth: int = DEFAULT_GRID_DEPTH
    n_max: int = DEFAULT_N_MAX
    version: str = field(default=ARCHIVE_VERSION)

    @property
    def params(self) -> Params:
        return self.payload.params

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "kind": self.kind,
            "params": params_to_dict(self.params),
            "payload": seq_to_dict(self.payload) if isinstance(self.payload, DyadicSeq) else tree_to_dict(self.payload),
            "settings": {"gridDepth": self.grid_depth, "nMax": self.n_max},
            "certificates": list(self.certificates),
            "provenance": {"argv": list(self.argv), "createdAt": self.created_at},
        }


# -------- Certification of payloads --------


def _guarded(name: str, phi: PhiFunction, run: Callable[[PhiFunction], CertificateProtocol]) -> CertificateProtocol:
    """Run a raising certificate, turning its error into a failing report."""
    try:
        certificate = run(phi)
    except EFError as e:
        logger.debug("%s failed: %s", name, e.message)
        return report_fail(name, 0, e.to_dict())
    return certificate


def certify_seq(seq: DyadicSeq, grid_depth: int = DEFAULT_GRID_DEPTH, n_max: int = DEFAULT_N_MAX) -> list[CertificateProtocol]:
    """Every certificate for one sequence and the phi/f it defines.

    Sequence checks (u_n lemma, mask, doubling decay) always run. The phi
    hypothesis and the (R2)/(A1) grid certificates need phi(1/4) and run
    from depth 2 on; the kappa conditions need a sequence that passes the
    u_n lemma.
    """
    lemma = verify_un_lemma(seq)
    certificates: list[CertificateProtocol] = [lemma, verify_mask_consistency(seq), verify_doubling_decay(seq)]
    if not lemma.passed:
        return certificates
    phi = build_phi(seq)
    if phi.depth >= 2:
        certificates.append(check_phi_hypothesis(phi))
        certificates.append(_guarded("R2", phi, lambda p: certify_R2(p, grid_depth)))
        certificates.append(_guarded("A1", phi, lambda p: certify_A1(p, grid_depth, min(n_max, p.depth))))
    try:
        certificates.extend(certify_kappa(seq))
    except EFError as e:
        certificates.append(report_fail("kappa", 0, e.to_dict()))
    return certificates


def certify_tree(tree: FamilyTree, grid_depth: int = DEFAULT_GRID_DEPTH, n_max: int = DEFAULT_N_MAX) -> list[ScopedCertificate]:
    """Tree validator, member certificates for every deepest string, and all pairwise witnesses.

    Member and witness certificates read n_s and the values unchecked, so
    they are only computed once the validator passes.
    """
    validation = validate_tree(tree)
    scoped = [ScopedCertificate("tree", validation)]
    if not validation.passed:
        logger.info("Tree fails validation; skipping member and witness certificates")
        return scoped
    leaves = tree.levels[-1].order
    for bits in leaves:
        scoped.extend(ScopedCertificate(bits, c) for c in certify_seq(string_seq(tree, bits), grid_depth, n_max))
    for i, xi in enumerate(leaves):
        for zeta in leaves[i + 1 :]:
            scoped.append(ScopedCertificate(f"{xi}|{zeta}", witness(tree, xi, zeta)))
    return scoped


def certify_payload(payload: DyadicSeq | FamilyTree, grid_depth: int = DEFAULT_GRID_DEPTH, n_max: int = DEFAULT_N_MAX) -> list[ScopedCertificate]:
    """Certificates for either kind of payload, scoped by subject."""
    if isinstance(payload, FamilyTree):
        return certify_tree(payload, grid_depth, n_max)
    return [ScopedCertificate("seq", c) for c in certify_seq(payload, grid_depth, n_max)]


# -------- Building, reading and verifying --------


def make_archive(
    payload: DyadicSeq | FamilyTree,
    certificates: Sequence[CertificateProtocol],
    argv: Sequence[str] = (),
    created_at: datetime | None = None,
    *,
    grid_depth: int = DEFAULT_GRID_DEPTH,
    n_max: int = DEFAULT_N_MAX,
) -> Archive:
    """Wrap a payload and its certificates.

    `created_at` defaults to now (UTC). Pass a fixed time for reproducible
    archives: two archives of the same payload and time serialize to the
    same bytes.
    """
    stamp = (created_at or datetime.now(UTC)).astimezone(UTC).replace(microsecond=0)
    return Archive(
        kind="tree" if isinstance(payload, FamilyTree) else "seq",
        payload=payload,
        certificates=tuple(normalize(c) for c in certificates),
        argv=tuple(argv),
        created_at=stamp.isoformat().replace("+00:00", "Z"),
        grid_depth=grid_depth,
        n_max=n_max,
    )


def serialize_archive(archive: Archive) -> bytes:
    """Canonical bytes of the archive."""
    return canonical_bytes(archive.to_dict())


def write_archive(archive: Archive, path: str | Path) -> Path:
    """Write the canonical bytes to `path`."""
    path = Path(path)
    path.write_bytes(serialize_archive(archive))
    logger.info("Wrote %s archive to %s", archive.kind, path)
    return path


def parse_archive(data: dict[str, Any]) -> Archive:
    """Build an Archive from its JSON form, checking structure only.

    Raises:
        ArchiveError: On an unknown version or kind, missing fields, or
            top-level params that disagree with the payload.
    """
    if not isinstance(data, dict):
        msg = "Archive must be a JSON object"
        raise ArchiveError(msg)
    version = data.get("version")
    if version != ARCHIVE_VERSION:
        msg = f"Unsupported archive version {version!r}, expected {ARCHIVE_VERSION!r}"
        raise ArchiveError(msg, version=version)
    kind = data.get("kind")
    archive_kind: ArchiveKind = "seq" if kind == "seq" else "tree"
    try:
        if kind == "seq":
            payload: DyadicSeq | FamilyTree = seq_from_dict(data["payload"])
        elif kind == "tree":
            payload = tree_from_dict(data["payload"])
        else:
            msg = f"Unknown archive kind {kind!r}"
            raise ArchiveError(msg, kind=kind)
        params = params_from_dict(data["params"])
        settings = data.get("settings", {})
        provenance = data.get("provenance", {})
        archive = Archive(
            kind=archive_kind,
            payload=payload,
            certificates=tuple(data.get("certificates", [])),
            argv=tuple(provenance.get("argv", [])),
            created_at=str(provenance.get("createdAt", "")),
            grid_depth=int(settings.get("gridDepth", DEFAULT_GRID_DEPTH)),
            n_max=int(settings.get("nMax", DEFAULT_N_MAX)),
        )
    except ArchiveError:
        raise
    except (EFError, KeyError, TypeError, ValueError) as e:
        msg = f"Malformed archive: {e}"
        raise ArchiveError(msg) from e
    if params != archive.params:
        msg = "Archive params disagree with the payload params"
        raise ArchiveError(msg)
    return archive


def read_archive(source: str | Path | bytes) -> Archive:
    """Parse an archive from a path or raw bytes without verifying it.

    Raises:
        ArchiveError: If the file is unreadable, not JSON, or malformed.
    """
    try:
        raw = source if isinstance(source, bytes) else Path(source).read_bytes()
        data = loads(raw)
    except (OSError, ValueError) as e:
        msg = f"Cannot read archive: {e}"
        raise ArchiveError(msg) from e
    return parse_archive(data)


def verify_archive(archive: Archive) -> list[CertificateProtocol]:
    """Recompute every certificate from the payload and compare with the stored ones.

    Returns the recomputed certificates followed by a "stored_certificates"
    report that fails at the first stored entry differing from its
    recomputed counterpart.
    """
    recomputed = certify_payload(archive.payload, archive.grid_depth, archive.n_max)
    fresh = [normalize(c) for c in recomputed]
    stored = list(archive.certificates)
    match = report_pass("stored_certificates", len(fresh))
    for index in range(max(len(fresh), len(stored))):
        left = stored[index] if index < len(stored) else None
        right = fresh[index] if index < len(fresh) else None
        if left != right:
            subject = (right or left or {}).get("subject")
            match = report_fail("stored_certificates", index + 1, {"index": index, "subject": subject})
            break
    results: list[CertificateProtocol] = [*recomputed, match]
    logger.info("Verified %s archive: %d/%d certificates pass", archive.kind, sum(c.passed for c in results), len(results))
    return results


def load_archive(source: str | Path | bytes) -> Archive:
    """Read and verify an archive; only archives whose certificates all pass are returned.

    Raises:
        ArchiveError: If the archive is malformed or any recomputed certificate fails.
    """
    archive = read_archive(source)
    for certificate in verify_archive(archive):
        if not certificate.passed:
            data = certificate.to_dict()
            msg = f"Archive fails verification: {data.get('name', data.get('kind'))} ({data.get('subject', '')})"
            raise ArchiveError(msg, certificate=data)
    return archive


# -------- Payload-specific serialization --------


def serialize_seq(seq: DyadicSeq) -> bytes:
    """Canonical bytes of a bare sequence."""
    return canonical_bytes(seq_to_dict(seq))


def load_seq(raw: bytes | str) -> DyadicSeq:
    """Parse a bare sequence and recheck it.

    Raises:
        ArchiveError: If the payload is malformed or fails the u_n lemma or mask recomputation.
    """
    try:
        seq = seq_from_dict(loads(raw))
    except (EFError, ValueError) as e:
        msg = f"Malformed sequence: {e}"
        raise ArchiveError(msg) from e
    for report in (verify_un_lemma(seq), verify_mask_consistency(seq)):
        if not report.passed:
            msg = f"Sequence fails {report.name}"
            raise ArchiveError(msg, violation=report.violation)
    return seq


def serialize_tree(tree: FamilyTree) -> bytes:
    """Canonical bytes of a bare tree."""
    return canonical_bytes(tree_to_dict(tree))


def load_tree(raw: bytes | str) -> FamilyTree:
    """Parse a bare tree and run the validator on it.

    Raises:
        ArchiveError: If the payload is malformed or fails `validate_tree`.
    """
    try:
        tree = tree_from_dict(loads(raw))
    except (EFError, ValueError) as e:
        msg = f"Malformed tree: {e}"
        raise ArchiveError(msg) from e
    report = validate_tree(tree)
    if not report.passed:
        msg = "Tree fails validation"
        raise ArchiveError(msg, violation=report.violation)
    return tree


# -------- Export tables --------


def member_seq(archive: Archive, xi: str | None = None) -> DyadicSeq:
    """The sequence an export or reduction works on.

    For a tree archive `xi` selects the member and defaults to the all-zero
    string of the deepest level.

    Raises:
        LevelUnavailable: If `xi` is given for a seq archive or is longer than the tree.
    """
    if isinstance(archive.payload, DyadicSeq):
        if xi:
            msg = "A seq archive has a single member; --xi applies to tree archives"
            raise LevelUnavailable(msg, xi=xi)
        return archive.payload
    tree = archive.payload
    return string_seq(tree, "0" * tree.max_level if xi is None else xi)


def to_decimal(value: Fraction, digits: int = CSV_DIGITS) -> str:
    """`value` rounded half-even to `digits` significant digits."""
    context = Context(prec=digits, rounding=ROUND_HALF_EVEN)
    return str(context.divide(Decimal(value.numerator), Decimal(value.denominator)))


def table_rows(seq: DyadicSeq) -> list[dict[str, Any]]:
    """Rows n, u_n, phi(1/2^n), f(1/2^n), kappa^beta(1/2^n)."""
    phi = build_phi(seq)
    kappa = kappa_beta_seq(seq, seq.params)
    return [
        {"n": n, "u": phi.node(n), "phi": phi.node(n), "f": phi.f_node(n), "kappaBeta": kappa.kappa_beta[n]}
        for n in range(phi.depth + 1)
    ]


def export_table(archive: Archive, fmt: ExportFormat = "json", xi: str | None = None) -> str:
    """Plot-ready table for one member.

    JSON rows carry "p/q" strings. CSV rows carry every rational twice, as
    "p/q" and as an advisory 20-digit decimal.
    """
    seq = member_seq(archive, xi)
    rows = table_rows(seq)
    if fmt == "json":
        member = None if isinstance(archive.payload, DyadicSeq) else ("0" * archive.payload.max_level if xi is None else xi)
        return canonical_bytes({"params": params_to_dict(seq.params), "member": member, "rows": rows}).decode("utf-8")
    if fmt != "csv":
        msg = f"Unknown export format {fmt!r}"
        raise ValueError(msg)
    columns = ("u", "phi", "f", "kappaBeta")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", *(name for column in columns for name in (column, f"{column}Decimal"))])
    for row in rows:
        writer.writerow([row["n"], *(cell for column in columns for cell in (format_rational(row[column]), to_decimal(row[column])))])
    return buffer.getvalue()
