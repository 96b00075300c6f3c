"""Tree-indexed construction of the family members phi_xi.

For every binary string s of length l the construction fixes a finite
decreasing sequence w_s of length k_l and a witness index n_s such that

    (a) len(w_s) == k_l
    (b) w_t[:k_l] == w_s whenever t extends s
    (c) for s != t of length l: k_{l-1} <= n_s < k_l and w_s(n_s) / w_t(n_s) < 1/2^l

Level l enumerates {0,1}^l lexicographically as s_1 ... s_M. Phase j updates
only s_j and holds every other string until s_j has dropped below 1/2^l of
all of them; the first such index is n_{s_j}. Then k_l = n_{s_M} + 1.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from effamily.certify.protocol import CertReport, report_fail, report_pass
from effamily.errors import InvalidParams, LevelUnavailable, NotDistinct, SearchCapExceeded, SeqInvalid
from effamily.params import Params, delta_prime, format_rational, params_from_dict, params_to_dict, parse_rational
from effamily.phi import PhiFunction, build_phi
from effamily.sequence import Choice, DyadicSeq, format_mask, next_value, parse_mask, verify_un_lemma

logger = logging.getLogger(__name__)

DEFAULT_SEARCH_CAP = 2**20
WITNESS_RULE = "minimal"

ONE = Fraction(1)


@dataclass(frozen=True)
class StringRecord:
    """w_s with its induced HOLD/UPDATE mask and witness index n_s."""

    bits: str
    values: tuple[Fraction, ...]
    mask: tuple[Choice, ...]
    witness_index: int


@dataclass(frozen=True)
class LevelRecord:
    """All strings of one length l, with k_l."""

    level: int
    k: int
    strings: dict[str, StringRecord]

    @property
    def order(self) -> list[str]:
        """The enumeration s_1 ... s_M (lexicographic, '0' < '1')."""
        return sorted(self.strings)


@dataclass(frozen=True)
class FamilyTree:
    """Levels 0 ... max_level of the construction."""

    params: Params
    levels: tuple[LevelRecord, ...]
    witness_rule: str = field(default=WITNESS_RULE)

    @property
    def max_level(self) -> int:
        return len(self.levels) - 1

    @property
    def delta_prime(self) -> Fraction:
        return delta_prime(self.params)

    def record(self, bits: str) -> StringRecord:
        """The record of `bits`.

        Raises:
            LevelUnavailable: If `bits` is longer than the built tree or missing from its level.
        """
        bits = parse_bits(bits)
        if len(bits) > self.max_level:
            msg = f"String {bits!r} has length {len(bits)}, but the tree has levels up to {self.max_level}"
            raise LevelUnavailable(msg, bits=bits, max_level=self.max_level)
        strings = self.levels[len(bits)].strings
        if bits not in strings:
            msg = f"String {bits!r} is missing from level {len(bits)}"
            raise LevelUnavailable(msg, bits=bits)
        return strings[bits]


def parse_bits(bits: str) -> str:
    """Validate a binary string ("" is the empty string).

    Raises:
        LevelUnavailable: If `bits` contains anything other than 0 and 1.
    """
    if any(c not in "01" for c in bits):
        msg = f"Binary strings use only '0' and '1', got {bits!r}"
        raise LevelUnavailable(msg, bits=bits)
    return bits


def strings_of_length(level: int) -> list[str]:
    """{0,1}^level in lexicographic order."""
    return ["".join(p) for p in itertools.product("01", repeat=level)]


def ratio_below(numerator: Fraction, denominator: Fraction, level: int) -> bool:
    """numerator / denominator < 1/2^level, by integer cross-multiplication."""
    return numerator.numerator * denominator.denominator * 2**level < denominator.numerator * numerator.denominator


def _root() -> LevelRecord:
    root = StringRecord(bits="", values=(ONE, ONE), mask=(), witness_index=1)
    return LevelRecord(level=0, k=2, strings={"": root})


def _build_level(params: Params, parent: LevelRecord, search_cap: int) -> LevelRecord:
    level = parent.level + 1
    order = strings_of_length(level)
    values = {s: list(parent.strings[s[:-1]].values) for s in order}
    masks = {s: list(parent.strings[s[:-1]].mask) for s in order}
    witnesses: dict[str, int] = {}
    stop = parent.k - 1

    for j, active in enumerate(order, start=1):
        others = [s for s in order if s != active]
        n = stop
        while True:
            n += 1
            if n - stop > search_cap:
                msg = f"No witness for {active!r} (level {level}, phase {j}) within {search_cap} steps"
                raise SearchCapExceeded(msg, level=level, phase=j)
            for s in order:
                choice = Choice.UPDATE if s == active else Choice.HOLD
                values[s].append(next_value(values[s], choice, params))
                masks[s].append(choice)
            if all(ratio_below(values[active][n], values[s][n], level) for s in others):
                break
        witnesses[active] = n
        logger.debug("Level %d: n_%s = %d", level, active, n)
        stop = n

    k = stop + 1
    strings = {s: StringRecord(bits=s, values=tuple(values[s]), mask=tuple(masks[s]), witness_index=witnesses[s]) for s in order}
    logger.info("Level %d built: k=%d", level, k)
    return LevelRecord(level=level, k=k, strings=strings)


def build_tree(params: Params, max_level: int, search_cap: int = DEFAULT_SEARCH_CAP) -> FamilyTree:
    """Run the construction up to `max_level`.

    Args:
        params: Construction parameters.
        max_level: Deepest string length to build (>= 0).
        search_cap: Maximum number of steps in any single witness search.

    Returns:
        The tree; witnesses are the least admissible indices.

    Raises:
        InvalidParams: If `params` is not a Params (or max_level/search_cap are negative).
        SearchCapExceeded: If a witness search exceeds `search_cap` steps.
    """
    if not isinstance(params, Params):
        msg = f"Expected Params, got {type(params).__name__}"
        raise InvalidParams(msg)
    if max_level < 0 or search_cap < 1:
        msg = f"max_level must be >= 0 and search_cap >= 1, got {max_level}, {search_cap}"
        raise InvalidParams(msg)
    levels = [_root()]
    for _ in range(max_level):
        levels.append(_build_level(params, levels[-1], search_cap))
    return FamilyTree(params=params, levels=tuple(levels))


def string_seq(tree: FamilyTree, bits: str) -> DyadicSeq:
    """w_s as a standalone DyadicSeq with its induced mask."""
    record = tree.record(bits)
    return DyadicSeq(values=record.values, mask=record.mask, params=tree.params)


def member_phi(tree: FamilyTree, xi: str) -> PhiFunction:
    """phi_xi: nodes w_{xi|l}(n) on every band k_{l-1} <= n < k_l, depth k_{lh(xi)} - 1.

    By requirement (b) the bands of every prefix are already contained in w_xi.

    Raises:
        LevelUnavailable: If xi is longer than the built tree.
    """
    return build_phi(string_seq(tree, xi))


# -------- Independent validation --------


def _expected_masks(tree: FamilyTree) -> dict[str, list[Choice]] | CertReport:
    """Masks implied by the stored skeleton (k_l and n_s) alone."""
    masks: dict[str, list[Choice]] = {"": []}
    for record in tree.levels[1:]:
        order = record.order
        stop = tree.levels[record.level - 1].k - 1
        level_masks = {s: list(masks[s[:-1]]) for s in order}
        for active in order:
            n_active = record.strings[active].witness_index
            if n_active <= stop:
                return report_fail("tree", 0, {"level": record.level, "bits": active, "requirement": "schedule", "n": n_active})
            for _ in range(stop + 1, n_active + 1):
                for s in order:
                    level_masks[s].append(Choice.UPDATE if s == active else Choice.HOLD)
            stop = n_active
        if stop + 1 != record.k:
            return report_fail("tree", 0, {"level": record.level, "requirement": "k_equals_last_witness_plus_one", "k": record.k, "n": stop})
        masks.update(level_masks)
    return masks


def validate_tree(tree: FamilyTree) -> CertReport:
    """Recheck requirements (a), (b), (c) and everything the builder promises.

    Only raw values, n_s and k_l are trusted. Checked: the root, strictly
    increasing k_l, delta' < 1, complete levels, (a), (b), (c) with strict
    integer comparisons, the u_n lemma per string, that every value is what
    the schedule implied by (k_l, n_s) produces, the stored masks, and
    minimality of every witness.
    """
    name = "tree"
    checked = 0

    def fail(**violation: Any) -> CertReport:
        return report_fail(name, checked, violation)

    if tree.delta_prime >= 1:
        return fail(requirement="delta_prime", value=format_rational(tree.delta_prime))
    root = tree.levels[0] if tree.levels else None
    if root is None or root.k != 2 or set(root.strings) != {""}:
        return fail(requirement="root")
    root_record = root.strings[""]
    if root_record.values != (ONE, ONE) or root_record.witness_index != 1:
        return fail(requirement="root")

    for record in tree.levels[1:]:
        level = record.level
        parent = tree.levels[level - 1]
        if record.k <= parent.k:
            return fail(level=level, requirement="k_increasing", k=record.k)
        if sorted(record.strings) != strings_of_length(level):
            return fail(level=level, requirement="complete_level")
        for s, string in record.strings.items():
            checked += 1
            if len(string.values) != record.k:
                return fail(level=level, bits=s, requirement="a", length=len(string.values), k=record.k)
            if string.values[: parent.k] != parent.strings[s[:-1]].values:
                return fail(level=level, bits=s, requirement="b")
            n_s = string.witness_index
            if not parent.k <= n_s < record.k:
                return fail(level=level, bits=s, requirement="c_range", n=n_s)
            for t, other in record.strings.items():
                if t == s:
                    continue
                checked += 1
                if not ratio_below(string.values[n_s], other.values[n_s], level):
                    return fail(
                        level=level,
                        bits=s,
                        against=t,
                        requirement="c_ratio",
                        n=n_s,
                        lhs=format_rational(string.values[n_s]),
                        rhs=format_rational(other.values[n_s]),
                    )

    masks = _expected_masks(tree)
    if isinstance(masks, CertReport):
        return masks
    for record in tree.levels:
        for s, string in record.strings.items():
            checked += 1
            seq = DyadicSeq(values=string.values, mask=string.mask, params=tree.params)
            lemma = verify_un_lemma(seq)
            if not lemma.passed:
                return fail(level=record.level, bits=s, requirement="un_lemma", **(lemma.violation or {}))
            if list(string.mask) != masks[s]:
                return fail(level=record.level, bits=s, requirement="mask")
            for n in range(2, len(string.values)):
                expected = next_value(string.values[:n], masks[s][n - 2], tree.params)
                if expected != string.values[n]:
                    return fail(level=record.level, bits=s, requirement="recomputed", n=n)

    for record in tree.levels[1:]:
        stop = tree.levels[record.level - 1].k - 1
        for active in record.order:
            n_active = record.strings[active].witness_index
            for n in range(stop + 1, n_active):
                checked += 1
                if all(ratio_below(record.strings[active].values[n], record.strings[s].values[n], record.level) for s in record.order if s != active):
                    return fail(level=record.level, bits=active, requirement="minimality", n=n)
            stop = n_active

    return report_pass(name, checked, levels=tree.max_level, k=[r.k for r in tree.levels], witnessRule=tree.witness_rule)


# -------- Witnesses for (A2') --------


@dataclass(frozen=True)
class WitnessEntry:
    """Certified ratios at one level l for s = zeta|l and t = xi|l."""

    level: int
    s: str
    t: str
    n_s: int
    ratio_st: Fraction
    n_t: int
    ratio_ts: Fraction

    @property
    def bound(self) -> Fraction:
        return Fraction(1, 2**self.level)

    @property
    def passed(self) -> bool:
        return self.ratio_st < self.bound and self.ratio_ts < self.bound

    def to_dict(self) -> dict[str, Any]:
        return {
            "level": self.level,
            "s": self.s,
            "t": self.t,
            "nS": self.n_s,
            "ratioST": format_rational(self.ratio_st),
            "nT": self.n_t,
            "ratioTS": format_rational(self.ratio_ts),
            "bound": format_rational(self.bound),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class WitnessReport:
    """Finite evidence that liminf phi_zeta(1/2^n)/phi_xi(1/2^n) = 0, and symmetrically."""

    xi: str
    zeta: str
    entries: tuple[WitnessEntry, ...]

    @property
    def passed(self) -> bool:
        return bool(self.entries) and all(e.passed for e in self.entries)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "witness",
            "xi": self.xi,
            "zeta": self.zeta,
            "entries": [e.to_dict() for e in self.entries],
            "passed": self.passed,
        }


def _check_pair(tree: FamilyTree, xi: str, zeta: str) -> int:
    """First position where xi and zeta differ."""
    xi, zeta = parse_bits(xi), parse_bits(zeta)
    if xi == zeta:
        msg = f"Witnesses need distinct strings, got {xi!r} twice"
        raise NotDistinct(msg, xi=xi)
    if len(xi) != len(zeta):
        msg = f"Strings must have equal length, got {len(xi)} and {len(zeta)}"
        raise LevelUnavailable(msg, xi=xi, zeta=zeta)
    tree.record(xi)
    return next(i for i, (a, b) in enumerate(zip(xi, zeta, strict=True)) if a != b)


def _positive_at(record: StringRecord, n: int) -> Fraction:
    """w_s(n), which must exist and be positive for a ratio to be formed."""
    if not 0 <= n < len(record.values) or record.values[n] <= 0:
        msg = f"w_{record.bits or '()'} has no positive value at index {n}"
        raise SeqInvalid(msg, bits=record.bits, n=n)
    return record.values[n]


def witness(tree: FamilyTree, xi: str, zeta: str) -> WitnessReport:
    """Certified ratios below 2^-l at every level l past the first difference, both ways.

    Raises:
        NotDistinct: If xi == zeta.
        LevelUnavailable: If the strings are longer than the tree or of unequal length.
        SeqInvalid: If a witness index falls outside w_s or w_t, or hits a non-positive value.
    """
    m = _check_pair(tree, xi, zeta)
    entries = []
    for level in range(m + 1, len(xi) + 1):
        s, t = zeta[:level], xi[:level]
        w_s, w_t = tree.record(s), tree.record(t)
        n_s, n_t = w_s.witness_index, w_t.witness_index
        entries.append(
            WitnessEntry(
                level=level,
                s=s,
                t=t,
                n_s=n_s,
                ratio_st=_positive_at(w_s, n_s) / _positive_at(w_t, n_s),
                n_t=n_t,
                ratio_ts=_positive_at(w_t, n_t) / _positive_at(w_s, n_t),
            )
        )
    return WitnessReport(xi=xi, zeta=zeta, entries=tuple(entries))


@dataclass(frozen=True)
class RatioProfile:
    """phi_zeta(1/2^n) / phi_xi(1/2^n) for every shared node, with per-band minima."""

    ratios: tuple[Fraction, ...]
    band_minima: tuple[Fraction, ...]

    def to_dict(self) -> dict[str, Any]:
        return {"ratios": [format_rational(r) for r in self.ratios], "bandMinima": [format_rational(r) for r in self.band_minima]}


def ratio_profile(tree: FamilyTree, xi: str, zeta: str) -> RatioProfile:
    """Ratio sequence of two members over n < k_l, and its minimum on each band [k_{l-1}, k_l).

    Band 0 is [0, k_0).

    Raises:
        SeqInvalid: If the members differ in length, w_xi has a non-positive value,
            or a band is empty.
    """
    _check_pair(tree, xi, zeta)
    record_xi, record_zeta = tree.record(xi), tree.record(zeta)
    if len(record_xi.values) != len(record_zeta.values):
        msg = f"w_{xi} and w_{zeta} differ in length"
        raise SeqInvalid(msg, xi=xi, zeta=zeta)
    ratios = tuple(z / _positive_at(record_xi, n) for n, z in enumerate(record_zeta.values))
    minima = []
    lower = 0
    for record in tree.levels[: len(xi) + 1]:
        band = ratios[lower : record.k]
        if not band:
            msg = f"Level {record.level} has no nodes in [{lower}, {record.k})"
            raise SeqInvalid(msg, level=record.level)
        minima.append(min(band))
        lower = record.k
    return RatioProfile(ratios=ratios, band_minima=tuple(minima))


# -------- Serialization --------


def tree_to_dict(tree: FamilyTree) -> dict[str, Any]:
    """JSON form: params, delta', witness rule, per-level k and per-string data."""
    return {
        "params": params_to_dict(tree.params),
        "deltaPrime": format_rational(tree.delta_prime),
        "witnessRule": tree.witness_rule,
        "levels": [
            {
                "level": record.level,
                "k": record.k,
                "strings": [
                    {
                        "bits": s,
                        "nS": record.strings[s].witness_index,
                        "mask": format_mask(record.strings[s].mask),
                        "values": [format_rational(v) for v in record.strings[s].values],
                    }
                    for s in record.order
                ],
            }
            for record in tree.levels
        ],
    }


def tree_from_dict(data: dict[str, Any]) -> FamilyTree:
    """Rebuild a tree from its JSON form without validating it.

    Raises:
        SeqInvalid: If fields are missing or malformed.
    """
    try:
        params = params_from_dict(data["params"])
        levels = []
        for level_data in data["levels"]:
            strings = {}
            for item in level_data["strings"]:
                bits = parse_bits(item["bits"])
                strings[bits] = StringRecord(
                    bits=bits,
                    values=tuple(parse_rational(v) for v in item["values"]),
                    mask=parse_mask(item.get("mask", "")),
                    witness_index=int(item["nS"]),
                )
            levels.append(LevelRecord(level=int(level_data["level"]), k=int(level_data["k"]), strings=strings))
    except (KeyError, TypeError) as e:
        msg = f"Malformed tree payload: {e}"
        raise SeqInvalid(msg) from e
    for index, record in enumerate(levels):
        if record.level != index:
            msg = f"Level records out of order: position {index} holds level {record.level}"
            raise SeqInvalid(msg)
    return FamilyTree(params=params, levels=tuple(levels), witness_rule=str(data.get("witnessRule", WITNESS_RULE)))
