import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effamily.errors import SeqInvalid
from effamily.sequence import (
    Choice,
    DyadicSeq,
    build_seq,
    extend_u,
    initial_seq,
    max_product_term,
    parse_mask,
    seq_from_dict,
    seq_to_dict,
    update_runs,
    verify_doubling_decay,
    verify_mask_consistency,
    verify_un_lemma,
)
from tests.utils import brute_force_next, random_mask, s_params, update_seq


def test_extend_u_update_and_hold():
    params = s_params()
    seq = extend_u(initial_seq(params), Choice.UPDATE)
    assert seq.values == (1, 1, Fraction(3, 4))

    updated = extend_u(seq, Choice.UPDATE)
    assert updated[3] == Fraction(9, 16)

    held = extend_u(seq, Choice.HOLD)
    assert held[3] == Fraction(3, 4)
    assert held.mask == (Choice.UPDATE, Choice.HOLD)


def test_all_update_is_geometric():
    seq = update_seq(s_params(), 12)
    assert seq.values[:5] == (1, 1, Fraction(3, 4), Fraction(9, 16), Fraction(27, 64))
    assert all(seq[n] == Fraction(3, 4) ** (n - 1) for n in range(1, 13))


def test_build_seq_accepts_loose_masks():
    params = s_params()
    assert build_seq(params, "hu u") == build_seq(params, [Choice.HOLD, "U", "U"])
    with pytest.raises(SeqInvalid):
        build_seq(params, "HXU")


def test_max_product_term_matches_full_scan():
    rng = random.Random(7)
    params = s_params()
    for _ in range(20):
        seq = build_seq(params, random_mask(rng, 30))
        values = list(seq.values)
        for n in range(2, len(values)):
            full = max(params.delta * values[i] * values[n - i] for i in range(1, n))
            assert max_product_term(values, n, params.delta) == full


def test_update_matches_brute_force_recursion():
    rng = random.Random(11)
    params = s_params()
    for _ in range(20):
        mask = parse_mask(random_mask(rng, 25))
        values = [Fraction(1), Fraction(1)]
        for choice in mask:
            values.append(brute_force_next(values, params) if choice is Choice.UPDATE else values[-1])
        assert build_seq(params, mask).values == tuple(values)


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="HU", min_size=0, max_size=60))
def test_un_lemma_holds_for_any_mask(mask):
    seq = build_seq(s_params(), mask)
    report = verify_un_lemma(seq)
    assert report.passed, report.violation
    assert verify_mask_consistency(seq).passed


def test_un_lemma_reports_first_violation():
    seq = update_seq(s_params(), 6)
    values = list(seq.values)
    values[3] = Fraction(1, 100)
    tampered = DyadicSeq(values=tuple(values), mask=seq.mask, params=seq.params)

    report = verify_un_lemma(tampered)
    assert not report.passed
    assert report.first_index == 3
    assert report.violation["reason"] == "lower_bound"
    assert report.violation["lhs"] == "1/100"

    increasing = DyadicSeq(values=(Fraction(1), Fraction(1), Fraction(3, 4), Fraction(7, 8)), mask=(), params=seq.params)
    assert verify_un_lemma(increasing).violation["reason"] == "increase"

    bad_base = DyadicSeq(values=(Fraction(1), Fraction(1, 2)), mask=(), params=seq.params)
    assert verify_un_lemma(bad_base).first_index == 1


def test_mask_consistency_detects_wrong_choice():
    seq = build_seq(s_params(), "UUH")
    flipped = DyadicSeq(values=seq.values, mask=(Choice.UPDATE, Choice.HOLD, Choice.HOLD), params=seq.params)
    report = verify_mask_consistency(flipped)
    assert not report.passed
    assert report.first_index == 3

    short = DyadicSeq(values=seq.values, mask=seq.mask[:1], params=seq.params)
    assert verify_mask_consistency(short).violation["reason"] == "mask_length"


def test_update_runs():
    mask = parse_mask("UUHUHHUUU")
    # entries start at n = 2
    assert update_runs(mask) == [(2, 3), (5, 5), (8, 10)]
    assert update_runs(()) == []


def test_doubling_decay_on_update_runs():
    params = s_params()
    report = verify_doubling_decay(update_seq(params, 40))
    assert report.passed
    assert report.checked == 20
    assert report.detail["deltaPrime"] == "3/4"

    rng = random.Random(3)
    for _ in range(30):
        assert verify_doubling_decay(build_seq(params, random_mask(rng, 60))).passed


def test_doubling_decay_ignores_mask_past_the_values():
    params = s_params()
    seq = update_seq(params, 10)
    long_mask = DyadicSeq(values=seq.values, mask=(Choice.UPDATE,) * 30, params=params)
    report = verify_doubling_decay(long_mask)
    assert report.passed
    assert report.checked == verify_doubling_decay(seq).checked == 5


def test_seq_dict_form():
    seq = build_seq(s_params(), "UHU")
    data = seq_to_dict(seq)
    assert data["mask"] == "UHU"
    assert data["values"][:3] == ["1/1", "1/1", "3/4"]
    assert seq_from_dict(data) == seq

    with pytest.raises(SeqInvalid):
        seq_from_dict({"params": data["params"], "values": ["1/1"]})
    with pytest.raises(SeqInvalid):
        seq_from_dict({"values": data["values"]})
