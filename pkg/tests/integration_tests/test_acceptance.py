"""Desk-scale acceptance runs. Deselect with `-m "not slow"`."""

import random
from datetime import UTC, datetime
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from effamily.archive import certify_payload, make_archive, serialize_archive
from effamily.certify.grid import certify_A1, certify_R2, r2_constant
from effamily.certify.kappa import kappa_beta_seq, l_constant, verify_condition_i, verify_condition_ii, verify_condition_iii
from effamily.phi import build_phi, eval_phi
from effamily.reduction import f_sum, verify_theta1_bounds
from effamily.sequence import build_seq, verify_un_lemma
from effamily.tree import DEFAULT_SEARCH_CAP, build_tree, string_seq, validate_tree, witness
from tests.utils import constant_phi, interpolate, random_mask, s_params, update_phi, wide_params

pytestmark = pytest.mark.slow

STAMP = datetime(2024, 1, 1, tzinfo=UTC)


@pytest.fixture(scope="module")
def level_two():
    return build_tree(s_params(), 2, DEFAULT_SEARCH_CAP)


def test_condition_i_is_exact_on_random_masks():
    rng = random.Random(1)
    params = s_params()
    for _ in range(1000):
        kappa = kappa_beta_seq(build_seq(params, random_mask(rng, 64)), params)
        report = verify_condition_i(kappa)
        assert report.passed, report.violation
        assert report.checked == 65


def test_un_lemma_at_depth_200():
    rng = random.Random(1)
    params = s_params()
    for _ in range(1000):
        seq = build_seq(params, random_mask(rng, 200))
        assert verify_un_lemma(seq).passed


def test_level_two_tree(level_two):
    report = validate_tree(level_two)
    assert report.passed, report.violation
    first = level_two.levels[1].strings["0"]
    assert first.witness_index == 4
    assert first.values[4] / level_two.levels[1].strings["1"].values[4] == Fraction(27, 64)
    for xi in level_two.levels[2].order:
        for zeta in level_two.levels[2].order:
            if xi != zeta:
                assert witness(level_two, xi, zeta).passed


def test_level_two_archive_rebuilds_byte_identical(level_two):
    def archive_bytes(tree):
        return serialize_archive(make_archive(tree, certify_payload(tree), ["build", "--levels", "2"], STAMP))

    first = archive_bytes(level_two)
    assert archive_bytes(build_tree(s_params(), 2, DEFAULT_SEARCH_CAP)) == first


def test_witness_is_symmetric_at_level_two(level_two):
    report = witness(level_two, "10", "01")
    assert report.passed
    deepest = report.entries[-1]
    assert deepest.level == 2
    assert deepest.bound == Fraction(1, 4)
    assert deepest.ratio_st < Fraction(1, 4)
    assert deepest.ratio_ts < Fraction(1, 4)


@pytest.fixture(scope="module")
def sandwich_phis():
    member = build_phi(string_seq(build_tree(s_params(), 1), "0"))
    assert member.depth >= 9
    return constant_phi(9), member


rationals = st.fractions(min_value=-4, max_value=4, max_denominator=64)


@settings(max_examples=500, deadline=None)
@given(x=st.lists(rationals, max_size=8), xhat=st.lists(rationals, max_size=8))
def test_sandwich_on_random_pairs(sandwich_phis, x, xhat):
    for phi in sandwich_phis:
        report = verify_theta1_bounds(x, xhat, phi, phi.params)
        assert report.passed, report.violation


def _grid_vector(rng, depth):
    return {m: Fraction(rng.randint(0, 2**depth), 2**depth) for m in rng.sample(range(12), rng.randint(0, 6))}


def test_r2_at_grid_depth_12():
    phi = update_phi(12)
    certificate = certify_R2(phi, 12)
    assert certificate.C == r2_constant(phi) == Fraction(32, 3)

    rng = random.Random(6)
    for _ in range(200):
        a, b, c = (_grid_vector(rng, 12) for _ in range(3))
        assert f_sum(a, c, phi, phi.params) <= certificate.C * (f_sum(a, b, phi, phi.params) + f_sum(b, c, phi, phi.params))


def test_a1_at_grid_depth_12():
    certificate = certify_A1(update_phi(12), 12, 10)
    assert certificate.epsilon == Fraction(3, 32)
    assert certificate.M == 0
    assert certificate.passed


@pytest.mark.parametrize("params", [s_params(), wide_params()], ids=["alpha1", "alpha2"])
def test_kappa_conditions_on_random_masks(params):
    constant = l_constant(params)
    assert constant.effective == 2
    rng = random.Random(8)
    for _ in range(100):
        kappa = kappa_beta_seq(build_seq(params, random_mask(rng, 32)), params)
        for report in (verify_condition_ii(kappa, constant), verify_condition_iii(kappa, constant)):
            assert report.passed, (report.name, report.violation)


def test_eval_phi_against_two_point_oracle():
    rng = random.Random(9)
    phi = build_phi(build_seq(s_params(), random_mask(rng, 24)))
    for _ in range(1000):
        # a point of [1/2^(band+1), 1/2^band], endpoints included
        band = rng.randrange(phi.depth)
        x = Fraction(2**30 + rng.randint(0, 2**30), 2 ** (31 + band))
        assert phi.resolution <= x <= 1
        n = 0
        while Fraction(1, 2 ** (n + 1)) >= x:
            n += 1
        a, b = Fraction(1, 2 ** (n + 1)), Fraction(1, 2**n)
        expected = phi.seq[n] if x == b else interpolate(a, phi.seq[n + 1], b, phi.seq[n], x)
        assert eval_phi(phi, x) == expected
