import random
from fractions import Fraction

import pytest

from effamily.errors import BelowResolution, OutOfDomain, SeqInvalid
from effamily.phi import build_phi, dyadic_band, eval_f, eval_phi
from effamily.sequence import DyadicSeq, build_seq
from tests.utils import interpolate, random_mask, s_params, update_phi


def test_phi_hits_nodes():
    phi = update_phi(12)
    for n in range(13):
        assert eval_phi(phi, Fraction(1, 2**n)) == phi.seq[n]
    assert eval_phi(phi, 1) == 1


def test_phi_interpolates_between_nodes():
    phi = update_phi(12)
    # between 1/4 (3/4) and 1/2 (1)
    assert eval_phi(phi, Fraction(3, 8)) == Fraction(7, 8)
    # between 1/2 (1) and 1 (1)
    assert eval_phi(phi, Fraction(3, 4)) == 1


def test_eval_f():
    phi = update_phi(12)
    assert eval_f(phi, 0) == 0
    assert eval_f(phi, Fraction(1, 2)) == Fraction(1, 2)
    assert eval_f(phi, Fraction(1, 4)) == Fraction(3, 16)
    assert phi.f_node(2) == Fraction(3, 16)


def test_domain_errors():
    phi = update_phi(4)
    with pytest.raises(OutOfDomain):
        eval_phi(phi, Fraction(3, 2))
    with pytest.raises(OutOfDomain):
        eval_f(phi, Fraction(-1, 8))
    with pytest.raises(BelowResolution):
        eval_phi(phi, Fraction(1, 32))
    with pytest.raises(BelowResolution):
        eval_f(phi, Fraction(1, 17))
    # the resolution itself is fine
    assert eval_phi(phi, Fraction(1, 16)) == phi.seq[4]
    with pytest.raises(BelowResolution):
        phi.node(5)


def test_dyadic_band():
    assert dyadic_band(Fraction(1)) == 0
    assert dyadic_band(Fraction(3, 4)) == 0
    assert dyadic_band(Fraction(1, 2)) == 1
    assert dyadic_band(Fraction(3, 8)) == 1
    assert dyadic_band(Fraction(1, 3)) == 1
    assert dyadic_band(Fraction(1, 4)) == 2


def test_eval_phi_matches_two_point_oracle():
    rng = random.Random(5)
    params = s_params()
    phi = build_phi(build_seq(params, random_mask(rng, 16)))
    for _ in range(300):
        x = Fraction(rng.randint(1, 10**6), 10**6)
        if x < phi.resolution:
            continue
        # bracket x between consecutive nodes by scanning, independent of bit tricks
        n = 0
        while Fraction(1, 2 ** (n + 1)) >= x:
            n += 1
        a, b = Fraction(1, 2 ** (n + 1)), Fraction(1, 2**n)
        expected = phi.seq[n] if x == b else interpolate(a, phi.seq[n + 1], b, phi.seq[n], x)
        assert eval_phi(phi, x) == expected


def test_build_phi_rejects_invalid_sequence():
    params = s_params()
    bad = DyadicSeq(values=(Fraction(1), Fraction(1), Fraction(1, 100)), mask=(), params=params)
    with pytest.raises(SeqInvalid):
        build_phi(bad)
