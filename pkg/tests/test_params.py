from fractions import Fraction

import pytest

from effamily.errors import InvalidDelta, InvalidExponents, InvalidParams, RationalFormatError
from effamily.params import delta_prime, format_rational, make_params, params_from_dict, params_to_dict, parse_rational


def test_make_params_derives_lambda():
    params = make_params(1, 2, "1/2")
    assert params.lam == Fraction(1, 2)
    assert params.delta == Fraction(1, 2)

    params = make_params(2, 4, Fraction(1, 4))
    assert params.lam == Fraction(1, 4)
    assert params.lam * 2 ** (params.beta - params.alpha) == 1


def test_make_params_rejects_bad_exponents():
    with pytest.raises(InvalidExponents):
        make_params(2, 1, "1/2")
    with pytest.raises(InvalidExponents):
        make_params(0, 1, "1/2")
    with pytest.raises(InvalidExponents):
        make_params(1, 1, "1/2")
    # InvalidExponents is also an InvalidParams and a ValueError
    with pytest.raises(ValueError, match="alpha < beta"):
        make_params(3, 2, "1/2")


@pytest.mark.parametrize("delta", ["0", "1", "3/2", "-1/2", 0, 1])
def test_make_params_rejects_delta_outside_open_interval(delta):
    with pytest.raises(InvalidDelta):
        make_params(1, 2, delta)


def test_make_params_rejects_malformed_delta():
    with pytest.raises(InvalidDelta):
        make_params(1, 2, "0.5")


def test_delta_prime_below_one():
    params = make_params(1, 2, "1/2")
    assert delta_prime(params) == Fraction(3, 4)
    assert params.delta_prime == Fraction(3, 4)
    assert delta_prime(make_params(2, 4, "1/4")) == Fraction(7, 16)


def test_parse_and_format_rational():
    assert parse_rational("6/8") == Fraction(3, 4)
    assert parse_rational(" -1 / 2 ") == Fraction(-1, 2)
    assert parse_rational("5") == Fraction(5)
    assert format_rational(Fraction(6, 8)) == "3/4"
    assert format_rational(0) == "0/1"
    assert format_rational(5) == "5/1"
    assert format_rational(Fraction(-1, 2)) == "-1/2"


@pytest.mark.parametrize("text", ["1/0", "0.5", "1e3", "a/b", "", "1//2"])
def test_parse_rational_rejects(text):
    with pytest.raises(RationalFormatError):
        parse_rational(text)


def test_parse_rational_rejects_floats():
    with pytest.raises(RationalFormatError):
        parse_rational(0.5)  # type: ignore[arg-type]


def test_params_dict_form():
    params = make_params(1, 2, "1/2")
    data = params_to_dict(params)
    assert data == {"alpha": 1, "beta": 2, "delta": "1/2", "lambda": "1/2"}
    assert params_from_dict(data) == params


def test_params_from_dict_rejects_inconsistent_lambda():
    with pytest.raises(InvalidParams):
        params_from_dict({"alpha": 1, "beta": 2, "delta": "1/2", "lambda": "1/4"})
    with pytest.raises(InvalidParams):
        params_from_dict({"alpha": 1, "delta": "1/2"})
