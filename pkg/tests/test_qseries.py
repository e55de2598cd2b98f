from fractions import Fraction

import pytest

from meroforms.qseries import (
    Constant,
    FormParseError,
    RationalQSeries,
    make_eisenstein,
    oracle_coeffs,
    parse_form,
    sigma,
    split_e2_power,
)


def F(*xs):
    return tuple(Fraction(x) for x in xs)


def test_sigma_values():
    assert sigma(1, 3) == 1
    assert sigma(2, 3) == 9
    assert sigma(3, 1) == 4
    assert sigma(2, 5) == 33
    assert sigma(12, 1) == 28


def test_eisenstein_expansions():
    assert make_eisenstein(4, 2).coeffs == F(1, 240, 2160)
    assert make_eisenstein(2, 3).coeffs == F(1, -24, -72, -96)
    assert make_eisenstein(6, 2).coeffs == F(1, -504, -16632)


def test_eisenstein_errors():
    with pytest.raises(ValueError, match="weight not in"):
        make_eisenstein(8, 4)
    with pytest.raises(ValueError):
        make_eisenstein(4, -1)


def test_multiply_identities():
    e4 = make_eisenstein(4, 64)
    e6 = make_eisenstein(6, 64)
    assert e4 * e6 == make_eisenstein(10, 64)
    one = RationalQSeries.one(64)
    assert one * e4 == e4
    q = RationalQSeries([0, 1])
    assert (q * q).coeffs == F(0, 0)  # truncated to min order 1
    q2 = RationalQSeries([0, 1, 0])
    assert (q2 * q2).coeffs == F(0, 0, 1)


def test_truncation_is_min_of_operands():
    a = make_eisenstein(4, 10)
    b = make_eisenstein(6, 5)
    assert (a * b).truncation_order == 5
    assert (a + b).truncation_order == 5


def test_reciprocal():
    e4 = make_eisenstein(4, 8)
    inv = e4.reciprocal()
    assert inv.coeffs[:3] == F(1, -240, 55440)
    assert (e4 * inv) == RationalQSeries.one(8)
    e6inv4 = make_eisenstein(6, 4).reciprocal() ** 4
    assert e6inv4.coeffs[:2] == F(1, 2016)
    assert RationalQSeries.one(5).reciprocal() == RationalQSeries.one(5)
    with pytest.raises(ZeroDivisionError, match="not invertible"):
        RationalQSeries([0, 1, 2]).reciprocal()


def test_dee():
    e2 = make_eisenstein(2, 32)
    e4 = make_eisenstein(4, 32)
    assert e2.dee() * 12 == e2 * e2 - e4
    assert RationalQSeries.one(6).dee() == RationalQSeries.constant(0, 6)
    q = RationalQSeries([0, 1, 0])
    assert q.dee() == q


def test_ramanujan_system_exact_order_64():
    e2, e4, e6, e10 = (make_eisenstein(w, 64) for w in (2, 4, 6, 10))
    assert e4 * e6 == e10
    assert e2.dee() * 12 == e2 * e2 - e4
    assert e4.dee() * 3 == e2 * e4 - e6
    assert e6.dee() * 2 == e2 * e6 - e4 * e4


def test_oracle_examples():
    assert oracle_coeffs("1/E10", 1) == F(1, 264)
    assert oracle_coeffs("E2^0/E10", 1) == F(1, 264)
    assert oracle_coeffs("1/E6^4", 1) == F(1, 2016)


def test_oracle_dee():
    # D multiplies the m-th coefficient by m
    plain = oracle_coeffs("1/E10", 4)
    deed = oracle_coeffs("D(1/E10)", 4)
    assert deed == tuple(m * c for m, c in enumerate(plain))


def test_parser_weights():
    assert parse_form("E2").weight == 2
    assert parse_form("E2^3 * E4/E6^2").weight == 3 * 2 + 4 - 12
    assert parse_form("D(1/E10)").weight == -8
    assert parse_form("1/E6^4").weight == -24
    assert parse_form("E6^-2").weight == -12
    assert parse_form("E4^0").weight == 0


def test_parser_errors():
    for bad in ("E3", "E4 +", "E4 * ", "(E4", "E4^x", "E4 E6"):
        with pytest.raises(FormParseError):
            parse_form(bad)


def test_split_e2_power():
    n, rest = split_e2_power(parse_form("E2^2 * (1/E10)"))
    assert n == 2 and rest.weight == -10
    n, rest = split_e2_power(parse_form("1/E6^4"))
    assert n == 0 and rest.weight == -24
    n, rest = split_e2_power(parse_form("E2 * E2 * (1/E10)"))
    assert n == 2
    with pytest.raises(FormParseError):
        split_e2_power(parse_form("1/(E2 * E10)"))


def test_json_round_trip():
    s = make_eisenstein(2, 5) * Fraction(1, 3)
    strings = s.to_json_list()
    assert all(isinstance(x, str) for x in strings)
    assert strings[1] == "-8"
    assert RationalQSeries.from_json_list(strings) == s


def test_power_and_constants():
    e4 = make_eisenstein(4, 6)
    assert e4**0 == RationalQSeries.one(6)
    assert e4**-1 == e4.reciprocal()
    assert parse_form("2 * E4").qseries(2).coeffs == F(2, 480, 4320)
    assert isinstance(parse_form("1"), Constant)
