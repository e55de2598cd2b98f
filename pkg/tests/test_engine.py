import random
from math import comb

import mpmath
import pytest
from mpmath import mp, mpc, mpf, workprec

from meroforms import (
    Field,
    POINT_I,
    POINT_RHO,
    assemble_coefficient,
    f_series_coeff,
    general_coeff_sum,
    identity_check_m0,
    raising_expansion,
)
from meroforms.constants import generic_point
from meroforms.engine import NonconvergentParameters, raising_expansion_stepped
from meroforms.lattice import c_kernel, enumerate_primitive
from meroforms.qseries import oracle_coeffs
from meroforms.solver import BasisRepresentation, BasisTerm
from meroforms.quasi import quasi_expansion

from conftest import rel_err


def test_raising_expansion_base():
    exp0 = raising_expansion(9, 0)
    assert len(exp0.terms) == 1
    t = exp0.terms[0]
    assert (t.j, t.coefficient, t.derivative_order) == (0, 1, 0)


def test_raising_expansion_single_raise():
    exp1 = raising_expansion(13, 1)
    by_j = {t.j: t for t in exp1.terms}
    assert by_j[0].coefficient == 1 and by_j[0].derivative_order == 1
    assert by_j[1].coefficient == 26 and by_j[1].derivative_order == 0


def test_binomial_identity():
    def cb(n, j):
        return comb(n, j) if 0 <= j <= n else 0

    for k in range(2, 21):
        for n in range(0, 9):
            for j in range(0, n + 2):
                lhs = (2 * k + n - j) * cb(n, j) + (2 * k + 2 * n + 1 - j) * cb(n, j - 1)
                assert lhs == (2 * k + n) * cb(n + 1, j)


def test_raising_recurrence_exact():
    for k in range(2, 21):
        expansion = raising_expansion(k, 0)
        for n in range(0, 8):
            stepped = raising_expansion_stepped(expansion)
            expansion = raising_expansion(k, n + 1)
            assert stepped == expansion


def test_f_series_trivial_zero(prec):
    out = f_series_coeff(12, 0, 2, POINT_I, 0, 100, prec)
    assert out.value == 0 and out.tail_bound == 0


def test_f_series_parameter_validation(prec):
    with pytest.raises(NonconvergentParameters):
        f_series_coeff(12, 5, 0, POINT_I, 0, 100, prec)
    with pytest.raises(ValueError, match="norm_bound"):
        f_series_coeff(12, 0, 0, POINT_I, 10, 50, prec)
    with pytest.raises(ValueError):
        f_series_coeff(11, 0, 0, POINT_I, 0, 100, prec)
    with pytest.raises(ValueError):
        f_series_coeff(12, 0, 0, generic_point(mpc(0, 2)), 0, 100, prec)


def test_f_series_leading_term(prec):
    # at m = 0 the unit ideal contributes exactly 1 to the weight-12 sum
    small = f_series_coeff(12, 0, 0, POINT_I, 0, 16, prec)
    with workprec(prec + 32):
        total = mpf(0)
        for b in enumerate_primitive(Field.GAUSSIAN, 16):
            total += c_kernel(Field.GAUSSIAN, 12, b, 0, prec) / mpf(b.norm) ** 6
    assert rel_err(small.value, total) < mpf(2) ** (-prec + 32)


def test_f_series_doubling_within_tail(prec):
    rng = random.Random(31)
    checked = 0
    while checked < 30:
        point = rng.choice([POINT_I, POINT_RHO])
        k = 2 * rng.randint(4, 14)
        j = rng.randint(0, k // 2 - 2)
        r = rng.randint(0, 3)
        m = rng.randint(0, 5)
        bound = rng.randint(40, 250)
        try:
            a = f_series_coeff(k, j, r, point, m, bound, 128)
            b = f_series_coeff(k, j, r, point, m, 2 * bound, 128)
        except ValueError:
            continue
        assert abs(b.value - a.value) <= a.tail_bound
        checked += 1


def test_general_sum_groups_into_ideal_sum(prec):
    # at i the coprime-pair sum is 4 equal unit-orbit copies per ideal
    with workprec(prec):
        for j, r, m in ((0, 0, 0), (1, 1, 2), (0, 2, 1)):
            g = general_coeff_sum(12, POINT_I, j, r, m, 400, prec)
            f = f_series_coeff(12, j, r, POINT_I, m, 400, prec)
            lhs = mpc(0, -2) ** r * g.value
            assert abs(lhs - 4 * f.value) < g.tail_bound + f.tail_bound + mpf(2) ** (-prec + 48)


def test_general_sum_m0_r_positive_zero(prec):
    assert general_coeff_sum(12, POINT_I, 0, 1, 0, 200, prec).value == 0


def test_general_sum_generic_stability(prec):
    point = generic_point(mpc(mpf(1) / 4, mpf(11) / 10))
    s1 = general_coeff_sum(16, point, 0, 0, 0, 200, prec)
    s2 = general_coeff_sum(16, point, 0, 0, 0, 400, prec)
    assert abs(s2.value - s1.value) <= s1.tail_bound


def test_assemble_matches_oracle(prec):
    rep = quasi_expansion("1/E10", 0, prec).f_rep
    oc = oracle_coeffs("1/E10", 3)
    with workprec(prec):
        for m in range(4):
            got = assemble_coefficient(rep, m, 2000, prec)
            exact = mpf(oc[m].numerator) / oc[m].denominator
            assert rel_err(got.value, exact) < mpf(10) ** -15
            assert abs(got.value.imag) <= got.tail_bound + mpf(2) ** (-prec // 2) * abs(got.value)


def test_assemble_empty_representation(prec):
    out = assemble_coefficient(BasisRepresentation(6, ()), 3, 100, prec)
    assert out.value == 0 and out.tail_bound == 0


def test_assemble_generic_point_agrees_with_elliptic(prec):
    # the same representation placed at generic tau = i must reproduce the
    # elliptic route: the pair sum carries the 2 omega unit copies itself
    with workprec(prec):
        a = mpc(mpf(3) / 7, mpf(-1) / 5)
        rep_i = BasisRepresentation(6, (BasisTerm(POINT_I, 0, a),))
        rep_g = BasisRepresentation(6, (BasisTerm(generic_point(mpc(0, 1)), 0, a),))
        for m in (0, 1, 3):
            vi = assemble_coefficient(rep_i, m, 600, prec)
            vg = assemble_coefficient(rep_g, m, 600, prec)
            assert abs(vi.value - vg.value) <= vi.tail_bound + vg.tail_bound + mpf(2) ** (-prec + 64)


def test_identity_single_term(prec, e4i):
    lhs, rhs, err = identity_check_m0(1, prec)
    with workprec(prec):
        want = 9 - 4 * mp.pi**2 * e4i
        assert rel_err(lhs, want) < mpf(2) ** (-prec + 32)


def test_identity_stated_constants_do_not_balance(prec):
    # the 9/182-normalized statement is off by a factor 27 on the leading
    # cosine; the discrepancy converges to about 141.25, far outside any
    # truncation effect
    lhs, rhs, err = identity_check_m0(600, prec)
    assert err > 100


def test_identity_balanced_constants(prec, e4i):
    # replacing 9 -> 243 and 182 -> 91 balances the identity
    with workprec(prec + 32):
        lhs = mpf(0)
        for b in enumerate_primitive(Field.GAUSSIAN, 4000):
            theta = mpmath.atan2(mpf(b.c), mpf(b.d))
            lhs += (243 * mpmath.cos(32 * theta) - 4 * mp.pi**2 * e4i * mpmath.cos(28 * theta)) / mpf(b.norm) ** 13
        rhs = 27 * mp.pi**3 * e4i**8 / 91
        assert rel_err(lhs, rhs) < mpf(10) ** -9
