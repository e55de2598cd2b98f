"""Fourier coefficients of E_2^n times a meromorphic cusp form.

Two routes are implemented and cross-checked:

* simple poles: for f = sum a H_{2k}(tau_m, .) the product E_2^j f has
  m-th coefficient (3/pi)^j sum_m a_m omega sum*_b C_{2k}(b, m)
  N^(j-k) v0^-j e^(2 pi m v0/N), valid for 0 <= j < k - 1;

* general: the auxiliary forms

      F_n = sum_{l=0}^n (-1)^l C(n,l) (2k-2n-1)!/(2k-2n-1+l)!
            (2i)^l (pi/3)^(n-l) d^l/dz^l (E_2^(n-l) f)

  are genuinely meromorphic of weight 2-2k+2n, so solving their
  principal parts in the raised basis gives their coefficients, and
  peeling off the l = 0 term yields the recursion

      coeff_m(E_2^n f) = (3/pi)^n coeff_m(F_n)
          - sum_{l=1}^n (-1)^l C(n,l) (2k-2n-1)!/(2k-2n-1+l)!
            (-12 m)^l coeff_m(E_2^(n-l) f).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from mpmath import mp, mpc, mpf, workprec

from .constants import DEFAULT_PRECISION, GUARD_BITS, POINT_I, POINT_RHO
from .engine import TruncatedSum, assemble_coefficient, f_series_coeff
from .expansion import (
    _add,
    _dz,
    _mul,
    _pow,
    _scale,
    laurent_at,
    principal_part_from_laurent,
    taylor_at,
)
from .qseries import FormExpression, Generator, parse_form
from .solver import BasisRepresentation, solve_basis

DEFAULT_POINTS = (POINT_I, POINT_RHO)


def ckl(k: int, l: int, j: int) -> Fraction:
    """Exact c_{k,l,j} = (2k-l-j-2)! (2k-2l-1)/(2k-l-1)!."""
    return Fraction(factorial(2 * k - l - j - 2) * (2 * k - 2 * l - 1), factorial(2 * k - l - 1))


def f_combination_coeff(k: int, n: int, l: int) -> Fraction:
    """Exact coefficient (-1)^l C(n,l) (2k-2n-1)!/(2k-2n-1+l)! of the
    l-th term in the auxiliary form F_n."""
    return Fraction((-1) ** l * comb(n, l) * factorial(2 * k - 2 * n - 1), factorial(2 * k - 2 * n - 1 + l))


def simple_pole_quasi_coeff(
    f_rep: BasisRepresentation,
    j: int,
    m: int,
    norm_bound: int,
    precision: int = DEFAULT_PRECISION,
) -> TruncatedSum:
    """m-th coefficient of E_2^j f for f given by a simple-pole
    representation at elliptic points."""
    k = f_rep.k
    if j < 0 or j >= k - 1:
        raise ValueError("outside validity range: need 0 <= j < k - 1")
    for t in f_rep.terms:
        if t.n != 0:
            raise ValueError("representation must contain only simple poles (n = 0)")
        if t.point.tag not in ("i", "rho"):
            raise ValueError("simple-pole route needs poles at i or rho")
    with workprec(precision + GUARD_BITS):
        scale = (3 / mp.pi) ** j
        total = mpc(0)
        tail = mpf(0)
        for t in f_rep.terms:
            f = f_series_coeff(2 * k, j, 0, t.point, m, norm_bound, precision)
            total += t.a * t.point.omega * f.value
            tail += abs(t.a) * t.point.omega * f.tail_bound
        return TruncatedSum(scale * total, scale * tail, norm_bound)


@dataclass
class QuasiExpansion:
    """Coefficient machine for E_2^n f with all pole data precomputed.

    ``f_rep`` is the raised-basis representation of f itself;
    ``aux_reps[j]`` is the representation of the weight 2-2(k-j)
    auxiliary form F_j, solved from principal parts computed by local
    series arithmetic at each pole.
    """

    expr: FormExpression
    k: int
    n: int
    f_rep: BasisRepresentation
    aux_reps: dict
    pole_points: tuple
    precision: int
    _memo: dict = field(default_factory=dict)

    def coefficient(self, m: int, norm_bound: int) -> TruncatedSum:
        value, tail = self._coeff(self.n, m, norm_bound)
        return TruncatedSum(value, tail, norm_bound)

    def coefficient_of_power(self, j: int, m: int, norm_bound: int) -> TruncatedSum:
        """m-th coefficient of E_2^j f for any intermediate power j <= n."""
        if not 0 <= j <= self.n:
            raise ValueError(f"power {j} outside 0..{self.n}")
        value, tail = self._coeff(j, m, norm_bound)
        return TruncatedSum(value, tail, norm_bound)

    def _coeff(self, j: int, m: int, norm_bound: int):
        key = (j, m, norm_bound)
        if key in self._memo:
            return self._memo[key]
        with workprec(self.precision + GUARD_BITS):
            if j == 0:
                agg = assemble_coefficient(self.f_rep, m, norm_bound, self.precision)
                out = (agg.value, agg.tail_bound)
            else:
                agg = assemble_coefficient(self.aux_reps[j], m, norm_bound, self.precision)
                scale = (3 / mp.pi) ** j
                value = scale * agg.value
                tail = scale * agg.tail_bound
                for l in range(1, j + 1):
                    coeff = f_combination_coeff(self.k, j, l)
                    factor = mpf(coeff.numerator) / coeff.denominator * mpf(-12 * m) ** l
                    sub_v, sub_t = self._coeff(j - l, m, norm_bound)
                    value -= factor * sub_v
                    tail += abs(factor) * sub_t
                out = (value, tail)
        self._memo[key] = out
        return out


def quasi_expansion(
    expr: FormExpression | str,
    n: int,
    precision: int = DEFAULT_PRECISION,
    points: tuple = DEFAULT_POINTS,
) -> QuasiExpansion:
    """Build the quasi-coefficient machine for E_2^n times the expression."""
    if isinstance(expr, str):
        expr = parse_form(expr)
    weight = expr.weight
    if weight >= 0 or weight % 2:
        raise ValueError(f"expression weight {weight} is not a negative even integer")
    k = (2 - weight) // 2
    if n < 0 or 2 - 2 * k + 2 * n >= 0:
        raise ValueError(f"weight 2-2k+2n = {2 - 2 * k + 2 * n} must stay negative")

    laurents = {}
    for point in points:
        series = laurent_at(expr, point, precision, depth=n + 6)
        if series.lowest_order < 0:
            laurents[point] = series
    if not laurents:
        raise ValueError("no poles found at the candidate points")

    f_rep = solve_basis(
        [principal_part_from_laurent(s) for s in laurents.values()], k, precision
    )

    aux_reps = {}
    with workprec(precision + GUARD_BITS):
        pi_third = mp.pi / 3
        two_i = mpc(0, 2)
        for j in range(1, n + 1):
            pps = []
            for point, lf in laurents.items():
                e2 = taylor_at(Generator("E2"), point, -lf.lowest_order + n + 6, precision)
                combo = None
                for l in range(j + 1):
                    coeff = f_combination_coeff(k, j, l)
                    factor = (
                        mpf(coeff.numerator)
                        / coeff.denominator
                        * pi_third ** (j - l)
                        * two_i**l
                    )
                    term = _mul(_pow(e2, j - l), lf) if j > l else lf
                    for _ in range(l):
                        term = _dz(term)
                    piece = _scale(term, factor)
                    combo = piece if combo is None else _add(combo, piece)
                pps.append(principal_part_from_laurent(combo))
            aux_reps[j] = solve_basis(pps, k - j, precision)
    return QuasiExpansion(expr, k, n, f_rep, aux_reps, tuple(laurents), precision)


def quasi_coeff_general(
    expr: FormExpression | str,
    n: int,
    m: int,
    norm_bound: int,
    precision: int = DEFAULT_PRECISION,
    points: tuple = DEFAULT_POINTS,
) -> TruncatedSum:
    """One-shot m-th coefficient of E_2^n times the expression."""
    return quasi_expansion(expr, n, precision, points).coefficient(m, norm_bound)
