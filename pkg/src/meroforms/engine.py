"""Fourier-coefficient evaluation from lattice sums.

The m-th Fourier coefficient of the raised basis element R^n[H_{2k}] at
an elliptic point tau0 (stabilizer order omega, v0 = Im tau0) is

  omega * sum_{j=0}^{n} (2k+n-1)!/(2k+n-1-j)! C(n,j)
          * v0^-j * sum*_b C_{2k+2n}(b, m) N^{j-(k+n)} (4 pi m)^{n-j}
                           e^{2 pi m v0 / N}

with the starred sum over primitive ideals; at arbitrary points the
ideal sum is replaced by half the coprime-pair sum over the complex
kernel.  Every truncated sum is reported together with a rigorous bound
on its omitted tail, using the per-norm ideal count bound d(N) <= 2
sqrt(N) (a circle-packing count for pair sums), which keeps the bound
finite on the whole validity range k >= j + 2 of the F-series exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial, gcd

import mpmath
from mpmath import mp, mpc, mpf, workprec

from .constants import DEFAULT_PRECISION, GUARD_BITS, POINT_I, EllipticPoint, closed_value
from .lattice import Field, complete_unimodular, ideal_sum_data
from .solver import BasisRepresentation


class NonconvergentParameters(ValueError):
    pass


@dataclass(frozen=True)
class TruncatedSum:
    """Partial sum with a rigorous bound on the omitted tail."""

    value: mpc
    tail_bound: mpf
    norm_bound: int


@dataclass(frozen=True)
class RaisingTerm:
    j: int
    coefficient: int  # (2k+n-1)!/(2k+n-1-j)! * C(n, j)
    power_exponent: int  # exponent of (-2i)
    derivative_order: int  # = n - j


@dataclass(frozen=True)
class RaisingExpansion:
    k: int
    n: int
    terms: tuple[RaisingTerm, ...]


def raising_expansion(k: int, n: int) -> RaisingExpansion:
    """Exact expansion of the n-fold raising of H_{2k} over derivative
    orders of the weight 2k+2n family."""
    if k < 2 or n < 0:
        raise ValueError("need k >= 2 and n >= 0")
    terms = []
    for j in range(n + 1):
        coeff = factorial(2 * k + n - 1) // factorial(2 * k + n - 1 - j) * comb(n, j)
        terms.append(RaisingTerm(j, coeff, n - j, n - j))
    return RaisingExpansion(k, n, tuple(terms))


def raising_expansion_stepped(expansion: RaisingExpansion) -> RaisingExpansion:
    """Push an expansion through one more raising using
    R(H_{2K,j}) = -2i d/dz H_{2K+2,j} + (2K - j) H_{2K+2,j+1}, where
    2K = 2k + 2n is the current family weight.  Used to check the closed
    form against the recurrence exactly."""
    k, n = expansion.k, expansion.n
    two_K = 2 * k + 2 * n
    acc: dict[int, int] = {}
    for t in expansion.terms:
        # -2i d/dz branch keeps j, adds one derivative and one (-2i)
        acc[t.j] = acc.get(t.j, 0) + t.coefficient
        # (2K - j) branch moves j -> j+1
        acc[t.j + 1] = acc.get(t.j + 1, 0) + t.coefficient * (two_K - t.j)
    n1 = n + 1
    terms = tuple(RaisingTerm(j, acc[j], n1 - j, n1 - j) for j in sorted(acc))
    return RaisingExpansion(k, n1, terms)


def _field_of(point: EllipticPoint) -> Field:
    if point.tag == "i":
        return Field.GAUSSIAN
    if point.tag == "rho":
        return Field.EISENSTEIN
    raise ValueError(f"ideal sums need an elliptic point, got {point}")


def _check_norm_bound(norm_bound: int, m: int, v0: float) -> None:
    floor = max(16, int(mpmath.ceil(4 * mp.pi * m * v0)))
    if norm_bound < floor:
        raise ValueError(f"norm_bound {norm_bound} below required {floor}")


def _ideal_tail_bound(k_half_minus_j, B, four_pi_m_r, v0_pow_j) -> mpf:
    # omitted ideals per norm N bounded by d(N) <= 2 sqrt(N); terms carry
    # e^{2 pi m v0/N} <= e^{1/2} once B >= 4 pi m v0
    s = k_half_minus_j - mpf(3) / 2
    return 2 * mpmath.exp(mpf(1) / 2) * four_pi_m_r / v0_pow_j * mpf(B) ** (-s) / s


@lru_cache(maxsize=8192)
def f_series_coeff(
    k: int,
    j: int,
    r: int,
    point: EllipticPoint,
    m: int,
    norm_bound: int,
    precision: int = DEFAULT_PRECISION,
) -> TruncatedSum:
    """m-th coefficient of the building-block series with parameters
    (k, j, r): v0^-j sum*_b C_k(b, m) N^(j-k/2) (4 pi m)^r e^(2 pi m v0/N).

    Requires even k with k/2 >= j + 2 (tail convergence) and
    norm_bound >= max(16, ceil(4 pi m v0)).
    """
    if k % 2 or k < 4:
        raise ValueError("k must be an even integer >= 4")
    if j < 0 or r < 0 or m < 0:
        raise ValueError("j, r, m must be nonnegative")
    if k // 2 < j + 2:
        raise NonconvergentParameters("nonconvergent parameter regime: need k/2 >= j + 2")
    field = _field_of(point)
    if m == 0 and r >= 1:
        return TruncatedSum(mpc(0), mpf(0), norm_bound)
    with workprec(precision + GUARD_BITS):
        v0 = point.v0(precision)
        _check_norm_bound(norm_bound, m, v0)
        rows = ideal_sum_data(field, norm_bound, precision)
        exponent = j - k // 2
        total = mpf(0)
        comp = mpf(0)  # Kahan compensation
        two_pi_m_v0 = 2 * mp.pi * m * v0
        for norm, theta, phase_num in rows:
            cosine = mpmath.cos(mp.pi * m * phase_num / norm + k * theta)
            term = cosine * mpf(norm) ** exponent
            if m:
                term *= mpmath.exp(two_pi_m_v0 / norm)
            y = term - comp
            t = total + y
            comp = (t - total) - y
            total = t
        four_pi_m_r = (4 * mp.pi * m) ** r if r else mpf(1)
        v0_pow_j = v0**j
        value = total * four_pi_m_r / v0_pow_j
        tail = _ideal_tail_bound(mpf(k) / 2 - j, norm_bound, four_pi_m_r, v0_pow_j)
        return TruncatedSum(mpc(value), tail, norm_bound)


def _lattice_min_distance(tau: mpc) -> mpf:
    """Shortest nonzero vector of Z tau + Z."""
    u, v = tau.real, tau.imag
    best = mpf(1)  # (c, d) = (0, 1)
    cmax = int(mpmath.ceil(1 / v)) + 1
    for c in range(1, cmax + 1):
        d0 = int(mpmath.nint(-c * u))
        for d in (d0 - 1, d0, d0 + 1):
            w = abs(c * tau + d)
            if w < best and w > 0:
                best = w
    return best


def general_coeff_sum(
    k_w: int,
    point: EllipticPoint,
    j: int,
    r: int,
    m: int,
    height_bound: int,
    precision: int = DEFAULT_PRECISION,
) -> TruncatedSum:
    """Coprime-pair sum sum_{(c,d)=1, |c tau + d|^2 <= H}
    (|c tau + d|^2 / v0)^j (2 pi i m)^r B_{k_w,c,d}(tau, m).

    This is the raw m-th Fourier coefficient of the j-weighted, r-times
    differentiated Poincare kernel; at i (resp. rho) it groups into
    2 omega = 4 (resp. 6) equal unit-orbit terms per primitive ideal.
    """
    if k_w % 2 or k_w < 4:
        raise ValueError("k_w must be an even integer >= 4")
    if k_w // 2 < j + 2:
        raise NonconvergentParameters("nonconvergent parameter regime: need k_w/2 >= j + 2")
    if m == 0 and r >= 1:
        return TruncatedSum(mpc(0), mpf(0), height_bound)
    with workprec(precision + GUARD_BITS):
        tau = point.tau(precision)
        u, v0 = tau.real, tau.imag
        _check_norm_bound(height_bound, m, v0)
        usq = u * u + v0 * v0
        two_pi = 2 * mp.pi
        total = mpc(0)
        comp = mpc(0)
        cmax = int(mpmath.floor(mpmath.sqrt(height_bound) / v0)) + 1
        for c in range(-cmax, cmax + 1):
            rad_sq = mpf(height_bound) - c * c * v0 * v0
            if rad_sq < 0:
                continue
            rad = mpmath.sqrt(rad_sq)
            dlo = int(mpmath.floor(-c * u - rad))
            dhi = int(mpmath.ceil(-c * u + rad))
            for d in range(dlo, dhi + 1):
                if gcd(c, d) != 1:
                    continue
                w = c * tau + d
                wsq = abs(w) ** 2
                if wsq > height_bound:
                    continue
                a, b = complete_unimodular(c, d)
                term = w ** (-k_w) * (wsq / v0) ** j
                if m:
                    phase = (a * c * usq + b * d + u * (a * d + b * c)) / wsq
                    term *= mpmath.exp(two_pi * m * v0 / wsq)
                    term *= mpmath.exp(-1j * two_pi * m * phase)
                y = term - comp
                t = total + y
                comp = (t - total) - y
                total = t
        if r:
            total *= (mpc(0, 2 * mp.pi * m)) ** r
        # packing tail: points per dyadic shell <= 4^(t+1)(sqrt(H)/r0 + 1)^2
        r0 = _lattice_min_distance(tau) / 2
        decay = j - k_w // 2  # < -1
        geom = 1 / (1 - mpf(4) ** (1 + decay))
        tail = (
            4
            * mpmath.exp(mpf(1) / 2)
            * (two_pi * m) ** r
            / v0**j
            * (mpmath.sqrt(height_bound) / r0 + 1) ** 2
            * mpf(height_bound) ** decay
            * geom
        )
        return TruncatedSum(total, tail, height_bound)


def assemble_coefficient(
    rep: BasisRepresentation,
    m: int,
    norm_bound: int,
    precision: int = DEFAULT_PRECISION,
) -> TruncatedSum:
    """m-th Fourier coefficient of sum a R^n[H_{2k}] per the representation.

    Elliptic points use the grouped ideal sums with prefactor omega; the
    residue-constant convention eps = i omega/(2 pi) pairs with exactly
    this prefactor (the raw pair sum counts each ideal 2 omega times and
    the basis normalization absorbs the remaining factor 2).
    """
    k = rep.k
    with workprec(precision + GUARD_BITS):
        total = mpc(0)
        tail = mpf(0)
        for term in rep.terms:
            point, n, a = term.point, term.n, term.a
            expansion = raising_expansion(k, n)
            part = mpc(0)
            part_tail = mpf(0)
            if point.tag in ("i", "rho"):
                for rt in expansion.terms:
                    f = f_series_coeff(2 * k + 2 * n, rt.j, rt.derivative_order, point, m, norm_bound, precision)
                    part += rt.coefficient * f.value
                    part_tail += rt.coefficient * f.tail_bound
                part *= point.omega
                part_tail *= point.omega
            else:
                minus_two_i = mpc(0, -2)
                for rt in expansion.terms:
                    g = general_coeff_sum(2 * k + 2 * n, point, rt.j, rt.derivative_order, m, norm_bound, precision)
                    part += rt.coefficient * minus_two_i**rt.power_exponent * g.value
                    part_tail += rt.coefficient * mpf(2) ** rt.power_exponent * g.tail_bound
                part /= 2
                part_tail /= 2
            total += a * part
            tail += abs(a) * part_tail
        return TruncatedSum(total, tail, norm_bound)


def identity_check_m0(
    norm_bound: int,
    precision: int = DEFAULT_PRECISION,
) -> tuple[mpf, mpf, mpf]:
    """Constant-term identity over Gaussian ideals, 9/182 normalization:

        sum*_b N^-13 (9 cos(32 theta_b) - 4 pi^2 E_4(i) cos(28 theta_b))
            = 27 pi^3 E_4(i)^8 / 182.

    Returns (lhs, rhs, |lhs - rhs|).  These constants do not balance;
    the form that actually follows from the m = 0 coefficient of the
    quartic reciprocal has 243 and 1/91 in place of 9 and 1/182 and is
    checked in the test suite.  This function evaluates the 9/182 form
    verbatim.
    """
    with workprec(precision + GUARD_BITS):
        e4i = closed_value(4, POINT_I, precision)
        rows = ideal_sum_data(Field.GAUSSIAN, norm_bound, precision)
        lhs = mpf(0)
        comp = mpf(0)
        four_pi_sq_e4 = 4 * mp.pi**2 * e4i
        for norm, theta, _ in rows:
            term = (mpmath.cos(32 * theta) * 9 - four_pi_sq_e4 * mpmath.cos(28 * theta)) / mpf(norm) ** 13
            y = term - comp
            t = lhs + y
            comp = (t - lhs) - y
            lhs = t
        rhs = 27 * mp.pi**3 * e4i**8 / 182
        return lhs, rhs, abs(lhs - rhs)
