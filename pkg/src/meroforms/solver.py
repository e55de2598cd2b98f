"""Representation of meromorphic cusp forms in the raised Poincare basis.

A weight 2-2k meromorphic cusp form with poles at elliptic points is a
combination sum a_{l,n} R^n[H_{2k}] over its pole points.  The basis
element R^n[H_{2k}] at tau0 has principal part

    eps_{2k+2n}(tau0) n! sum_{j=0}^{n} (2k+n-1)!/((2k-1+j)!(n-j)!)
                                 (2i)^j / v0^(n-j) / (z-tau0)^(j+1)

with residue constant eps_{2K}(tau0) = i omega/(2 pi) when K = 0 mod
omega and 0 otherwise.  The solver eliminates a given principal part
from the top order down; orders whose residue constant vanishes carry
no basis element and must be absorbed exactly by the tails of higher
ones, which makes the solve self-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

from mpmath import mp, mpc, mpf, workprec

from .constants import DEFAULT_PRECISION, GUARD_BITS, EllipticPoint
from .expansion import PrincipalPart


class BasisCongruenceError(ArithmeticError):
    """Top pole order incompatible with the stabilizer congruence."""


class BasisResidualError(ArithmeticError):
    """Principal part inconsistent with the tails of higher basis elements."""

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class EpsilonTilde:
    weight: int
    point: EllipticPoint
    value: mpc

    @property
    def is_zero(self) -> bool:
        return self.value == 0


def epsilon_is_zero(weight: int, point: EllipticPoint) -> bool:
    if weight % 2:
        raise ValueError("weight must be even")
    return (weight // 2) % point.omega != 0


def epsilon_tilde(weight: int, point: EllipticPoint, precision: int = DEFAULT_PRECISION) -> EpsilonTilde:
    """Residue constant of H_weight at the point: i omega/(2 pi) or 0."""
    if epsilon_is_zero(weight, point):
        return EpsilonTilde(weight, point, mpc(0))
    with workprec(precision + GUARD_BITS):
        return EpsilonTilde(weight, point, mpc(0, point.omega) / (2 * mp.pi))


@dataclass(frozen=True)
class BasisTerm:
    point: EllipticPoint
    n: int
    a: mpc


@dataclass(frozen=True)
class BasisRepresentation:
    """f = sum a R^n[H_{2k}] at the given points (source weight 2-2k)."""

    k: int
    terms: tuple[BasisTerm, ...]

    def __post_init__(self):
        for t in self.terms:
            if (self.k + t.n) % t.point.omega != 0:
                raise ValueError(
                    f"inadmissible term: k+n = {self.k + t.n} not 0 mod {t.point.omega} at {t.point}"
                )

    def at_point(self, point: EllipticPoint) -> list[BasisTerm]:
        return [t for t in self.terms if t.point == point]


def basis_principal_part(
    k: int,
    n: int,
    point: EllipticPoint,
    precision: int = DEFAULT_PRECISION,
) -> PrincipalPart:
    """Principal part of R^n[H_{2k}] at its own point; empty when the
    residue constant vanishes."""
    if k < 2 or n < 0:
        raise ValueError("need k >= 2 and n >= 0")
    eps = epsilon_tilde(2 * k + 2 * n, point, precision)
    if eps.is_zero:
        return PrincipalPart(point, {}, frozenset(), precision)
    with workprec(precision + GUARD_BITS):
        v0 = point.v0(precision)
        pref = eps.value * factorial(n)
        two_i = mpc(0, 2)
        coeffs = {}
        for j in range(n + 1):
            num = factorial(2 * k + n - 1)
            den = factorial(2 * k - 1 + j) * factorial(n - j)
            coeffs[j + 1] = pref * num / den * two_i**j / v0 ** (n - j)
        return PrincipalPart(point, coeffs, frozenset(), precision)


def solve_basis(
    pp_list: list[PrincipalPart],
    k: int,
    precision: int = DEFAULT_PRECISION,
) -> BasisRepresentation:
    """Express a principal-part collection in the raised basis.

    Greedy highest-order-first elimination per point.  A top order
    violating n = 1-k (mod omega) has no basis element and is rejected;
    lower orders without elements must be matched by higher tails to
    within 2^(-precision/2) of the largest input coefficient.
    """
    tol = mpf(2) ** (-(precision // 2))
    terms: list[BasisTerm] = []
    with workprec(precision + GUARD_BITS):
        for pp in pp_list:
            point = pp.point
            omega = point.omega
            live = [p for p, c in pp.coeffs.items() if c != 0]
            if not live:
                continue
            scale = max(abs(pp.coeffs[p]) for p in live)
            top = max(live)
            if (top - (1 - k)) % omega != 0:
                raise BasisCongruenceError(
                    f"no such meromorphic cusp form: pole order {top} at {point} "
                    f"violates order = 1-k (mod {omega})"
                )
            residual = {p: mpc(pp.coefficient(p)) for p in range(1, top + 1)}
            for p in range(top, 0, -1):
                n = p - 1
                if not epsilon_is_zero(2 * k + 2 * n, point):
                    if abs(residual[p]) <= tol * scale:
                        continue
                    bpp = basis_principal_part(k, n, point, precision)
                    a = residual[p] / bpp.coefficient(p)
                    for q in range(1, p + 1):
                        residual[q] -= a * bpp.coefficient(q)
                    terms.append(BasisTerm(point, n, a))
                elif abs(residual[p]) > tol * scale:
                    raise BasisResidualError(
                        f"principal part inconsistent with basis tails at {point}: "
                        f"order {p} residual {residual[p]}",
                        residual=residual,
                    )
    return BasisRepresentation(k, tuple(terms))


def simple_pole_rep(
    expr,
    points,
    precision: int = DEFAULT_PRECISION,
) -> BasisRepresentation:
    """Representation a_m = residue/eps for an expression with only simple
    poles at the given points."""
    from .expansion import principal_part
    from .qseries import parse_form

    if isinstance(expr, str):
        expr = parse_form(expr)
    weight = expr.weight
    if weight >= 0 or weight % 2:
        raise ValueError(f"expression weight {weight} is not a negative even integer")
    k = (2 - weight) // 2
    terms = []
    for point in points:
        pp = principal_part(expr, point, precision)
        if pp.is_empty():
            continue
        if pp.max_order > 1:
            raise ValueError(f"pole at {point} has order {pp.max_order}; not simple")
        eps = epsilon_tilde(2 * k, point, precision)
        if eps.is_zero:
            raise BasisCongruenceError(f"no simple-pole basis element at {point} for k = {k}")
        with workprec(precision + GUARD_BITS):
            terms.append(BasisTerm(point, 0, pp.coefficient(1) / eps.value))
    return BasisRepresentation(k, tuple(terms))
