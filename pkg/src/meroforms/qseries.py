"""Exact truncated q-series arithmetic over the rationals.

This module is the ground-truth side of the library: Eisenstein series
q-expansions and the expression trees built from them are evaluated with
``fractions.Fraction`` coefficients, so every coefficient it reports is
exact.  All floating-point machinery elsewhere is validated against it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Iterable, Sequence, Union

RationalLike = Union[int, Fraction]

#: q-expansion constants: E_w = 1 + EISENSTEIN_COEFF[w] * sum sigma_{w-1}(n) q^n
EISENSTEIN_COEFF = {2: -24, 4: 240, 6: -504, 10: -264}


@lru_cache(maxsize=None)
def sigma(n: int, power: int) -> int:
    """Divisor sum sigma_power(n) for n >= 1."""
    if n < 1:
        raise ValueError("sigma is defined for n >= 1")
    total = 0
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            total += d**power
            e = n // d
            if e != d:
                total += e**power
    return total


class RationalQSeries:
    """Truncated formal power series in q with exact rational coefficients.

    ``coeffs[n]`` is the coefficient of q^n; the truncation order is
    ``len(coeffs) - 1``.  Instances are immutable; arithmetic truncates to
    the minimum order of the operands.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike]):
        cs = tuple(Fraction(c) for c in coeffs)
        if not cs:
            raise ValueError("series needs at least the constant term")
        object.__setattr__(self, "coeffs", cs)

    @property
    def truncation_order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value: RationalLike, truncation_order: int) -> "RationalQSeries":
        return cls((Fraction(value),) + (Fraction(0),) * truncation_order)

    @classmethod
    def one(cls, truncation_order: int) -> "RationalQSeries":
        return cls.constant(1, truncation_order)

    def __repr__(self) -> str:
        head = ", ".join(str(c) for c in self.coeffs[:5])
        tail = ", ..." if len(self.coeffs) > 5 else ""
        return f"RationalQSeries([{head}{tail}], order={self.truncation_order})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RationalQSeries) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> "RationalQSeries":
        if isinstance(other, RationalQSeries):
            return other
        return RationalQSeries.constant(other, self.truncation_order)

    def __add__(self, other) -> "RationalQSeries":
        o = self._coerce(other)
        order = min(self.truncation_order, o.truncation_order)
        return RationalQSeries(
            a + b for a, b in zip(self.coeffs[: order + 1], o.coeffs[: order + 1])
        )

    __radd__ = __add__

    def __neg__(self) -> "RationalQSeries":
        return RationalQSeries(-c for c in self.coeffs)

    def __sub__(self, other) -> "RationalQSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalQSeries":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalQSeries":
        if isinstance(other, (int, Fraction)):
            return RationalQSeries(c * other for c in self.coeffs)
        o = self._coerce(other)
        order = min(self.truncation_order, o.truncation_order)
        a, b = self.coeffs, o.coeffs
        out = [Fraction(0)] * (order + 1)
        for i in range(min(len(a), order + 1)):
            ai = a[i]
            if not ai:
                continue
            for j in range(min(len(b), order + 1 - i)):
                out[i + j] += ai * b[j]
        return RationalQSeries(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RationalQSeries":
        if not isinstance(exponent, int):
            raise TypeError("only integer powers are supported")
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        result = RationalQSeries.one(self.truncation_order)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def reciprocal(self) -> "RationalQSeries":
        """Multiplicative inverse up to the truncation order."""
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("not invertible as q-series")
        n = self.truncation_order
        b = [Fraction(0)] * (n + 1)
        b[0] = 1 / a[0]
        for k in range(1, n + 1):
            acc = Fraction(0)
            for i in range(1, min(k, len(a) - 1) + 1):
                acc += a[i] * b[k - i]
            b[k] = -acc / a[0]
        return RationalQSeries(b)

    def dee(self) -> "RationalQSeries":
        """The operator q d/dq: coefficient n maps to n times itself."""
        return RationalQSeries(n * c for n, c in enumerate(self.coeffs))

    def to_json_list(self) -> list[str]:
        """Coefficients as canonical 'p/q' decimal strings."""
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json_list(cls, items: Sequence[str]) -> "RationalQSeries":
        return cls(Fraction(s) for s in items)


def make_eisenstein(weight: int, truncation_order: int) -> RationalQSeries:
    """Normalized Eisenstein series q-expansion with constant term 1."""
    if weight not in EISENSTEIN_COEFF:
        raise ValueError("weight not in {2, 4, 6, 10}")
    if truncation_order < 0:
        raise ValueError("truncation_order must be >= 0")
    c = EISENSTEIN_COEFF[weight]
    coeffs = [Fraction(1)]
    coeffs.extend(Fraction(c * sigma(n, weight - 1)) for n in range(1, truncation_order + 1))
    return RationalQSeries(coeffs)


# --------------------------------------------------------------------------
# Expression trees over the generators E2, E4, E6, E10.


GENERATOR_WEIGHTS = {"E2": 2, "E4": 4, "E6": 6, "E10": 10}


@dataclass(frozen=True)
class FormExpression:
    """Base class for expression-tree nodes; use the subclasses below."""

    @property
    def weight(self) -> int:
        raise NotImplementedError

    def qseries(self, truncation_order: int) -> RationalQSeries:
        raise NotImplementedError

    def has_reciprocal(self) -> bool:
        raise NotImplementedError

    def contains_generator(self, name: str) -> bool:
        raise NotImplementedError

    def __str__(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Generator(FormExpression):
    name: str

    def __post_init__(self):
        if self.name not in GENERATOR_WEIGHTS:
            raise ValueError(f"unknown generator {self.name!r}")

    @property
    def weight(self) -> int:
        return GENERATOR_WEIGHTS[self.name]

    def qseries(self, truncation_order: int) -> RationalQSeries:
        return make_eisenstein(GENERATOR_WEIGHTS[self.name], truncation_order)

    def has_reciprocal(self) -> bool:
        return False

    def contains_generator(self, name: str) -> bool:
        return self.name == name

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant(FormExpression):
    value: Fraction

    @property
    def weight(self) -> int:
        return 0

    def qseries(self, truncation_order: int) -> RationalQSeries:
        return RationalQSeries.constant(self.value, truncation_order)

    def has_reciprocal(self) -> bool:
        return False

    def contains_generator(self, name: str) -> bool:
        return False

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Product(FormExpression):
    factors: tuple[FormExpression, ...]

    @property
    def weight(self) -> int:
        return sum(f.weight for f in self.factors)

    def qseries(self, truncation_order: int) -> RationalQSeries:
        out = RationalQSeries.one(truncation_order)
        for f in self.factors:
            out = out * f.qseries(truncation_order)
        return out

    def has_reciprocal(self) -> bool:
        return any(f.has_reciprocal() for f in self.factors)

    def contains_generator(self, name: str) -> bool:
        return any(f.contains_generator(name) for f in self.factors)

    def __str__(self) -> str:
        return " * ".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class Power(FormExpression):
    base: FormExpression
    exponent: int

    @property
    def weight(self) -> int:
        return self.exponent * self.base.weight

    def qseries(self, truncation_order: int) -> RationalQSeries:
        return self.base.qseries(truncation_order) ** self.exponent

    def has_reciprocal(self) -> bool:
        return self.exponent < 0 or self.base.has_reciprocal()

    def contains_generator(self, name: str) -> bool:
        return self.base.contains_generator(name)

    def __str__(self) -> str:
        return f"{self._base_str()}^{self.exponent}"

    def _base_str(self) -> str:
        s = str(self.base)
        return s if isinstance(self.base, (Generator, Constant)) else f"({s})"


@dataclass(frozen=True)
class Reciprocal(FormExpression):
    operand: FormExpression

    @property
    def weight(self) -> int:
        return -self.operand.weight

    def qseries(self, truncation_order: int) -> RationalQSeries:
        return self.operand.qseries(truncation_order).reciprocal()

    def has_reciprocal(self) -> bool:
        return True

    def contains_generator(self, name: str) -> bool:
        return self.operand.contains_generator(name)

    def __str__(self) -> str:
        return f"1/({self.operand})"


@dataclass(frozen=True)
class Dee(FormExpression):
    """D = (1/2 pi i) d/dz, acting on q-series as q d/dq."""

    operand: FormExpression

    @property
    def weight(self) -> int:
        return self.operand.weight + 2

    def qseries(self, truncation_order: int) -> RationalQSeries:
        return self.operand.qseries(truncation_order).dee()

    def has_reciprocal(self) -> bool:
        return self.operand.has_reciprocal()

    def contains_generator(self, name: str) -> bool:
        return self.operand.contains_generator(name)

    def __str__(self) -> str:
        return f"D({self.operand})"


_TOKEN = re.compile(r"\s*(E10|E2|E4|E6|D|\d+|\^|\*|/|\(|\)|-)")


class FormParseError(ValueError):
    pass


class _Parser:
    """Recursive descent over the grammar
    expr := factor (('*'|'/') factor)* ; factor := primary ('^' int)? ;
    primary := generator | integer | 'D' '(' expr ')' | '(' expr ')'.
    """

    def __init__(self, text: str):
        self.tokens: list[str] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise FormParseError(f"unexpected input at {text[pos:]!r}")
            self.tokens.append(m.group(1))
            pos = m.end()
        self.index = 0

    def peek(self) -> str | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise FormParseError("unexpected end of expression")
        if expected is not None and tok != expected:
            raise FormParseError(f"expected {expected!r}, found {tok!r}")
        self.index += 1
        return tok

    def parse(self) -> FormExpression:
        expr = self.expr()
        if self.peek() is not None:
            raise FormParseError(f"trailing input at {self.peek()!r}")
        return expr

    def expr(self) -> FormExpression:
        factors = [self.factor()]
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.factor()
            factors.append(Reciprocal(rhs) if op == "/" else rhs)
        if len(factors) > 1:
            factors = [
                f for f in factors if not (isinstance(f, Constant) and f.value == 1)
            ] or factors[:1]
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def factor(self) -> FormExpression:
        base = self.primary()
        if self.peek() == "^":
            self.take("^")
            sign = 1
            if self.peek() == "-":
                self.take("-")
                sign = -1
            tok = self.take()
            if not tok.isdigit():
                raise FormParseError(f"expected integer exponent, found {tok!r}")
            e = sign * int(tok)
            if e == 0:
                return Constant(Fraction(1))
            if e < 0:
                return Reciprocal(base if e == -1 else Power(base, -e))
            return base if e == 1 else Power(base, e)
        return base

    def primary(self) -> FormExpression:
        tok = self.take()
        if tok in GENERATOR_WEIGHTS:
            return Generator(tok)
        if tok.isdigit():
            return Constant(Fraction(int(tok)))
        if tok == "D":
            self.take("(")
            inner = self.expr()
            self.take(")")
            return Dee(inner)
        if tok == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise FormParseError(f"unexpected token {tok!r}")


def parse_form(text: str) -> FormExpression:
    """Parse an expression like ``E2^2 * (1/E6^4)`` or ``D(1/E10)``."""
    return _Parser(text).parse()


def split_e2_power(expr: FormExpression) -> tuple[int, FormExpression]:
    """Split a top-level product into (E2 exponent, E2-free remainder).

    Raises ``FormParseError`` when E2 occurs anywhere other than as a
    plain top-level factor E2^n.
    """
    factors = list(expr.factors) if isinstance(expr, Product) else [expr]
    n = 0
    rest: list[FormExpression] = []
    for f in factors:
        if isinstance(f, Generator) and f.name == "E2":
            n += 1
        elif isinstance(f, Power) and isinstance(f.base, Generator) and f.base.name == "E2":
            if f.exponent < 0:
                raise FormParseError("negative E2 powers are not supported")
            n += f.exponent
        elif f.contains_generator("E2"):
            raise FormParseError("E2 must appear only as a top-level factor E2^n")
        else:
            rest.append(f)
    if not rest:
        remainder: FormExpression = Constant(Fraction(1))
    elif len(rest) == 1:
        remainder = rest[0]
    else:
        remainder = Product(tuple(rest))
    return n, remainder


def contains_dee(expr: FormExpression) -> bool:
    if isinstance(expr, Dee):
        return True
    if isinstance(expr, Product):
        return any(contains_dee(f) for f in expr.factors)
    if isinstance(expr, Power):
        return contains_dee(expr.base)
    if isinstance(expr, Reciprocal):
        return contains_dee(expr.operand)
    return False


def oracle_coeffs(expr: FormExpression | str, n_max: int) -> tuple[Fraction, ...]:
    """Exact Fourier coefficients of the expression for 0 <= m <= n_max."""
    if isinstance(expr, str):
        expr = parse_form(expr)
    return expr.qseries(n_max).coeffs
