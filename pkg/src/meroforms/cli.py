"""Command-line interface.

Subcommands: coeffs (formula path with oracle column), oracle (exact
rationals), verify (side-by-side comparison against the oracle),
identity (the quartic-reciprocal constant-term identity), enumerate,
expand, basis, constants.  Numbers are emitted as decimal strings so
output precision is not limited by binary doubles.

Exit codes: 0 success, 1 usage error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import mpmath
from mpmath import mp, mpc, mpf, workprec

from . import __version__
from .constants import (
    DEFAULT_PRECISION,
    POINT_I,
    POINT_RHO,
    derivative_jet,
    e10_jet,
    point_from_tag,
)
from .engine import identity_check_m0
from .expansion import ExpansionError, PrincipalPart, laurent_at
from .lattice import Field, enumerate_primitive
from .qseries import FormParseError, contains_dee, oracle_coeffs, parse_form, split_e2_power
from .quasi import quasi_expansion, simple_pole_quasi_coeff
from .solver import BasisCongruenceError, BasisResidualError, solve_basis

ENV_PRECISION = "MEROFORMS_PRECISION"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


class UsageError(ValueError):
    pass


def _default_precision() -> int:
    raw = os.environ.get(ENV_PRECISION)
    if raw is None:
        return DEFAULT_PRECISION
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"bad {ENV_PRECISION} value {raw!r}")


def _digits(precision: int) -> int:
    return int(precision * 0.30103) + 2


def fmt_real(x, precision: int) -> str:
    with workprec(precision + 8):
        return mpmath.nstr(mpf(x), _digits(precision))


def parse_m_range(text: str) -> list[int]:
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise UsageError(f"empty m range {text!r}")
        return list(range(lo, hi + 1))
    return [int(text)]


def _validate(precision: int, norm_bound: int, ms: list[int]) -> None:
    if precision < 64:
        raise UsageError("precision must be >= 64 bits")
    if norm_bound < 16:
        raise UsageError("norm-bound must be >= 16")
    if not ms:
        raise UsageError("m range is empty")


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_error(exc: Exception, kind: str) -> None:
    sys.stderr.write(json.dumps({"error": {"kind": kind, "message": str(exc)}}) + "\n")


class _FormulaEngine:
    """Shared coefficient path for ``coeffs`` and ``verify``."""

    def __init__(self, form: str, precision: int):
        expr = parse_form(form)
        if contains_dee(expr):
            raise UsageError("D(...) is not modular; only the oracle can expand it")
        self.e2_power, self.remainder = split_e2_power(expr)
        self.full = expr
        self.precision = precision
        self.expansion = quasi_expansion(self.remainder, self.e2_power, precision)
        rep = self.expansion.f_rep
        self.simple_route = (
            self.e2_power < rep.k - 1
            and all(t.n == 0 and t.point.tag in ("i", "rho") for t in rep.terms)
        )

    def coefficient(self, m: int, norm_bound: int):
        if self.e2_power and self.simple_route:
            return simple_pole_quasi_coeff(
                self.expansion.f_rep, self.e2_power, m, norm_bound, self.precision
            )
        return self.expansion.coefficient(m, norm_bound)


def cmd_oracle(args) -> int:
    expr = parse_form(args.form)
    ms = parse_m_range(args.m)
    order = max(args.order, max(ms))
    coeffs = oracle_coeffs(expr, order)
    rows = [{"m": m, "coefficient": str(coeffs[m])} for m in ms]
    _emit(json.dumps({"form": str(expr), "coefficients": rows}, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_coeffs(args) -> int:
    ms = parse_m_range(args.m)
    _validate(args.precision, args.norm_bound, ms)
    engine = _FormulaEngine(args.form, args.precision)
    oracle = oracle_coeffs(engine.full, max(ms))
    rows = []
    with workprec(args.precision):
        for m in ms:
            res = engine.coefficient(m, args.norm_bound)
            exact = oracle[m]
            rel_err = ""
            if exact != 0:
                exact_mp = mpf(exact.numerator) / exact.denominator
                rel_err = fmt_real(abs(res.value - exact_mp) / abs(exact_mp), 64)
            rows.append(
                {
                    "m": m,
                    "value_re": fmt_real(res.value.real, args.precision),
                    "value_im": fmt_real(res.value.imag, args.precision),
                    "tail_bound": fmt_real(res.tail_bound, 64),
                    "oracle": str(exact),
                    "rel_err": rel_err,
                }
            )
    if args.output == "json":
        payload = {
            "form": args.form,
            "norm_bound": args.norm_bound,
            "precision": args.precision,
            "rows": rows,
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
        _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    ms = parse_m_range(args.m)
    _validate(args.precision, args.norm_bound, ms)
    engine = _FormulaEngine(args.form, args.precision)
    oracle = oracle_coeffs(engine.full, max(ms))
    tol = mpf(args.tol)
    failures = 0
    rows = []
    with workprec(args.precision):
        for m in ms:
            res = engine.coefficient(m, args.norm_bound)
            exact = oracle[m]
            exact_mp = mpf(exact.numerator) / exact.denominator
            denom = abs(exact_mp) if exact != 0 else mpf(1)
            err = abs(res.value - exact_mp) / denom
            ok = err <= tol
            failures += 0 if ok else 1
            rows.append(
                {
                    "m": m,
                    "formula_re": fmt_real(res.value.real, args.precision),
                    "oracle": str(exact),
                    "rel_err": fmt_real(err, 64),
                    "status": "pass" if ok else "fail",
                }
            )
    payload = {
        "form": args.form,
        "tol": args.tol,
        "norm_bound": args.norm_bound,
        "precision": args.precision,
        "rows": rows,
        "verdict": "pass" if failures == 0 else f"fail ({failures} of {len(ms)})",
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def cmd_identity(args) -> int:
    if args.norm_bound < 100:
        raise UsageError("identity check needs norm-bound >= 100")
    lhs, rhs, err = identity_check_m0(args.norm_bound, args.precision)
    payload = {
        "norm_bound": args.norm_bound,
        "lhs": fmt_real(lhs, args.precision),
        "rhs": fmt_real(rhs, args.precision),
        "abs_err": fmt_real(err, 64),
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_enumerate(args) -> int:
    field = Field(args.field)
    ideals = enumerate_primitive(field, args.bound)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["field", "c", "d", "norm", "a", "b"])
    for b in ideals:
        writer.writerow([field.value, b.c, b.d, b.norm, b.a, b.b])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_expand(args) -> int:
    point = point_from_tag(args.point)
    series = laurent_at(parse_form(args.form), point, args.precision, depth=args.depth)
    rows = []
    for i, c in enumerate(series.coeffs):
        rows.append(
            {
                "order": series.lowest_order + i,
                "re": fmt_real(c.real, args.precision),
                "im": fmt_real(c.imag, args.precision),
            }
        )
    payload = {"form": args.form, "point": args.point, "coefficients": rows}
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_basis(args) -> int:
    if args.input == "-":
        request = json.load(sys.stdin)
    else:
        with open(args.input) as fh:
            request = json.load(fh)
    k = int(request["k"])
    pps = []
    with workprec(args.precision + 32):
        for entry in request["principal_parts"]:
            point = point_from_tag(entry["point"])
            coeffs = {
                int(order): mpc(mpf(re), mpf(im))
                for order, (re, im) in entry["coeffs"].items()
            }
            pps.append(PrincipalPart(point, coeffs, frozenset(), args.precision))
    rep = solve_basis(pps, k, args.precision)
    payload = {
        "k": rep.k,
        "terms": [
            {
                "point": t.point.tag,
                "n": t.n,
                "a_re": fmt_real(t.a.real, args.precision),
                "a_im": fmt_real(t.a.imag, args.precision),
            }
            for t in rep.terms
        ],
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_constants(args) -> int:
    table = {}
    for tag, point in (("i", POINT_I), ("rho", POINT_RHO)):
        jet = derivative_jet(point, args.depth, args.precision)
        jet10 = e10_jet(point, args.depth, args.precision)
        rows = {}
        for w in (2, 4, 6, 10):
            source = jet10 if w == 10 else jet
            rows[f"E{w}"] = [
                {
                    "r": r,
                    "re": fmt_real(source.value(w, r).real, args.precision),
                    "im": fmt_real(source.value(w, r).imag, args.precision),
                }
                for r in range(args.depth + 1)
            ]
        table[tag] = rows
    payload = {"precision": args.precision, "depth": args.depth, "points": table}
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meroforms",
        description="Fourier coefficients of negative-weight meromorphic and "
        "quasi-meromorphic cusp forms, with an exact q-series oracle.",
    )
    parser.add_argument("--version", action="version", version=f"meroforms {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, norm_bound=True):
        p.add_argument("--precision", type=int, default=_default_precision(), help="working precision in bits")
        if norm_bound:
            p.add_argument("--norm-bound", type=int, default=5000, help="ideal-norm truncation bound")
        p.add_argument("--out", default=None, help="write output to a file instead of stdout")

    p = sub.add_parser("oracle", help="exact rational coefficients")
    p.add_argument("--form", required=True)
    p.add_argument("--m", required=True, help="single index or range lo..hi")
    p.add_argument("--order", type=int, default=64, help="q-series truncation order")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("coeffs", help="formula-path coefficients with oracle column")
    p.add_argument("--form", required=True)
    p.add_argument("--m", required=True)
    p.add_argument("--output", choices=("json", "csv"), default="json")
    add_common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("verify", help="compare formula path against the oracle")
    p.add_argument("--form", required=True)
    p.add_argument("--m", required=True)
    p.add_argument("--tol", required=True, help="relative tolerance, e.g. 1e-8")
    add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("identity", help="quartic-reciprocal constant-term identity check")
    add_common(p)
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("enumerate", help="primitive ideals up to a norm bound")
    p.add_argument("--field", choices=("gaussian", "eisenstein"), required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("expand", help="Laurent expansion at i or rho")
    p.add_argument("--form", required=True)
    p.add_argument("--point", choices=("i", "rho"), required=True)
    p.add_argument("--depth", type=int, default=6)
    add_common(p, norm_bound=False)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("basis", help="solve principal parts into the raised basis")
    p.add_argument("--input", required=True, help="JSON file with k and principal parts, or - for stdin")
    add_common(p, norm_bound=False)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("constants", help="derivative jets at i and rho")
    p.add_argument("--depth", type=int, default=3)
    add_common(p, norm_bound=False)
    p.set_defaults(func=cmd_constants)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage problems
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (BasisCongruenceError, BasisResidualError, ExpansionError, ZeroDivisionError) as exc:
        _json_error(exc, "numerical")
        return EXIT_NUMERICAL
    except (UsageError, FormParseError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
