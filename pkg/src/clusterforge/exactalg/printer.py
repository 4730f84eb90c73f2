"""Canonical text form for polynomials and rational functions.

Terms are printed in descending graded-lexicographic order with explicit
``*`` and ``^`` so that the output parses back to the same value.
"""
from __future__ import annotations

from fractions import Fraction


def _mono(names, exps):
    parts = []
    for name, e in zip(names, exps):
        if e == 0:
            continue
        if e == 1:
            parts.append(name)
        elif e > 0:
            parts.append(f"{name}^{e}")
        else:
            parts.append(f"{name}^({e})")
    return "*".join(parts)


def _coeff_text(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def format_poly(p) -> str:
    names = p.table.names
    out = []
    for exps, c in p.items():
        neg = c < 0
        a = -c if neg else c
        m = _mono(names, exps)
        if not m:
            body = _coeff_text(a)
        elif a == 1:
            body = m
        else:
            body = f"{_coeff_text(a)}*{m}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out) if out else "0"


def _atomic(p) -> bool:
    # a single positive variable power (or a plain nonnegative integer)
    if len(p.terms) != 1:
        return False
    exps, c = next(p.items())
    if exps == (0,) * len(exps):
        return isinstance(c, int) and c >= 0
    return c == 1 and sum(1 for e in exps if e) == 1 and all(e >= 0 for e in exps)


def format_ratfunc(f) -> str:
    num = format_poly(f.num)
    if f.den.is_constant() and f.den.constant_value() == 1:
        return num
    if len(f.num.terms) > 1 or any(isinstance(c, Fraction) for c in f.num.terms.values()):
        num = f"({num})"
    den = format_poly(f.den)
    if not _atomic(f.den):
        den = f"({den})"
    return f"{num}/{den}"
