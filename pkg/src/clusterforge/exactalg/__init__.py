"""Exact arithmetic: sparse Laurent polynomials, rational functions, gcd,
divisibility, ideal normal forms and an expression parser."""
from .gcd import poly_gcd
from .ideal import IdealBasis, equal_mod, in_ideal, reduce_mod
from .monomial import factor_as_monomial
from .parse import ParseError, parse_expr, parse_poly
from .poly import LaurentPoly, VarTable, divide_exact
from .printer import format_poly, format_ratfunc
from .ratfunc import RationalFunction, is_in_laurent_ring, substitute


def ratfunc_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    """Field operation by name: ``add``, ``sub``, ``mul`` or ``div``."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


__all__ = [
    "IdealBasis", "LaurentPoly", "ParseError", "RationalFunction", "VarTable",
    "divide_exact", "equal_mod", "factor_as_monomial", "format_poly", "format_ratfunc",
    "in_ideal", "is_in_laurent_ring", "parse_expr", "parse_poly", "poly_gcd",
    "ratfunc_arith", "reduce_mod", "substitute",
]
