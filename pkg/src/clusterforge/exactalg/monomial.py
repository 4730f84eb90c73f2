"""Recognising Laurent-monomial ratios."""
from __future__ import annotations

from itertools import permutations, product
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from .ideal import IdealBasis, equal_mod
from .poly import t_divexact
from .ratfunc import RationalFunction, _is_one

MarkedSpec = Union[Sequence[str], Mapping[str, RationalFunction]]


def _marked_values(table, marked: MarkedSpec) -> Dict[str, RationalFunction]:
    if isinstance(marked, Mapping):
        return dict(marked)
    return {name: RationalFunction.var(table, name) for name in marked}


def _strip(terms, factor, pk):
    count = 0
    while True:
        q = t_divexact(terms, factor, pk)
        if q is None:
            return terms, count
        terms = q
        count += 1


def _strip_all(q: RationalFunction, order, values):
    pk = q.table.pk
    n, d = q._n, q._d
    exps = {}
    for name in order:
        v = values[name]
        e = 0
        for part, sgn in ((v._n, 1), (v._d, -1)):
            if _is_one(part):
                continue
            n, a = _strip(n, part, pk)
            d, b = _strip(d, part, pk)
            e += sgn * (a - b)
        exps[name] = e
    return n, d, exps


def factor_as_monomial(f: RationalFunction, base: RationalFunction, marked: MarkedSpec,
                       ideal: Optional[IdealBasis] = None,
                       search_bound: int = 3) -> Optional[Tuple[int, ...]]:
    """Exponents ``e`` with ``f == base * prod(marked[j] ** e[j])``.

    ``marked`` is a list of variable names, or a mapping from names to the
    values of marked elements.  The identity must hold exactly with
    coefficient 1; with ``ideal`` it may instead hold modulo the ideal.
    Returns ``None`` when no such exponent vector exists (or, modulo an
    ideal, none exists within ``search_bound``).
    """
    if base.is_zero():
        raise ZeroDivisionError("base must be nonzero")
    values = _marked_values(f.table, marked)
    names = list(values)
    if f.is_zero():
        return None
    q = f / base
    orders = [names] if len(names) > 4 else list(permutations(names))
    for order in orders:
        n, d, exps = _strip_all(q, order, values)
        if _is_one(n) and _is_one(d):
            return tuple(exps[nm] for nm in names)
        # a residual constant other than 1 is a failure: coefficients matter
    if ideal is None or not ideal.generators:
        return None
    for e in product(range(-search_bound, search_bound + 1), repeat=len(names)):
        m = base
        for nm, k in zip(names, e):
            if k:
                m = m * values[nm] ** k
        if equal_mod(f, m, ideal):
            return tuple(e)
    return None
