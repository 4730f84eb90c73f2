"""Normal forms modulo ideals whose generators have coprime leading terms.

When the grlex-leading monomials of the generators are pairwise coprime
the generators already form a Groebner basis (Buchberger's first
criterion), so plain multivariate division yields a canonical normal form.
Bases that do not satisfy this are rejected at construction.
"""
from __future__ import annotations

import heapq
from typing import Iterable, List

from .poly import LaurentPoly, norm
from .ratfunc import RationalFunction


class IdealBasis:
    __slots__ = ("table", "generators", "_lead")

    order = "grlex"

    def __init__(self, generators: Iterable[LaurentPoly]):
        gens: List[LaurentPoly] = []
        table = None
        for g in generators:
            if not isinstance(g, LaurentPoly):
                raise TypeError("generators must be LaurentPoly")
            if g.shift is not None:
                raise ValueError("generators must have nonnegative exponents")
            if not g.terms:
                continue
            if g.is_constant():
                raise ValueError("unit generator: the ideal is the whole ring")
            table = table or g.table
            if g.table != table:
                raise ValueError("generators over different tables")
            gens.append(g.monic())
        self.table = table
        self.generators = tuple(gens)
        self._lead = [max(g.terms) for g in gens]
        if table is not None:
            pk = table.pk
            exps = [pk.unpack(k) for k in self._lead]
            for i in range(len(exps)):
                for j in range(i + 1, len(exps)):
                    if any(a and b for a, b in zip(exps[i], exps[j])):
                        raise ValueError(
                            "leading terms of generators %d and %d are not coprime" % (i, j))

    def __len__(self):
        return len(self.generators)

    def __bool__(self):
        return bool(self.generators)

    def __repr__(self):
        return f"IdealBasis({[str(g) for g in self.generators]})"


def _reduce_terms(terms, basis: IdealBasis):
    pk = basis.table.pk
    divides = pk.divides
    gens = [(lk, [(k, c) for k, c in g.terms.items() if k != lk])
            for lk, g in zip(basis._lead, basis.generators)]
    r = dict(terms)
    out = {}
    heap = [-k for k in r]
    heapq.heapify(heap)
    while r:
        while True:
            k = -heapq.heappop(heap)
            if k in r:
                break
        c = r.pop(k)
        for lk, rest in gens:
            if divides(lk, k):
                m = k - lk
                for kk, cc in rest:
                    t = m + kk
                    v = r.get(t)
                    if v is None:
                        r[t] = norm(-c * cc)
                        heapq.heappush(heap, -t)
                    else:
                        v -= c * cc
                        if v:
                            r[t] = norm(v)
                        else:
                            del r[t]
                break
        else:
            out[k] = c
    return out


def reduce_mod(p: LaurentPoly, basis: IdealBasis) -> LaurentPoly:
    """Unique normal form of ``p`` modulo the ideal spanned by ``basis``."""
    if not basis.generators or not p.terms:
        return p
    if p.shift is not None:
        raise ValueError("reduce_mod expects a polynomial")
    if p.table != basis.table:
        raise ValueError("polynomial and ideal over different tables")
    return LaurentPoly(p.table, _reduce_terms(p.terms, basis))


def in_ideal(p: LaurentPoly, basis: IdealBasis) -> bool:
    return not reduce_mod(p, basis).terms


def equal_mod(f: RationalFunction, g: RationalFunction, basis: IdealBasis = None) -> bool:
    """Equality of rational functions modulo the ideal: ``f - g`` has a
    numerator in the ideal.  Denominators must avoid the ideal's zero set
    generically, which holds for the relations used here."""
    if f == g:
        return True
    if basis is None or not basis.generators:
        return False
    d = f - g
    if in_ideal(d.den, basis):
        raise ValueError("denominator vanishes modulo the ideal")
    return in_ideal(d.num, basis)
