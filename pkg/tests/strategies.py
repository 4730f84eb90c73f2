"""Shared hypothesis strategies and random generators for tests."""
from __future__ import annotations

import random

from hypothesis import strategies as st

from clusterforge.exactalg import LaurentPoly, VarTable

T4 = VarTable(["a", "b", "c", "d"])


def random_poly(rng: random.Random, table=T4, nterms=3, maxdeg=2, coeff=5, nvars=None):
    n = len(table) if nvars is None else nvars
    d = {}
    for _ in range(nterms):
        exps = [0] * len(table)
        for i in range(n):
            exps[i] = rng.randint(0, maxdeg)
        c = rng.randint(-coeff, coeff)
        if c:
            d[tuple(exps)] = d.get(tuple(exps), 0) + c
    return LaurentPoly.from_dict(table, d)


@st.composite
def polys(draw, table=T4, max_terms=4, max_deg=3, laurent=False, rational=False):
    n = len(table)
    lo = -2 if laurent else 0
    terms = draw(st.lists(
        st.tuples(st.tuples(*[st.integers(lo, max_deg)] * n),
                  st.integers(-6, 6) if not rational else st.fractions(-6, 6, max_denominator=4)),
        max_size=max_terms))
    d = {}
    for e, c in terms:
        d[e] = d.get(e, 0) + c
    return LaurentPoly.from_dict(table, d)


@st.composite
def nonzero_polys(draw, **kw):
    p = draw(polys(**kw))
    if p.is_zero():
        p = p + 1
    return p
