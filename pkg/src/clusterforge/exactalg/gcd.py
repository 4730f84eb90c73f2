"""Multivariate polynomial GCD over Q.

Inputs are reduced to primitive integer polynomials and handled by a
recursive primitive-PRS algorithm.  Several cheap filters run first:
monomial content extraction, variables occurring in only one argument,
trial exact division, and a modular univariate image that proves the gcd
does not involve a given variable.  The filters only ever shortcut to a
result that the PRS would also produce, so the output is exact.
"""
from __future__ import annotations

import random
from fractions import Fraction
from math import gcd as igcd
from typing import Dict, List, Optional

from .poly import (
    FMASK,
    LaurentPoly,
    Packing,
    Terms,
    t_divexact,
    t_mul,
    t_support,
)

PRIME = (1 << 61) - 1
_rng = random.Random(0x5EED)


def _to_primitive_int(a: Terms) -> Terms:
    """Scale to integer coefficients with content 1 and positive leading coefficient."""
    from math import lcm

    d = 1
    for c in a.values():
        if c.__class__ is Fraction:
            d = lcm(d, c.denominator)
    if d != 1:
        a = {k: int(v * d) for k, v in a.items()}
    g = 0
    for v in a.values():
        g = igcd(g, v)
        if g == 1:
            break
    lead = a[max(a)]
    if lead < 0:
        g = -g
    if g != 1:
        a = {k: v // g for k, v in a.items()}
    return a


def _split(a: Terms, v: int, pk: Packing) -> Dict[int, Terms]:
    """Group terms by the exponent of variable ``v``; coefficients lose v."""
    s = pk.shifts[v]
    unit = pk.units[v]
    out: Dict[int, Terms] = {}
    for k, c in a.items():
        e = (k >> s) & FMASK
        kk = k - e * unit
        d = out.get(e)
        if d is None:
            out[e] = {kk: c}
        else:
            d[kk] = c
    return out


def _join(parts: Dict[int, Terms], v: int, pk: Packing) -> Terms:
    unit = pk.units[v]
    out = {}
    for e, d in parts.items():
        off = e * unit
        for k, c in d.items():
            out[k + off] = c
    return out


def _is_const(a: Terms) -> bool:
    return len(a) == 1 and 0 in a


def _monomial_gcd_key(keys, pk: Packing) -> int:
    it = iter(keys)
    mins = list(pk.unpack(next(it)))
    shifts = pk.shifts
    for k in it:
        for i, m in enumerate(mins):
            if m:
                e = (k >> shifts[i]) & FMASK
                if e < m:
                    mins[i] = e
    return pk.pack(mins)


def _int_content(a: Terms) -> int:
    g = 0
    for v in a.values():
        g = igcd(g, v)
        if g == 1:
            return 1
    return g


def _pmod_eval(a: Terms, v: int, pt: List[int], pk: Packing) -> Dict[int, int]:
    """Image of ``a`` in F_p[x_v] at the point ``pt`` for the other variables."""
    shifts = pk.shifts
    n = pk.n
    out: Dict[int, int] = {}
    cache = [dict() for _ in range(n)]
    for k, c in a.items():
        val = c % PRIME
        for i in range(n):
            if i == v:
                continue
            e = (k >> shifts[i]) & FMASK
            if e:
                ci = cache[i]
                pw = ci.get(e)
                if pw is None:
                    pw = pow(pt[i], e, PRIME)
                    ci[e] = pw
                val = val * pw % PRIME
        ev = (k >> shifts[v]) & FMASK
        out[ev] = (out.get(ev, 0) + val) % PRIME
    return {e: c for e, c in out.items() if c}


def _uni_gcd_degree(f: Dict[int, int], g: Dict[int, int]) -> int:
    """Degree of gcd of two univariate polynomials over F_p (dict form)."""
    def tolist(d):
        m = max(d)
        r = [0] * (m + 1)
        for e, c in d.items():
            r[e] = c
        return r

    a = tolist(f)
    b = tolist(g)
    while b:
        # a mod b
        inv = pow(b[-1], PRIME - 2, PRIME)
        db = len(b) - 1
        a = a[:]
        while len(a) - 1 >= db and a:
            c = a[-1] * inv % PRIME
            shift = len(a) - 1 - db
            if c:
                for i in range(db + 1):
                    a[shift + i] = (a[shift + i] - c * b[i]) % PRIME
            a.pop()
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    return len(a) - 1


def _coprime_in(a: Terms, b: Terms, v: int, da: int, db: int, pk: Packing) -> Optional[bool]:
    """Decide via modular images whether gcd(a, b) is free of variable v.

    Returns True when proven free of v, False when the image suggests a
    common factor in v, None when no usable evaluation point was found.
    """
    n = pk.n
    for _ in range(3):
        pt = [_rng.randrange(2, PRIME - 1) for _ in range(n)]
        fa = _pmod_eval(a, v, pt, pk)
        if fa.get(da, 0) == 0:
            continue
        fb = _pmod_eval(b, v, pt, pk)
        if fb.get(db, 0) == 0:
            continue
        return _uni_gcd_degree(fa, fb) == 0
    return None


def _gcd_fold(polys: List[Terms], pk: Packing) -> Terms:
    polys = sorted(polys, key=len)
    g = _prim(polys[0])
    for p in polys[1:]:
        if _is_const(g):
            return {0: 1}
        g = _gcd(g, p, pk)
    return {0: 1} if _is_const(g) else g


def _degs(a: Terms, pk: Packing):
    return t_support(a, pk)


def _prim(a: Terms) -> Terms:
    ic = _int_content(a)
    if a[max(a)] < 0:
        ic = -ic
    if ic != 1:
        a = {k: v // ic for k, v in a.items()}
    return a


def _gcd(a: Terms, b: Terms, pk: Packing) -> Terms:
    """GCD of integer polynomials, returned primitive with positive
    leading coefficient (integer contents are ignored: we work over Q)."""
    if not a:
        return _prim(b) if b else {}
    if not b:
        return _prim(a)
    if _is_const(a) or _is_const(b):
        return {0: 1}
    ma = _monomial_gcd_key(a, pk)
    mb = _monomial_gcd_key(b, pk)
    mg = _monomial_gcd_key((ma, mb), pk)
    if len(a) == 1 or len(b) == 1:
        return {mg: 1}
    if ma:
        a = {k - ma: v for k, v in a.items()}
    if mb:
        b = {k - mb: v for k, v in b.items()}
    core = _gcd_core(a, b, pk)
    if mg:
        core = {k + mg: v for k, v in core.items()}
    return core


def _gcd_core(a: Terms, b: Terms, pk: Packing) -> Terms:
    """GCD of integer polynomials free of monomial content."""
    if _is_const(a) or _is_const(b):
        return {0: 1}
    da = _degs(a, pk)
    db = _degs(b, pk)
    n = pk.n
    shared = [i for i in range(n) if da[i] and db[i]]
    if not shared:
        return {0: 1}
    only_a = [i for i in range(n) if da[i] and not db[i]]
    only_b = [i for i in range(n) if db[i] and not da[i]]
    if only_a or only_b:
        # the gcd is free of these variables, so it divides every coefficient
        pieces: List[Terms] = []
        pieces.extend(_coefficients(a, only_a, pk) if only_a else [a])
        pieces.extend(_coefficients(b, only_b, pk) if only_b else [b])
        return _gcd_fold(pieces, pk)
    if len(b) <= len(a):
        if t_divexact(a, b, pk) is not None:
            return _prim(b)
    elif t_divexact(b, a, pk) is not None:
        return _prim(a)
    shared.sort(key=lambda i: (da[i] + db[i], i))
    for v in shared:
        if _coprime_in(a, b, v, da[v], db[v], pk):
            parts = list(_split(a, v, pk).values()) + list(_split(b, v, pk).values())
            return _gcd_fold(parts, pk)
    return _prs(a, b, shared[0], pk)


def _coefficients(a: Terms, vars_: List[int], pk: Packing) -> List[Terms]:
    """Coefficients of ``a`` viewed as a polynomial in ``vars_``."""
    mask_units = [(pk.shifts[i], pk.units[i]) for i in vars_]
    out: Dict[tuple, Terms] = {}
    for k, c in a.items():
        kk = k
        sig = []
        for s, u in mask_units:
            e = (k >> s) & FMASK
            sig.append(e)
            kk -= e * u
        d = out.setdefault(tuple(sig), {})
        d[kk] = c
    return list(out.values())


def _content_in(parts: Dict[int, Terms], pk: Packing) -> Terms:
    if len(parts) > 1:
        return _gcd_fold(list(parts.values()), pk)
    return _prim(next(iter(parts.values())))


def _divide_parts(parts: Dict[int, Terms], c: Terms, pk: Packing) -> Dict[int, Terms]:
    if _is_const(c) and c[0] == 1:
        return parts
    out = {}
    for e, d in parts.items():
        q = t_divexact(d, c, pk)
        assert q is not None
        out[e] = q
    return out


def _prem(A: Dict[int, Terms], B: Dict[int, Terms], pk: Packing) -> Dict[int, Terms]:
    db = max(B)
    L = B[db]
    R = dict(A)
    while R and max(R) >= db:
        d = max(R)
        c = R.pop(d)
        shift = d - db
        newR: Dict[int, Terms] = {}
        for e, coeff in R.items():
            newR[e] = t_mul(coeff, L, pk)
        for e, coeff in B.items():
            if e == db:
                continue
            t = e + shift
            prod = t_mul(coeff, c, pk)
            cur = newR.get(t)
            if cur is None:
                newR[t] = {k: -v for k, v in prod.items()}
            else:
                for k, v in prod.items():
                    w = cur.get(k, 0) - v
                    if w:
                        cur[k] = w
                    else:
                        cur.pop(k, None)
                if not cur:
                    del newR[t]
        R = {e: d_ for e, d_ in newR.items() if d_}
    return R


def _prs(a: Terms, b: Terms, v: int, pk: Packing) -> Terms:
    A = _split(a, v, pk)
    B = _split(b, v, pk)
    ca = _content_in(A, pk)
    cb = _content_in(B, pk)
    A = _divide_parts(A, ca, pk)
    B = _divide_parts(B, cb, pk)
    g_cont = _gcd(ca, cb, pk)
    if max(A) < max(B):
        A, B = B, A
    while True:
        R = _prem(A, B, pk)
        if not R:
            H = B
            break
        if max(R) == 0:
            H = {0: {0: 1}}
            break
        c = _content_in(R, pk)
        R = _divide_parts(R, c, pk)
        A, B = B, R
    h = _prim(_join(H, v, pk))
    return _prim(t_mul(h, g_cont, pk))


def poly_gcd(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Greatest common divisor of two polynomials, leading coefficient 1."""
    if p.table != q.table:
        raise ValueError("polynomials over different variable tables")
    if p.shift is not None or q.shift is not None:
        raise ValueError("poly_gcd expects polynomials with nonnegative exponents")
    table = p.table
    if not p.terms and not q.terms:
        return LaurentPoly(table, {})
    if not p.terms:
        return q.monic()
    if not q.terms:
        return p.monic()
    a = _to_primitive_int(p.terms)
    b = _to_primitive_int(q.terms)
    g = _gcd(a, b, table.pk)
    return LaurentPoly(table, g).monic()


def gcd_terms(a: Terms, b: Terms, pk: Packing) -> Terms:
    """Raw gcd on term dicts (any rational coefficients); integer primitive
    result with positive leading coefficient."""
    if not a:
        return _to_primitive_int(b) if b else {}
    if not b:
        return _to_primitive_int(a)
    return _gcd(_to_primitive_int(a), _to_primitive_int(b), pk)
