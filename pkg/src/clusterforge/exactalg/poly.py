"""Sparse multivariate (Laurent) polynomials with exact rational coefficients.

Monomials are packed into Python integers.  Each variable owns a 16-bit
field (the first variable in the table is the most significant one) and
the total degree sits above all variable fields, so comparing two packed
keys as integers is exactly graded-lexicographic comparison and
multiplying monomials is integer addition.

A polynomial is a ``dict`` mapping packed keys to nonzero coefficients
(``int`` when integral, otherwise ``Fraction``).  Negative exponents are
carried by a separate shift vector on :class:`LaurentPoly`; the dict part
always has nonnegative exponents.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

FIELD = 16
FMASK = (1 << FIELD) - 1
MAXDEG = (1 << (FIELD - 1)) - 1

Coeff = object  # int | Fraction
Terms = Dict[int, Coeff]


class Packing:
    """Bit layout for a fixed number of variables."""

    __slots__ = ("n", "tshift", "vmask", "guard", "units", "shifts")

    def __init__(self, n: int):
        self.n = n
        self.tshift = FIELD * n
        self.vmask = (1 << self.tshift) - 1
        self.shifts = tuple(FIELD * (n - 1 - i) for i in range(n))
        top = 1 << self.tshift
        self.units = tuple(top | (1 << s) for s in self.shifts)
        g = 0
        for s in self.shifts:
            g |= 1 << (s + FIELD - 1)
        self.guard = g

    def pack(self, exps: Sequence[int]) -> int:
        total = 0
        key = 0
        for e, s in zip(exps, self.shifts):
            if e < 0 or e > MAXDEG:
                raise OverflowError(f"exponent {e} outside packed range")
            total += e
            key |= e << s
        if total > MAXDEG:
            raise OverflowError("total degree too large")
        return key | (total << self.tshift)

    def unpack(self, key: int) -> Tuple[int, ...]:
        return tuple((key >> s) & FMASK for s in self.shifts)

    def exp(self, key: int, i: int) -> int:
        return (key >> self.shifts[i]) & FMASK

    def divides(self, a: int, b: int) -> bool:
        """True when monomial ``a`` divides monomial ``b``."""
        g = self.guard
        return (((b & self.vmask) | g) - (a & self.vmask)) & g == g

    @staticmethod
    def degree(key: int, tshift: int) -> int:
        return key >> tshift


@lru_cache(maxsize=None)
def packing(n: int) -> Packing:
    return Packing(n)


class VarTable:
    """Ordered, immutable list of variable names."""

    __slots__ = ("names", "index", "pk", "_hash")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "index", {n: i for i, n in enumerate(names)})
        object.__setattr__(self, "pk", packing(len(names)))
        object.__setattr__(self, "_hash", hash(names))

    def __setattr__(self, k, v):
        raise AttributeError("VarTable is immutable")

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self.index

    def __eq__(self, other):
        return self is other or (isinstance(other, VarTable) and self.names == other.names)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"VarTable({list(self.names)!r})"

    def pos(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None


# ---------------------------------------------------------------- raw ops

def norm(c):
    if c.__class__ is Fraction and c.denominator == 1:
        return c.numerator
    return c


def cdiv(a, b):
    """Exact rational quotient, kept as int when possible."""
    if a.__class__ is int and b.__class__ is int:
        q, r = divmod(a, b)
        if not r:
            return q
    return norm(Fraction(a) / b)


def t_add(a: Terms, b: Terms, sign: int = 1) -> Terms:
    if sign == 1 and len(a) < len(b):
        a, b = b, a
        r = dict(a)
        for k, c in b.items():
            v = r.get(k)
            if v is None:
                r[k] = c
            else:
                v += c
                if v:
                    r[k] = norm(v)
                else:
                    del r[k]
        return r
    r = dict(a)
    for k, c in b.items():
        v = r.get(k)
        if v is None:
            r[k] = c if sign == 1 else -c
        else:
            v = v + c if sign == 1 else v - c
            if v:
                r[k] = norm(v)
            else:
                del r[k]
    return r


def t_scale(a: Terms, c) -> Terms:
    if not c:
        return {}
    if c == 1:
        return dict(a)
    return {k: norm(v * c) for k, v in a.items()}


def t_shift(a: Terms, key: int) -> Terms:
    return {k + key: v for k, v in a.items()}


def t_degree(a: Terms, pk: Packing) -> int:
    return max(a) >> pk.tshift if a else -1


def t_mul(a: Terms, b: Terms, pk: Packing) -> Terms:
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    if (max(a) >> pk.tshift) + (max(b) >> pk.tshift) > MAXDEG:
        raise OverflowError("total degree too large")
    if len(a) == 1:
        (ka, ca), = a.items()
        if ca == 1:
            return {ka + k: v for k, v in b.items()}
        return {ka + k: norm(ca * v) for k, v in b.items()}
    r: Dict[int, object] = {}
    get = r.get
    bi = list(b.items())
    for ka, ca in a.items():
        for kb, cb in bi:
            k = ka + kb
            r[k] = get(k, 0) + ca * cb
    return {k: norm(v) for k, v in r.items() if v}


def t_pow(a: Terms, e: int, pk: Packing) -> Terms:
    if e < 0:
        raise ValueError("negative power of a polynomial")
    if e == 0:
        return {0: 1}
    if len(a) == 1:
        (k, c), = a.items()
        if (k >> pk.tshift) * e > MAXDEG:
            raise OverflowError("total degree too large")
        return {k * e: norm(c ** e)}
    result = None
    base = a
    while e:
        if e & 1:
            result = base if result is None else t_mul(result, base, pk)
        e >>= 1
        if e:
            base = t_mul(base, base, pk)
    return result


def t_divexact(a: Terms, b: Terms, pk: Packing) -> Optional[Terms]:
    """Return q with a == b*q, or None when b does not divide a."""
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    if not a:
        return {}
    lb = max(b)
    cb = b[lb]
    if len(b) == 1:
        q = {}
        for k, c in a.items():
            if not pk.divides(lb, k):
                return None
            q[k - lb] = cdiv(c, cb)
        return q
    # quick rejections: degree and trailing monomial
    la = max(a)
    if (la >> pk.tshift) < (lb >> pk.tshift) or not pk.divides(lb, la):
        return None
    if not pk.divides(min(b), min(a)):
        return None
    rest = [(k, c) for k, c in b.items() if k != lb]
    r = dict(a)
    heap = [-k for k in r]
    heapq.heapify(heap)
    q: Terms = {}
    divides = pk.divides
    while r:
        while True:
            k = -heapq.heappop(heap)
            if k in r:
                break
        # skip duplicates of the same key left in the heap
        c = r.pop(k)
        if not divides(lb, k):
            return None
        m = k - lb
        qc = cdiv(c, cb)
        q[m] = qc
        for kk, cc in rest:
            t = m + kk
            v = r.get(t)
            if v is None:
                r[t] = norm(-qc * cc)
                heapq.heappush(heap, -t)
            else:
                v -= qc * cc
                if v:
                    r[t] = norm(v)
                else:
                    del r[t]
    return q


def t_content_monomial(a: Terms, pk: Packing) -> Tuple[int, ...]:
    """Componentwise minimum exponent over the terms of a nonzero poly."""
    it = iter(a)
    mins = list(pk.unpack(next(it)))
    n = pk.n
    shifts = pk.shifts
    for k in it:
        for i in range(n):
            if mins[i]:
                e = (k >> shifts[i]) & FMASK
                if e < mins[i]:
                    mins[i] = e
    return tuple(mins)


def t_support(a: Terms, pk: Packing) -> Tuple[int, ...]:
    """Per-variable maximal degree."""
    n = pk.n
    shifts = pk.shifts
    maxs = [0] * n
    for k in a:
        for i in range(n):
            e = (k >> shifts[i]) & FMASK
            if e > maxs[i]:
                maxs[i] = e
    return tuple(maxs)


def t_coeff_denominator_lcm(a: Terms) -> int:
    from math import lcm

    d = 1
    for c in a.values():
        if c.__class__ is Fraction:
            d = lcm(d, c.denominator)
    return d


# ---------------------------------------------------------------- public type

class LaurentPoly:
    """Immutable Laurent polynomial over Q in the variables of a VarTable.

    The value is ``x^shift * P`` where ``P`` is stored as packed terms with
    nonnegative exponents.  ``shift`` is ``None`` for ordinary polynomials;
    otherwise its entries are ``<= 0`` and equal the true minimum exponent of
    each variable whenever that minimum is negative, which makes the
    representation canonical.
    """

    __slots__ = ("table", "terms", "shift", "_hash")

    def __init__(self, table: VarTable, terms: Terms, shift: Optional[Tuple[int, ...]] = None):
        self.table = table
        self.terms = terms
        self.shift = shift
        self._hash = None
        if shift is not None:
            self._canonicalize()

    def _canonicalize(self):
        s = self.shift
        if not self.terms:
            self.shift = None
            return
        if all(e == 0 for e in s):
            self.shift = None
            return
        pk = self.table.pk
        mins = t_content_monomial(self.terms, pk)
        move = [min(m, -e) if e < 0 else 0 for m, e in zip(mins, s)]
        if any(move):
            mk = pk.pack(move)
            self.terms = {k - mk: v for k, v in self.terms.items()}
            s = tuple(e + m for e, m in zip(s, move))
        self.shift = None if all(e == 0 for e in s) else s

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, table):
        return cls(table, {})

    @classmethod
    def const(cls, table, c):
        c = norm(Fraction(c)) if not isinstance(c, int) else c
        return cls(table, {0: c} if c else {})

    @classmethod
    def var(cls, table, name, power: int = 1):
        i = table.pos(name)
        exps = [0] * len(table)
        exps[i] = power
        return cls.monomial(table, exps)

    @classmethod
    def monomial(cls, table, exps: Sequence[int], coeff=1):
        pk = table.pk
        if not coeff:
            return cls(table, {})
        if all(e >= 0 for e in exps):
            return cls(table, {pk.pack(exps): coeff})
        shift = tuple(min(e, 0) for e in exps)
        pos = [e - s for e, s in zip(exps, shift)]
        return cls(table, {pk.pack(pos): coeff}, shift)

    @classmethod
    def from_dict(cls, table, d: Mapping[Tuple[int, ...], object]):
        acc = cls(table, {})
        for exps, c in d.items():
            acc = acc + cls.monomial(table, exps, norm(Fraction(c)) if not isinstance(c, int) else c)
        return acc

    # inspection ---------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_polynomial(self):
        return self.shift is None

    def is_constant(self):
        return self.shift is None and (not self.terms or (len(self.terms) == 1 and 0 in self.terms))

    def is_monomial(self):
        return len(self.terms) == 1

    def constant_value(self):
        if not self.terms:
            return 0
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.terms[0]

    def items(self):
        """Yield ``(exponent tuple, coefficient)`` in descending grlex order."""
        pk = self.table.pk
        s = self.shift
        for k in sorted(self.terms, reverse=True):
            e = pk.unpack(k)
            if s is not None:
                e = tuple(a + b for a, b in zip(e, s))
            yield e, self.terms[k]

    def as_dict(self):
        return dict(self.items())

    def leading(self):
        """Leading (exponents, coefficient) under grlex."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        k = max(self.terms)
        e = self.table.pk.unpack(k)
        if self.shift is not None:
            e = tuple(a + b for a, b in zip(e, self.shift))
        return e, self.terms[k]

    def leading_coeff(self):
        return self.terms[max(self.terms)] if self.terms else 0

    def total_degree(self):
        if not self.terms:
            return -1
        d = max(self.terms) >> self.table.pk.tshift
        if self.shift is not None:
            d += sum(self.shift)
        return d

    def degrees(self):
        """Per-variable maximal exponent."""
        m = t_support(self.terms, self.table.pk) if self.terms else (0,) * len(self.table)
        if self.shift is not None:
            m = tuple(a + b for a, b in zip(m, self.shift))
        return m

    def min_exponents(self):
        if not self.terms:
            return (0,) * len(self.table)
        m = t_content_monomial(self.terms, self.table.pk)
        if self.shift is not None:
            m = tuple(a + b for a, b in zip(m, self.shift))
        return m

    def variables(self):
        """Names of variables that actually occur."""
        if not self.terms:
            return frozenset()
        pk = self.table.pk
        sup = t_support(self.terms, pk)
        s = self.shift or (0,) * len(sup)
        return frozenset(n for n, d, e in zip(self.table.names, sup, s) if d or e)

    def __len__(self):
        return len(self.terms)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            if other.table is not self.table and other.table != self.table:
                raise ValueError("polynomials over different variable tables")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(self.table, other)
        return NotImplemented

    def _aligned(self, other):
        """Terms of self and other over a common shift."""
        s1, s2 = self.shift, other.shift
        if s1 is None and s2 is None:
            return self.terms, other.terms, None
        n = len(self.table)
        s1 = s1 or (0,) * n
        s2 = s2 or (0,) * n
        s = tuple(min(a, b) for a, b in zip(s1, s2))
        pk = self.table.pk
        a = self.terms
        b = other.terms
        d1 = tuple(x - y for x, y in zip(s1, s))
        d2 = tuple(x - y for x, y in zip(s2, s))
        if any(d1):
            a = t_shift(a, pk.pack(d1))
        if any(d2):
            b = t_shift(b, pk.pack(d2))
        return a, b, s

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, s = self._aligned(other)
        return LaurentPoly(self.table, t_add(a, b), s)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, s = self._aligned(other)
        return LaurentPoly(self.table, t_add(a, b, -1), s)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return LaurentPoly(self.table, {k: -v for k, v in self.terms.items()}, self.shift)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = t_mul(self.terms, other.terms, self.table.pk)
        if self.shift is None and other.shift is None:
            return LaurentPoly(self.table, t)
        n = len(self.table)
        s1 = self.shift or (0,) * n
        s2 = other.shift or (0,) * n
        return LaurentPoly(self.table, t, tuple(a + b for a, b in zip(s1, s2)))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            if len(self.terms) != 1:
                raise ValueError("negative power of a non-monomial")
            exps, c = next(self.items())
            return LaurentPoly.monomial(self.table, [x * e for x in exps], norm(Fraction(1) / c ** (-e)))
        t = t_pow(self.terms, e, self.table.pk)
        if self.shift is None:
            return LaurentPoly(self.table, t)
        return LaurentPoly(self.table, t, tuple(x * e for x in self.shift))

    def scale(self, c):
        return LaurentPoly(self.table, t_scale(self.terms, c), self.shift)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(self.table, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.table == other.table and self.shift == other.shift and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.table, self.shift, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        from .printer import format_poly

        return f"LaurentPoly({format_poly(self)!r})"

    def __str__(self):
        from .printer import format_poly

        return format_poly(self)

    def monic(self):
        """Scale so the grlex-leading coefficient is 1."""
        if not self.terms:
            return self
        lc = self.leading_coeff()
        if lc == 1:
            return self
        inv = Fraction(1) / lc
        return LaurentPoly(self.table, t_scale(self.terms, inv), self.shift)


def divide_exact(p: LaurentPoly, q: LaurentPoly) -> Optional[LaurentPoly]:
    """Return ``r`` with ``p == q*r`` exactly, or ``None`` when no such
    Laurent polynomial exists."""
    if not q.terms:
        raise ZeroDivisionError("division by zero polynomial")
    if p.table != q.table:
        raise ValueError("polynomials over different variable tables")
    t = t_divexact(p.terms, q.terms, p.table.pk)
    if t is None:
        # in the Laurent ring, monomial factors of p are units; a divisor
        # whose quotient needs negative exponents is still acceptable
        if p.shift is None and q.shift is None:
            # try stripping the monomial content difference
            pk = p.table.pk
            mp = t_content_monomial(p.terms, pk) if p.terms else None
            mq = t_content_monomial(q.terms, pk)
            if mp is not None and any(b > a for a, b in zip(mp, mq)):
                lift = tuple(max(b - a, 0) for a, b in zip(mp, mq))
                t = t_divexact(t_shift(p.terms, pk.pack(lift)), q.terms, pk)
                if t is not None:
                    return LaurentPoly(p.table, t, tuple(-x for x in lift))
            return None
        return _divide_laurent(p, q)
    n = len(p.table)
    if p.shift is None and q.shift is None:
        return LaurentPoly(p.table, t)
    s1 = p.shift or (0,) * n
    s2 = q.shift or (0,) * n
    return LaurentPoly(p.table, t, tuple(a - b for a, b in zip(s1, s2)))


def _divide_laurent(p, q):
    pk = p.table.pk
    n = len(p.table)
    s1 = p.shift or (0,) * n
    s2 = q.shift or (0,) * n
    mp = t_content_monomial(p.terms, pk)
    mq = t_content_monomial(q.terms, pk)
    lift = tuple(max(b - a, 0) for a, b in zip(mp, mq))
    t = t_divexact(t_shift(p.terms, pk.pack(lift)), q.terms, pk)
    if t is None:
        return None
    return LaurentPoly(p.table, t, tuple(a - b - c for a, b, c in zip(s1, s2, lift)))
