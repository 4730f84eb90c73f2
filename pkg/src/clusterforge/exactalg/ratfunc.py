"""Rational functions as reduced fractions of polynomials."""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional

from .gcd import gcd_terms
from .poly import (
    FMASK,
    LaurentPoly,
    VarTable,
    norm,
    t_divexact,
    t_mul,
    t_pow,
    t_scale,
)


def _is_one(t):
    return len(t) == 1 and t.get(0) == 1


class RationalFunction:
    """Immutable element of Q(x_1, ..., x_n).

    Canonical form: ``num`` and ``den`` are polynomials (nonnegative
    exponents) with gcd 1, and ``den`` has grlex-leading coefficient 1.
    Hence two rational functions are equal iff their parts are equal.
    """

    __slots__ = ("table", "_n", "_d", "_hash")

    def __init__(self, num, den=None, *, _canonical: bool = False):
        if isinstance(num, LaurentPoly):
            table = num.table
            n, d = _laurent_to_frac(num)
        else:
            raise TypeError("numerator must be a LaurentPoly")
        if den is not None:
            if not isinstance(den, LaurentPoly):
                den = LaurentPoly.const(table, den)
            if den.table != table:
                raise ValueError("numerator and denominator over different tables")
            dn, dd = _laurent_to_frac(den)
            if not dn:
                raise ZeroDivisionError("zero denominator")
            pk = table.pk
            n, d = t_mul(n, dd, pk), t_mul(d, dn, pk)
        self.table = table
        self._hash = None
        if _canonical:
            self._n, self._d = n, d
        else:
            self._n, self._d = _reduce(n, d, table)

    @classmethod
    def _raw(cls, table: VarTable, n, d, reduce: bool = True):
        obj = cls.__new__(cls)
        obj.table = table
        obj._hash = None
        if reduce:
            obj._n, obj._d = _reduce(n, d, table)
        else:
            obj._n, obj._d = n, d
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, table, c):
        c = norm(Fraction(c))
        return cls._raw(table, {0: c} if c else {}, {0: 1}, reduce=False)

    @classmethod
    def var(cls, table, name):
        return cls._raw(table, LaurentPoly.var(table, name).terms, {0: 1}, reduce=False)

    @classmethod
    def from_poly(cls, p: LaurentPoly):
        return cls(p)

    # parts --------------------------------------------------------------
    @property
    def num(self) -> LaurentPoly:
        return LaurentPoly(self.table, self._n)

    @property
    def den(self) -> LaurentPoly:
        return LaurentPoly(self.table, self._d)

    def is_zero(self):
        return not self._n

    def __bool__(self):
        return bool(self._n)

    def is_polynomial(self):
        return _is_one(self._d)

    def is_constant(self):
        return _is_one(self._d) and (not self._n or (len(self._n) == 1 and 0 in self._n))

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return self._n.get(0, 0)

    def as_poly(self) -> LaurentPoly:
        """The value as a Laurent polynomial (denominator must be a monomial)."""
        if _is_one(self._d):
            return LaurentPoly(self.table, self._n)
        if len(self._d) != 1:
            raise ValueError("not a Laurent polynomial")
        (k, c), = self._d.items()
        exps = self.table.pk.unpack(k)
        mono = LaurentPoly.monomial(self.table, [-e for e in exps], norm(Fraction(1) / c))
        return LaurentPoly(self.table, self._n) * mono

    def variables(self):
        return self.num.variables() | self.den.variables()

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.table is not self.table and other.table != self.table:
                raise ValueError("rational functions over different tables")
            return other
        if isinstance(other, (int, Fraction)):
            return RationalFunction.const(self.table, other)
        if isinstance(other, LaurentPoly):
            return RationalFunction(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(self, other, -1)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _add(other, self, -1)

    def __neg__(self):
        return RationalFunction._raw(self.table, {k: -v for k, v in self._n.items()}, self._d, reduce=False)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(self, other.inverse())

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return _mul(other, self.inverse())

    def inverse(self):
        if not self._n:
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction._raw(self.table, self._d, self._n, reduce=False)._renormalize()

    def _renormalize(self):
        # make the denominator's leading coefficient 1 (gcd already 1)
        lc = self._d[max(self._d)]
        if lc != 1:
            inv = Fraction(1) / lc
            self._n = t_scale(self._n, inv)
            self._d = t_scale(self._d, inv)
        return self

    def __pow__(self, e):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        pk = self.table.pk
        return RationalFunction._raw(self.table, t_pow(self._n, e, pk), t_pow(self._d, e, pk), reduce=False)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, LaurentPoly)):
            other = self._coerce(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.table == other.table and self._n == other._n and self._d == other._d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self._n.items()), frozenset(self._d.items())))
        return self._hash

    def __str__(self):
        from .printer import format_ratfunc

        return format_ratfunc(self)

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"


def _laurent_to_frac(p: LaurentPoly):
    if p.shift is None:
        return p.terms, {0: 1}
    pk = p.table.pk
    neg = [-e if e < 0 else 0 for e in p.shift]
    pos = [e if e > 0 else 0 for e in p.shift]
    t = p.terms
    if any(pos):
        k = pk.pack(pos)
        t = {kk + k: v for kk, v in t.items()}
    return t, {pk.pack(neg): 1}


def _reduce(n, d, table):
    if not d:
        raise ZeroDivisionError("zero denominator")
    pk = table.pk
    if not n:
        return {}, {0: 1}
    if not _is_one(d):
        g = gcd_terms(n, d, pk)
        if not _is_one(g):
            n = t_divexact(n, g, pk)
            d = t_divexact(d, g, pk)
    lc = d[max(d)]
    if lc != 1:
        inv = Fraction(1) / lc
        n = t_scale(n, inv)
        d = t_scale(d, inv)
    return n, d


def _add(a: RationalFunction, b: RationalFunction, sign: int) -> RationalFunction:
    from .poly import t_add

    pk = a.table.pk
    if not b._n:
        return a
    if not a._n:
        return -b if sign == -1 else b
    if a._d == b._d:
        n = t_add(a._n, b._n, sign)
        if _is_one(a._d):
            return RationalFunction._raw(a.table, n, a._d, reduce=False)
        return RationalFunction._raw(a.table, n, a._d)
    if _is_one(a._d):
        n = t_add(t_mul(a._n, b._d, pk), b._n, sign)
        return RationalFunction._raw(a.table, n, b._d, reduce=False)
    if _is_one(b._d):
        n = t_add(a._n, t_mul(b._n, a._d, pk), sign)
        return RationalFunction._raw(a.table, n, a._d, reduce=False)
    # Henrici: with g = gcd(da, db), only gcd(num, g) can remain
    g = gcd_terms(a._d, b._d, pk)
    if _is_one(g):
        n = t_add(t_mul(a._n, b._d, pk), t_mul(b._n, a._d, pk), sign)
        d = t_mul(a._d, b._d, pk)
        return RationalFunction._raw(a.table, n, d, reduce=False)._renormalize()
    da = t_divexact(a._d, g, pk)
    db = t_divexact(b._d, g, pk)
    n = t_add(t_mul(a._n, db, pk), t_mul(b._n, da, pk), sign)
    if not n:
        return RationalFunction.const(a.table, 0)
    h = gcd_terms(n, g, pk)
    if not _is_one(h):
        n = t_divexact(n, h, pk)
        g = t_divexact(g, h, pk)
    d = t_mul(t_mul(da, db, pk), g, pk)
    return RationalFunction._raw(a.table, n, d, reduce=False)._renormalize()


def _mul(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    pk = a.table.pk
    if not a._n or not b._n:
        return RationalFunction.const(a.table, 0)
    an, ad, bn, bd = a._n, a._d, b._n, b._d
    if not _is_one(bd):
        g = gcd_terms(an, bd, pk)
        if not _is_one(g):
            an = t_divexact(an, g, pk)
            bd = t_divexact(bd, g, pk)
    if not _is_one(ad):
        g = gcd_terms(bn, ad, pk)
        if not _is_one(g):
            bn = t_divexact(bn, g, pk)
            ad = t_divexact(ad, g, pk)
    n = t_mul(an, bn, pk)
    d = t_mul(ad, bd, pk)
    return RationalFunction._raw(a.table, n, d, reduce=False)._renormalize()


# ---------------------------------------------------------------- substitution

def _eval_poly(terms, names, values: Dict[str, RationalFunction], target_table, pk_src):
    """Evaluate a polynomial (term dict over the source table) at rational
    function values; returns (numerator terms, denominator factor list)."""
    shifts = pk_src.shifts
    n = pk_src.n
    # group source variables by their (canonical) denominator
    groups: Dict[frozenset, int] = {}
    group_of = [None] * n
    dens = []
    for i in range(n):
        v = values.get(names[i])
        if v is None:
            continue
        if _is_one(v._d):
            continue
        key = frozenset(v._d.items())
        gi = groups.get(key)
        if gi is None:
            gi = len(dens)
            groups[key] = gi
            dens.append(v._d)
        group_of[i] = gi
    tpk = target_table.pk
    exps_list = []
    gmax = [0] * len(dens)
    for k in terms:
        e = [(k >> shifts[i]) & FMASK for i in range(n)]
        exps_list.append(e)
        if dens:
            ge = [0] * len(dens)
            for i, ei in enumerate(e):
                if ei and group_of[i] is not None:
                    ge[group_of[i]] += ei
            for j, x in enumerate(ge):
                if x > gmax[j]:
                    gmax[j] = x
    # cached powers
    pow_cache: Dict[tuple, dict] = {}

    def pw(kind, idx, e):
        key = (kind, idx, e)
        r = pow_cache.get(key)
        if r is None:
            base = values[names[idx]]._n if kind == 0 else dens[idx]
            if e == 1:
                r = base
            else:
                half = pw(kind, idx, e // 2)
                r = t_mul(half, half, tpk)
                if e % 2:
                    r = t_mul(r, base, tpk)
            pow_cache[key] = r
        return r

    from .poly import t_add

    acc: Dict[int, object] = {}
    for (k, c), e in zip(terms.items(), exps_list):
        t = {0: c}
        ge = [0] * len(dens)
        for i, ei in enumerate(e):
            if ei:
                t = t_mul(t, pw(0, i, ei), tpk)
                if group_of[i] is not None:
                    ge[group_of[i]] += ei
        for j in range(len(dens)):
            r = gmax[j] - ge[j]
            if r:
                t = t_mul(t, pw(1, j, r), tpk)
        acc = t_add(acc, t)
    den = {0: 1}
    for j in range(len(dens)):
        if gmax[j]:
            den = t_mul(den, pw(1, j, gmax[j]), tpk)
    return acc, den


def substitute(f: RationalFunction, assignment: Mapping[str, RationalFunction],
               target: Optional[VarTable] = None) -> RationalFunction:
    """Compose ``f`` with the assignment ``name -> value``.

    Variables of ``f`` missing from the assignment are kept as themselves,
    which requires the source and target tables to coincide.
    """
    values: Dict[str, RationalFunction] = {}
    for k, v in assignment.items():
        values[k] = v
        if target is None:
            target = v.table
    if target is None:
        target = f.table
    src = f.table
    for name in f.variables():
        if name not in values:
            if target != src:
                raise KeyError(f"variable {name!r} is not assigned")
            values[name] = RationalFunction.var(target, name)
    num_n, num_d = _eval_poly(f._n, src.names, values, target, src.pk)
    if _is_one(f._d):
        den_n, den_d = {0: 1}, {0: 1}
    else:
        den_n, den_d = _eval_poly(f._d, src.names, values, target, src.pk)
    if not den_n:
        raise ZeroDivisionError("substitution makes the denominator vanish")
    a = RationalFunction._raw(target, num_n, num_d)
    if _is_one(den_n) and _is_one(den_d):
        return a
    b = RationalFunction._raw(target, den_d, den_n)
    return a * b


def is_in_laurent_ring(f: RationalFunction, cluster: Iterable[str], frozen: Iterable[str] = ()) -> bool:
    """True iff ``f`` is a Laurent polynomial in the cluster variables with
    coefficients polynomial in the frozen variables."""
    cluster = set(cluster)
    frozen = set(frozen)
    used = f.variables()
    unknown = used - cluster - frozen
    if unknown:
        raise ValueError(f"variables outside cluster and frozen sets: {sorted(unknown)}")
    if len(f._d) != 1:
        return False
    (k, _), = f._d.items()
    exps = f.table.pk.unpack(k)
    for name, e in zip(f.table.names, exps):
        if e and name not in cluster:
            return False
    return True
