"""Symbolic matrices over the rational-function field.

Index sets follow the usual minor notation: ``[a,b]`` is a range,
``{i,j}`` an explicit set, and unions are written with ``∪`` (or ``U``/``|``).
All indices are 1-based.  ``A^{cols}_{rows}`` is ``submatrix(A, rows, cols)``.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .exactalg import LaurentPoly, RationalFunction, VarTable
from .exactalg.poly import t_add, t_divexact, t_mul
from .exactalg.ratfunc import _is_one

Entry = Union[RationalFunction, LaurentPoly, int, Fraction]


class IndexSet(tuple):
    """Strictly increasing tuple of 1-based indices."""

    def __new__(cls, items: Iterable[int] = ()):
        vals = sorted(set(int(i) for i in items))
        if any(i < 1 for i in vals):
            raise ValueError("indices are 1-based")
        return super().__new__(cls, vals)

    @classmethod
    def range(cls, a: int, b: int) -> "IndexSet":
        if b < a:
            raise ValueError(f"empty range [{a},{b}]")
        return cls(range(a, b + 1))

    @classmethod
    def parse(cls, text: str) -> "IndexSet":
        parts = re.split(r"\s*(?:∪|\bU\b|\|)\s*", text.strip())
        out = set()
        for part in parts:
            m = re.fullmatch(r"\[\s*(\d+)\s*,\s*(\d+)\s*\]", part)
            if m:
                out.update(cls.range(int(m.group(1)), int(m.group(2))))
                continue
            m = re.fullmatch(r"\{\s*(\d+(?:\s*,\s*\d+)*)\s*\}", part)
            if m:
                out.update(int(x) for x in m.group(1).split(","))
                continue
            if re.fullmatch(r"\d+", part):
                out.add(int(part))
                continue
            raise ValueError(f"cannot parse index set {text!r}")
        return cls(out)

    def __str__(self):
        if len(self) > 1 and self[-1] - self[0] == len(self) - 1:
            return f"[{self[0]},{self[-1]}]"
        return "{" + ",".join(map(str, self)) + "}"


def as_index_set(x) -> IndexSet:
    if isinstance(x, IndexSet):
        return x
    if isinstance(x, str):
        return IndexSet.parse(x)
    if isinstance(x, int):
        return IndexSet([x])
    return IndexSet(x)


class SymMatrix:
    """Immutable rectangular matrix of rational functions."""

    __slots__ = ("table", "rows", "cols", "_e")

    def __init__(self, table: VarTable, entries: Sequence[Sequence[Entry]]):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        self.table = table
        self.rows = len(rows)
        self.cols = ncols
        self._e = tuple(tuple(_coerce(table, x) for x in r) for r in rows)

    @classmethod
    def _wrap(cls, table, grid):
        obj = cls.__new__(cls)
        obj.table = table
        obj.rows = len(grid)
        obj.cols = len(grid[0])
        obj._e = tuple(tuple(r) for r in grid)
        return obj

    @classmethod
    def identity(cls, table, n):
        one = RationalFunction.const(table, 1)
        zero = RationalFunction.const(table, 0)
        return cls._wrap(table, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def elementary(cls, table, n, terms):
        """``I + sum(value * e_ij)`` for ``terms`` mapping 1-based ``(i, j)`` to values."""
        grid = [list(r) for r in cls.identity(table, n)._e]
        for (i, j), v in terms.items():
            grid[i - 1][j - 1] = grid[i - 1][j - 1] + _coerce(table, v)
        return cls._wrap(table, grid)

    @classmethod
    def symbolic(cls, table, prefix, n, m=None):
        """Matrix of the variables ``{prefix}{i}{j}`` (these must be in ``table``)."""
        m = n if m is None else m
        return cls._wrap(table, [[RationalFunction.var(table, f"{prefix}{i}{j}") for j in range(1, m + 1)]
                                 for i in range(1, n + 1)])

    # access -----------------------------------------------------------
    @property
    def shape(self):
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._e[i][j]

    def entry(self, i, j) -> RationalFunction:
        """1-based entry access."""
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise IndexError(f"entry ({i},{j}) outside {self.rows}x{self.cols}")
        return self._e[i - 1][j - 1]

    def tolist(self):
        return [list(r) for r in self._e]

    def __eq__(self, other):
        return isinstance(other, SymMatrix) and self._e == other._e

    def __hash__(self):
        return hash(self._e)

    def __str__(self):
        return "[" + ",\n ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._e) + "]"

    def __repr__(self):
        return f"SymMatrix({self.rows}x{self.cols})"

    def is_square(self):
        return self.rows == self.cols

    def is_polynomial(self):
        return all(x.is_polynomial() for r in self._e for x in r)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        _same_shape(self, other)
        return SymMatrix._wrap(self.table, [[a + b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __sub__(self, other):
        _same_shape(self, other)
        return SymMatrix._wrap(self.table, [[a - b for a, b in zip(r, s)] for r, s in zip(self._e, other._e)])

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __mul__(self, other):
        if isinstance(other, SymMatrix):
            return mat_mul(self, other)
        c = _coerce(self.table, other)
        return SymMatrix._wrap(self.table, [[a * c for a in r] for r in self._e])

    def transpose(self):
        return SymMatrix._wrap(self.table, [list(c) for c in zip(*self._e)])

    def map(self, fn):
        return SymMatrix._wrap(self.table, [[fn(x) for x in r] for r in self._e])


def _coerce(table, x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, LaurentPoly):
        return RationalFunction(x)
    if isinstance(x, (int, Fraction)):
        return RationalFunction.const(table, x)
    if isinstance(x, str):
        from .exactalg import parse_expr

        return parse_expr(x, table)
    raise TypeError(f"cannot use {type(x).__name__} as a matrix entry")


def _same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")


def _square(a):
    if not a.is_square():
        raise ValueError(f"matrix is not square ({a.rows}x{a.cols})")


# ---------------------------------------------------------------- operations

def submatrix(A: SymMatrix, rows, cols) -> SymMatrix:
    """Rows ``rows`` and columns ``cols`` (1-based index sets) of ``A``."""
    rows = as_index_set(rows)
    cols = as_index_set(cols)
    if not rows or not cols:
        raise ValueError("empty index set")
    if rows[-1] > A.rows or cols[-1] > A.cols:
        raise IndexError(f"index set outside {A.rows}x{A.cols} matrix")
    return SymMatrix._wrap(A.table, [[A._e[i - 1][j - 1] for j in cols] for i in rows])


def minor(A: SymMatrix, rows, cols, method="auto") -> RationalFunction:
    return det(submatrix(A, rows, cols), method)


def mat_mul(A: SymMatrix, B: SymMatrix) -> SymMatrix:
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch {A.shape} @ {B.shape}")
    zero = RationalFunction.const(A.table, 0)
    Bt = list(zip(*B._e))
    grid = []
    for r in A._e:
        row = []
        for c in Bt:
            acc = zero
            for a, b in zip(r, c):
                if a._n and b._n:
                    acc = acc + a * b
            row.append(acc)
        grid.append(row)
    return SymMatrix._wrap(A.table, grid)


def mat_pow(A: SymMatrix, k: int) -> SymMatrix:
    _square(A)
    if k < 0:
        raise ValueError("matrix power must be nonnegative")
    result = SymMatrix.identity(A.table, A.rows)
    for _ in range(k):
        result = mat_mul(result, A)
    return result


def trace(A: SymMatrix) -> RationalFunction:
    _square(A)
    acc = RationalFunction.const(A.table, 0)
    for i in range(A.rows):
        acc = acc + A._e[i][i]
    return acc


def mat_ops(A: SymMatrix, B: Optional[SymMatrix] = None, op: str = "mul", k: int = 0):
    """Dispatch ``mul``, ``pow`` or ``trace`` by name."""
    if op == "mul":
        return mat_mul(A, B)
    if op == "pow":
        return mat_pow(A, k)
    if op == "trace":
        return trace(A)
    raise ValueError(f"unknown matrix operation {op!r}")


# ---------------------------------------------------------------- determinants

def _det_laplace(A: SymMatrix) -> RationalFunction:
    n = A.rows
    e = A._e
    zero = RationalFunction.const(A.table, 0)

    @lru_cache(maxsize=None)
    def rec(row: int, colmask: int):
        if row == n:
            return RationalFunction.const(A.table, 1)
        acc = zero
        sign = 1
        for j in range(n):
            if colmask >> j & 1:
                continue
            a = e[row][j]
            if a._n:
                sub = rec(row + 1, colmask | (1 << j))
                if sub._n:
                    term = a * sub
                    acc = acc + term if sign > 0 else acc - term
            sign = -sign
        return acc

    return rec(0, 0)


def _clear_rows(A: SymMatrix):
    """Scale each row to polynomial entries by the lcm of its denominators.

    Returns the rows as term dicts and the product of the row scales."""
    from .exactalg.gcd import gcd_terms

    pk = A.table.pk
    rows = []
    scale = {0: 1}
    for r in A._e:
        L = {0: 1}
        for x in r:
            if not _is_one(x._d):
                g = gcd_terms(L, x._d, pk)
                L = t_mul(L, t_divexact(x._d, g, pk), pk)
        if _is_one(L):
            rows.append([x._n for x in r])
            continue
        rows.append([t_mul(x._n, t_divexact(L, x._d, pk), pk) for x in r])
        scale = t_mul(scale, L, pk)
    return rows, scale


def _det_bareiss_terms(M: List[List[dict]], pk) -> Tuple[dict, int]:
    n = len(M)
    M = [list(r) for r in M]
    sign = 1
    prev = {0: 1}
    for k in range(n - 1):
        if not M[k][k]:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return {}, 1
        p = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            for j in range(k + 1, n):
                a = t_mul(M[i][j], p, pk)
                if mik and M[k][j]:
                    a = t_add(a, t_mul(mik, M[k][j], pk), -1)
                if _is_one(prev):
                    M[i][j] = a
                else:
                    q = t_divexact(a, prev, pk)
                    if q is None:
                        raise ArithmeticError("Bareiss step not exact")
                    M[i][j] = q
            M[i][k] = {}
        prev = p
    return M[n - 1][n - 1], sign


def _det_bareiss(A: SymMatrix) -> RationalFunction:
    pk = A.table.pk
    rows, scale = _clear_rows(A)
    d, sign = _det_bareiss_terms(rows, pk)
    if sign < 0:
        d = {k: -v for k, v in d.items()}
    return RationalFunction._raw(A.table, d, scale)


def det(A: SymMatrix, method: str = "auto") -> RationalFunction:
    """Exact determinant.

    ``method`` is ``auto`` (Bareiss for polynomial matrices, Laplace
    otherwise), ``bareiss``, ``laplace``, or ``check`` (both, compared).
    """
    _square(A)
    if A.rows == 1:
        return A._e[0][0]
    if method == "auto":
        method = "bareiss" if A.is_polynomial() else "laplace"
    if method == "bareiss":
        return _det_bareiss(A)
    if method == "laplace":
        return _det_laplace(A)
    if method == "check":
        a = _det_bareiss(A)
        b = _det_laplace(A)
        if a != b:
            raise ArithmeticError("Bareiss and Laplace determinants disagree")
        return a
    raise ValueError(f"unknown determinant method {method!r}")


def adjugate(A: SymMatrix) -> SymMatrix:
    _square(A)
    n = A.rows
    if n == 1:
        return SymMatrix.identity(A.table, 1)
    idx = list(range(1, n + 1))
    grid = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            # adj[i][j] = (-1)^{i+j} det(A without row j, column i)
            m = det(submatrix(A, [r for r in idx if r != j], [c for c in idx if c != i]))
            row.append(m if (i + j) % 2 == 0 else -m)
        grid.append(row)
    return SymMatrix._wrap(A.table, grid)


def inverse(A: SymMatrix) -> SymMatrix:
    _square(A)
    d = det(A)
    if d.is_zero():
        raise ZeroDivisionError("matrix is singular")
    dinv = d.inverse()
    return adjugate(A).map(lambda x: x * dinv)


def conjugate(g: SymMatrix, U: SymMatrix) -> SymMatrix:
    """``g U g^{-1}``."""
    _square(g)
    _square(U)
    if g.rows != U.rows:
        raise ValueError("dimension mismatch")
    return mat_mul(mat_mul(g, U), inverse(g))
