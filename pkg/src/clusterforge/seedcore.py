"""Seeds, exchange matrices and mutation."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exactalg import (
    ParseError,
    RationalFunction,
    VarTable,
    is_in_laurent_ring,
    parse_expr,
    substitute,
)


# ---------------------------------------------------------------- exchange matrices

def skew_symmetrizer(B) -> Optional[Tuple[int, ...]]:
    """Minimal positive integer ``D`` with ``D * B[:, :N]`` skew-symmetric.

    Accepts an :class:`ExchangeMatrix` or a list of rows (the square
    principal part is taken).  Returns ``None`` when no such ``D`` exists.
    """
    rows = B.rows if isinstance(B, ExchangeMatrix) else [list(r) for r in B]
    n = len(rows)
    if any(len(r) < n for r in rows):
        return None
    d: List[Optional[Fraction]] = [None] * n
    for start in range(n):
        if d[start] is not None:
            continue
        d[start] = Fraction(1)
        comp = [start]
        stack = [start]
        while stack:
            i = stack.pop()
            if rows[i][i] != 0:
                return None
            for j in range(n):
                if j == i:
                    continue
                a, b = rows[i][j], rows[j][i]
                if (a == 0) != (b == 0):
                    return None
                if a == 0:
                    continue
                if (a > 0) == (b > 0):
                    return None
                # d_i a = -d_j b
                want = d[i] * a / (-b)
                if d[j] is None:
                    d[j] = want
                    comp.append(j)
                    stack.append(j)
                elif d[j] != want:
                    return None
        den = 1
        for i in comp:
            den = lcm(den, d[i].denominator)
        ints = [int(d[i] * den) for i in comp]
        g = 0
        for v in ints:
            g = gcd(g, v)
        for i, v in zip(comp, ints):
            d[i] = Fraction(v // g)
    return tuple(int(x) for x in d)


@dataclass(frozen=True)
class ExchangeMatrix:
    """Integer ``N x (N+M)`` matrix with skew-symmetrizable principal part."""

    N: int
    M: int
    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if self.N < 0 or self.M < 0:
            raise ValueError("N and M must be nonnegative")
        if len(rows) != self.N or any(len(r) != self.N + self.M for r in rows):
            raise ValueError(f"exchange matrix must be {self.N}x{self.N + self.M}")
        if skew_symmetrizer(rows) is None:
            raise ValueError("principal part is not skew-symmetrizable")

    @classmethod
    def from_rows(cls, rows, N=None, M=None):
        rows = [list(r) for r in rows]
        N = len(rows) if N is None else N
        width = len(rows[0]) if rows else N + (M or 0)
        M = width - N if M is None else M
        return cls(N, M, rows)

    def __getitem__(self, ij):
        """1-based entry ``b_ij``."""
        i, j = ij
        return self.rows[i - 1][j - 1]

    def tolist(self):
        return [list(r) for r in self.rows]

    @property
    def symmetrizer(self):
        return skew_symmetrizer(self.rows)

    def mutable_components(self) -> List[List[int]]:
        """Connected components (1-based) of the mutable part of the quiver."""
        n = self.N
        seen = [False] * n
        comps = []
        for s in range(n):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            stack = [s]
            while stack:
                i = stack.pop()
                for j in range(n):
                    if not seen[j] and (self.rows[i][j] or self.rows[j][i]):
                        seen[j] = True
                        comp.append(j)
                        stack.append(j)
            comps.append(sorted(x + 1 for x in comp))
        return comps


def mutate_matrix(B: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """Matrix mutation in direction ``k`` (1-based)."""
    if not 1 <= k <= B.N:
        raise IndexError(f"mutation direction {k} outside [1,{B.N}]")
    k0 = k - 1
    rk = B.rows[k0]
    out = []
    for i, r in enumerate(B.rows):
        if i == k0:
            out.append(tuple(-x for x in r))
            continue
        bik = r[k0]
        row = []
        for j, bij in enumerate(r):
            if j == k0:
                row.append(-bij)
            else:
                bkj = rk[j]
                row.append(bij + (abs(bik) * bkj + bik * abs(bkj)) // 2)
        out.append(tuple(row))
    return ExchangeMatrix(B.N, B.M, tuple(out))


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Exact rank of an integer matrix by fraction-free elimination."""
    M = [list(r) for r in rows]
    if not M:
        return 0
    m, n = len(M), len(M[0])
    rank = 0
    prev = 1
    for c in range(n):
        piv = next((r for r in range(rank, m) if M[r][c]), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][c]
        for r in range(rank + 1, m):
            for j in range(c + 1, n):
                M[r][j] = (M[r][j] * p - M[r][c] * M[rank][j]) // prev
            M[r][c] = 0
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def matrix_equiv_signs(B1: ExchangeMatrix, B2: ExchangeMatrix,
                       components: Optional[List[List[int]]] = None) -> Optional[Dict[int, int]]:
    """Per-component signs ``s`` with ``rows_C(B1) == s_C * rows_C(B2)``.

    Components are the connected components of the mutable part; returns a
    mapping from component index to sign, or ``None``.
    """
    if (B1.N, B1.M) != (B2.N, B2.M):
        raise ValueError("dimension mismatch")
    comps = components if components is not None else B1.mutable_components()
    if components is None and sorted(map(tuple, comps)) != sorted(map(tuple, B2.mutable_components())):
        return None
    signs = {}
    for ci, comp in enumerate(comps):
        rows1 = [B1.rows[i - 1] for i in comp]
        rows2 = [B2.rows[i - 1] for i in comp]
        if rows1 == rows2:
            signs[ci] = 1
        elif rows1 == [tuple(-x for x in r) for r in rows2]:
            signs[ci] = -1
        else:
            return None
    return signs


def matrix_equiv(B1: ExchangeMatrix, B2: ExchangeMatrix, components=None) -> bool:
    """Equality up to a global sign on each mutable connected component."""
    return matrix_equiv_signs(B1, B2, components) is not None


# ---------------------------------------------------------------- generalized data

@dataclass(frozen=True)
class VertexData:
    """Generalized exchange data at one cluster vertex.

    ``p`` and ``phat`` hold ``d+1`` expressions in frozen names;
    ``template`` is the exchange polynomial ``x_k * x_k'`` written in the
    seed's variable names (it must not involve ``x_k`` itself).
    """

    d: int
    p: Tuple[str, ...]
    phat: Tuple[str, ...]
    template: Optional[str] = None


def _frozen_monomial(text, table, frozen, laurent):
    f = parse_expr(text, table)
    if not f.is_polynomial() and not laurent:
        raise ValueError(f"{text!r} must be a monomial with nonnegative exponents")
    try:
        p = f.as_poly()
    except ValueError:
        raise ValueError(f"{text!r} is not a Laurent monomial") from None
    if len(p) != 1 or p.leading()[1] != 1:
        raise ValueError(f"{text!r} is not a monomial with coefficient 1")
    if not p.variables() <= set(frozen):
        raise ValueError(f"{text!r} involves non-frozen variables")
    return p


def validate_vertex_data(i: int, v: VertexData, names: Sequence[str], N: int) -> None:
    if v.d < 1:
        raise ValueError(f"vertex {i}: degree must be at least 1")
    if len(v.p) != v.d + 1 or len(v.phat) != v.d + 1:
        raise ValueError(f"vertex {i}: p and phat need d+1 = {v.d + 1} entries")
    table = VarTable(names)
    frozen = names[N:]
    for r, text in enumerate(v.p):
        mono = _frozen_monomial(text, table, frozen, laurent=False)
        if r in (0, v.d) and not mono.is_constant():
            raise ValueError(f"vertex {i}: p_{{{i},{r}}} must be 1")
    for text in v.phat:
        _frozen_monomial(text, table, frozen, laurent=True)
    if v.template is not None:
        try:
            t = parse_expr(v.template, table)
        except ParseError as e:
            raise ValueError(f"vertex {i}: template does not parse: {e}") from None
        if names[i - 1] in t.variables():
            raise ValueError(f"vertex {i}: template involves the exchanged variable")


# ---------------------------------------------------------------- seeds

@dataclass(frozen=True, eq=False)
class Seed:
    """Extended seed: named values in the ambient field plus an exchange matrix.

    ``values`` are rational functions over ``table`` (the initial
    variables).  ``provenance`` is the mutation sequence from the initial
    seed.
    """

    names: Tuple[str, ...]
    B: ExchangeMatrix
    values: Tuple[RationalFunction, ...]
    table: VarTable
    generalized: Mapping[int, VertexData] = field(default_factory=dict)
    provenance: Tuple[int, ...] = ()

    @property
    def N(self):
        return self.B.N

    @property
    def M(self):
        return self.B.M

    @classmethod
    def initial(cls, names: Sequence[str], B, generalized=None, table: VarTable = None,
                values: Optional[Mapping[str, object]] = None) -> "Seed":
        names = tuple(names)
        if not isinstance(B, ExchangeMatrix):
            B = ExchangeMatrix.from_rows(B, M=len(names) - len(B))
        if len(names) != B.N + B.M:
            raise ValueError("number of names must equal N+M")
        table = table or VarTable(names)
        if values:
            vals = []
            for n in names:
                v = values.get(n, n)
                vals.append(v if isinstance(v, RationalFunction) else parse_expr(str(v), table))
        else:
            vals = [RationalFunction.var(table, n) for n in names]
        gen = {}
        for i, v in (generalized or {}).items():
            i = int(i)
            if not 1 <= i <= B.N:
                raise ValueError(f"generalized data at non-cluster index {i}")
            validate_vertex_data(i, v, names, B.N)
            gen[i] = v
        return cls(names, B, tuple(vals), table, gen, ())

    def __eq__(self, other):
        if not isinstance(other, Seed):
            return NotImplemented
        return self.names == other.names and self.B == other.B and self.values == other.values

    def __hash__(self):
        return hash((self.names, self.B, self.values))

    def value(self, name_or_index) -> RationalFunction:
        if isinstance(name_or_index, int):
            return self.values[name_or_index - 1]
        return self.values[self.names.index(name_or_index)]

    @property
    def cluster(self):
        return self.values[: self.N]

    @property
    def frozen(self):
        return self.values[self.N:]

    def is_generalized(self, k: int) -> bool:
        v = self.generalized.get(k)
        return v is not None and v.d > 1

    def _monomial(self, exps: Mapping[int, int]) -> RationalFunction:
        acc = RationalFunction.const(self.table, 1)
        for j, e in exps.items():
            if e:
                acc = acc * self.values[j] ** e
        return acc

    def exchange_polynomial(self, k: int) -> RationalFunction:
        """Value of ``x_k * x_k'`` in this seed."""
        v = self.generalized.get(k)
        if v is not None and v.template is not None:
            local = VarTable(self.names)
            t = parse_expr(v.template, local)
            return substitute(t, dict(zip(self.names, self.values)), target=self.table)
        if v is not None and v.d > 1:
            raise ValueError(f"generalized vertex {k} has no exchange template")
        row = self.B.rows[k - 1]
        plus = {j: b for j, b in enumerate(row) if b > 0}
        minus = {j: -b for j, b in enumerate(row) if b < 0}
        return self._monomial(plus) + self._monomial(minus)


def mutate_seed(s: Seed, k: int) -> Seed:
    """Seed mutation in direction ``k`` (1-based)."""
    if not 1 <= k <= s.N:
        raise IndexError(f"mutation direction {k} outside [1,{s.N}]")
    new_k = s.exchange_polynomial(k) / s.values[k - 1]
    vals = list(s.values)
    vals[k - 1] = new_k
    # exchange templates at other vertices refer to the old seed
    gen = {}
    for i, v in s.generalized.items():
        gen[i] = v if i == k or v.template is None else replace(v, template=None)
    return Seed(s.names, mutate_matrix(s.B, k), tuple(vals), s.table, gen, s.provenance + (k,))


def y_variable(s: Seed, i: int) -> RationalFunction:
    """``y_i = prod_j x_j^{b_ij}`` in the values of ``s``."""
    if not 1 <= i <= s.N:
        raise IndexError(f"y-variable index {i} outside [1,{s.N}]")
    return s._monomial(dict(enumerate(s.B.rows[i - 1])))


def apply_sequence(s: Seed, seq: Iterable[int]) -> Seed:
    for k in seq:
        s = mutate_seed(s, k)
    return s


@dataclass(frozen=True)
class LaurentReport:
    checked: int
    violations: Tuple[Tuple[Tuple[int, ...], str, str], ...]

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {"checked": self.checked, "ok": self.ok,
                "violations": [{"at": list(p), "variable": n, "value": v} for p, n, v in self.violations]}


def laurent_check(initial: Seed, seq: Sequence[int]) -> LaurentReport:
    """Check every variable along the walk lies in the Laurent ring of the
    initial cluster (frozen variables not inverted)."""
    cluster = set(initial.table.names[: initial.N]) if initial.table.names == initial.names else None
    if cluster is None:
        raise ValueError("laurent_check needs a seed whose values are the initial generators")
    frozen = set(initial.names[initial.N:])
    seen = set()
    bad = []
    s = initial
    count = 0
    for step in range(len(seq) + 1):
        if step:
            s = mutate_seed(s, seq[step - 1])
        for name, v in zip(s.names, s.values):
            if v in seen:
                continue
            seen.add(v)
            count += 1
            if not is_in_laurent_ring(v, cluster, frozen):
                bad.append((s.provenance, name, str(v)))
    return LaurentReport(count, tuple(bad))


@dataclass(frozen=True)
class Nerve:
    center: Seed
    neighbors: Mapping[int, Seed]

    @property
    def seeds(self):
        return [self.center] + [self.neighbors[k] for k in sorted(self.neighbors)]

    @property
    def labels(self):
        return sorted(self.neighbors)


def star_nerve(s: Seed) -> Nerve:
    """The seed together with its ``N`` one-step mutations."""
    return Nerve(s, {k: mutate_seed(s, k) for k in range(1, s.N + 1)})


@dataclass(frozen=True)
class RankReport:
    full_rank: bool
    rank: int
    isolated: Tuple[int, ...]
    gcs_upper_ok: bool

    def to_json(self):
        return {"full_rank": self.full_rank, "rank": self.rank,
                "isolated": list(self.isolated), "gcs_upper_ok": self.gcs_upper_ok}


def rank_checks(s: Seed) -> RankReport:
    B = s.B
    r = integer_rank(B.rows)
    isolated = tuple(j for j in range(B.N + 1, B.N + B.M + 1) if all(row[j - 1] == 0 for row in B.rows))
    ok = True
    if s.generalized and isolated:
        table = VarTable(s.names)
        iso_names = [s.names[j - 1] for j in isolated]
        for i, v in s.generalized.items():
            if v.d <= 1:
                continue
            P = []
            for text in v.p[1:v.d]:
                mono = parse_expr(text, table).as_poly()
                exps = dict(zip(table.names, mono.leading()[0]))
                P.append([exps[n] for n in iso_names])
            if integer_rank(P) != v.d - 1:
                ok = False
    elif s.generalized:
        ok = all(v.d <= 1 for v in s.generalized.values())
    return RankReport(r == B.N, r, isolated, ok)


# ---------------------------------------------------------------- JSON

def seed_from_json(data) -> Seed:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, dict):
        raise ValueError("seed file must be a JSON object")
    try:
        N = int(data["N"])
        M = int(data["M"])
        names = [str(x) for x in data["vars"]]
        B = ExchangeMatrix(N, M, data["B"])
    except KeyError as e:
        raise ValueError(f"seed file is missing field {e}") from None
    except TypeError as e:
        raise ValueError(f"malformed seed file: {e}") from None
    table = VarTable(data["ambient"]) if "ambient" in data else None
    gen = {}
    for k, v in (data.get("generalized") or {}).items():
        gen[int(k)] = VertexData(int(v["d"]), tuple(str(x) for x in v["p"]),
                                 tuple(str(x) for x in v["phat"]), v.get("template"))
    return Seed.initial(names, B, gen, table=table, values=data.get("values"))


def seed_to_json(s: Seed) -> dict:
    out = {"N": s.N, "M": s.M, "B": s.B.tolist(), "vars": list(s.names),
           "values": {n: str(v) for n, v in zip(s.names, s.values)}}
    if s.table.names != s.names:
        out["ambient"] = list(s.table.names)
    if s.generalized:
        out["generalized"] = {str(i): {"d": v.d, "p": list(v.p), "phat": list(v.phat), "template": v.template}
                              for i, v in sorted(s.generalized.items())}
    if s.provenance:
        out["provenance"] = list(s.provenance)
    return out
