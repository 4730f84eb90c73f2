"""Markers, related triples and quasi-isomorphisms between cluster structures.

Indices in this module are *labels* 1..N+M.  A structure's frozen labels
are given explicitly by the marker; the seed stores cluster labels first
(in increasing order) followed by frozen labels (in increasing order).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exactalg import RationalFunction, VarTable, parse_expr, substitute
from .seedcore import ExchangeMatrix, Seed, integer_rank, mutate_seed


# ---------------------------------------------------------------- markers

@dataclass(frozen=True)
class Marker:
    """Bijection ``kappa`` on labels plus the two frozen label sets."""

    kappa: Tuple[int, ...]
    frC: Tuple[int, ...]
    frCt: Tuple[int, ...]
    marked: Tuple[int, ...] = field(init=False)
    marked_t: Tuple[int, ...] = field(init=False)

    def __post_init__(self):
        kappa = tuple(int(x) for x in self.kappa)
        n = len(kappa)
        if sorted(kappa) != list(range(1, n + 1)):
            raise ValueError("kappa is not a bijection of [1,N+M]")
        frC = tuple(sorted(set(int(x) for x in self.frC)))
        frCt = tuple(sorted(set(int(x) for x in self.frCt)))
        for s in (frC, frCt):
            if any(not 1 <= x <= n for x in s):
                raise ValueError("frozen label out of range")
        image = {kappa[i - 1] for i in frC}
        if not image <= set(frCt):
            raise ValueError("kappa does not map frozen labels of C into frozen labels of C~")
        if len(frCt) <= len(frC):
            raise ValueError("C~ must have strictly more frozen variables than C")
        marked_t = tuple(sorted(set(frCt) - image))
        inv = {k: i + 1 for i, k in enumerate(kappa)}
        marked = tuple(sorted(inv[j] for j in marked_t))
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "frC", frC)
        object.__setattr__(self, "frCt", frCt)
        object.__setattr__(self, "marked", marked)
        object.__setattr__(self, "marked_t", marked_t)

    @property
    def size(self):
        return len(self.kappa)

    def k(self, i: int) -> int:
        return self.kappa[i - 1]

    def inverse(self, j: int) -> int:
        return self.kappa.index(j) + 1

    def cluster_labels(self) -> List[int]:
        return [i for i in range(1, self.size + 1) if i not in self.frC]

    def cluster_labels_t(self) -> List[int]:
        return [i for i in range(1, self.size + 1) if i not in self.frCt]

    def nonmarked(self) -> List[int]:
        """Cluster labels of C outside the marked set."""
        return [i for i in self.cluster_labels() if i not in self.marked]


def build_marker(perm: Sequence[int], frC: Sequence[int], frCt: Sequence[int]) -> Marker:
    return Marker(tuple(perm), tuple(frC), tuple(frCt))


def related_sequence(m: Marker, seq: Sequence[int]) -> Tuple[int, ...]:
    """Image of a marked mutation sequence under ``kappa``."""
    out = []
    cl = set(m.cluster_labels())
    for i in seq:
        if i in m.marked:
            raise ValueError(f"sequence touches marked label {i}")
        if i not in cl:
            raise ValueError(f"label {i} is not a cluster label")
        out.append(m.k(i))
    return tuple(out)


class _Labels:
    """Label <-> seed position bookkeeping for one structure."""

    def __init__(self, n: int, frozen: Sequence[int]):
        fr = sorted(frozen)
        order = [i for i in range(1, n + 1) if i not in set(fr)] + fr
        self.order = order
        self.pos = {lab: p for p, lab in enumerate(order)}
        self.ncluster = n - len(fr)

    def b(self, seed: Seed, i: int, j: int) -> int:
        return seed.B.rows[self.pos[i]][self.pos[j]]

    def value(self, seed: Seed, i: int) -> RationalFunction:
        return seed.values[self.pos[i]]

    def name(self, seed: Seed, i: int) -> str:
        return seed.names[self.pos[i]]

    def index(self, i: int) -> int:
        """1-based mutation direction of cluster label ``i``."""
        return self.pos[i] + 1


@dataclass(frozen=True)
class RelatedTriple:
    C: Seed
    Ct: Seed
    marker: Marker

    def __post_init__(self):
        m = self.marker
        n = self.C.N + self.C.M
        if n != m.size or self.Ct.N + self.Ct.M != n:
            raise ValueError("N+M must agree for both structures and the marker")
        if len(m.frC) != self.C.M or len(m.frCt) != self.Ct.M:
            raise ValueError("frozen label sets do not match the frozen counts of the seeds")
        if len(m.marked) != self.Ct.M - self.C.M:
            raise ValueError("marked set has the wrong size")
        object.__setattr__(self, "_lc", _Labels(n, m.frC))
        object.__setattr__(self, "_lt", _Labels(n, m.frCt))

    @property
    def lc(self) -> _Labels:
        return self._lc

    @property
    def lt(self) -> _Labels:
        return self._lt

    def marked_names(self):
        return ([self.lc.name(self.C, i) for i in self.marker.marked],
                [self.lt.name(self.Ct, j) for j in self.marker.marked_t])

    def degrees_match(self) -> List[Tuple[int, int, int]]:
        """``(i, d_i, d~_kappa(i))`` for every mismatch on nonmarked labels."""
        bad = []
        for i in self.marker.nonmarked():
            d = _vertex(self.C, self.lc, i)
            dt = _vertex(self.Ct, self.lt, self.marker.k(i))
            di = d.d if d else 1
            dti = dt.d if dt else 1
            if di != dti:
                bad.append((i, di, dti))
        return bad


def _vertex(seed: Seed, lab: _Labels, i: int):
    return seed.generalized.get(lab.index(i))


# ---------------------------------------------------------------- Lambda

@dataclass(frozen=True)
class LambdaMatrix:
    """Integer matrix with rows indexed by all labels and columns by the marked set."""

    cols: Tuple[int, ...]
    entries: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        ent = tuple(tuple(int(x) for x in r) for r in self.entries)
        if any(len(r) != len(self.cols) for r in ent):
            raise ValueError("Lambda rows must have one entry per marked column")
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "cols", tuple(self.cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i - 1][self.cols.index(j)]

    def diagonal_ok(self) -> List[int]:
        return [j for j in self.cols if self[j, j] != 1]

    def with_row(self, i: int, row: Sequence[int]) -> "LambdaMatrix":
        ent = list(self.entries)
        ent[i - 1] = tuple(row)
        return LambdaMatrix(self.cols, tuple(ent))

    def to_json(self):
        return {"rows": len(self.entries), "cols": list(self.cols), "entries": [list(r) for r in self.entries]}

    @classmethod
    def from_json(cls, data):
        return cls(tuple(data["cols"]), tuple(tuple(r) for r in data["entries"]))

    @classmethod
    def basis(cls, n: int, cols: Sequence[int]):
        """The relabeling Lambda: identity on marked rows, zero elsewhere."""
        return cls(tuple(cols), tuple(tuple(1 if i == j else 0 for j in cols) for i in range(1, n + 1)))


def _det_int(rows):
    """Exact integer determinant (small matrices)."""
    n = len(rows)
    if n == 0:
        return 1
    A = [[Fraction(x) for x in r] for r in rows]
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c]), None)
        if p is None:
            return 0
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            for k in range(c, n):
                A[r][k] -= f * A[c][k]
    return int(d)


@dataclass
class _State:
    C: Seed
    Ct: Seed
    lam: LambdaMatrix


class QuasiIso:
    """A candidate quasi-isomorphism given by Lambda at the initial pair.

    The initial seeds must carry their generators as values.  States at
    marked clusters reached from the initial pair are tracked lazily with
    :meth:`track`.
    """

    def __init__(self, triple: RelatedTriple, lam: LambdaMatrix):
        m = triple.marker
        if tuple(lam.cols) != m.marked:
            raise ValueError(f"Lambda columns {list(lam.cols)} differ from the marked set {list(m.marked)}")
        if len(lam.entries) != m.size:
            raise ValueError("Lambda needs one row per label")
        block = [[lam[i, j] for j in m.marked] for i in m.marked]
        if abs(_det_int(block)) != 1:
            raise ValueError("monomial substitution is not invertible (marked block of Lambda is not unimodular)")
        self.triple = triple
        self.lam = lam
        self._states: Dict[Tuple[int, ...], _State] = {(): _State(triple.C, triple.Ct, lam)}

    @property
    def marker(self):
        return self.triple.marker

    def image_of(self, i: int, state: Optional[_State] = None) -> RationalFunction:
        """``x~_kappa(i) * prod_{j in I, j != i} x~_kappa(j)^lambda_ij`` in C~'s values."""
        st = state or self._states[()]
        t = self.triple
        m = self.marker
        out = t.lt.value(st.Ct, m.k(i))
        for j in m.marked:
            if j != i:
                e = st.lam[i, j]
                if e:
                    out = out * t.lt.value(st.Ct, m.k(j)) ** e
        return out

    def substitution(self, state: Optional[_State] = None) -> Dict[str, RationalFunction]:
        t = self.triple
        st = state or self._states[()]
        return {t.lc.name(st.C, i): self.image_of(i, st) for i in range(1, self.marker.size + 1)}

    def apply(self, f: RationalFunction) -> RationalFunction:
        """Image of ``f`` (over C's initial variables) in C~'s field."""
        return substitute(f, self.substitution(), target=self.triple.Ct.table)

    def track(self, seq: Sequence[int]) -> _State:
        """Mutate both sides along the marked sequence, updating Lambda."""
        seq = tuple(seq)
        related_sequence(self.marker, seq)
        n = len(seq)
        while n and seq[:n] not in self._states:
            n -= 1
        st = self._states[seq[:n]]
        for j in range(n, len(seq)):
            st = self._step(st, seq[j])
            self._states[seq[:j + 1]] = st
        return st

    def state(self, seq: Sequence[int]) -> _State:
        try:
            return self._states[tuple(seq)]
        except KeyError:
            raise LookupError(f"Lambda at {list(seq)} is not tracked") from None

    def _step(self, st: _State, ell: int) -> _State:
        lam = lambda_step(self.triple, st.C, st.Ct, st.lam, ell)
        t = self.triple
        C = mutate_seed(st.C, t.lc.index(ell))
        Ct = mutate_seed(st.Ct, t.lt.index(self.marker.k(ell)))
        return _State(C, Ct, lam)


class LambdaIntegralityError(ValueError):
    def __init__(self, ell, j, value):
        super().__init__(f"lambda'[{ell},{j}] = {value} is not an integer")
        self.ell, self.j, self.value = ell, j, value


def lambda_step(triple: RelatedTriple, C: Seed, Ct: Seed, lam: LambdaMatrix, ell: int) -> LambdaMatrix:
    m = triple.marker
    if ell in m.marked or ell not in m.cluster_labels():
        raise ValueError(f"direction {ell} is not a nonmarked cluster label")
    n = m.size
    row = []
    for j in lam.cols:
        bt = abs(triple.lt.b(Ct, m.k(ell), m.k(j)))
        s = sum(abs(triple.lc.b(C, ell, s_)) * lam[s_, j] for s_ in range(1, n + 1))
        val = Fraction(-2 * lam[ell, j] - bt + s, 2)
        if val.denominator != 1:
            raise LambdaIntegralityError(ell, j, val)
        row.append(int(val))
    return lam.with_row(ell, row)


def mutate_lambda(q: QuasiIso, ell: int, at: Sequence[int] = ()) -> LambdaMatrix:
    """Lambda after mutating the tracked pair at ``at`` in direction ``ell``."""
    st = q.track(at)
    return lambda_step(q.triple, st.C, st.Ct, st.lam, ell)


def apply_quasi(q: QuasiIso, f: RationalFunction, at: Sequence[int] = ()) -> RationalFunction:
    """Image of ``f``, written in the variable names of the cluster ``at``.

    Each name ``x_i`` is sent to ``x~_kappa(i) * prod x~_kappa(j)^lambda_ij``
    with Lambda and the C~ values taken at the related cluster.
    """
    st = q.state(at)
    return substitute(f, q.substitution(st), target=q.triple.Ct.table)


def monomial_identity_failures(q: QuasiIso, at: Sequence[int] = ()) -> List[int]:
    """Labels i where Q(x_i) differs from the Lambda monomial at ``at``."""
    st = q.state(at)
    bad = []
    for i in range(1, q.marker.size + 1):
        if q.apply(q.triple.lc.value(st.C, i)) != q.image_of(i, st):
            bad.append(i)
    return bad


# ---------------------------------------------------------------- criteria

@dataclass
class QuasiReport:
    ok: bool
    signs: Dict[int, int]
    failures: List[dict]
    mixed: bool = False

    def to_json(self):
        return {"ok": self.ok, "signs": {str(k): v for k, v in self.signs.items()},
                "mixed": self.mixed, "failures": self.failures}


def _components_t(triple: RelatedTriple, Ct: Seed) -> List[List[int]]:
    """Mutable components of C~, as lists of labels."""
    lt = triple.lt
    return [[lt.order[p - 1] for p in comp] for comp in Ct.B.mutable_components()]


def _signed_search(comps, row_ok) -> Tuple[Dict[int, int], List[Tuple[int, list]], bool]:
    """Choose one sign per component.

    ``row_ok(a, s)`` returns the list of failing entries of row ``a``
    under sign ``s``.  Returns the chosen signs, failures, and whether the
    rows would all pass with a per-row (mixed) choice.
    """
    signs = {}
    fails = []
    mixed = False
    for ci, comp in enumerate(comps):
        per = {s: {a: row_ok(a, s) for a in comp} for s in (1, -1)}
        good = [s for s in (1, -1) if not any(per[s].values())]
        if good:
            signs[ci] = good[0]
            continue
        if all(not per[1][a] or not per[-1][a] for a in comp):
            mixed = True
        s = min((1, -1), key=lambda s: sum(len(v) for v in per[s].values()))
        signs[ci] = s
        for a in comp:
            fails.extend(per[s][a])
    return signs, fails, mixed


def check_quasi_seed(q: QuasiIso, at: Sequence[int] = ()) -> QuasiReport:
    """Matrix criterion: kappa^{-1}(B~) agrees with B off the marked set and
    with B*Lambda on marked columns, up to per-component signs."""
    st = q.track(at)
    t, m = q.triple, q.marker
    n = m.size
    fails = []
    for j in m.marked:
        if st.lam[j, j] != 1:
            fails.append({"kind": "lambda_diagonal", "row": j, "col": j, "value": st.lam[j, j]})
    nonmarked = m.nonmarked()
    inv = {m.k(i): i for i in nonmarked}
    expected = {}
    for i in nonmarked:
        row = {}
        for j in range(1, n + 1):
            if j in m.marked:
                row[j] = sum(t.lc.b(st.C, i, s) * st.lam[s, j] for s in range(1, n + 1))
            else:
                row[j] = t.lc.b(st.C, i, j)
        expected[i] = row

    def row_ok(a, s):
        i = inv.get(a)
        if i is None:
            return [{"kind": "unrelated_row", "row": a}]
        out = []
        for j in range(1, n + 1):
            got = t.lt.b(st.Ct, a, m.k(j))
            want = s * expected[i][j]
            if got != want:
                out.append({"kind": "marked_column" if j in m.marked else "block",
                            "row": i, "col": j, "expected": want, "actual": got})
        return out

    signs, f2, mixed = _signed_search(_components_t(t, st.Ct), row_ok)
    fails.extend(f2)
    return QuasiReport(not fails, signs, fails, mixed)


def check_quasi_y(q: QuasiIso, at: Sequence[int] = ()) -> QuasiReport:
    """y-variable criterion: Q(y_i) = y~_kappa(i)^{+-1}, sign per component.

    Works symbolically: y-variables are formed from seed values and pushed
    through the substitution, independently of the matrix criterion.
    """
    st = q.track(at)
    t, m = q.triple, q.marker
    n = m.size
    fails = []
    for j in m.marked:
        if st.lam[j, j] != 1:
            fails.append({"kind": "lambda_diagonal", "row": j, "col": j, "value": st.lam[j, j]})
    images = {i: q.image_of(i, st) for i in range(1, n + 1)}
    inv = {m.k(i): i for i in m.nonmarked()}
    cache = {}

    def qy(i):
        if i not in cache:
            acc = RationalFunction.const(t.Ct.table, 1)
            for j in range(1, n + 1):
                e = t.lc.b(st.C, i, j)
                if e:
                    acc = acc * images[j] ** e
            cache[i] = acc
        return cache[i]

    def yt(a):
        acc = RationalFunction.const(t.Ct.table, 1)
        for c in range(1, n + 1):
            e = t.lt.b(st.Ct, a, c)
            if e:
                acc = acc * t.lt.value(st.Ct, c) ** e
        return acc

    def row_ok(a, s):
        i = inv.get(a)
        if i is None:
            return [{"kind": "unrelated_row", "row": a}]
        target = yt(a) if s == 1 else yt(a).inverse()
        if qy(i) != target:
            return [{"kind": "y_mismatch", "row": i, "image": str(qy(i)), "expected": str(target)}]
        return []

    signs, f2, mixed = _signed_search(_components_t(t, st.Ct), row_ok)
    fails.extend(f2)
    return QuasiReport(not fails, signs, fails, mixed)


# ---------------------------------------------------------------- toric actions

def _weights(W) -> List[List[int]]:
    rows = [[int(x) for x in (r if isinstance(r, (list, tuple)) else [r])] for r in W]
    return rows


def toric_global_check(B, W, generalized: Optional[Mapping] = None, names: Sequence[str] = ()) -> bool:
    """``True`` iff ``B W = 0`` (and every phat is W-invariant when given).

    ``W`` is an ``(N+M) x s`` integer matrix of full column rank; a plain
    weight vector is read as a single column.
    """
    if isinstance(B, Seed):
        generalized = B.generalized if generalized is None else generalized
        names = B.names
        B = B.B
    W = _weights(W)
    if len(W) != B.N + B.M:
        raise ValueError(f"W needs {B.N + B.M} rows, got {len(W)}")
    s = len(W[0]) if W else 0
    if s == 0 or integer_rank(W) != s:
        raise ValueError("weight matrix does not have full column rank")
    for row in B.rows:
        for c in range(s):
            if sum(b * W[j][c] for j, b in enumerate(row)):
                return False
    if generalized:
        table = VarTable(names)
        for v in generalized.values():
            for text in v.phat:
                if any(_weight_of(parse_expr(text, table), W, c) for c in range(s)):
                    return False
    return True


def _weight_of(f: RationalFunction, W, c: int) -> int:
    """Weight of a Laurent monomial in column ``c`` of ``W``."""
    p = f.as_poly()
    exps = p.leading()[0] if len(p) else None
    if exps is None or len(p) != 1:
        raise ValueError("not a Laurent monomial")
    return sum(e * W[j][c] for j, e in enumerate(exps))


def _homogeneous_weight(f: RationalFunction, W) -> Optional[Tuple[int, ...]]:
    s = len(W[0])

    def wt(poly):
        ws = {tuple(sum(e * W[j][c] for j, e in enumerate(exps)) for c in range(s)) for exps, _ in poly.items()}
        return ws.pop() if len(ws) == 1 else None

    a, b = wt(f.num), wt(f.den)
    if a is None or b is None:
        return None
    return tuple(x - y for x, y in zip(a, b))


def mutate_weights(B: ExchangeMatrix, W, k: int) -> List[List[int]]:
    """Weights of the mutated seed: ``w'_k = -w_k + sum_{b_kj > 0} b_kj w_j``."""
    W = [list(r) for r in _weights(W)]
    row = B.rows[k - 1]
    W[k - 1] = [-W[k - 1][c] + sum(b * W[j][c] for j, b in enumerate(row) if b > 0) for c in range(len(W[0]))]
    return W


def toric_equivariance_check(seed: Seed, W, depth: int = 3) -> List[dict]:
    """Recompute weights of every seed up to ``depth`` mutations.

    Each value must be homogeneous of the weight predicted by
    :func:`mutate_weights`, and ``B W = 0`` must persist.  Returns the list
    of failures.
    """
    W = _weights(W)
    fails = []
    frontier = [(seed, W)]
    seen = {(seed.provenance)}
    for _ in range(depth):
        nxt = []
        for s, w in frontier:
            for k in range(1, s.N + 1):
                if s.provenance and s.provenance[-1] == k:
                    continue
                t = mutate_seed(s, k)
                wt = mutate_weights(s.B, w, k)
                if not toric_global_check(t.B, wt):
                    fails.append({"at": list(t.provenance), "kind": "BW"})
                got = _homogeneous_weight(t.values[k - 1], W)
                if got != tuple(wt[k - 1]):
                    fails.append({"at": list(t.provenance), "kind": "weight", "expected": wt[k - 1],
                                  "actual": None if got is None else list(got)})
                if t.provenance not in seen:
                    seen.add(t.provenance)
                    nxt.append((t, wt))
        frontier = nxt
    return fails


def lambda_from_weights(w: Sequence[int], wt: Sequence[int], m: int, triple: RelatedTriple) -> LambdaMatrix:
    """Lambda of the quasi-isomorphism induced by rank-1 global toric actions."""
    mk = triple.marker
    if mk.marked != (m,):
        raise ValueError(f"marked set is {list(mk.marked)}, expected [{m}]")
    n = mk.size
    if len(w) != n or len(wt) != n:
        raise ValueError("weight vectors need one entry per label")
    den = wt[mk.k(m) - 1]
    if den == 0:
        raise ValueError("weight of the marked variable in C~ is zero")
    col = []
    for i in range(1, n + 1):
        if i == m:
            col.append(1)
            continue
        v = Fraction(w[i - 1] - wt[mk.k(i) - 1], den)
        if v.denominator != 1:
            raise ValueError(f"Lambda_{i} = {v} is not an integer")
        col.append(int(v))
    if w[m - 1] != den:
        raise ValueError(f"w_{m} = {w[m - 1]} differs from w~_kappa({m}) = {den}")
    lc, lt = triple.lc, triple.lt
    for i in mk.nonmarked():
        for j in range(1, n + 1):
            if j != m and lt.b(triple.Ct, mk.k(i), mk.k(j)) != lc.b(triple.C, i, j):
                raise ValueError(f"restricted exchange matrices differ at ({i},{j})")
    if not _bw_zero(triple.C, lc, w) or not _bw_zero(triple.Ct, lt, wt):
        raise ValueError("weights do not define global toric actions")
    return LambdaMatrix((m,), tuple((x,) for x in col))


def _bw_zero(seed: Seed, lab: _Labels, w) -> bool:
    wpos = [w[lab.order[p] - 1] for p in range(len(lab.order))]
    return all(sum(b * x for b, x in zip(row, wpos)) == 0 for row in seed.B.rows)


def check_generalized_compat(q: QuasiIso, W=None, Wt=None) -> dict:
    """Degree, phat and toric-invariance conditions for generalized pairs.

    ``phat`` of a nonmarked vertex ``i`` is compared with the data at
    ``kappa(i)`` both through Q and through the plain relabeling kappa.
    """
    t, m = q.triple, q.marker
    fails = [{"kind": "degree", "row": i, "d": d, "d~": dt} for i, d, dt in t.degrees_match()]
    tab_c = VarTable(t.C.names)
    tab_t = VarTable(t.Ct.names)
    rename = {t.lc.name(t.C, i): RationalFunction.var(tab_t, t.lt.name(t.Ct, m.k(i))) for i in range(1, m.size + 1)}
    sub = {t.lc.name(t.C, i): q.image_of(i) for i in range(1, m.size + 1)}
    gens_t = dict(zip(t.Ct.names, t.Ct.values))
    for i in m.nonmarked():
        v = _vertex(t.C, t.lc, i)
        vt = _vertex(t.Ct, t.lt, m.k(i))
        if v is None or vt is None or v.d != vt.d:
            continue
        for r in range(v.d + 1):
            ph = parse_expr(v.phat[r], tab_c)
            pht = parse_expr(vt.phat[r], tab_t)
            if substitute(ph, sub, target=t.Ct.table) != substitute(pht, gens_t, target=t.Ct.table):
                fails.append({"kind": "casimir", "row": i, "r": r})
            if substitute(ph, rename, target=tab_t) != pht:
                fails.append({"kind": "relabel", "row": i, "r": r})
    for seed, weights, lab, tag in ((t.C, W, t.lc, "C"), (t.Ct, Wt, t.lt, "C~")):
        if weights is None:
            continue
        Wpos = [_weights(weights)[lab.order[p] - 1] for p in range(m.size)]
        table = VarTable(seed.names)
        for k, v in seed.generalized.items():
            for r, text in enumerate(v.phat):
                f = parse_expr(text, table)
                if any(_weight_of(f, Wpos, c) for c in range(len(Wpos[0]))):
                    fails.append({"kind": "toric", "structure": tag, "row": lab.order[k - 1], "r": r})
    return {"ok": not fails, "failures": fails}


# ---------------------------------------------------------------- JSON

def marker_from_json(data) -> Tuple[Marker, Optional[LambdaMatrix], Optional[dict]]:
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    if not isinstance(data, dict):
        raise ValueError("marker file must be a JSON object")
    try:
        mk = Marker(tuple(data["kappa"]), tuple(data["frC"]), tuple(data["frC~"]))
    except KeyError as e:
        raise ValueError(f"marker file is missing field {e}") from None
    lam = LambdaMatrix.from_json(data["lambda"]) if data.get("lambda") else None
    return mk, lam, data.get("weights")


def marker_to_json(mk: Marker, lam: Optional[LambdaMatrix] = None, weights=None) -> dict:
    out = {"kappa": list(mk.kappa), "frC": list(mk.frC), "frC~": list(mk.frCt)}
    if lam is not None:
        out["lambda"] = lam.to_json()
    if weights is not None:
        out["weights"] = weights
    return out


def labeled_seed(names: Sequence[str], frozen: Sequence[int], rows: Mapping[int, Sequence[int]],
                 generalized: Optional[Mapping] = None) -> Seed:
    """Build a seed from rows written in label order.

    ``names[i-1]`` names label ``i``; ``rows[i]`` is the full row of the
    cluster label ``i``; ``generalized`` is keyed by label.
    """
    n = len(names)
    lab = _Labels(n, frozen)
    cl = lab.order[: lab.ncluster]
    if set(rows) != set(cl):
        raise ValueError("rows must be given exactly for the cluster labels")
    B = [[rows[i][j - 1] for j in lab.order] for i in cl]
    gen = {lab.index(i): v for i, v in (generalized or {}).items()}
    return Seed.initial([names[i - 1] for i in lab.order], ExchangeMatrix(len(cl), n - len(cl), B), gen)
