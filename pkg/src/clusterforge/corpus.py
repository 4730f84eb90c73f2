"""Worked examples: generalized cluster structures on the double D(SL_3) and on
the dual Poisson variety SL_4, the birational maps relating them, and a
symbolic verifier for the monomial factorizations a quasi-isomorphism needs.

Every variable is stored as a formula in the ambient matrices.  A pullback
``x o F`` is computed by evaluating the formula of ``x`` on the matrices
``F(X, Y)`` (resp. ``F(U)``); the result is the same rational function as
substituting the image entries into the expanded polynomial, only cheaper.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .exactalg import (IdealBasis, RationalFunction, VarTable, divide_exact, equal_mod, factor_as_monomial,
                       poly_gcd)
from .symlin import SymMatrix, det, inverse, mat_mul, submatrix, trace

Mats = Dict[str, SymMatrix]
Formula = Callable[[Mats], RationalFunction]

DOUBLE_TABLE = VarTable([f"x{i}{j}" for i in range(1, 4) for j in range(1, 4)]
                        + [f"y{i}{j}" for i in range(1, 4) for j in range(1, 4)])
DUAL_TABLE = VarTable([f"u{i}{j}" for i in range(1, 5) for j in range(1, 5)])


def _m(A: SymMatrix, rows, cols) -> RationalFunction:
    return det(submatrix(A, rows, cols))


def _e(A: SymMatrix, i: int, j: int) -> RationalFunction:
    return A.entry(i, j)


def _hcat(*blocks: SymMatrix) -> SymMatrix:
    rows = blocks[0].rows
    return SymMatrix._wrap(blocks[0].table, [sum((list(b._e[i]) for b in blocks), []) for i in range(rows)])


def _cols(A: SymMatrix, cols) -> SymMatrix:
    return submatrix(A, range(1, A.rows + 1), cols)


def symbolic_mats(kind: str) -> Mats:
    if kind == "double":
        return {"X": SymMatrix.symbolic(DOUBLE_TABLE, "x", 3), "Y": SymMatrix.symbolic(DOUBLE_TABLE, "y", 3)}
    return {"U": SymMatrix.symbolic(DUAL_TABLE, "u", 4)}


# ---------------------------------------------------------------- L-matrices

def _lmatrix(template: Sequence[Sequence[str]], mats: Mats) -> SymMatrix:
    """Fill an L-matrix template: tokens ``xij``, ``yij`` or ``0``."""
    X, Y = mats["X"], mats["Y"]
    zero = RationalFunction.const(X.table, 0)
    grid = []
    for row in template:
        out = []
        for tok in row:
            if tok == "0":
                out.append(zero)
            else:
                src = X if tok[0] == "x" else Y
                out.append(src.entry(int(tok[1]), int(tok[2])))
        grid.append(out)
    return SymMatrix._wrap(X.table, grid)


def _diag_name(entry: RationalFunction, X: SymMatrix, Y: SymMatrix) -> str:
    for prefix, A in (("g", X), ("h", Y)):
        for i in range(1, A.rows + 1):
            for j in range(1, A.cols + 1):
                if A.entry(i, j) == entry:
                    # g_ij for x_ij, h_ji for y_ji: the label is the entry's own index pair
                    return f"{prefix}{i}{j}"
    raise ValueError("L-matrix diagonal entry is not a single matrix entry")


def lmatrix_variables(Lmats: Sequence[SymMatrix], X: SymMatrix, Y: SymMatrix) -> Dict[str, RationalFunction]:
    """g- and h-variables read off the diagonals of the L-matrices.

    A diagonal slot k of an L-matrix of size N holding x_ij (resp. y_ji)
    defines g_ij (resp. h_ji) as the trailing principal minor on [k, N].
    The diagonal ones g_ii, h_ii are the trailing principal minors of X, Y.
    """
    out: Dict[str, RationalFunction] = {}
    for L in Lmats:
        n = L.rows
        for k in range(1, n + 1):
            name = _diag_name(L.entry(k, k), X, Y)
            out[name] = _m(L, range(k, n + 1), range(k, n + 1))
    n = X.rows
    for i in range(1, n + 1):
        out[f"g{i}{i}"] = _m(X, range(i, n + 1), range(i, n + 1))
        out[f"h{i}{i}"] = _m(Y, range(i, n + 1), range(i, n + 1))
    return out


def _lmatrix_formulas(templates) -> Dict[str, Formula]:
    sym = symbolic_mats("double")
    forms: Dict[str, Formula] = {}
    for t in templates:
        L = _lmatrix(t, sym)
        n = L.rows
        for k in range(1, n + 1):
            name = _diag_name(L.entry(k, k), sym["X"], sym["Y"])
            forms[name] = (lambda mats, t=t, k=k, n=n:
                           _m(_lmatrix(t, mats), range(k, n + 1), range(k, n + 1)))
    for i in range(1, 4):
        forms[f"g{i}{i}"] = lambda mats, i=i: _m(mats["X"], range(i, 4), range(i, 4))
        forms[f"h{i}{i}"] = lambda mats, i=i: _m(mats["Y"], range(i, 4), range(i, 4))
    return forms


STD3_L = [
    [["x31"]],
    [["x21", "x22"], ["x31", "x32"]],
    [["y13"]],
    [["y12", "y13"], ["y22", "y23"]],
]
BD3_L = [
    [["y12", "y13", "0", "0"], ["y22", "y23", "x11", "x12"], ["y32", "y33", "x21", "x22"], ["0", "0", "x31", "x32"]],
    [["x31", "x32"], ["y12", "y13"]],
]


# ---------------------------------------------------------------- common families

def _double_u(mats: Mats) -> SymMatrix:
    return mat_mul(inverse(mats["X"]), mats["Y"])


def _double_common() -> Dict[str, Formula]:
    def phi11(m):
        X, U = m["X"], _double_u(m)
        d = det(X)
        return d * d * (_e(U, 2, 3) * _m(U, [1, 2], [2, 3]) + _e(U, 1, 3) * _m(U, [1, 2], [1, 3]))

    def c1(m):
        return det(m["X"]) * trace(_double_u(m))

    def c2(m):
        U = _double_u(m)
        t = trace(U)
        return det(m["X"]) * (t * t - trace(mat_mul(U, U))) * RationalFunction.const(U.table, "1/2")

    return {
        "phi11": phi11,
        "phi12": lambda m: det(_hcat(_cols(m["X"], [3]), _cols(m["Y"], [2, 3]))),
        "phi21": lambda m: det(_hcat(_cols(m["X"], [2, 3]), _cols(m["Y"], [3]))),
        "f11": lambda m: det(submatrix(_hcat(_cols(m["X"], [3]), _cols(m["Y"], [3])), [2, 3], [1, 2])),
        "c1": c1,
        "c2": c2,
    }


def _powers(U: SymMatrix, k: int) -> List[SymMatrix]:
    out = [U]
    for _ in range(k - 1):
        out.append(mat_mul(out[-1], U))
    return out


def _krylov(U: SymMatrix, rows, spec) -> SymMatrix:
    """Matrix whose columns are ``(U^p)_{rows, c}`` for ``(p, c)`` in ``spec``."""
    pw = _powers(U, max(p for p, _ in spec))
    return SymMatrix._wrap(U.table, [[pw[p - 1].entry(r, c) for p, c in spec] for r in rows])


def _dual_common() -> Dict[str, Formula]:
    def ck(k):
        def f(m):
            U = m["U"]
            pw = _powers(U, k)
            t = [trace(P) for P in pw]
            if k == 1:
                return -t[0]
            if k == 2:
                return (t[0] * t[0] - t[1]) * RationalFunction.const(U.table, "1/2")
            return -(t[0] ** 3 - 3 * t[0] * t[1] + 2 * t[2]) * RationalFunction.const(U.table, f"1/{factorial(3)}")
        return f

    return {
        "phi11": lambda m: det(_krylov(m["U"], [2, 3, 4], [(1, 1), (2, 1), (3, 1)])),
        "phi12": lambda m: -det(_krylov(m["U"], [2, 3, 4], [(1, 1), (1, 2), (2, 1)])),
        "phi21": lambda m: det(_krylov(m["U"], [3, 4], [(1, 1), (2, 1)])),
        "phi31": lambda m: m["U"].entry(4, 1),
        "phi22": lambda m: _m(m["U"], [3, 4], [1, 2]),
        "phi13": lambda m: _m(m["U"], [2, 3, 4], [1, 2, 3]),
        "c1": ck(1),
        "c2": ck(2),
        "c3": ck(3),
    }


def _ell(U: SymMatrix, rows) -> RationalFunction:
    return (_m(U, rows, [3, 4]) * U.entry(4, 4) + _m(U, rows, [2, 4]) * U.entry(3, 4)
            + _m(U, rows, [1, 4]) * U.entry(2, 4))


# Third column block of l3.  The printed formula has [2,3]; only {1,4}, which
# follows the pattern of l1 and l2, makes g22 and g32 factor under Q.
ELL3_THIRD = {"pattern": [1, 4], "printed": [2, 3]}


def _ell3(U: SymMatrix, variant: str = "pattern") -> RationalFunction:
    return (_m(U, [2, 3], [3, 4]) * U.entry(4, 4) + _m(U, [2, 3], [2, 4]) * U.entry(3, 4)
            + _m(U, [2, 3], ELL3_THIRD[variant]) * U.entry(2, 4))


def _dual_std() -> Dict[str, Formula]:
    n = 4
    forms: Dict[str, Formula] = {"g11": lambda m: det(m["U"])}
    for i in range(2, n + 1):
        for j in range(2, i + 1):
            forms[f"g{i}{j}"] = lambda m, i=i, j=j: _m(m["U"], range(i, n + 1), range(j, n - i + j + 1))
    return forms


def _dual_cg(variant: str = "pattern") -> Dict[str, Formula]:
    def l1(U):
        return _ell(U, [3, 4])

    def l2(U):
        return _ell(U, [2, 4])

    def g42(m):
        U = m["U"]
        return U.entry(4, 2) * l1(U) + U.entry(4, 1) * l2(U)

    def g32(m):
        U = m["U"]
        return _m(U, [3, 4], [2, 3]) * l1(U) + _m(U, [3, 4], [1, 3]) * l2(U) + _m(U, [3, 4], [1, 2]) * _ell3(U, variant)

    def g22(m):
        U = m["U"]
        return (_m(U, [2, 3, 4], [2, 3, 4]) * l1(U) + _m(U, [2, 3, 4], [1, 3, 4]) * l2(U)
                + _m(U, [2, 3, 4], [1, 2, 4]) * _ell3(U, variant))

    return {
        "g42": g42,
        "g43": lambda m: (m["U"].entry(4, 3) * m["U"].entry(4, 4) + m["U"].entry(4, 2) * m["U"].entry(3, 4)
                          + m["U"].entry(4, 1) * m["U"].entry(2, 4)),
        "g44": lambda m: m["U"].entry(4, 4),
        "g32": g32,
        "g33": lambda m: l1(m["U"]),
        "g22": g22,
    }


def _alpha_den(U: SymMatrix) -> RationalFunction:
    return _m(U, [3, 4], [3, 4]) * U.entry(4, 4) + _m(U, [3, 4], [2, 4]) * U.entry(3, 4)


# ---------------------------------------------------------------- structures

@dataclass
class CorpusStructure:
    name: str
    kind: str
    formulas: Dict[str, Formula]
    marked: Tuple[str, ...] = ()
    descriptor: str = ""
    complete: bool = True
    _values: Dict[str, RationalFunction] = field(default_factory=dict, repr=False)

    @property
    def table(self) -> VarTable:
        return DOUBLE_TABLE if self.kind == "double" else DUAL_TABLE

    @property
    def relations(self) -> IdealBasis:
        return relations(self.kind)

    @property
    def names(self) -> List[str]:
        return sorted(self.formulas)

    def value(self, name: str) -> RationalFunction:
        if name not in self._values:
            self._values[name] = self.formulas[name](symbolic_mats(self.kind))
        return self._values[name]

    def evaluate(self, name: str, mats: Mats) -> RationalFunction:
        return self.formulas[name](mats)

    def validate(self):
        for nm in self.names:
            if self.value(nm).is_zero():
                raise ValueError(f"{self.name}: variable {nm} is zero")
        if not set(self.marked) <= set(self.formulas):
            raise ValueError(f"{self.name}: marked names outside the variable set")


@lru_cache(maxsize=None)
def relations(kind: str) -> IdealBasis:
    one = RationalFunction.const
    if kind == "double":
        m = symbolic_mats("double")
        return IdealBasis([(det(m["X"]) - one(DOUBLE_TABLE, 1)).as_poly(),
                           (det(m["Y"]) - one(DOUBLE_TABLE, 1)).as_poly()])
    return IdealBasis([(det(symbolic_mats("dual")["U"]) - one(DUAL_TABLE, 1)).as_poly()])


def _build(name: str) -> CorpusStructure:
    if name == "dbl_sl3_std":
        return CorpusStructure(name, "double", {**_lmatrix_formulas(STD3_L), **_double_common()},
                               descriptor="standard BD pair on D(SL_3)")
    if name == "dbl_sl3_bd":
        return CorpusStructure(name, "double", {**_lmatrix_formulas(BD3_L), **_double_common()},
                               marked=("g21", "h13"),
                               descriptor="BD pair ({1},{2},1->2) on both sides, D(SL_3)")
    if name == "dual_sl4_std":
        return CorpusStructure(name, "dual", {**_dual_std(), **_dual_common()},
                               descriptor="g-convention, standard BD triple, SL_4")
    if name == "dual_sl4_cg":
        return CorpusStructure(name, "dual", {**_dual_cg(), **_dual_common()}, marked=("g33", "g44"),
                               descriptor="g-convention, Gamma1={2,3}, Gamma2={1,2}, i->i-1, SL_4")
    if name == "dual_sl4_cg_printed":
        return CorpusStructure(name, "dual", {**_dual_cg("printed"), **_dual_common()}, marked=("g33", "g44"),
                               descriptor="dual_sl4_cg with l3 exactly as printed (third block [2,3])")
    if name == "dual_sl4_tilde":
        # only the marked variable is known; g44 = u44 on both neighbours of this structure
        return CorpusStructure(name, "dual", {"g44": lambda m: m["U"].entry(4, 4)}, marked=("g44",),
                               descriptor="g-convention, ({2},{1},2->1), SL_4; variable list unavailable",
                               complete=False)
    if name == "dual_sl4_hat":
        return CorpusStructure(name, "dual", {"g33": lambda m: _alpha_den(m["U"])}, marked=("g33",),
                               descriptor="g-convention, ({3},{2},3->2), SL_4; variable list unavailable",
                               complete=False)
    raise KeyError(f"unknown corpus structure {name!r}")


STRUCTURES = ("dbl_sl3_std", "dbl_sl3_bd", "dual_sl4_std", "dual_sl4_cg", "dual_sl4_tilde", "dual_sl4_hat")
VARIANTS = ("dual_sl4_cg_printed",)


@lru_cache(maxsize=None)
def build_structure(name: str) -> CorpusStructure:
    return _build(name)


# ---------------------------------------------------------------- maps

def _ur(m: Mats) -> SymMatrix:
    X = m["X"]
    a = _m(X, [1, 3], [1, 2]) / _m(X, [2, 3], [1, 2])
    return SymMatrix.elementary(X.table, 3, {(2, 3): a})


def _uc(m: Mats) -> SymMatrix:
    Y = m["Y"]
    return SymMatrix.elementary(Y.table, 3, {(2, 1): Y.entry(1, 2) / Y.entry(1, 3)})


def _rho(m: Mats) -> SymMatrix:
    U = m["U"]
    t = U.table
    r = U.entry(3, 4) / U.entry(4, 4)
    first = SymMatrix.elementary(t, 4, {(1, 2): r})
    second = SymMatrix.elementary(t, 4, {(1, 2): _m(U, [2, 4], [3, 4]) / _m(U, [3, 4], [3, 4]),
                                         (1, 3): U.entry(2, 4) / U.entry(4, 4), (2, 3): r})
    return mat_mul(first, second)


def _G(m: Mats) -> SymMatrix:
    U = m["U"]
    t = U.table
    r = U.entry(3, 4) / U.entry(4, 4)
    return mat_mul(SymMatrix.elementary(t, 4, {(1, 2): r}),
                   SymMatrix.elementary(t, 4, {(1, 3): U.entry(2, 4) / U.entry(4, 4), (2, 3): r}))


def _Gp(m: Mats) -> SymMatrix:
    U = m["U"]
    E = _alpha_den(U)
    a1 = (_m(U, [2, 4], [3, 4]) * U.entry(4, 4) + _m(U, [2, 4], [2, 4]) * U.entry(3, 4)) / E
    a2 = -(_m(U, [2, 3], [3, 4]) * U.entry(4, 4) + _m(U, [2, 3], [2, 4]) * U.entry(3, 4)) / E
    return SymMatrix.elementary(U.table, 4, {(1, 2): a1, (1, 3): a2})


def _conj(gfun):
    def apply(m: Mats) -> Mats:
        g = gfun(m)
        return {"U": mat_mul(mat_mul(g, m["U"]), inverse(g))}
    return apply


def _two_sided(left, right):
    def apply(m: Mats) -> Mats:
        L = left(m) if left else None
        R = right(m) if right else None
        out = {}
        for k in ("X", "Y"):
            A = m[k]
            if L is not None:
                A = mat_mul(L, A)
            if R is not None:
                A = mat_mul(A, R)
            out[k] = A
        return out
    return apply


@dataclass(frozen=True)
class BirationalMapSpec:
    name: str
    kind: str
    apply: Callable[[Mats], Mats]
    src: str
    tgt: str
    marked: Tuple[str, ...]
    description: str = ""


MAPS = {
    "U": BirationalMapSpec("U", "double", _two_sided(_ur, _uc), "dbl_sl3_bd", "dbl_sl3_std", ("g21", "h13"),
                           "(X, Y) -> (Ur X Uc, Ur Y Uc)"),
    "Ur": BirationalMapSpec("Ur", "double", _two_sided(_ur, None), "dbl_sl3_bd", "", (), "(X, Y) -> (Ur X, Ur Y)"),
    "Uc": BirationalMapSpec("Uc", "double", _two_sided(None, _uc), "dbl_sl3_bd", "", (), "(X, Y) -> (X Uc, Y Uc)"),
    "Q": BirationalMapSpec("Q", "dual", _conj(_rho), "dual_sl4_cg", "dual_sl4_std", ("g33", "g44"),
                           "U -> rho(U) U rho(U)^-1"),
    "G": BirationalMapSpec("G", "dual", _conj(_G), "dual_sl4_cg", "dual_sl4_tilde", ("g44",),
                           "U -> G(U) U G(U)^-1"),
    "Gp": BirationalMapSpec("Gp", "dual", _conj(_Gp), "dual_sl4_cg", "dual_sl4_hat", ("g33",),
                            "U -> G'(U) U G'(U)^-1"),
}


def factor_matrix(name: str, mats: Optional[Mats] = None) -> SymMatrix:
    """The unitriangular factor behind a map: Ur, Uc, rho, G or G'."""
    fn = {"Ur": _ur, "Uc": _uc, "rho": _rho, "G": _G, "Gp": _Gp}[name]
    kind = "double" if name in ("Ur", "Uc") else "dual"
    return fn(mats or symbolic_mats(kind))


def map_eval(spec, mats: Optional[Mats] = None) -> Mats:
    """Symbolic image matrices of a map (by default at the generic point)."""
    if isinstance(spec, str):
        spec = MAPS[spec]
    return spec.apply(mats or symbolic_mats(spec.kind))


def compose(*specs) -> Callable[[Mats], Mats]:
    """``compose(F, G)`` is ``F o G``: apply ``G`` first."""
    specs = [MAPS[s] if isinstance(s, str) else s for s in specs]

    def apply(m: Mats) -> Mats:
        for s in reversed(specs):
            m = s.apply(m)
        return m
    return apply


def _mats_equal(a: Mats, b: Mats, basis: Optional[IdealBasis]) -> List[str]:
    bad = []
    for k in sorted(a):
        A, B = a[k], b[k]
        for i in range(1, A.rows + 1):
            for j in range(1, A.cols + 1):
                if not equal_mod(A.entry(i, j), B.entry(i, j), basis):
                    bad.append(f"{k}[{i},{j}]")
    return bad


def compose_check(modulo: str = "relations") -> Dict[str, dict]:
    """Entrywise comparison of U with Ur o Uc, Uc o Ur and id o U."""
    sym = symbolic_mats("double")
    basis = relations("double") if modulo == "relations" else None
    target = map_eval("U", sym)
    out = {}
    for label, fn in (("Ur o Uc", compose("Ur", "Uc")), ("Uc o Ur", compose("Uc", "Ur")),
                      ("id o U", lambda m: dict(map_eval("U", m)))):
        bad = _mats_equal(fn(sym), target, basis)
        out[label] = {"status": "ok" if not bad else "fail", "mismatches": bad}
    return out


# ---------------------------------------------------------------- verification

def _verify_one(src: CorpusStructure, tgt: CorpusStructure, spec: BirationalMapSpec, name: str,
                marked: Sequence[str], direction: str, modulo: str) -> dict:
    """Factor the pullback of ``name`` over the marked variables.

    ``fwd``: x o F = x~ * prod(m~^e), marked values taken from the target.
    ``bwd``: x~ o F = x * prod(m^e), marked values taken from the source.
    """
    basis = relations(src.kind) if modulo == "relations" else None
    image = map_eval(spec)
    tried = []
    dirs = ("fwd", "bwd") if direction == "auto" else (direction,)
    for d in dirs:
        pulled, base_s, mark_s = (src, tgt, tgt) if d == "fwd" else (tgt, src, src)
        f = pulled.evaluate(name, image)
        base = base_s.value(name)
        values = {m: mark_s.value(m) for m in marked}
        caveats = []
        e = factor_as_monomial(f, base, values)
        ambient = e is not None
        if e is None and basis is not None:
            e = factor_as_monomial(f, base, values, ideal=basis)
            if e is not None:
                caveats.append("identity holds modulo the relations only")
        tried.append(d)
        if e is None:
            continue
        exps = dict(zip(marked, e))
        status = "ok"
        row = dict(exps)
        if name in marked:
            if exps[name] != 0:
                status = "fail"
                caveats.append(f"marked variable {name} picks up its own factor")
            row[name] = 1
        return {"status": status, "exponents": exps, "lambda_row": row, "direction": d,
                "ambient": ambient, "caveats": caveats}
    return {"status": "fail", "exponents": None, "lambda_row": None, "direction": None,
            "ambient": False, "caveats": [f"no monomial factorization found ({', '.join(tried)})"]}


def _job(args):
    src, tgt, mname, name, marked, direction, modulo = args
    return name, _verify_one(build_structure(src), build_structure(tgt), MAPS[mname], name, marked,
                             direction, modulo)


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("CLUSTERFORGE_JOBS", "1")))
    except ValueError:
        return 1


def verify_quasi_monomial(src, tgt, spec, marked: Optional[Sequence[str]] = None,
                          direction: str = "auto", modulo: str = "relations",
                          jobs: Optional[int] = None, names: Optional[Sequence[str]] = None) -> Dict[str, dict]:
    """Per-variable factorization report for a map between two structures.

    Variables are paired by name.  The report is ordered by variable name
    regardless of ``jobs``.
    """
    if direction not in ("auto", "fwd", "bwd"):
        raise ValueError(f"direction must be auto, fwd or bwd, not {direction!r}")
    if modulo not in ("relations", "ambient"):
        raise ValueError(f"modulo must be relations or ambient, not {modulo!r}")
    src = build_structure(src) if isinstance(src, str) else src
    tgt = build_structure(tgt) if isinstance(tgt, str) else tgt
    spec = MAPS[spec] if isinstance(spec, str) else spec
    marked = tuple(spec.marked if marked is None else marked)
    common = sorted(set(src.formulas) & set(tgt.formulas))
    missing = [m for m in marked if m not in common]
    if missing:
        raise ValueError(f"marked names not shared by both structures: {missing}")
    if names is not None:
        common = [n for n in common if n in set(names)]
    jobs = default_jobs() if jobs is None else jobs
    tasks = [(src.name, tgt.name, spec.name, n, marked, direction, modulo) for n in common]
    registered = build_structure(src.name) is src and build_structure(tgt.name) is tgt and MAPS.get(spec.name) is spec
    if jobs > 1 and registered and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = dict(ex.map(_job, tasks))
    else:
        results = {n: _verify_one(src, tgt, spec, n, marked, direction, modulo) for n in common}
    return {n: results[n] for n in common}


def _strip_gcds(d, candidates):
    """Divide out of ``d`` every factor it shares with the candidates."""
    changed = True
    while changed and not d.is_constant():
        changed = False
        for t in candidates:
            g = poly_gcd(d, t)
            if not g.is_constant():
                d = divide_exact(d, g)
                changed = True
    return d


def denominators(spec) -> List:
    """Distinct nonconstant denominators of the image entries of a map."""
    spec = MAPS[spec] if isinstance(spec, str) else spec
    seen = {}
    for A in map_eval(spec).values():
        for i in range(1, A.rows + 1):
            for j in range(1, A.cols + 1):
                d = A.entry(i, j).den
                if not d.is_constant():
                    seen[str(d)] = d
    return [seen[k] for k in sorted(seen)]


def certify_marked(spec, candidates: Optional[Sequence[str]] = None) -> dict:
    """Marked set supported by a map, read off from its denominators.

    A birational quasi-isomorphism is regular once the marked variables are
    inverted, and it turns exactly the marked variables into units.  So a
    source variable is reported as marked when every irreducible factor of
    its pullback divides a denominator of the map's image; the marked set
    certifies when, conversely, those pullbacks account for every
    denominator.
    """
    spec = MAPS[spec] if isinstance(spec, str) else spec
    src = build_structure(spec.src)
    candidates = sorted(candidates or src.names)
    image = map_eval(spec)
    dens = denominators(spec)
    marked, pulled = [], []
    for c in candidates:
        v = src.evaluate(c, image)
        parts = [p for p in (v.num, v.den) if not p.is_constant()]
        if parts and all(_strip_gcds(p, dens).is_constant() for p in parts):
            marked.append(c)
            pulled.extend(parts)
    covered = all(_strip_gcds(d, pulled).is_constant() for d in dens)
    return {"marked": marked, "covers_denominators": covered, "denominators": [str(d) for d in dens]}


def determinant_check(spec, modulo: str = "relations") -> Dict[str, bool]:
    """``det`` of each image matrix against ``det`` of the original one."""
    spec = MAPS[spec] if isinstance(spec, str) else spec
    sym = symbolic_mats(spec.kind)
    basis = relations(spec.kind) if modulo == "relations" else None
    image = map_eval(spec, sym)
    return {k: equal_mod(det(image[k]), det(sym[k]), basis) for k in sorted(sym)}


def verify_suite(name: str, direction: str = "auto", modulo: str = "relations",
                 jobs: Optional[int] = None) -> dict:
    """Everything checkable for one registered structure: factorization
    reports for each map touching it, marked-set certification,
    determinant preservation and (on the double) the composition identity."""
    build_structure(name)
    report = {"structure": name, "maps": {}}
    for mname in sorted(MAPS):
        spec = MAPS[mname]
        if name not in (spec.src, spec.tgt):
            continue
        entry = {"description": spec.description, "marked": list(spec.marked),
                 "certified": certify_marked(spec), "determinant": determinant_check(spec, modulo)}
        if spec.tgt:
            entry["variables"] = verify_quasi_monomial(spec.src, spec.tgt, spec, direction=direction,
                                                       modulo=modulo, jobs=jobs)
        report["maps"][mname] = entry
    if build_structure(name).kind == "double":
        report["compose"] = compose_check(modulo)
    return report


def suite_ok(report: dict) -> bool:
    for entry in report["maps"].values():
        cert = entry["certified"]
        if sorted(cert["marked"]) != sorted(entry["marked"]) or not cert["covers_denominators"]:
            if entry["marked"]:
                return False
        if not all(entry["determinant"].values()):
            return False
        if any(v["status"] != "ok" for v in entry.get("variables", {}).values()):
            return False
    return all(v["status"] == "ok" for v in report.get("compose", {}).values())
