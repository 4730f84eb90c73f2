"""Coprimality predicates and a forward-chaining engine for Starfish-type
arguments transported along birational quasi-isomorphisms.

Facts are atoms ``(kind, *args)``.  Ring-theoretic hypotheses (factorial,
units are scalars) are never computed; they enter as asserted facts and
every verdict lists the assertions it relied on.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .exactalg import IdealBasis, LaurentPoly, RationalFunction, VarTable, poly_gcd
from .seedcore import Seed, mutate_seed


# ---------------------------------------------------------------- rings and predicates

@dataclass(frozen=True)
class RingSpec:
    """Polynomial ring over Q, optionally modulo relations.

    ``factorial`` and ``units_scalars`` are user certificates.
    """

    table: VarTable
    ideal: Optional[IdealBasis] = None
    factorial: bool = False
    units_scalars: bool = False
    description: str = ""

    @property
    def has_relations(self):
        return self.ideal is not None and len(self.ideal.generators) > 0


@dataclass(frozen=True)
class PredicateResult:
    holds: bool
    atom: tuple
    witness: Optional[str] = None
    caveat: Optional[str] = None

    def __bool__(self):
        return self.holds


_QUOTIENT_CAVEAT = "coprimality decided in the ambient polynomial ring, not in the quotient"


def _as_poly(a, name="element") -> LaurentPoly:
    if isinstance(a, RationalFunction):
        if not a.is_polynomial():
            raise ValueError(f"{name} {a} is not regular (not a polynomial)")
        a = a.as_poly()
    if any(e < 0 for exps, _ in a.items() for e in exps):
        raise ValueError(f"{name} {a} is not regular (negative exponent)")
    return a


def cop_pair(a, b, ring: RingSpec, names: Tuple[str, str] = ("a", "b")) -> PredicateResult:
    """``Cop(a, b)``: the gcd of the two polynomials is a unit."""
    pa, pb = _as_poly(a, names[0]), _as_poly(b, names[1])
    atom = ("Cop",) + tuple(sorted(set(names)))
    caveat = _QUOTIENT_CAVEAT if ring.has_relations else None
    if pa.is_zero() or pb.is_zero():
        return PredicateResult(False, atom, "0", caveat)
    g = poly_gcd(pa, pb)
    if g.is_constant():
        return PredicateResult(True, atom, None, caveat)
    return PredicateResult(False, atom, str(g), caveat)


def cop_set(values: Mapping[str, object], ring: RingSpec) -> PredicateResult:
    """Pairwise coprimality of a named family; the witness names the first bad pair."""
    names = sorted(values)
    atom = ("Cop",) + tuple(names)
    for n in names:
        _as_poly(values[n], n)
    caveat = _QUOTIENT_CAVEAT if ring.has_relations else None
    for x, y in combinations(names, 2):
        r = cop_pair(values[x], values[y], ring, (x, y))
        if not r:
            return PredicateResult(False, atom, f"{x},{y}: {r.witness}", caveat)
    return PredicateResult(True, atom, None, caveat)


def cop_k(a, marked: Mapping[str, object], ring: RingSpec, name: str = "a", label: str = "Q") -> PredicateResult:
    """``Cop_kappa(a)``: ``a`` is regular and coprime with every marked value other than itself."""
    if not marked:
        raise ValueError("marker has an empty marked set")
    pa = _as_poly(a, name)
    atom = ("CopK", name, label)
    caveat = _QUOTIENT_CAVEAT if ring.has_relations else None
    for m, v in sorted(marked.items()):
        if m == name:
            continue
        r = cop_pair(pa, v, ring, (name, m))
        if not r:
            return PredicateResult(False, atom, f"{m}: {r.witness}", caveat)
    return PredicateResult(True, atom, None, caveat)


IrrOracle = Callable[[LaurentPoly], Optional[bool]]


def irr_check(p, oracle: Optional[IrrOracle] = None) -> Tuple[str, Optional[str]]:
    """Returns ``("irreducible", None)``, ``("reducible", witness)`` or ``("unknown", None)``."""
    p = _as_poly(p)
    if p.is_zero() or p.is_constant():
        raise ValueError("irreducibility is undefined for zero and units")
    if all(sum(e) <= 1 for e, _ in p.items()):
        return "irreducible", None
    low = p.min_exponents()
    if any(low):
        rest = p * LaurentPoly.monomial(p.table, [-e for e in low])
        if not rest.is_constant():
            return "reducible", str(LaurentPoly.monomial(p.table, low))
        first = next(i for i, e in enumerate(low) if e)
        unit = [0] * len(low)
        unit[first] = 1
        return "reducible", str(LaurentPoly.monomial(p.table, unit))
    if oracle is not None:
        verdict = oracle(p)
        if verdict is True:
            return "irreducible", None
        if verdict is False:
            return "reducible", None
    return "unknown", None


# ---------------------------------------------------------------- structures and maps

@dataclass(frozen=True)
class StructureSpec:
    """Names of an initial extended cluster and of its one-step mutations."""

    name: str
    ring: str
    cluster: Tuple[str, ...]
    frozen: Tuple[str, ...] = ()
    mutated: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "cluster", tuple(self.cluster))
        object.__setattr__(self, "frozen", tuple(self.frozen))
        mut = {x: self.mutated.get(x, x + "'") for x in self.cluster}
        object.__setattr__(self, "mutated", mut)

    @property
    def extended(self):
        return self.cluster + self.frozen

    def elements(self):
        return set(self.extended) | set(self.mutated.values())


@dataclass(frozen=True)
class MapSpec:
    """A quasi-isomorphism between registered structures, given by related names."""

    name: str
    src: str
    dst: str
    related: Mapping[str, str]
    marked: Tuple[str, ...] = ()


class FactBase:
    """Registered structures and maps plus a set of asserted or computed facts."""

    def __init__(self):
        self.structures: Dict[str, StructureSpec] = {}
        self.maps: Dict[str, MapSpec] = {}
        self.facts: Dict[tuple, "Fact"] = {}
        self._owner: Dict[str, str] = {}

    def copy(self) -> "FactBase":
        fb = FactBase()
        fb.structures = dict(self.structures)
        fb.maps = dict(self.maps)
        fb.facts = dict(self.facts)
        fb._owner = dict(self._owner)
        return fb

    def add_structure(self, s: StructureSpec):
        for n in s.elements():
            if n in self._owner and self._owner[n] != s.name:
                raise ValueError(f"element name {n!r} used by two structures")
            self._owner[n] = s.name
        self.structures[s.name] = s

    def add_map(self, m: MapSpec):
        try:
            src, dst = self.structures[m.src], self.structures[m.dst]
        except KeyError as e:
            raise ValueError(f"map {m.name} references unknown structure {e}") from None
        rel = dict(m.related)
        if sorted(rel) != sorted(src.extended) or sorted(rel.values()) != sorted(dst.extended):
            raise ValueError(f"map {m.name}: related names must biject the two extended clusters")
        if any(rel[f] not in dst.frozen for f in src.frozen):
            raise ValueError(f"map {m.name}: frozen variables must map to frozen variables")
        marked = tuple(x for x in src.cluster if rel[x] in dst.frozen)
        if m.marked and tuple(sorted(m.marked)) != tuple(sorted(marked)):
            raise ValueError(f"map {m.name}: declared marked set {list(m.marked)} differs from {list(marked)}")
        if not marked:
            raise ValueError(f"map {m.name}: marked set is empty")
        self.maps[m.name] = MapSpec(m.name, m.src, m.dst, rel, marked)

    def assert_fact(self, kind: str, *args, origin: str = "asserted", note: Optional[str] = None):
        atom = make_atom(kind, *args)
        if atom not in self.facts:
            self.facts[atom] = Fact(atom, origin, None, (), note)
        return atom

    def owner(self, name: str) -> Optional[str]:
        return self._owner.get(name)


ATOM_KINDS = {"Cop", "CopK", "Irr", "Regular", "FullRank", "UpperContains", "UpperSubseteq", "UpperEq",
              "LaurentContains", "BirQuasi", "Complementary", "PrimeEl", "Factorial", "UnitsScalars", "CopPair"}


def make_atom(kind: str, *args) -> tuple:
    if kind not in ATOM_KINDS:
        raise ValueError(f"unknown atom kind {kind!r}")
    args = tuple(str(a) for a in args)
    if kind == "CopPair":
        if len(args) != 2:
            raise ValueError("CopPair takes two arguments")
        kind = "Cop"
    if kind == "Cop":
        if not args:
            raise ValueError("Cop needs at least one element")
        return ("Cop",) + tuple(sorted(set(args)))
    arity = {"CopK": 2, "Complementary": 2, "LaurentContains": 2}.get(kind, 1)
    if len(args) != arity:
        raise ValueError(f"{kind} takes {arity} argument(s)")
    return (kind,) + args


def format_atom(atom: tuple) -> str:
    return f"{atom[0]}({','.join(atom[1:])})"


@dataclass(frozen=True)
class Fact:
    atom: tuple
    origin: str
    rule: Optional[str]
    premises: Tuple[tuple, ...]
    note: Optional[str] = None

    def to_json(self):
        out = {"atom": self.atom[0], "args": list(self.atom[1:]), "origin": self.origin}
        if self.rule:
            out["rule"] = self.rule
            out["premises"] = [format_atom(p) for p in self.premises]
        if self.note:
            out["note"] = self.note
        return out


# ---------------------------------------------------------------- knowledge queries

class _KB:
    """Read-only premise queries; each returns the premises used, or ``None``."""

    def __init__(self, fb: FactBase):
        self.fb = fb
        self.facts = fb.facts
        self._by_elem: Dict[str, List[tuple]] = {}
        for a in self.facts:
            if a[0] == "Cop":
                for n in a[1:]:
                    self._by_elem.setdefault(n, []).append(a)

    def add(self, atom):
        if atom[0] == "Cop":
            for n in atom[1:]:
                self._by_elem.setdefault(n, []).append(atom)

    def fact(self, kind, *args) -> Optional[List[tuple]]:
        a = (kind,) + tuple(args)
        return [a] if a in self.facts else None

    def regular(self, x) -> Optional[List[tuple]]:
        if ("Regular", x) in self.facts:
            return [("Regular", x)]
        for a in self._by_elem.get(x, ()):
            return [a]
        return None

    def pair(self, x, y) -> Optional[List[tuple]]:
        for a in self._by_elem.get(x, ()):
            if y in a[1:]:
                return [a]
        return None

    def cop(self, names: Iterable[str]) -> Optional[List[tuple]]:
        names = sorted(set(names))
        if not names:
            return []
        full = ("Cop",) + tuple(names)
        if full in self.facts:
            return [full]
        out = []
        if len(names) == 1:
            return self.regular(names[0])
        for x, y in combinations(names, 2):
            p = self.pair(x, y)
            if p is None:
                return None
            out.extend(p)
        return _dedup(out)

    def marked_in(self, struct: str, q: MapSpec) -> Optional[List[str]]:
        """Marked variables of ``q`` seen in structure ``struct``."""
        if struct == q.src:
            return list(q.marked)
        if struct == q.dst:
            return [q.related[m] for m in q.marked]
        via = [m for m in self.fb.maps.values() if m.src == q.src and m.dst == struct]
        if len(via) != 1:
            return None
        return [via[0].related[m] for m in q.marked]

    def copk(self, x, qname) -> Optional[List[tuple]]:
        direct = self.fact("CopK", x, qname)
        if direct:
            return direct
        q = self.fb.maps.get(qname)
        s = self.fb.owner(x)
        if q is None or s is None:
            return None
        marked = self.marked_in(s, q)
        if marked is None:
            return None
        out = self.regular(x)
        if out is None:
            return None
        out = list(out)
        for m in marked:
            if m == x:
                continue
            p = self.pair(x, m)
            if p is None:
                return None
            out.extend(p)
        return _dedup(out)

    def irr(self, names) -> Optional[List[tuple]]:
        out = []
        for n in names:
            p = self.fact("Irr", n)
            if p is None:
                return None
            out.extend(p)
        return out

    def each(self, queries) -> Optional[List[tuple]]:
        out = []
        for q in queries:
            if q is None:
                return None
            out.extend(q)
        return _dedup(out)


def _dedup(xs):
    seen = set()
    out = []
    for x in xs:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


# ---------------------------------------------------------------- rules

Derivation = Tuple[tuple, List[tuple]]


@dataclass(frozen=True)
class Rule:
    id: str
    statement: str
    fire: Callable[[_KB], Iterable[Derivation]]


RULES: Dict[str, Rule] = {}


def _rule(rid, statement):
    def deco(fn):
        RULES[rid] = Rule(rid, statement, fn)
        return fn
    return deco


def _birquasi(kb: _KB):
    for q in kb.fb.maps.values():
        p = kb.fact("BirQuasi", q.name)
        if p:
            yield q, p


def _complementary(kb: _KB):
    for a in kb.facts:
        if a[0] != "Complementary":
            continue
        q1, q2 = kb.fb.maps.get(a[1]), kb.fb.maps.get(a[2])
        if q1 is None or q2 is None:
            raise ValueError(f"{format_atom(a)} references an unregistered map")
        if q1.src != q2.src:
            raise ValueError(f"{format_atom(a)}: maps have different sources")
        if set(q1.marked) & set(q2.marked):
            raise ValueError(f"{format_atom(a)}: marked sets intersect")
        b1, b2 = kb.fact("BirQuasi", q1.name), kb.fact("BirQuasi", q2.name)
        if b1 and b2:
            yield q1, q2, [a] + b1 + b2


def _rel(kb: _KB, q: MapSpec, x: str) -> Optional[str]:
    """Related name in the target, extended to one-step mutations at nonmarked directions."""
    if x in q.related:
        return q.related[x]
    src = kb.fb.structures[q.src]
    dst = kb.fb.structures[q.dst]
    for c, cm in src.mutated.items():
        if cm == x and c not in q.marked:
            return dst.mutated.get(q.related[c])
    return None


def _nonmarked_vars(kb: _KB, q: MapSpec, marked: Iterable[str]) -> List[str]:
    src = kb.fb.structures[q.src]
    marked = set(marked)
    out = [x for x in src.extended if x not in marked]
    out += [src.mutated[c] for c in src.cluster if c not in marked]
    return out


def _ring_certs(kb: _KB, rings: Iterable[str]) -> Optional[List[tuple]]:
    return kb.each([kb.fact("Factorial", r) for r in rings] + [kb.fact("UnitsScalars", r) for r in rings])


@_rule("R1", "Cop_k(x), z regular and Cop(x~, z~) give Cop(x, z) for nonmarked x, z")
def _r1(kb):
    for q, bq in _birquasi(kb):
        nm = _nonmarked_vars(kb, q, q.marked)
        for x in nm:
            ck = kb.copk(x, q.name)
            if ck is None:
                continue
            for z in nm:
                if z == x:
                    continue
                reg = kb.regular(z)
                ct = kb.cop([_rel(kb, q, x), _rel(kb, q, z)])
                if reg is not None and ct is not None:
                    yield make_atom("Cop", x, z), bq + ck + reg + ct


@_rule("R2", "Cop_k(x) and Cop(x~, x~') give Cop(x, x') for a nonmarked cluster variable x")
def _r2(kb):
    for q, bq in _birquasi(kb):
        src = kb.fb.structures[q.src]
        dst = kb.fb.structures[q.dst]
        for x in src.cluster:
            if x in q.marked:
                continue
            xt = q.related[x]
            p = kb.each([kb.copk(x, q.name), kb.cop([xt, dst.mutated[xt]])])
            if p is not None:
                yield make_atom("Cop", x, src.mutated[x]), bq + p


def _upper_cont1_premises(kb, q):
    src, dst = q.src, q.dst
    return kb.each([kb.fact("FullRank", src), kb.fact("FullRank", dst), kb.fact("UpperContains", dst)]
                   + [kb.fact("LaurentContains", src, x) for x in q.marked])


@_rule("R3", "full rank, upper bound of C~ contains R~ and L(x_i') contains R for marked i give upper bound of C contains R")
def _r3(kb):
    for q, bq in _birquasi(kb):
        p = _upper_cont1_premises(kb, q)
        if p is not None:
            yield make_atom("UpperContains", q.src), bq + p


def _single_parts(kb, q, bq, part1):
    """Steps shared by the single-map rules: mutation coprimality, upper bound, equality."""
    src = kb.fb.structures[q.src]
    dst = kb.fb.structures[q.dst]
    out = []
    p2 = kb.each([part1] + [kb.cop([x, dst.mutated[x]]) for x in dst.cluster])
    if p2 is None:
        return out, None, None
    p2 = bq + p2
    concl2 = [make_atom("Cop", x, src.mutated[x]) for x in src.cluster if x not in q.marked]
    out += [(c, p2) for c in concl2]
    p3 = kb.each([p2] + [kb.cop([x, src.mutated[x]]) for x in q.marked])
    if p3 is None:
        return out, None, None
    out.append((make_atom("UpperSubseteq", q.src), p3))
    p4 = kb.each([p3, _upper_cont1_premises(kb, q)])
    if p4 is not None:
        out.append((make_atom("UpperEq", q.src), p4))
    return out, p3, p4


def _fire_parts(rid, kb):
    for q, bq in _birquasi(kb):
        src = kb.fb.structures[q.src]
        dst = kb.fb.structures[q.dst]
        if rid == "R4":
            part1 = kb.each([kb.cop(dst.extended), kb.cop(q.marked)]
                            + [kb.copk(x, q.name) for x in src.extended if x not in q.marked])
            concl1 = [make_atom("Cop", *src.extended)]
        else:
            certs = _ring_certs(kb, [src.ring, dst.ring])
            part1 = kb.each([certs, kb.irr(dst.extended), kb.irr(q.marked)]) if certs is not None else None
            concl1 = [make_atom("Irr", x) for x in src.extended]
        if part1 is None:
            continue
        p1 = bq + part1
        for c in concl1:
            yield c, p1
        rest, _, _ = _single_parts(kb, q, bq, part1)
        yield from rest


@_rule("R4", "single birational quasi-isomorphism: Cop(x0), Cop(x_i, x_i'), upper bound inside R, equality")
def _r4(kb):
    yield from _fire_parts("R4", kb)


@_rule("R5", "x~ prime, Cop_k(x) and Cop_k(x~) give x prime")
def _r5(kb):
    for q, bq in _birquasi(kb):
        for x in _nonmarked_vars(kb, q, q.marked):
            xt = _rel(kb, q, x)
            p = kb.each([kb.fact("PrimeEl", xt), kb.copk(x, q.name), kb.copk(xt, q.name)])
            if p is not None:
                yield make_atom("PrimeEl", x), bq + p


@_rule("R6", "single map in factorial K-algebras: Irr(x0), Cop(x_i, x_i'), upper bound inside R, equality")
def _r6(kb):
    yield from _fire_parts("R6", kb)


@_rule("R7", "complementary pair: Cop_k'(x~), Cop_k(x^) and marked cross-coprimality give Cop_k(x), Cop_k'(x); "
             "with Cop(x~, x~') or Cop(x^, x^') also Cop(x, x')")
def _r7(kb):
    for q1, q2, bp in _complementary(kb):
        src = kb.fb.structures[q1.src]
        cross = kb.each([kb.pair(a, b) for a in q1.marked for b in q2.marked])
        if cross is None:
            continue
        for x in _nonmarked_vars(kb, q1, set(q1.marked) | set(q2.marked)):
            xt, xh = _rel(kb, q1, x), _rel(kb, q2, x)
            p = kb.each([kb.copk(xt, q2.name), kb.copk(xh, q1.name), cross])
            if p is None:
                continue
            p = bp + p
            yield make_atom("CopK", x, q1.name), p
            yield make_atom("CopK", x, q2.name), p
            if x in src.cluster:
                for q, xr in ((q1, xt), (q2, xh)):
                    dst = kb.fb.structures[q.dst]
                    m = kb.cop([xr, dst.mutated[xr]])
                    if m is not None:
                        yield make_atom("Cop", x, src.mutated[x]), p + m


def _upper_cont_pair(kb, q1, q2):
    return kb.each([kb.fact("FullRank", q1.src), kb.fact("FullRank", q1.dst), kb.fact("FullRank", q2.dst),
                    kb.fact("UpperContains", q1.dst), kb.fact("UpperContains", q2.dst)])


@_rule("R8", "complementary pair with full rank and both upper bounds containing their rings give upper bound of C contains R")
def _r8(kb):
    for q1, q2, bp in _complementary(kb):
        p = _upper_cont_pair(kb, q1, q2)
        if p is not None:
            yield make_atom("UpperContains", q1.src), bp + p


def _pair_parts(rid, kb):
    for q1, q2, bp in _complementary(kb):
        src = kb.fb.structures[q1.src]
        d1 = kb.fb.structures[q1.dst]
        d2 = kb.fb.structures[q2.dst]
        if rid == "R9":
            cross = kb.each([kb.pair(a, b) for a in q1.marked for b in q2.marked])
            part1 = kb.each([kb.cop(d1.extended), kb.cop(d2.extended), cross])
            concl1 = [make_atom("Cop", *src.extended)]
        else:
            certs = _ring_certs(kb, [src.ring, d1.ring, d2.ring])
            part1 = kb.each([certs, kb.irr(d1.extended), kb.irr(d2.extended)]) if certs is not None else None
            concl1 = [make_atom("Irr", x) for x in src.extended]
        if part1 is None:
            continue
        p1 = bp + part1
        for c in concl1:
            yield c, p1
        p2 = kb.each([p1] + [kb.cop([x, d1.mutated[x]]) for x in d1.cluster]
                     + [kb.cop([x, d2.mutated[x]]) for x in d2.cluster])
        if p2 is None:
            continue
        for x in src.cluster:
            yield make_atom("Cop", x, src.mutated[x]), p2
        yield make_atom("UpperSubseteq", src.name), p2
        p3 = kb.each([p2, _upper_cont_pair(kb, q1, q2)])
        if p3 is not None:
            yield make_atom("UpperEq", src.name), p3


@_rule("R9", "complementary pair: Cop(x0), Cop(x_k, x_k') for all k, upper bound inside R, equality")
def _r9(kb):
    yield from _pair_parts("R9", kb)


@_rule("R10", "complementary pair: Cop_(k,k')(x~), Cop_(k,k')(x^), cross-coprimality and x~ or x^ prime give x prime")
def _r10(kb):
    for q1, q2, bp in _complementary(kb):
        cross = kb.each([kb.pair(a, b) for a in q1.marked for b in q2.marked])
        if cross is None:
            continue
        src = kb.fb.structures[q1.src]
        for x in list(src.extended) + [src.mutated[c] for c in src.cluster
                                       if c not in q1.marked and c not in q2.marked]:
            xt, xh = _rel(kb, q1, x), _rel(kb, q2, x)
            if xt is None or xh is None:
                continue
            p = kb.each([kb.copk(xt, q1.name), kb.copk(xt, q2.name), kb.copk(xh, q1.name), kb.copk(xh, q2.name),
                         cross])
            if p is None:
                continue
            for prime in (kb.fact("PrimeEl", xt), kb.fact("PrimeEl", xh)):
                if prime is not None:
                    yield make_atom("PrimeEl", x), bp + p + prime
                    break


@_rule("R11", "factorial K-algebras: marked variables of C~ and C^ prime give marked variables of C prime")
def _r11(kb):
    for q1, q2, bp in _complementary(kb):
        src = kb.fb.structures[q1.src]
        marked = list(q1.marked) + list(q2.marked)
        rings = [src.ring, kb.fb.structures[q1.dst].ring, kb.fb.structures[q2.dst].ring]
        p = kb.each([_ring_certs(kb, rings)]
                    + [kb.fact("PrimeEl", q1.related[x]) for x in marked]
                    + [kb.fact("PrimeEl", q2.related[x]) for x in marked])
        if p is not None:
            for x in marked:
                yield make_atom("PrimeEl", x), bp + p


@_rule("R12", "complementary pair in factorial K-algebras: Irr(x0), Cop(x_k, x_k') for all k, upper bound inside R, equality")
def _r12(kb):
    yield from _pair_parts("R12", kb)


@_rule("SF", "Starfish: cluster variables regular and pairwise coprime, each x_i' regular and coprime with x_i")
def _sf(kb):
    for s in kb.fb.structures.values():
        p = kb.each([kb.cop(s.cluster)] + [kb.cop([x, s.mutated[x]]) for x in s.cluster])
        if p is not None:
            yield make_atom("UpperSubseteq", s.name), p


@_rule("D-prime", "a prime element is irreducible")
def _d_prime(kb):
    for a in list(kb.facts):
        if a[0] == "PrimeEl":
            yield ("Irr", a[1]), [a]


@_rule("D-factorial", "in a factorial ring irreducible elements are prime")
def _d_fact(kb):
    for a in list(kb.facts):
        if a[0] == "Irr":
            s = kb.fb.owner(a[1])
            if s is None:
                continue
            p = kb.fact("Factorial", kb.fb.structures[s].ring)
            if p:
                yield ("PrimeEl", a[1]), [a] + p


RULE_ORDER = ("R1", "R2", "R3", "R4", "R5", "R6", "R7", "R8", "R9", "R10", "R11", "R12", "SF", "D-prime", "D-factorial")


# ---------------------------------------------------------------- closure

@dataclass
class Verdict:
    facts: Dict[tuple, Fact]
    base: FactBase

    @property
    def conclusions(self) -> List[Fact]:
        return [f for f in self.facts.values() if f.origin == "derived"]

    def holds(self, kind, *args) -> bool:
        return make_atom(kind, *args) in self.facts

    def trace(self, atom) -> List[Fact]:
        """Premises first, ending with ``atom``."""
        out, seen = [], set()

        def visit(a):
            if a in seen:
                return
            seen.add(a)
            for p in self.facts[a].premises:
                visit(p)
            out.append(self.facts[a])

        visit(atom)
        return out

    def assertions_used(self, atom=None) -> List[tuple]:
        facts = self.trace(atom) if atom else list(self.facts.values())
        used = set()
        for f in facts:
            for p in f.premises:
                if self.facts[p].origin != "derived" and p[0] in ("Factorial", "UnitsScalars", "BirQuasi",
                                                                    "Complementary", "FullRank", "UpperContains",
                                                                    "LaurentContains"):
                    used.add(p)
        return sorted(used)

    def caveats(self) -> List[str]:
        return sorted({f.note for f in self.facts.values() if f.note})

    def to_json(self):
        order = self.forest()
        return {"schema": "clusterforge.verdict/1",
                "conclusions": [format_atom(f.atom) for f in self.conclusions],
                "facts": [f.to_json() for f in order],
                "assertions_used": [format_atom(a) for a in self.assertions_used()],
                "caveats": self.caveats()}

    def forest(self) -> List[Fact]:
        """All facts, topologically sorted."""
        out, seen = [], set()
        for a in sorted(self.facts):
            for f in self.trace(a):
                if f.atom not in seen:
                    seen.add(f.atom)
                    out.append(f)
        return out


def infer_closure(fb: FactBase, order: Optional[Sequence[str]] = None, rules: Optional[Sequence[str]] = None) -> Verdict:
    """Least fixed point of the rules over the fact base.

    ``order`` only changes the agenda (the resulting fact set does not
    depend on it); ``rules`` restricts the rule set.
    """
    names = list(order or RULE_ORDER)
    if rules is not None:
        names = [r for r in names if r in set(rules)]
    for r in names:
        if r not in RULES:
            raise ValueError(f"unknown rule {r!r}")
    for a in fb.facts:
        if a[0] == "BirQuasi" and a[1] not in fb.maps:
            raise ValueError(f"{format_atom(a)} references an unregistered map")
    facts = dict(fb.facts)
    work = fb.copy()
    work.facts = facts
    kb = _KB(work)
    changed = True
    while changed:
        changed = False
        for rid in names:
            new = []
            for atom, prem in RULES[rid].fire(kb):
                if atom not in facts:
                    new.append((atom, tuple(_dedup(prem))))
            for atom, prem in new:
                if atom not in facts:
                    facts[atom] = Fact(atom, "derived", rid, prem)
                    kb.add(atom)
                    changed = True
    return Verdict(facts, fb)


def replay(verdict: Verdict, atom) -> bool:
    """Re-derive ``atom`` from its recorded premises with its recorded rule only."""
    f = verdict.facts[atom]
    if f.origin != "derived":
        return True
    fb = verdict.base.copy()
    fb.facts = {}
    for p in f.premises:
        fb.facts[p] = Fact(p, "asserted", None, ())
    kb = _KB(fb)
    return any(a == atom for a, _ in RULES[f.rule].fire(kb))


# ---------------------------------------------------------------- direct check

def starfish_direct(s: Seed, ring: RingSpec) -> Verdict:
    """Check the Starfish hypotheses on concrete values of ``s`` in ``ring``.

    Values must live over the ring's variable table.
    """
    if s.table.names != ring.table.names:
        raise ValueError("seed values and ring use different variable tables")
    fb = FactBase()
    cluster = s.names[: s.N]
    mut = {x: x + "'" for x in cluster}
    fb.add_structure(StructureSpec("C", "R", cluster, s.names[s.N:], mut))
    caveat = _QUOTIENT_CAVEAT if ring.has_relations else None
    vals = dict(zip(s.names, s.values))
    for k, x in enumerate(cluster, start=1):
        vals[mut[x]] = mutate_seed(s, k).values[k - 1]
    regular = {}
    for name, v in vals.items():
        if v.is_polynomial() and not any(e < 0 for exps, _ in v.as_poly().items() for e in exps):
            regular[name] = v.as_poly()
            fb.facts[("Regular", name)] = Fact(("Regular", name), "computed", None, ())
    for a, b in combinations([x for x in cluster if x in regular], 2):
        if cop_pair(regular[a], regular[b], ring, (a, b)):
            atom = make_atom("Cop", a, b)
            fb.facts[atom] = Fact(atom, "computed", None, (), caveat)
    for x in cluster:
        if x in regular and mut[x] in regular and cop_pair(regular[x], regular[mut[x]], ring, (x, mut[x])):
            atom = make_atom("Cop", x, mut[x])
            fb.facts[atom] = Fact(atom, "computed", None, (), caveat)
    return infer_closure(fb, rules=["SF"])


# ---------------------------------------------------------------- JSON

def factbase_from_json(data) -> FactBase:
    """Fact file: a list of facts, or an object with structures, maps and facts."""
    if isinstance(data, (str, bytes)):
        data = json.loads(data)
    fb = FactBase()
    if isinstance(data, list):
        data = {"facts": data}
    if not isinstance(data, dict):
        raise ValueError("fact file must be a list or an object")
    for s in data.get("structures", []):
        fb.add_structure(StructureSpec(s["name"], s.get("ring", s["name"]), tuple(s["cluster"]),
                                       tuple(s.get("frozen", ())), dict(s.get("mutated", {}))))
    for m in data.get("maps", []):
        fb.add_map(MapSpec(m["name"], m["src"], m["dst"], dict(m["related"]), tuple(m.get("marked", ()))))
    for f in data.get("facts", []):
        try:
            kind, args = f["atom"], f.get("args", [])
        except (KeyError, TypeError):
            raise ValueError(f"malformed fact {f!r}") from None
        origin = f.get("origin", "asserted")
        if origin not in ("asserted", "computed"):
            raise ValueError(f"fact origin must be asserted or computed, got {origin!r}")
        fb.assert_fact(kind, *args, origin=origin)
    return fb


def factbase_to_json(fb: FactBase) -> dict:
    return {"structures": [{"name": s.name, "ring": s.ring, "cluster": list(s.cluster), "frozen": list(s.frozen),
                            "mutated": dict(s.mutated)} for s in fb.structures.values()],
            "maps": [{"name": m.name, "src": m.src, "dst": m.dst, "related": dict(m.related),
                      "marked": list(m.marked)} for m in fb.maps.values()],
            "facts": [f.to_json() for f in fb.facts.values()]}
