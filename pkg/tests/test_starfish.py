import json
import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterforge.exactalg import VarTable, parse_expr, parse_poly
from clusterforge.seedcore import Seed, seed_from_json
from clusterforge.starfish import (
    RULE_ORDER,
    FactBase,
    MapSpec,
    RingSpec,
    cop_k,
    cop_pair,
    cop_set,
    factbase_from_json,
    factbase_to_json,
    infer_closure,
    irr_check,
    make_atom,
    replay,
    starfish_direct,
)
from clusterforge.exactalg import IdealBasis

from factfix import FIXTURES, factbase, registry
from strategies import T4, random_poly

T = VarTable(["x", "y", "z", "u", "v", "w"])
RING = RingSpec(T)


def P(s):
    return parse_poly(s, T)


def test_cop_pair_examples():
    assert cop_pair(P("x+y"), P("x-y"), RING)
    r = cop_pair(P("x^2-y^2"), P("x+y"), RING)
    assert not r and r.witness == "x + y"
    assert cop_pair(P("x*y + 3"), P("1"), RING)
    with pytest.raises(ValueError):
        cop_pair(parse_expr("1/x", T), P("y"), RING)


def test_cop_caveat_in_quotient_ring():
    ring = RingSpec(T, IdealBasis([P("x*y - 1")]))
    assert cop_pair(P("x"), P("y"), ring).caveat


def test_cop_set_examples():
    assert cop_set({"a": P("x")}, RING)
    assert cop_set({"a": P("x"), "b": P("y"), "c": P("x+y")}, RING)
    r = cop_set({"a": P("x"), "b": P("x*(y+1)")}, RING)
    assert not r and r.witness.startswith("a,b")


def test_cop_k_examples():
    marked = {"m": P("x*z"), "n": P("y + 1")}
    assert cop_k(P("1"), marked, RING)
    assert not cop_k(P("z*u"), marked, RING)
    assert cop_k(P("u + v"), marked, RING)
    # a marked variable is not compared with itself
    assert cop_k(P("x*z"), marked, RING, name="m")
    with pytest.raises(ValueError):
        cop_k(P("x"), {}, RING)


def test_irr_check_examples():
    assert irr_check(P("x+y+1")) == ("irreducible", None)
    assert irr_check(P("x*(x+y)")) == ("reducible", "x")
    assert irr_check(P("x^2*y"))[0] == "reducible"
    assert irr_check(P("x*y*z + u^2*v + w^3 + x"))[0] == "unknown"
    with pytest.raises(ValueError):
        irr_check(P("3"))


def sympy_oracle(p):
    syms = sympy.symbols(list(p.table.names))
    expr = sum(sympy.Rational(c) * sympy.prod([s ** e for s, e in zip(syms, ex)]) for ex, c in p.items())
    _, factors = sympy.factor_list(expr)
    return len(factors) == 1 and factors[0][1] == 1


def test_irr_check_oracle_is_consulted():
    assert irr_check(P("x^2 + y^2 + 1"), sympy_oracle)[0] == "irreducible"
    assert irr_check(P("x^2 - y^2"), sympy_oracle)[0] == "reducible"


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_irr_check_never_calls_products_irreducible(seed):
    rng = random.Random(seed)
    p = random_poly(rng, nterms=3, maxdeg=2)
    q = random_poly(rng, nterms=3, maxdeg=2)
    if p.is_constant() or q.is_constant():
        return
    assert irr_check(p * q, sympy_oracle)[0] != "irreducible"
    assert irr_check(p * q)[0] != "irreducible"


def _sym(p):
    syms = sympy.symbols(list(p.table.names))
    return sum(sympy.Rational(c) * sympy.prod([s ** e for s, e in zip(syms, ex)]) for ex, c in p.items())


def test_cop_pair_matches_factorization_oracle():
    rng = random.Random(5)
    ring = RingSpec(T4)
    for _ in range(200):
        h = random_poly(rng, nterms=2, maxdeg=1) if rng.random() < 0.5 else random_poly(rng, nterms=1, maxdeg=0)
        a = random_poly(rng, nterms=2, maxdeg=2) * h
        b = random_poly(rng, nterms=2, maxdeg=2) * h
        if a.is_zero() or b.is_zero():
            continue
        fa = {f for f, _ in sympy.factor_list(_sym(a))[1]}
        fb = {f for f, _ in sympy.factor_list(_sym(b))[1]}
        shared = any(sympy.simplify(f / g).is_number for f in fa for g in fb)
        assert bool(cop_pair(a, b, ring)) == (not shared)


# ---------------------------------------------------------------- direct Starfish check

def test_starfish_direct_a2_fails():
    s = Seed.initial(["x1", "x2"], [[0, 1], [-1, 0]])
    v = starfish_direct(s, RingSpec(s.table))
    assert not v.holds("UpperSubseteq", "C")


def test_starfish_direct_polynomial_fixture():
    s = seed_from_json({"N": 1, "M": 2, "B": [[0, 1, -1]], "vars": ["x1", "x2", "x3"],
                        "ambient": ["u", "v", "w"], "values": {"x1": "u", "x2": "u*v - w", "x3": "w"}})
    v = starfish_direct(s, RingSpec(s.table))
    assert v.holds("UpperSubseteq", "C")
    trace = v.trace(make_atom("UpperSubseteq", "C"))
    assert trace[-1].rule == "SF"
    assert {f.atom for f in trace[:-1]} == {("Regular", "x1"), ("Cop", "x1", "x1'")}


def test_starfish_direct_empty_cluster():
    s = Seed.initial(["f"], [])
    assert starfish_direct(s, RingSpec(s.table)).holds("UpperSubseteq", "C")


# ---------------------------------------------------------------- inference engine

def test_empty_closure():
    assert infer_closure(FactBase()).facts == {}


@pytest.mark.parametrize("rid", sorted(FIXTURES))
def test_rule_positive_fixture(rid):
    premises, expected, _, _ = FIXTURES[rid]
    v = infer_closure(factbase(premises), rules=[rid])
    for atom in expected:
        atom = make_atom(*atom)
        assert atom in v.facts, atom
        assert v.facts[atom].rule == rid
        assert replay(v, atom)


@pytest.mark.parametrize("rid", sorted(FIXTURES))
def test_rule_negative_fixture(rid):
    premises, _, drop, target = FIXTURES[rid]
    assert drop in premises
    v = infer_closure(factbase(premises, drop))
    assert make_atom(*target) not in v.facts


def test_single_map_first_step_alone():
    premises = FIXTURES["R4"][0]
    part1 = [a for a in premises if a[0] in ("BirQuasi", "CopK") or a in (("Cop", "t1", "t2", "s1", "s3"), ("Cop", "x3"))]
    v = infer_closure(factbase(part1))
    assert v.holds("Cop", "x1", "x2", "x3", "f1")
    assert not v.holds("UpperSubseteq", "C")


def test_marked_primality_from_irreducibility():
    premises = [a for a in FIXTURES["R11"][0] if a[0] != "PrimeEl"] + [("Irr", n) for n in ("t1", "s3", "g1", "h3")]
    v = infer_closure(factbase(premises))
    assert v.holds("PrimeEl", "x1") and v.holds("PrimeEl", "x3")
    assert ("Factorial", "R") in v.assertions_used(make_atom("PrimeEl", "x1"))


def test_all_traces_replay():
    atoms = {a for p, _, _, _ in FIXTURES.values() for a in p}
    v = infer_closure(factbase(sorted(atoms)))
    for f in v.conclusions:
        assert replay(v, f.atom), f


@given(st.randoms(use_true_random=False))
@settings(max_examples=20, deadline=None)
def test_closure_is_order_independent(rnd):
    atoms = sorted({a for p, _, _, _ in FIXTURES.values() for a in p})
    subset = [a for a in atoms if rnd.random() < 0.7]
    order = list(RULE_ORDER)
    rnd.shuffle(order)
    a = infer_closure(factbase(subset))
    b = infer_closure(factbase(subset), order=order)
    assert set(a.facts) == set(b.facts)


@given(st.randoms(use_true_random=False))
@settings(max_examples=20, deadline=None)
def test_closure_is_monotone(rnd):
    atoms = sorted({a for p, _, _, _ in FIXTURES.values() for a in p})
    f1 = [a for a in atoms if rnd.random() < 0.4]
    f2 = [a for a in atoms if rnd.random() < 0.4]
    assert set(infer_closure(factbase(f1)).facts) <= set(infer_closure(factbase(f1 + f2)).facts)


def test_malformed_atoms_rejected():
    with pytest.raises(ValueError):
        make_atom("Bogus", "x")
    with pytest.raises(ValueError):
        make_atom("CopK", "x")
    fb = registry()
    fb.assert_fact("BirQuasi", "Nope")
    with pytest.raises(ValueError):
        infer_closure(fb)


def test_complementary_requires_disjoint_marks():
    fb = registry()
    fb.add_map(MapSpec("Q2", "C", "Ct", {"x1": "t1", "x2": "t2", "x3": "s3", "f1": "s1"}))
    fb.assert_fact("Complementary", "Q", "Q2")
    with pytest.raises(ValueError):
        infer_closure(fb)


def test_fact_json_roundtrip():
    fb = factbase(FIXTURES["R9"][0])
    back = factbase_from_json(json.dumps(factbase_to_json(fb)))
    assert set(back.facts) == set(fb.facts)
    assert set(infer_closure(back).facts) == set(infer_closure(fb).facts)
    plain = factbase_from_json([{"atom": "CopPair", "args": ["a", "b"], "origin": "asserted"}])
    assert ("Cop", "a", "b") in plain.facts
    with pytest.raises(ValueError):
        factbase_from_json([{"args": []}])
