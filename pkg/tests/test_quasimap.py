import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clusterforge.exactalg import parse_expr
from clusterforge.quasimap import (
    LambdaIntegralityError,
    LambdaMatrix,
    QuasiIso,
    RelatedTriple,
    _signed_search,
    apply_quasi,
    build_marker,
    check_generalized_compat,
    check_quasi_seed,
    check_quasi_y,
    labeled_seed,
    lambda_from_weights,
    marker_from_json,
    marker_to_json,
    monomial_identity_failures,
    mutate_lambda,
    related_sequence,
    toric_equivariance_check,
    toric_global_check,
)
from clusterforge.seedcore import ExchangeMatrix, Seed, VertexData

from quasigen import random_quasi

# C: cluster labels 1,2 and frozen 3; C~: cluster label 2, frozen 1,3
B_C = {1: [0, 3, -1], 2: [-3, 0, 2]}


def toric_triple(row_t):
    C = labeled_seed(["x1", "x2", "x3"], [3], B_C)
    Ct = labeled_seed(["t1", "t2", "t3"], [1, 3], {2: row_t})
    return RelatedTriple(C, Ct, build_marker([1, 2, 3], [3], [1, 3]))


def test_marker_bookkeeping():
    m = build_marker([1, 2, 3, 4], [4], [3, 4])
    assert m.marked == (3,) and m.marked_t == (3,)
    m = build_marker([2, 1, 3], [3], [1, 3])
    assert m.marked == (2,) and m.marked_t == (1,)
    with pytest.raises(ValueError):
        build_marker([1, 2, 3], [3], [1, 2])


def test_related_sequence():
    m = build_marker([2, 1, 3, 4], [4], [3, 4])
    assert related_sequence(m, []) == ()
    assert related_sequence(m, [1, 2, 1]) == (2, 1, 2)
    with pytest.raises(ValueError):
        related_sequence(m, [1, 3])


def test_relabeling_quasi_iso_passes():
    t = toric_triple([-3, 0, 2])
    q = QuasiIso(t, LambdaMatrix.basis(3, [1]))
    assert check_quasi_seed(q).ok
    assert check_quasi_y(q).ok
    assert t.marked_names() == (["x1"], ["t1"])


def test_perturbed_entry_is_located():
    q = QuasiIso(toric_triple([-3, 0, 3]), LambdaMatrix.basis(3, [1]))
    rep = check_quasi_seed(q)
    assert not rep.ok
    assert rep.failures == [{"kind": "block", "row": 2, "col": 3, "expected": 2, "actual": 3}]
    assert not check_quasi_y(q).ok


def test_sign_flip_honored():
    q = QuasiIso(toric_triple([3, 0, -2]), LambdaMatrix.basis(3, [1]))
    seed_rep, y_rep = check_quasi_seed(q), check_quasi_y(q)
    assert seed_rep.ok and y_rep.ok
    assert seed_rep.signs == y_rep.signs == {0: -1}


def test_broken_lambda_entry_mismatch_at_row():
    q = QuasiIso(toric_triple([-3, 0, 2]), LambdaMatrix((1,), ((1,), (0,), (1,))))
    rep = check_quasi_y(q)
    assert not rep.ok and rep.failures[0]["row"] == 2


def test_mixed_choice_flagged():
    rows = {1: {1: ["x"], -1: []}, 2: {1: [], -1: ["x"]}}
    signs, fails, mixed = _signed_search([[1, 2]], lambda a, s: rows[a][s])
    assert mixed and fails


def test_lambda_from_weights_fixture():
    t = toric_triple([-1, 0, 2])
    lam = lambda_from_weights((2, 1, 3), (2, 1, 1), 1, t)
    assert lam.entries == ((1,), (0,), (1,))
    q = QuasiIso(t, lam)
    assert check_quasi_seed(q).ok and check_quasi_y(q).ok
    with pytest.raises(ValueError, match="1/2"):
        lambda_from_weights((2, 1, 2), (2, 1, 1), 1, t)
    with pytest.raises(ValueError):
        lambda_from_weights((3, 1, 3), (2, 1, 1), 1, t)


def test_lambda_from_equal_weights_is_basis():
    t = toric_triple([-3, 0, 2])
    lam = lambda_from_weights((2, 1, 3), (2, 1, 3), 1, t)
    assert lam == LambdaMatrix.basis(3, [1])


def test_toric_examples():
    B = ExchangeMatrix(1, 2, [[0, 1, -1]])
    assert toric_global_check(B, [0, 1, 1])
    assert not toric_global_check(B, [1, 1, 0])
    with pytest.raises(ValueError):
        toric_global_check(B, [[0], [0], [0]])
    with pytest.raises(ValueError):
        toric_global_check(B, [1, 1])


def test_toric_equivariance_depth_three():
    s = Seed.initial(["x1", "x2", "f1", "f2"], [[0, 1, -1, 0], [-1, 0, 0, 1]])
    assert toric_global_check(s, [1, 1, 1, 1])
    assert toric_equivariance_check(s, [1, 1, 1, 1], 3) == []
    assert toric_equivariance_check(s, [1, 0, 0, 0], 3)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_toric_check_invariant_under_unimodular_columns(seed):
    rng = random.Random(seed)
    B = ExchangeMatrix(2, 2, [[0, 1, -1, 0], [-1, 0, 0, 1]])
    W = [[rng.randint(-2, 2) for _ in range(2)] for _ in range(4)]
    if rng.random() < 0.5:
        W = [[1, 0], [1, 1], [1, 2], [1, -1]]
    a = rng.randint(-3, 3)
    WG = [[r[0], r[1] + a * r[0]] for r in W]
    WG = [[r[1], r[0]] for r in WG]
    try:
        base = toric_global_check(B, W)
    except ValueError:
        with pytest.raises(ValueError):
            toric_global_check(B, WG)
        return
    assert toric_global_check(B, WG) == base


def hand_triple():
    C = labeled_seed(["x1", "x2", "x3"], [], {1: [0, 2, 1], 2: [-1, 0, 1], 3: [-1, -2, 0]})
    Ct = labeled_seed(["t1", "t2", "t3"], [3], {1: [0, 2, 1], 2: [-1, 0, 0]})
    return RelatedTriple(C, Ct, build_marker([1, 2, 3], [], [3]))


def test_mutate_lambda_hand_value():
    q = QuasiIso(hand_triple(), LambdaMatrix((3,), ((1,), (0,), (1,))))
    assert check_quasi_seed(q).ok
    assert mutate_lambda(q, 1).entries[0] == (-1,)
    assert mutate_lambda(q, 2).entries[1] == (1,)
    with pytest.raises(ValueError):
        mutate_lambda(q, 3)


def test_mutate_lambda_zero_row():
    C = labeled_seed(["x1", "x2", "x3"], [], {1: [0, 0, 0], 2: [0, 0, 1], 3: [0, -1, 0]})
    Ct = labeled_seed(["t1", "t2", "t3"], [3], {1: [0, 0, 0], 2: [0, 0, 1]})
    q = QuasiIso(RelatedTriple(C, Ct, build_marker([1, 2, 3], [], [3])), LambdaMatrix.basis(3, [3]))
    assert mutate_lambda(q, 1).entries[0] == (0,)


def test_mutate_lambda_reports_parity():
    C = labeled_seed(["x1", "x2", "x3"], [], {1: [0, 1, 1], 2: [-1, 0, 1], 3: [-1, -1, 0]})
    Ct = labeled_seed(["t1", "t2", "t3"], [3], {1: [0, 1, 1], 2: [-1, 0, 1]})
    # lambda'_13 = -0 - 1/2 + (1 + 1)/2
    bad = QuasiIso(RelatedTriple(C, Ct, build_marker([1, 2, 3], [], [3])), LambdaMatrix((3,), ((0,), (1,), (1,))))
    with pytest.raises(LambdaIntegralityError) as e:
        mutate_lambda(bad, 1)
    assert (e.value.ell, e.value.j) == (1, 3)


def test_monomial_identity_after_mutation():
    q = QuasiIso(hand_triple(), LambdaMatrix((3,), ((1,), (0,), (1,))))
    for seq in ([1], [2], [1, 2], [2, 1, 2]):
        q.track(seq)
        assert monomial_identity_failures(q, seq) == []
        assert check_quasi_seed(q, seq).ok


def test_apply_quasi_examples():
    q = QuasiIso(hand_triple(), LambdaMatrix((3,), ((1,), (0,), (1,))))
    T = q.triple.C.table
    Tt = q.triple.Ct.table
    assert apply_quasi(q, parse_expr("x3", T)) == parse_expr("t3", Tt)
    assert apply_quasi(q, parse_expr("x1", T)) == parse_expr("t1*t3", Tt)
    with pytest.raises(LookupError):
        apply_quasi(q, parse_expr("x1", T), at=[2])


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30, deadline=None)
def test_apply_quasi_is_homomorphism(seed):
    rng = random.Random(seed)
    q, _ = random_quasi(rng)
    T = q.triple.C.table
    names = T.names
    f = parse_expr(f"{rng.choice(names)} + {rng.randint(1, 3)}*{rng.choice(names)}^2", T)
    g = parse_expr(f"({rng.choice(names)} - 1)/{rng.choice(names)}", T)
    assert apply_quasi(q, f + g) == apply_quasi(q, f) + apply_quasi(q, g)
    assert apply_quasi(q, f * g) == apply_quasi(q, f) * apply_quasi(q, g)


@given(st.integers(0, 10 ** 6), st.booleans())
@settings(max_examples=60, deadline=None)
def test_seed_and_y_criteria_agree(seed, perturb):
    q, expected = random_quasi(random.Random(seed), perturb=perturb)
    a, b = check_quasi_seed(q), check_quasi_y(q)
    assert a.ok == b.ok == expected


def test_non_unimodular_lambda_rejected():
    C = labeled_seed(["x1", "x2", "x3", "x4"], [], {1: [0, 1, 0, 0], 2: [-1, 0, 0, 0], 3: [0, 0, 0, 0],
                                                   4: [0, 0, 0, 0]})
    Ct = labeled_seed(["t1", "t2", "t3", "t4"], [3, 4], {1: [0, 1, 0, 0], 2: [-1, 0, 0, 0]})
    t = RelatedTriple(C, Ct, build_marker([1, 2, 3, 4], [], [3, 4]))
    with pytest.raises(ValueError):
        QuasiIso(t, LambdaMatrix((3, 4), ((0, 0), (0, 0), (1, 1), (1, 1))))


def generalized_pair(d_t=2, phat="1"):
    vd = VertexData(2, ("1", "x3", "1"), ("1", phat, "1"), "x2^2 + x3*x2 + 1")
    vt = VertexData(d_t, ("1",) + ("t3",) * (d_t - 1) + ("1",), ("1",) * (d_t + 1), None)
    C = labeled_seed(["x1", "x2", "x3", "x4"], [3, 4], {1: [0, 1, 0, 0], 2: [-2, 0, 0, 0]}, {1: vd})
    Ct = labeled_seed(["t1", "t2", "t3", "t4"], [2, 3, 4], {1: [0, 1, 0, 0]}, {1: vt})
    return QuasiIso(RelatedTriple(C, Ct, build_marker([1, 2, 3, 4], [3, 4], [2, 3, 4])),
                    LambdaMatrix.basis(4, [2]))


def test_generalized_compat():
    assert check_generalized_compat(generalized_pair())["ok"]
    rep = check_generalized_compat(generalized_pair(d_t=3))
    assert rep["failures"][0]["kind"] == "degree" and rep["failures"][0]["row"] == 1
    rep = check_generalized_compat(generalized_pair(phat="x3"), W=[[0], [0], [1], [0]])
    assert any(f["kind"] == "toric" for f in rep["failures"])


def test_marker_json_roundtrip():
    m = build_marker([2, 1, 3], [3], [1, 3])
    lam = LambdaMatrix((2,), ((0,), (1,), (2,)))
    data = marker_to_json(m, lam, {"W": [[1], [1], [1]]})
    m2, lam2, w = marker_from_json(data)
    assert m2 == m and lam2 == lam and w == {"W": [[1], [1], [1]]}
    with pytest.raises(ValueError):
        marker_from_json({"kappa": [1]})
