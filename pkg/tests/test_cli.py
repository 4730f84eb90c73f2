import io
import json
from pathlib import Path

from clusterforge.cli import render_text, run

DATA = Path(__file__).parent / "data"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def js(*argv):
    code, out, _ = call(*argv, "--format", "json")
    return code, json.loads(out) if out else None


def test_mutate_a2():
    code, out, _ = call("mutate", "--seed", DATA / "a2.json", "--at", "1")
    assert code == 0
    assert "x1'" in out and "(x2 + 1)/x1" in out
    code, rep = js("mutate", "--seed", DATA / "a2.json", "--at", "1")
    assert rep["schema"] == "clusterforge.mutate/1"
    assert rep["B"] == [[0, -1], [1, 0]]
    assert rep["steps"][0]["value"] == "(x2 + 1)/x1"


def test_text_is_rendered_from_json():
    code, rep = js("y-vars", "--seed", DATA / "a2.json")
    _, text, _ = call("y-vars", "--seed", DATA / "a2.json")
    assert text == render_text(rep)
    assert rep["y"] == {"y1": "x2", "y2": "1/x1"}


def test_infer_empty_closure():
    code, rep = js("infer", "--facts", DATA / "facts_empty.json")
    assert code == 0
    assert rep["conclusions"] == [] and rep["facts"] == []


def test_infer_goal():
    code, rep = js("infer", "--facts", DATA / "facts_r4.json", "--goal", "UpperEq(C)")
    assert code == 0 and rep["goal"]["holds"]
    assert rep["goal"]["trace"][-1]["rule"] == "R4"
    code, rep = js("infer", "--facts", DATA / "facts_r4.json", "--goal", "UpperEq(C)", "--rules", "R1,R2")
    assert code == 1 and not rep["goal"]["holds"]


def test_quasi_commands():
    args = ["--seed", DATA / "toric_C.json", "--marker", DATA / "toric_marker.json"]
    code, rep = js("check-quasi", "--seed-t", DATA / "toric_Ct.json", *args)
    assert code == 0 and rep["agree"] and rep["seed"]["ok"] and rep["y"]["ok"]
    code, rep = js("check-quasi", "--seed-t", DATA / "toric_Ct_bad.json", *args)
    assert code == 1 and rep["agree"]
    assert rep["seed"]["failures"] == [{"kind": "block", "row": 2, "col": 3, "expected": 2, "actual": 3}]
    code, rep = js("mutate-lambda", "--seed-t", DATA / "toric_Ct.json", "--ell", "2", *args)
    assert code == 0 and rep["lambda"]["entries"] == [[1], [0], [0]]
    code, _, err = call("mutate-lambda", "--seed-t", DATA / "toric_Ct.json", "--ell", "1", *args)
    assert code == 2 and "marked" in err


def test_check_skew_and_toric():
    assert js("check-skew", "--seed", DATA / "a2.json")[0] == 0
    code, rep = js("check-skew", "--seed", DATA / "bad_skew.json")
    assert code == 1 and not rep["skew_symmetrizable"]
    code, rep = js("check-toric", "--seed", DATA / "toric_C.json", "--weights", DATA / "weights_ok.json")
    assert code == 0 and rep["global"]
    code, rep = js("check-toric", "--seed", DATA / "toric_C.json", "--weights", DATA / "weights_bad.json")
    assert code == 1 and not rep["global"]


def test_starfish_and_laurent():
    assert js("starfish", "--seed", DATA / "polyfix.json")[0] == 0
    assert js("starfish", "--seed", DATA / "a2.json")[0] == 1
    code, rep = js("laurent-check", "--seed", DATA / "a2.json", "--walks", "3", "--depth", "6", "--rng-seed", "4")
    assert code == 0 and rep["ok"] and rep["rng_seed"] == 4


def test_input_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert call("mutate", "--seed", bad, "--at", "1")[0] == 2
    assert call("mutate", "--seed", tmp_path / "missing.json", "--at", "1")[0] == 2
    assert call("mutate", "--seed", DATA / "a2.json", "--at", "7")[0] == 2
    assert call("mutate", "--seed", DATA / "a2.json", "--at", "x")[0] == 2
    assert call("corpus", "verify", "nothing")[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("corpus", "verify", "dbl_sl3_bd", "--jobs", "0")[0] == 2


def test_exit_codes_partition_fixture_set():
    runs = {
        0: [("mutate", "--seed", DATA / "a2.json", "--at", "1 2"), ("infer", "--facts", DATA / "facts_empty.json")],
        1: [("check-skew", "--seed", DATA / "bad_skew.json"), ("starfish", "--seed", DATA / "a2.json")],
        2: [("infer", "--facts", DATA / "nope.json"), ("y-vars", "--seed", DATA / "facts_empty.json")],
    }
    for expected, cases in runs.items():
        for argv in cases:
            assert call(*argv)[0] == expected, argv


def test_json_is_byte_identical():
    argv = ("infer", "--facts", DATA / "facts_r4.json", "--format", "json")
    assert call(*argv)[1] == call(*argv)[1]


def test_corpus_list_and_verify(monkeypatch):
    code, rep = js("corpus", "list")
    assert code == 0 and "dual_sl4_cg" in rep["structures"]
    assert rep["structures"]["dual_sl4_tilde"]["complete"] is False
    code, rep = js("corpus", "verify", "dual_sl4_cg")
    assert code == 0 and rep["ok"]
    assert rep["maps"]["Q"]["variables"]["g43"]["exponents"] == {"g33": 0, "g44": 1}
    assert rep["maps"]["G"]["certified"]["marked"] == ["g44"]
    monkeypatch.setenv("CLUSTERFORGE_JOBS", "2")
    code2, rep2 = js("corpus", "verify", "dbl_sl3_bd")
    monkeypatch.setenv("CLUSTERFORGE_JOBS", "1")
    code1, rep1 = js("corpus", "verify", "dbl_sl3_bd")
    assert code1 == code2 == 0 and rep1 == rep2
