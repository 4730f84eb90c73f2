"""Command-line front end.

Every subcommand builds one JSON-serializable report; ``--format text``
renders that same report line by line.  Exit status: 0 success, 1 a
verification failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .exactalg import IdealBasis, ParseError, format_ratfunc, parse_poly
from .quasimap import (
    LambdaIntegralityError,
    QuasiIso,
    RelatedTriple,
    check_quasi_seed,
    check_quasi_y,
    marker_from_json,
    mutate_lambda,
    toric_equivariance_check,
    toric_global_check,
)
from .seedcore import (
    apply_sequence,
    laurent_check,
    mutate_seed,
    seed_from_json,
    seed_to_json,
    skew_symmetrizer,
    y_variable,
)

SCHEMA = "clusterforge.{}/1"


class InputError(Exception):
    pass


# ---------------------------------------------------------------- input helpers

def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None


def _load_seed(path: str):
    return seed_from_json(_load_json(path))


def _seq(text: Optional[str]) -> Tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise InputError(f"mutation sequence must be integers, got {text!r}") from None


def _jobs(value: Optional[int]) -> int:
    from .corpus import default_jobs
    if value is None:
        return default_jobs()
    if value < 1:
        raise InputError("--jobs must be positive")
    return value


# ---------------------------------------------------------------- commands
# each returns (report, ok)

def cmd_mutate(a) -> Tuple[dict, bool]:
    s = _load_seed(a.seed)
    seq = _seq(a.at)
    if not seq:
        raise InputError("--at needs at least one direction")
    steps = []
    for k in seq:
        s = mutate_seed(s, k)
        steps.append({"k": k, "variable": s.names[k - 1] + "'", "value": format_ratfunc(s.values[k - 1])})
    return {"sequence": list(seq), "steps": steps, "B": s.B.tolist(), "seed": seed_to_json(s)}, True


def cmd_yvars(a) -> Tuple[dict, bool]:
    s = apply_sequence(_load_seed(a.seed), _seq(a.at))
    return {"at": list(_seq(a.at)),
            "y": {f"y{i}": format_ratfunc(y_variable(s, i)) for i in range(1, s.N + 1)}}, True


def cmd_laurent(a) -> Tuple[dict, bool]:
    s = _load_seed(a.seed)
    if a.at:
        walks = [_seq(a.at)]
    else:
        rng = random.Random(a.rng_seed)
        walks = []
        for _ in range(a.walks):
            w, prev = [], None
            for _ in range(a.depth):
                k = rng.choice([k for k in range(1, s.N + 1) if k != prev] or [1])
                w.append(k)
                prev = k
            walks.append(tuple(w))
    reports = [laurent_check(s, w).to_json() for w in walks]
    ok = all(r["ok"] for r in reports)
    return {"rng_seed": None if a.at else a.rng_seed, "walks": [list(w) for w in walks],
            "checked": sum(r["checked"] for r in reports),
            "violations": [v for r in reports for v in r["violations"]], "ok": ok}, ok


def cmd_check_skew(a) -> Tuple[dict, bool]:
    data = _load_json(a.seed)
    rows = data.get("B") if isinstance(data, dict) else data
    if not isinstance(rows, list) or not rows:
        raise InputError("expected a seed file or a list of matrix rows")
    N = len(rows)
    try:
        principal = [[int(x) for x in r[:N]] for r in rows]
    except (TypeError, ValueError):
        raise InputError("matrix entries must be integers") from None
    if any(len(r) < N for r in rows):
        raise InputError("matrix has fewer columns than rows")
    d = skew_symmetrizer(principal)
    return {"N": N, "skew_symmetrizable": d is not None, "D": list(d) if d else None}, d is not None


def cmd_check_toric(a) -> Tuple[dict, bool]:
    s = _load_seed(a.seed)
    W = _load_json(a.weights)
    if isinstance(W, dict):
        W = W.get("W")
    glob = toric_global_check(s, W)
    fails = toric_equivariance_check(s, W, a.depth) if glob else []
    ok = glob and not fails
    return {"global": glob, "depth": a.depth if glob else 0, "equivariance_failures": fails, "ok": ok}, ok


def _quasi(a) -> Tuple[QuasiIso, object]:
    C = _load_seed(a.seed)
    Ct = _load_seed(a.seed_t)
    mk, lam, weights = marker_from_json(_load_json(a.marker))
    if lam is None:
        raise InputError("marker file has no lambda")
    return QuasiIso(RelatedTriple(C, Ct, mk), lam), weights


def cmd_check_quasi(a) -> Tuple[dict, bool]:
    q, _ = _quasi(a)
    at = _seq(a.at)
    q.track(at)
    out = {"at": list(at)}
    if a.route in ("seed", "both"):
        out["seed"] = check_quasi_seed(q, at).to_json()
    if a.route in ("y", "both"):
        out["y"] = check_quasi_y(q, at).to_json()
    verdicts = [out[r]["ok"] for r in ("seed", "y") if r in out]
    out["agree"] = len(set(verdicts)) == 1
    ok = all(verdicts) and out["agree"]
    out["ok"] = ok
    return out, ok


def cmd_mutate_lambda(a) -> Tuple[dict, bool]:
    q, _ = _quasi(a)
    at = _seq(a.at)
    q.track(at)
    try:
        lam = mutate_lambda(q, a.ell, at)
    except LambdaIntegralityError as e:
        return {"at": list(at), "ell": a.ell, "ok": False, "error": str(e)}, False
    return {"at": list(at), "ell": a.ell, "ok": True, "lambda": lam.to_json()}, True


def cmd_starfish(a) -> Tuple[dict, bool]:
    from .starfish import RingSpec, starfish_direct

    s = _load_seed(a.seed)
    ideal = None
    if a.relation:
        try:
            ideal = IdealBasis([parse_poly(r, s.table) for r in a.relation])
        except ParseError as e:
            raise InputError(f"relation: {e}") from None
    v = starfish_direct(s, RingSpec(s.table, ideal))
    out = v.to_json()
    ok = v.holds("UpperSubseteq", "C")
    out["holds"] = ok
    return out, ok


def cmd_infer(a) -> Tuple[dict, bool]:
    from .starfish import factbase_from_json, infer_closure, make_atom

    fb = factbase_from_json(_load_json(a.facts))
    rules = [r.strip() for r in a.rules.split(",")] if a.rules else None
    v = infer_closure(fb, rules=rules)
    out = v.to_json()
    ok = True
    if a.goal:
        kind, *args = a.goal.replace("(", " ").replace(")", " ").replace(",", " ").split()
        ok = v.holds(kind, *args)
        out["goal"] = {"atom": a.goal, "holds": ok}
        if ok:
            out["goal"]["trace"] = [f.to_json() for f in v.trace(make_atom(kind, *args))]
    return out, ok


def cmd_corpus(a) -> Tuple[dict, bool]:
    from . import corpus as C

    if a.action == "list":
        entries = {}
        for name in C.STRUCTURES + C.VARIANTS:
            s = C.build_structure(name)
            entries[name] = {"kind": s.kind, "variables": s.names, "marked": list(s.marked),
                             "complete": s.complete, "descriptor": s.descriptor}
        maps = {m: {"src": s.src, "tgt": s.tgt, "marked": list(s.marked), "description": s.description}
                for m, s in sorted(C.MAPS.items())}
        return {"structures": entries, "maps": maps}, True
    if not a.name:
        raise InputError("corpus verify needs a structure name")
    if a.name not in C.STRUCTURES + C.VARIANTS:
        raise InputError(f"unknown corpus structure {a.name!r}")
    report = C.verify_suite(a.name, a.direction, a.modulo, _jobs(a.jobs))
    ok = C.suite_ok(report)
    report["ok"] = ok
    return report, ok


# ---------------------------------------------------------------- rendering

def _render(obj, prefix="") -> List[str]:
    if isinstance(obj, dict):
        if not obj:
            return [f"{prefix}: {{}}"] if prefix else []
        lines = []
        for k, v in obj.items():
            lines.extend(_render(v, f"{prefix}.{k}" if prefix else str(k)))
        return lines
    if isinstance(obj, list) and obj and any(isinstance(x, (dict, list)) for x in obj):
        lines = []
        for i, v in enumerate(obj):
            lines.extend(_render(v, f"{prefix}[{i}]"))
        return lines
    if isinstance(obj, list):
        return [f"{prefix}: [{', '.join(str(x) for x in obj)}]"]
    return [f"{prefix}: {obj}"]


def render_text(report: dict) -> str:
    return "\n".join(_render(report)) + "\n"


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- parser

COMMANDS: Dict[str, Callable] = {
    "mutate": cmd_mutate,
    "y-vars": cmd_yvars,
    "laurent-check": cmd_laurent,
    "check-skew": cmd_check_skew,
    "check-toric": cmd_check_toric,
    "check-quasi": cmd_check_quasi,
    "mutate-lambda": cmd_mutate_lambda,
    "starfish": cmd_starfish,
    "infer": cmd_infer,
    "corpus": cmd_corpus,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")

    p = argparse.ArgumentParser(prog="clusterforge", description="Exact cluster-algebra checks.")
    p.add_argument("--version", action="version", version=f"clusterforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    c = add("mutate", "mutate a seed along a sequence")
    c.add_argument("--seed", required=True)
    c.add_argument("--at", required=True, help="mutation directions, e.g. '1 2 1'")

    c = add("y-vars", "y-variables of a seed")
    c.add_argument("--seed", required=True)
    c.add_argument("--at", default="")

    c = add("laurent-check", "Laurent phenomenon along walks")
    c.add_argument("--seed", required=True)
    c.add_argument("--at", default="")
    c.add_argument("--walks", type=int, default=10)
    c.add_argument("--depth", type=int, default=6)
    c.add_argument("--rng-seed", type=int, default=0)

    c = add("check-skew", "skew-symmetrizability of the principal part")
    c.add_argument("--seed", required=True, help="seed file or JSON list of rows")

    c = add("check-toric", "global toric action test and weight equivariance")
    c.add_argument("--seed", required=True)
    c.add_argument("--weights", required=True, help="JSON matrix W or {'W': ...}")
    c.add_argument("--depth", type=int, default=3)

    for name, help_ in (("check-quasi", "quasi-isomorphism criteria at a marked cluster"),
                        ("mutate-lambda", "mutate the exponent matrix Lambda")):
        c = add(name, help_)
        c.add_argument("--seed", required=True, help="seed of C")
        c.add_argument("--seed-t", required=True, help="seed of C~")
        c.add_argument("--marker", required=True)
        c.add_argument("--at", default="", help="marked mutation sequence from the initial pair")
        if name == "check-quasi":
            c.add_argument("--route", choices=("seed", "y", "both"), default="both")
        else:
            c.add_argument("--ell", type=int, required=True)

    c = add("starfish", "direct Starfish check at one seed")
    c.add_argument("--seed", required=True)
    c.add_argument("--relation", action="append", default=[], help="ideal generator (repeatable)")

    c = add("infer", "closure of a fact base under the inference rules")
    c.add_argument("--facts", required=True)
    c.add_argument("--rules", default="", help="comma separated rule ids")
    c.add_argument("--goal", default="", help="atom to report on, e.g. 'UpperEq(C)'")

    c = add("corpus", "worked examples")
    c.add_argument("action", choices=("list", "verify"))
    c.add_argument("name", nargs="?")
    c.add_argument("--direction", choices=("auto", "fwd", "bwd"), default="auto")
    c.add_argument("--modulo", choices=("relations", "ambient"), default="relations")
    c.add_argument("--jobs", type=int, default=None)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        report, ok = COMMANDS[a.command](a)
    except (InputError, ParseError, ValueError, KeyError, IndexError, LookupError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        err.write(f"clusterforge {a.command}: error: {msg}\n")
        return 2
    report = {"schema": SCHEMA.format(a.command), **report}
    text = render_json(report)
    out.write(text if a.format == "json" else render_text(json.loads(text)))
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
