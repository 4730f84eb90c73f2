"""Positive and negative fixtures for the inference rules.

C has cluster x1, x2, x3 and frozen f1.  Q: C -> Ct marks x3; Qh: C -> Ch
marks x1, so (Q, Qh) is a complementary pair.
"""
from clusterforge.starfish import FactBase, MapSpec, StructureSpec


def registry():
    fb = FactBase()
    fb.add_structure(StructureSpec("C", "R", ("x1", "x2", "x3"), ("f1",)))
    fb.add_structure(StructureSpec("Ct", "Rt", ("t1", "t2"), ("s1", "s3")))
    fb.add_structure(StructureSpec("Ch", "Rh", ("h2", "h3"), ("g1", "k1")))
    fb.add_map(MapSpec("Q", "C", "Ct", {"x1": "t1", "x2": "t2", "x3": "s3", "f1": "s1"}))
    fb.add_map(MapSpec("Qh", "C", "Ch", {"x1": "g1", "x2": "h2", "x3": "h3", "f1": "k1"}))
    return fb


PAIR = [("Complementary", "Q", "Qh"), ("BirQuasi", "Q"), ("BirQuasi", "Qh")]
CERTS1 = [("Factorial", "R"), ("Factorial", "Rt"), ("UnitsScalars", "R"), ("UnitsScalars", "Rt")]
CERTS3 = CERTS1 + [("Factorial", "Rh"), ("UnitsScalars", "Rh")]
MUT_T = [("Cop", "t1", "t1'"), ("Cop", "t2", "t2'")]
MUT_H = [("Cop", "h2", "h2'"), ("Cop", "h3", "h3'")]
UPPER1 = [("FullRank", "C"), ("FullRank", "Ct"), ("UpperContains", "Ct"), ("LaurentContains", "C", "x3")]
UPPER2 = [("FullRank", "C"), ("FullRank", "Ct"), ("FullRank", "Ch"), ("UpperContains", "Ct"),
          ("UpperContains", "Ch")]
IRR_T = [("Irr", n) for n in ("t1", "t2", "s1", "s3")]
IRR_H = [("Irr", n) for n in ("h2", "h3", "g1", "k1")]

# rule id -> (premises, expected conclusions, premise removed in the negative fixture, conclusion checked)
FIXTURES = {
    "R1": ([("BirQuasi", "Q"), ("CopK", "x1", "Q"), ("Regular", "x2"), ("Cop", "t1", "t2")],
           [("Cop", "x1", "x2")], ("Cop", "t1", "t2"), ("Cop", "x1", "x2")),
    "R2": ([("BirQuasi", "Q"), ("CopK", "x1", "Q"), ("Cop", "t1", "t1'")],
           [("Cop", "x1", "x1'")], ("CopK", "x1", "Q"), ("Cop", "x1", "x1'")),
    "R3": ([("BirQuasi", "Q")] + UPPER1, [("UpperContains", "C")], ("FullRank", "C"), ("UpperContains", "C")),
    "R4": ([("BirQuasi", "Q"), ("Cop", "t1", "t2", "s1", "s3"), ("Cop", "x3"), ("CopK", "x1", "Q"),
            ("CopK", "x2", "Q"), ("CopK", "f1", "Q")] + MUT_T + [("Cop", "x3", "x3'")] + UPPER1,
           [("Cop", "x1", "x2", "x3", "f1"), ("Cop", "x1", "x1'"), ("Cop", "x2", "x2'"),
            ("UpperSubseteq", "C"), ("UpperEq", "C")], ("FullRank", "Ct"), ("UpperEq", "C")),
    "R5": ([("BirQuasi", "Q"), ("PrimeEl", "t1"), ("CopK", "x1", "Q"), ("CopK", "t1", "Q")],
           [("PrimeEl", "x1")], ("CopK", "t1", "Q"), ("PrimeEl", "x1")),
    "R6": ([("BirQuasi", "Q")] + CERTS1 + IRR_T + [("Irr", "x3")] + MUT_T + [("Cop", "x3", "x3'")] + UPPER1,
           [("Irr", "x1"), ("Irr", "x2"), ("Irr", "f1"), ("Cop", "x1", "x1'"),
            ("Cop", "x2", "x2'"), ("UpperSubseteq", "C"), ("UpperEq", "C")],
           ("UnitsScalars", "R"), ("Irr", "x1")),
    "R7": (PAIR + [("CopK", "t2", "Qh"), ("CopK", "h2", "Q"), ("Cop", "x1", "x3"), ("Cop", "t2", "t2'")],
           [("CopK", "x2", "Q"), ("CopK", "x2", "Qh"), ("Cop", "x2", "x2'")],
           ("Cop", "x1", "x3"), ("CopK", "x2", "Qh")),
    "R8": (PAIR + UPPER2, [("UpperContains", "C")], ("UpperContains", "Ch"), ("UpperContains", "C")),
    "R9": (PAIR + [("Cop", "t1", "t2", "s1", "s3"), ("Cop", "h2", "h3", "g1", "k1"), ("Cop", "x1", "x3")]
           + MUT_T + MUT_H + UPPER2,
           [("Cop", "x1", "x2", "x3", "f1"), ("Cop", "x1", "x1'"), ("Cop", "x2", "x2'"), ("Cop", "x3", "x3'"),
            ("UpperSubseteq", "C"), ("UpperEq", "C")], ("Cop", "h3", "h3'"), ("UpperSubseteq", "C")),
    "R10": (PAIR + [("CopK", "t2", "Q"), ("CopK", "t2", "Qh"), ("CopK", "h2", "Q"), ("CopK", "h2", "Qh"),
                    ("Cop", "x1", "x3"), ("PrimeEl", "t2")],
            [("PrimeEl", "x2")], ("PrimeEl", "t2"), ("PrimeEl", "x2")),
    "R11": (PAIR + CERTS3 + [("PrimeEl", n) for n in ("t1", "s3", "g1", "h3")],
            [("PrimeEl", "x1"), ("PrimeEl", "x3")], ("PrimeEl", "h3"), ("PrimeEl", "x3")),
    "R12": (PAIR + CERTS3 + IRR_T + IRR_H + MUT_T + MUT_H + UPPER2,
            [("Irr", "x1"), ("Irr", "x2"), ("Irr", "x3"), ("Irr", "f1"), ("Cop", "x1", "x1'"),
             ("Cop", "x2", "x2'"), ("Cop", "x3", "x3'"), ("UpperSubseteq", "C"), ("UpperEq", "C")],
            ("Irr", "g1"), ("Irr", "x1")),
    "SF": ([("Cop", "x1", "x2", "x3"), ("Cop", "x1", "x1'"), ("Cop", "x2", "x2'"), ("Cop", "x3", "x3'")],
           [("UpperSubseteq", "C")], ("Cop", "x2", "x2'"), ("UpperSubseteq", "C")),
}


def factbase(atoms, drop=None):
    fb = registry()
    for a in atoms:
        if a != drop:
            fb.assert_fact(*a)
    return fb
