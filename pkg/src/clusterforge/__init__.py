"""Exact cluster-algebra toolkit: seeds and mutation, quasi-isomorphism
checks, Starfish-style inference and symbolic verification of examples."""

__version__ = "0.1.0"
