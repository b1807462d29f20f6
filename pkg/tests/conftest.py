"""Shared fixtures: the worked-example formulas and structures, plus a tiny
pure-Python evaluator used to cross-check the array-based reference counter."""

import itertools

import pytest

from epcount import (And, Atom, DisjunctiveEp, EpFormula, Exists, Or, PpFormula,
                     Signature, Structure, Top, parse_formula_file, parse_structure_file)
from epcount.logic import free_vars


SIG_E = Signature.of(E=2)
SIG_EF = Signature.of(E=2, F=1)
SIG_EFG = Signature.of(E=2, F=2, G=2)


def naive_count(phi: EpFormula, b: Structure) -> int:
    """Nested-loop evaluator, independent of the numpy implementation."""
    elements = list(b.universe)

    def sat(node, env):
        if isinstance(node, Top):
            return True
        if isinstance(node, Atom):
            return tuple(env[a] for a in node.args) in b.rel(node.relation)
        if isinstance(node, And):
            return sat(node.left, env) and sat(node.right, env)
        if isinstance(node, Or):
            return sat(node.left, env) or sat(node.right, env)
        if isinstance(node, Exists):
            return any(sat(node.body, {**env, node.var: e}) for e in elements)
        raise TypeError(node)

    total = 0
    for values in itertools.product(elements, repeat=len(phi.lib)):
        if sat(phi.body, dict(zip(phi.lib, values))):
            total += 1
    return total


def make_pp(sig, lib, universe, rels) -> PpFormula:
    return PpFormula(Structure.make(sig, tuple(universe), rels), tuple(lib))


EX41_TEXT = """
sig E/2
query phi lib(w,x,y,z): E(x,y) & (E(w,x) | (E(y,z) & E(z,z)))
"""

EX42_TEXT = """
sig E/2
query phi lib(w,x,y,z): (E(x,y) & E(y,z)) | (E(z,w) & E(w,x)) | (E(w,x) & E(x,y))
"""

THETA_TEXT = """
sig E/2
query theta lib(w,x,y,z): (E(x,y) & E(y,z)) | (E(z,w) & E(w,x)) | (E(w,x) & E(x,y)) | (exists a,b,c,d. E(a,b) & E(b,c) & E(c,d))
"""

EX43_STRUCTURE_TEXT = """
structure C
domain 1 2 3 4
rel E: (1,2) (2,3) (3,4) (4,4)
end
"""


@pytest.fixture(scope="session")
def ex41():
    sig, queries = parse_formula_file(EX41_TEXT)
    return dict(queries)["phi"]


@pytest.fixture(scope="session")
def ex42():
    sig, queries = parse_formula_file(EX42_TEXT)
    return dict(queries)["phi"]


@pytest.fixture(scope="session")
def theta54():
    sig, queries = parse_formula_file(THETA_TEXT)
    return dict(queries)["theta"]


@pytest.fixture(scope="session")
def ex43_c():
    (_name, c), = parse_structure_file(EX43_STRUCTURE_TEXT, SIG_E)
    return c


@pytest.fixture(scope="session")
def ex22():
    """The four-component pp-formula with two pinned pairs and a closed part."""
    return make_pp(
        SIG_EFG, ("x", "xp", "y", "z"),
        ("x", "xp", "y", "z", "yp", "u", "v", "w"),
        {"E": [("x", "xp"), ("y", "yp")], "F": [("u", "v")], "G": [("u", "w")]})


# Example 4.2's three pairwise renaming-equivalent conjunctions.
V = ("w", "x", "y", "z")


@pytest.fixture(scope="session")
def ex42_parts():
    phi1 = make_pp(SIG_E, V, V, {"E": [("x", "y"), ("y", "z")]})
    phi2 = make_pp(SIG_E, V, V, {"E": [("z", "w"), ("w", "x")]})
    phi3 = make_pp(SIG_E, V, V, {"E": [("w", "x"), ("x", "y")]})
    return phi1, phi2, phi3
