import random

import pytest

from epcount import (Structure, core, find_homomorphism, find_lib_bijection_hom,
                     full_structure, hom_equivalent, hom_set, unit_structure)
from epcount.homs import retracts_onto_proper_substructure
from epcount.randgen import random_structure

from conftest import SIG_E, SIG_EF


def verify_hom(a, b, h):
    for name, ts in a.rels:
        for t in ts:
            assert tuple(h[e] for e in t) in b.rel(name)


def test_constant_map_to_unit():
    a = Structure.make(SIG_EF, ("1", "2"), {"E": [("1", "2")], "F": [("2",)]})
    h = find_homomorphism(a, unit_structure(SIG_EF))
    assert h == {"1": "a", "2": "a"}


def test_path_into_ex43(ex43_c):
    path = Structure.make(SIG_E, ("w", "x", "y"), {"E": [("w", "x"), ("x", "y")]})
    h = find_homomorphism(path, ex43_c)
    assert h is not None
    verify_hom(path, ex43_c, h)


def test_triangle_into_edge_has_no_hom():
    triangle = Structure.make(SIG_E, ("a", "b", "c"),
                              {"E": [("a", "b"), ("b", "c"), ("c", "a")]})
    edge = Structure.make(SIG_E, ("1", "2"), {"E": [("1", "2")]})
    assert find_homomorphism(triangle, edge) is None


def test_partial_assignment_respected():
    edge = Structure.make(SIG_E, ("a", "b"), {"E": [("a", "b")]})
    target = Structure.make(SIG_E, ("1", "2", "3"), {"E": [("1", "2"), ("2", "3")]})
    h = find_homomorphism(edge, target, partial={"a": "2"})
    assert h == {"a": "2", "b": "3"}
    assert find_homomorphism(edge, target, partial={"a": "3"}) is None


def test_hom_set_empty_lib():
    loop = Structure.make(SIG_E, ("s",), {"E": [("s", "s")]})
    edge = Structure.make(SIG_E, ("1", "2"), {"E": [("1", "2")]})
    assert hom_set(loop, loop, ()) == {()}
    assert hom_set(loop, edge, ()) == set()


def test_hom_set_ex43_is_16(ex43_c):
    phi1 = Structure.make(SIG_E, ("w", "x", "y", "z"), {"E": [("x", "y"), ("w", "x")]})
    assert len(hom_set(phi1, ex43_c, ("w", "x", "y", "z"))) == 16


def test_hom_set_full_structure_power():
    a = Structure.make(SIG_E, ("x", "y", "q"), {"E": [("x", "y"), ("y", "q")]})
    assert len(hom_set(a, full_structure(SIG_E, 2), ("x", "y"))) == 4


def test_core_idempotent_and_equivalent():
    rng = random.Random(7)
    for _ in range(20):
        x = random_structure(rng, SIG_E, 4)
        c = core(x)
        assert hom_equivalent(c, x)
        assert core(c) == c
        assert not retracts_onto_proper_substructure(c)


def test_core_edge_plus_loop_is_loop():
    x = Structure.make(SIG_E, ("a", "b", "c"), {"E": [("a", "b"), ("c", "c")]})
    c = core(x)
    assert c.universe == ("c",)
    assert c.rel("E") == {("c", "c")}


def test_hom_equivalent_basics(ex43_c):
    assert hom_equivalent(ex43_c, ex43_c)
    unit = unit_structure(SIG_E)
    # unit maps into ex43_c via the loop at 4, and everything maps to unit
    assert hom_equivalent(ex43_c, unit)
    loopless = Structure.make(SIG_E, ("1", "2"), {"E": [("1", "2")]})
    assert not hom_equivalent(loopless, unit)


def test_hom_equivalent_ex43_formula_structures():
    s1 = Structure.make(SIG_E, ("w", "x", "y", "z"), {"E": [("x", "y"), ("w", "x")]})
    s2 = Structure.make(SIG_E, ("w", "x", "y", "z"),
                        {"E": [("x", "y"), ("y", "z"), ("z", "z")]})
    # the loop side absorbs the path, but no hom returns from the loop side
    assert find_homomorphism(s1, s2) is not None
    assert find_homomorphism(s2, s1) is None
    assert not hom_equivalent(s1, s2)


def test_lib_bijection_hom():
    p = Structure.make(SIG_E, ("x", "y"), {"E": [("x", "y")]})
    q = Structure.make(SIG_E, ("w", "z"), {"E": [("w", "z")]})
    h = find_lib_bijection_hom(p, q, ("x", "y"), ("w", "z"))
    assert h == {"x": "w", "y": "z"}
    # no bijective map exists when injectivity is impossible
    loop = Structure.make(SIG_E, ("s",), {"E": [("s", "s")]})
    assert find_lib_bijection_hom(p, loop, ("x", "y"), ("s",)) is None


def test_hom_search_agrees_with_enumeration():
    rng = random.Random(3)
    from epcount.homs import all_homomorphisms
    for _ in range(40):
        a = random_structure(rng, SIG_EF, 3, density=0.5)
        b = random_structure(rng, SIG_EF, 3, density=0.5)
        found = find_homomorphism(a, b)
        exists = next(iter(all_homomorphisms(a, b)), None)
        assert (found is None) == (exists is None)
        if found is not None:
            verify_hom(a, b, found)
