import itertools

import pytest

from epcount import (ParseError, Signature, Structure, ValidationError, brute_force_count_pp,
                     count_pp, disjoint_union, disjoint_union_all, enumerate_structures,
                     full_structure, has_all_loops_element, parse_structure_file, power,
                     product, unit_structure)
from epcount.logic import components, hat

from conftest import SIG_E, SIG_EF, make_pp


def test_signature_validation():
    with pytest.raises(ValidationError):
        Signature((("E", 2), ("E", 1)))
    with pytest.raises(ValidationError):
        Signature((("E", 0),))
    sig = Signature.of(E=2, F=1)
    assert sig.arity("E") == 2 and "F" in sig and "G" not in sig


def test_structure_validation():
    with pytest.raises(ValidationError):
        Structure.make(SIG_E, ("a",), {"E": [("a", "b")]})
    with pytest.raises(ValidationError):
        Structure.make(SIG_E, ("a",), {"E": [("a",)]})
    with pytest.raises(ValidationError):
        Structure.make(SIG_E, ("a",), {"R": [("a",)]})


def test_parse_structure_ex43():
    text = """
structure C
domain 1 2 3 4
rel E: (1,2) (2,3) (3,4) (4,4)
end
"""
    (name, c), = parse_structure_file(text, SIG_E)
    assert name == "C"
    assert c.universe == ("1", "2", "3", "4")
    assert c.rel("E") == {("1", "2"), ("2", "3"), ("3", "4"), ("4", "4")}


def test_parse_structure_empty_relations_and_dedup():
    text = "structure S\ndomain a b\nrel E: (a,b) (a,b)\nend"
    (_n, s), = parse_structure_file(text, SIG_E)
    assert s.rel("E") == {("a", "b")}
    text2 = "structure S\ndomain a b\nend"
    (_n, s2), = parse_structure_file(text2, SIG_E)
    assert s2.rel("E") == frozenset()


def test_parse_structure_errors():
    with pytest.raises(ParseError):
        parse_structure_file("structure S\ndomain a\nrel E: (a,b,c)\nend", SIG_E)
    with pytest.raises(ParseError):
        parse_structure_file("structure S\ndomain a\nrel R: (a)\nend", SIG_E)
    with pytest.raises(ParseError):
        parse_structure_file("structure S\ndomain a\nrel E: (a,b)\nend", SIG_E)
    with pytest.raises(ParseError):
        parse_structure_file("structure S\ndomain\nend", SIG_E)


def test_serialize_round_trip(ex43_c):
    text = ex43_c.serialize("C")
    (_n, again), = parse_structure_file(text, SIG_E)
    assert again == ex43_c


def test_unit_structure():
    i = unit_structure(SIG_EF)
    assert i.universe == ("a",)
    assert i.rel("E") == {("a", "a")} and i.rel("F") == {("a",)}
    assert product(i, i).size() == 1
    assert has_all_loops_element(product(i, i))


def test_full_structure_product():
    two = full_structure(SIG_E, 2)
    four = product(two, two)
    assert four.size() == 4
    assert len(four.rel("E")) == 16


def test_product_counts_multiplicative(ex43_c):
    phi1 = make_pp(SIG_E, ("w", "x", "y", "z"), ("w", "x", "y", "z"),
                   {"E": [("x", "y"), ("w", "x")]})
    c2 = product(ex43_c, ex43_c)
    assert count_pp(phi1, c2) == count_pp(phi1, ex43_c) ** 2 == 256


def test_product_unit_law(ex43_c):
    phi = make_pp(SIG_E, ("x", "y"), ("x", "y"), {"E": [("x", "y")]})
    lifted = product(ex43_c, unit_structure(SIG_E))
    assert brute_force_count_pp(phi, lifted) == brute_force_count_pp(phi, ex43_c)


def test_disjoint_union_zero_copies(ex43_c):
    assert disjoint_union(ex43_c, 0, unit_structure(SIG_E)) == ex43_c


def test_disjoint_union_positivity():
    unit = unit_structure(SIG_E)
    path = Structure.make(SIG_E, ("1", "2", "3"), {"E": [("1", "2"), ("2", "3")]})
    triangle = make_pp(SIG_E, ("a",), ("a", "b", "c"),
                       {"E": [("a", "b"), ("b", "c"), ("c", "a")]})
    assert count_pp(triangle, path) == 0
    for k in (1, 2, 3):
        d = disjoint_union(path, k, unit)
        assert count_pp(triangle, d) > 0
        assert has_all_loops_element(d)


def test_disjoint_union_hat_polynomial(ex22):
    """Count of a hat-formula on B + kI equals the component-sum polynomial."""
    b = Structure.make(SIG_EF, ("1", "2"), {"E": [("1", "2"), ("2", "2")], "F": [("1",)]})
    pp = make_pp(SIG_EF, ("x", "y", "z"), ("x", "y", "z", "u"),
                 {"E": [("x", "y"), ("z", "u")]})
    h = hat(pp)
    comps = components(h)
    factors = [count_pp(c, b) for c in comps]
    n = len(factors)
    unit = unit_structure(SIG_EF)
    for k in (1, 2, 3):
        expected = 0
        for mask in itertools.product((0, 1), repeat=n):
            chosen = [f for f, bit in zip(factors, mask) if bit]
            prod = 1
            for f in chosen:
                prod *= f
            expected += k ** (n - sum(mask)) * prod
        assert count_pp(h, disjoint_union(b, k, unit)) == expected


def test_disjoint_union_all_names():
    a = Structure.make(SIG_E, ("p",), {"E": [("p", "p")]})
    b = Structure.make(SIG_E, ("p", "q"), {"E": [("p", "q")]})
    u = disjoint_union_all([a, b])
    assert u.universe == ("p#0", "p#1", "q#1")
    assert u.rel("E") == {("p#0", "p#0"), ("p#1", "q#1")}


def test_power():
    two = full_structure(SIG_E, 2)
    assert power(two, 0).size() == 1
    assert power(two, 3).size() == 8


def test_enumerate_structures_order():
    seen = list(itertools.islice(enumerate_structures(SIG_EF, 1), 10))
    assert seen[0].total_tuples() == 0
    counts = [s.total_tuples() for s in seen]
    assert counts == sorted(counts)
    sizes = {s.size() for s in seen}
    assert sizes == {1}
