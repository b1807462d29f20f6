import random

import pytest

from epcount import (And, Atom, DisjunctiveEp, EpFormula, Exists, LibMismatchError, Or,
                     ParseError, PpFormula, Structure, Top, ValidationError, augment,
                     brute_force_count, brute_force_count_pp, canonical_pp_text, components,
                     conjoin_pp, count_pp, disjunctive_to_ep, entails, find_homomorphism,
                     from_structure_view, hat, logically_equivalent, normalize_ep,
                     parse_formula_file, pp_to_ep, to_structure_view)
from epcount.errors import PreconditionError
from epcount.logic import atoms_of, exists_all
from epcount.randgen import random_pp, random_structure

from conftest import SIG_E, SIG_EF, SIG_EFG, make_pp, naive_count


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def test_parse_single_atom():
    sig, queries = parse_formula_file("sig E/2\nquery phi lib(x,y): E(x,y)")
    (_name, phi), = queries
    assert phi.lib == ("x", "y")
    assert phi.body == Atom("E", ("x", "y"))


def test_parse_ex41_shape(ex41):
    assert ex41.lib == ("w", "x", "y", "z")
    assert len(atoms_of(ex41.body)) == 4
    assert isinstance(ex41.body, And)
    assert isinstance(ex41.body.right, Or)


def test_parse_arity_mismatch():
    with pytest.raises(ParseError) as err:
        parse_formula_file("sig E/2\nquery phi lib(x): E(x)")
    assert "arity" in str(err.value)


def test_parse_free_var_not_declared():
    with pytest.raises(ParseError) as err:
        parse_formula_file("sig E/2\nquery phi lib(x): E(x,y)")
    assert "liberal" in str(err.value)


def test_parse_reports_line_and_column():
    with pytest.raises(ParseError) as err:
        parse_formula_file("sig E/2\nquery phi lib(x,y): E(x,y) & R(x)")
    assert err.value.line == 2
    assert err.value.col is not None


def test_parse_reserved_names_rejected():
    with pytest.raises(ParseError):
        parse_formula_file("sig E/2\nquery phi lib(x): exists _q0. E(x,_q0)")
    with pytest.raises(ParseError):
        parse_formula_file("sig __lib_a/1\nquery phi lib(x): true")


def test_parse_renames_binders_apart():
    sig, queries = parse_formula_file(
        "sig E/2\nquery phi lib(x): (exists u. E(x,u)) | (exists u. E(u,x))")
    (_n, phi), = queries
    from epcount.logic import bound_vars
    bv = bound_vars(phi.body)
    assert len(bv) == len(set(bv)) == 2
    assert all(v.startswith("_q") for v in bv)


def test_parse_exists_extends_to_paren_end():
    sig, queries = parse_formula_file(
        "sig E/2 F/1\nquery phi lib(x): F(x) & (exists u. E(x,u) | F(u))")
    (_n, phi), = queries
    # the disjunction sits inside the quantifier scope
    assert isinstance(phi.body.right, Exists)
    assert isinstance(phi.body.right.body, Or)


def test_parse_true_literal():
    sig, queries = parse_formula_file("sig E/2\nquery phi lib(z): true")
    (_n, phi), = queries
    assert phi.body == Top()


# ---------------------------------------------------------------------------
# AST validation
# ---------------------------------------------------------------------------

def test_epformula_validation():
    with pytest.raises(ValidationError):
        EpFormula(SIG_E, ("x",), Atom("E", ("x", "y")))
    with pytest.raises(ValidationError):
        EpFormula(SIG_E, ("x",), Atom("R", ("x", "x")))
    with pytest.raises(ValidationError):
        EpFormula(SIG_E, ("x",), Exists("x", Atom("E", ("x", "x"))))
    with pytest.raises(ValidationError):
        EpFormula(SIG_E, ("x",), And(Exists("u", Atom("E", ("x", "u"))),
                                     Exists("u", Atom("E", ("u", "x")))))


# ---------------------------------------------------------------------------
# Structure view
# ---------------------------------------------------------------------------

def test_to_structure_view_ex22():
    body = exists_all(["yp", "u", "v", "w"],
                      And(And(Atom("E", ("x", "xp")), Atom("E", ("y", "yp"))),
                          And(Atom("F", ("u", "v")), Atom("G", ("u", "w")))))
    phi = EpFormula(SIG_EFG, ("x", "xp", "y", "z"), body)
    pp = to_structure_view(phi)
    assert set(pp.structure.universe) == {"x", "xp", "y", "z", "yp", "u", "v", "w"}
    assert pp.structure.rel("E") == {("x", "xp"), ("y", "yp")}
    assert pp.structure.rel("F") == {("u", "v")}
    assert pp.structure.rel("G") == {("u", "w")}


def test_to_structure_view_atom_free():
    phi = EpFormula(SIG_E, ("z",), Top())
    pp = to_structure_view(phi)
    assert pp.structure.universe == ("z",)
    assert pp.structure.rel("E") == frozenset()


def test_to_structure_view_rejects_or(ex41):
    with pytest.raises(ValidationError):
        to_structure_view(ex41)


def test_round_trip_logically_equivalent():
    rng = random.Random(11)
    for _ in range(15):
        pp = random_pp(rng, SIG_EF, lib_size=2, extra_vars=2, max_atoms=3)
        back = to_structure_view(pp_to_ep(pp))
        verdict = logically_equivalent(pp, back)
        assert verdict.equivalent


def test_from_structure_view_empty_conjunction():
    pp = make_pp(SIG_E, ("z",), ("z",), {})
    assert from_structure_view(pp) == "lib(z): true"


def test_from_structure_view_ex22(ex22):
    text = from_structure_view(ex22)
    assert text.startswith("lib(x,xp,y,z): exists yp,u,v,w.")
    assert text.count("&") == 3


def test_from_structure_view_quantifier_free():
    pp = make_pp(SIG_E, ("x", "y"), ("x", "y"), {"E": [("x", "y")]})
    assert from_structure_view(pp) == "lib(x,y): E(x,y)"


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def test_normalize_ex41(ex41):
    disj = normalize_ep(ex41)
    texts = [canonical_pp_text(d) for d in disj.disjuncts]
    assert texts == ["lib(w,x,y,z): E(w,x) & E(x,y)",
                     "lib(w,x,y,z): E(x,y) & E(y,z) & E(z,z)"]


def test_normalize_fixed_point(ex42):
    disj = normalize_ep(ex42)
    again = normalize_ep(disjunctive_to_ep(disj))
    assert ([canonical_pp_text(d) for d in disj.disjuncts]
            == [canonical_pp_text(d) for d in again.disjuncts])


def test_normalize_theta_keeps_all_disjuncts(theta54):
    disj = normalize_ep(theta54)
    assert len(disj.disjuncts) == 4
    sentences = [d for d in disj.disjuncts if d.is_sentence()]
    assert len(sentences) == 1
    # the sentence structure maps into no other disjunct
    for d in disj.disjuncts:
        if d is not sentences[0]:
            assert find_homomorphism(sentences[0].structure, d.structure) is None


def test_normalize_deletes_entailing_disjunct():
    sig, queries = parse_formula_file(
        "sig E/2\nquery phi lib(x,y): E(x,y) | (exists a,b. E(a,b))")
    (_n, phi), = queries
    disj = normalize_ep(phi)
    assert len(disj.disjuncts) == 1
    assert disj.disjuncts[0].is_sentence()


def test_normalize_preserves_counts():
    rng = random.Random(5)
    from epcount.randgen import random_ep_ast
    from epcount.structures import enumerate_structures
    for _ in range(12):
        phi = random_ep_ast(rng, SIG_E, lib_size=2, depth=2)
        disj = normalize_ep(phi)
        for b in enumerate_structures(SIG_E, 2):
            assert brute_force_count(disjunctive_to_ep(disj), b) == naive_count(phi, b)


def test_normalized_sentence_condition_random():
    rng = random.Random(9)
    from epcount.randgen import random_normalized_ep
    for _ in range(10):
        disj = random_normalized_ep(rng, SIG_EF, with_sentence=True)
        sentences = [d for d in disj.disjuncts if d.is_sentence()]
        for th in sentences:
            for d in disj.disjuncts:
                if d is not th:
                    assert not entails(d, th)


# ---------------------------------------------------------------------------
# Conjunction
# ---------------------------------------------------------------------------

def test_conjoin_ex41(ex41):
    disj = normalize_ep(ex41)
    conj = conjoin_pp(list(disj.disjuncts))
    assert conj.quantified() == ()
    assert conj.structure.rel("E") == {("x", "y"), ("w", "x"), ("y", "z"), ("z", "z")}


def test_conjoin_single_identity(ex42_parts):
    phi1, _phi2, _phi3 = ex42_parts
    assert conjoin_pp([phi1]) == phi1


def test_conjoin_associativity_up_to_equivalence(ex42_parts):
    phi1, phi2, phi3 = ex42_parts
    left = conjoin_pp([conjoin_pp([phi1, phi2]), phi3])
    flat = conjoin_pp([phi1, phi2, phi3])
    assert logically_equivalent(left, flat).equivalent


def test_conjoin_renames_quantified_apart():
    p = make_pp(SIG_E, ("x",), ("x", "u"), {"E": [("x", "u")]})
    q = make_pp(SIG_E, ("x",), ("x", "u"), {"E": [("u", "x")]})
    conj = conjoin_pp([p, q])
    assert len(conj.structure.universe) == 3
    assert len(conj.structure.rel("E")) == 2


def test_conjoin_lib_mismatch():
    p = make_pp(SIG_E, ("x",), ("x",), {})
    q = make_pp(SIG_E, ("y",), ("y",), {})
    with pytest.raises(LibMismatchError):
        conjoin_pp([p, q])


# ---------------------------------------------------------------------------
# Components and hat
# ---------------------------------------------------------------------------

def test_components_ex22(ex22):
    comps = components(ex22)
    assert [c.lib for c in comps] == [("x", "xp"), ("y",), ("z",), ()]
    assert [set(c.structure.universe) for c in comps] == [
        {"x", "xp"}, {"y", "yp"}, {"z"}, {"u", "v", "w"}]


def test_components_connected_singleton():
    pp = make_pp(SIG_E, ("a", "b"), ("a", "b"), {"E": [("a", "b")]})
    assert components(pp) == [pp]


def test_component_product_law():
    rng = random.Random(21)
    for _ in range(20):
        pp = random_pp(rng, SIG_EF, lib_size=2, extra_vars=2, max_atoms=3)
        b = random_structure(rng, SIG_EF, 3)
        product_value = 1
        for comp in components(pp):
            product_value *= brute_force_count_pp(comp, b)
        assert product_value == brute_force_count_pp(pp, b)


def test_hat_ex22(ex22):
    h = hat(ex22)
    assert set(h.structure.universe) == {"x", "xp", "y", "z", "yp"}
    assert h.structure.rel("E") == {("x", "xp"), ("y", "yp")}
    assert h.structure.rel("F") == frozenset()
    assert h.lib == ex22.lib


def test_hat_fixed_point():
    pp = make_pp(SIG_E, ("x", "y"), ("x", "y"), {"E": [("x", "y")]})
    assert hat(pp) == pp


def test_hat_requires_liberal():
    pp = make_pp(SIG_E, (), ("u",), {"E": [("u", "u")]})
    with pytest.raises(PreconditionError):
        hat(pp)


def test_hat_count_law():
    rng = random.Random(4)
    for _ in range(20):
        pp = random_pp(rng, SIG_EF, lib_size=2, extra_vars=2, max_atoms=3)
        b = random_structure(rng, SIG_EF, 3)
        full = brute_force_count_pp(pp, b)
        assert full == 0 or full == brute_force_count_pp(hat(pp), b)


# ---------------------------------------------------------------------------
# Augmentation / entailment
# ---------------------------------------------------------------------------

def test_augment_empty_lib_is_identity():
    pp = make_pp(SIG_E, (), ("u", "v"), {"E": [("u", "v")]})
    assert augment(pp) == pp.structure


def test_augment_ex22(ex22):
    aug = augment(ex22)
    for v in ex22.lib:
        assert aug.rel(f"__lib_{v}") == {(v,)}
    assert aug.rel("E") == ex22.structure.rel("E")


def test_entailment_matches_answer_containment():
    rng = random.Random(17)
    from epcount.homs import hom_set
    from epcount.structures import enumerate_structures
    for _ in range(20):
        p = random_pp(rng, SIG_E, lib_size=2, extra_vars=1, max_atoms=2)
        q = random_pp(rng, SIG_E, lib_size=2, extra_vars=1, max_atoms=2)
        claims = entails(p, q)
        if claims:
            for b in enumerate_structures(SIG_E, 2):
                assert hom_set(p.structure, b, p.lib) <= hom_set(q.structure, b, q.lib)
        else:
            # containment must fail on p's own structure: the identity
            # assignment answers p there but not q
            b = p.structure
            identity = tuple(p.lib)
            assert identity in hom_set(p.structure, b, p.lib)
            assert identity not in hom_set(q.structure, b, q.lib)
