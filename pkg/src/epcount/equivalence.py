"""Deciders for logical, counting and semi-counting equivalence of
pp-formulas, and constructions of structures that tell formulas apart.

Counting equivalence is decided through its characterization as renaming
equivalence: mutual liberal-set bijections extendable to homomorphisms of the
full structures.  Semi-counting equivalence reduces to counting equivalence
of hat-formulas.  The witness searches enumerate candidate structures in a
fixed order (universe size, then tuple count, then lexicographic) so results
are reproducible.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

from .counting import count_pp
from .errors import (LibMismatchError, PreconditionError, SearchExhaustedError,
                     SignatureMismatchError, ValidationError)
from .homs import find_homomorphism, find_lib_bijection_hom
from .logic import PpFormula, augment, canonical_pp_text, hat
from .structures import (Structure, disjoint_union, enumerate_structures,
                         has_all_loops_element, power, product, unit_structure)

DEFAULT_MAX_WITNESS_SIZE = int(os.environ.get("EPCOUNT_MAX_WITNESS_SIZE", "5"))


@dataclass(frozen=True)
class EquivalenceVerdict:
    """Outcome of an equivalence check.

    For kind "logical", forward/backward are homomorphisms between the
    augmented structures (p-side into q-side and back).  For kinds "counting"
    and "semi-counting", they are homomorphisms of the (hat-)structures whose
    restrictions to the liberal sets are mutually inverse-free bijections.
    A distinguisher, when present, is a structure on which the two formulas
    have different counts (both positive in the semi-counting case).
    """

    kind: str
    equivalent: bool
    forward: dict[str, str] | None = None
    backward: dict[str, str] | None = None
    distinguisher: Structure | None = None


def _require_same_signature(p: PpFormula, q: PpFormula) -> None:
    if p.signature != q.signature:
        raise SignatureMismatchError("formulas are over different signatures")


def logically_equivalent(p: PpFormula, q: PpFormula) -> EquivalenceVerdict:
    """Logical equivalence via mutual homomorphisms of augmented structures."""
    _require_same_signature(p, q)
    if set(p.lib) != set(q.lib):
        raise LibMismatchError(
            "formulas with different liberal sets are never logically equivalent; "
            f"got {sorted(p.lib)} vs {sorted(q.lib)}")
    aug_p = augment(p)
    aug_q = augment(q)
    fwd = find_homomorphism(aug_p, aug_q)
    bwd = find_homomorphism(aug_q, aug_p)
    return EquivalenceVerdict("logical", fwd is not None and bwd is not None, fwd, bwd)


def _find_count_distinguisher(p: PpFormula, q: PpFormula, max_size: int,
                              need_positive: bool) -> Structure:
    for b in enumerate_structures(p.signature, max_size):
        cp = count_pp(p, b)
        cq = count_pp(q, b)
        if cp != cq and (not need_positive or (cp > 0 and cq > 0)):
            return b
    raise SearchExhaustedError(
        f"no distinguishing structure with at most {max_size} elements")


def counting_equivalent(p: PpFormula, q: PpFormula, *, witness_structure: bool = False,
                        max_size: int = DEFAULT_MAX_WITNESS_SIZE) -> EquivalenceVerdict:
    """Equal counts on every structure, decided as renaming equivalence.

    Liberal sets of different sizes can never be counting equivalent (the
    full two-element structure separates them), so that case short-circuits.
    """
    _require_same_signature(p, q)
    kind = "counting"
    if len(p.lib) != len(q.lib):
        dist = _find_count_distinguisher(p, q, max_size, False) if witness_structure else None
        return EquivalenceVerdict(kind, False, distinguisher=dist)
    fwd = find_lib_bijection_hom(p.structure, q.structure, p.lib, q.lib)
    bwd = None
    if fwd is not None:
        bwd = find_lib_bijection_hom(q.structure, p.structure, q.lib, p.lib)
    if fwd is not None and bwd is not None:
        return EquivalenceVerdict(kind, True, fwd, bwd)
    dist = _find_count_distinguisher(p, q, max_size, False) if witness_structure else None
    return EquivalenceVerdict(kind, False, distinguisher=dist)


def semi_counting_equivalent(p: PpFormula, q: PpFormula, *, witness_structure: bool = False,
                             max_size: int = DEFAULT_MAX_WITNESS_SIZE) -> EquivalenceVerdict:
    """Equal counts wherever both are positive; decided on the hat-formulas."""
    if not p.lib or not q.lib:
        raise PreconditionError("semi-counting equivalence requires liberal formulas")
    _require_same_signature(p, q)
    inner = counting_equivalent(hat(p), hat(q))
    dist = None
    if not inner.equivalent and witness_structure:
        dist = _find_count_distinguisher(p, q, max_size, True)
    return EquivalenceVerdict("semi-counting", inner.equivalent,
                              inner.forward, inner.backward, dist)


def _not_semi_counting_equivalent(p: PpFormula, q: PpFormula) -> bool:
    """Semi-counting comparison that also covers non-liberal inputs.

    Two sentences are always semi-counting equivalent (counts are 0/1); a
    sentence against a liberal formula never is (append unit copies to pump
    the liberal count above 1 while the sentence stays true).
    """
    p_lib, q_lib = bool(p.lib), bool(q.lib)
    if p_lib and q_lib:
        return not semi_counting_equivalent(p, q).equivalent
    if not p_lib and not q_lib:
        return False
    return True


def distinguishing_pair_structure(p: PpFormula, q: PpFormula, *,
                                  max_size: int = DEFAULT_MAX_WITNESS_SIZE,
                                  max_copies: int = 64) -> Structure:
    """A structure D with every pp-formula satisfiable on it and
    |p(D)| != |q(D)|, for inputs that are not semi-counting equivalent.

    Finds a base structure where the counts are positive and different, then
    takes its disjoint union with unit copies until the counts still differ;
    the unit copies guarantee satisfiability of every pp-formula.
    """
    _require_same_signature(p, q)
    if not _not_semi_counting_equivalent(p, q):
        raise PreconditionError(
            "inputs are semi-counting equivalent; no such structure exists")
    base = None
    for b in enumerate_structures(p.signature, max_size):
        if count_pp(p, b) > 0 and count_pp(q, b) > 0 and count_pp(p, b) != count_pp(q, b):
            base = b
            break
    if base is None:
        raise SearchExhaustedError(
            f"no base structure with positive differing counts within size {max_size}")
    unit = unit_structure(p.signature)
    for k in range(1, max_copies + 1):
        d = disjoint_union(base, k, unit)
        cp = count_pp(p, d)
        cq = count_pp(q, d)
        if cp != cq:
            assert cp > 0 and cq > 0 and has_all_loops_element(d)
            return d
    raise SearchExhaustedError("no workable number of unit copies found")


def _choose_power(counts: Sequence[int], d_prime_size: int, max_lib: int,
                  max_power: int = 64) -> int:
    """Smallest exponent l such that c^l times the largest possible count on
    the second factor stays below the next larger count's l-th power."""
    distinct = sorted(set(counts))
    bound = d_prime_size ** max_lib
    ell = 1
    while ell <= max_power:
        if all(a ** ell * bound < b ** ell for a, b in zip(distinct, distinct[1:])):
            return ell
        ell += 1
    raise SearchExhaustedError("no workable product exponent below the cap")


def joint_distinguishing_structure(phis: Sequence[PpFormula], *,
                                   max_universe: int = 600,
                                   fallback_max_size: int = 4,
                                   max_size: int = DEFAULT_MAX_WITNESS_SIZE) -> Structure:
    """A structure C on which every pp-formula is satisfiable and formulas
    from different semi-counting classes get pairwise different counts.

    Built inductively: resolve each count collision between two classes with
    a pairwise distinguishing structure D', replacing C by C^l x D' with l
    large enough to keep the already-separated counts in strict order.  If
    the construction outgrows `max_universe`, falls back to exhaustive search
    over small structures with an all-loops element.
    """
    if not phis:
        raise ValidationError("empty formula list")
    for f in phis:
        if not f.lib:
            raise PreconditionError("all formulas must be liberal")
        if f.signature != phis[0].signature:
            raise SignatureMismatchError("formulas are over different signatures")

    reps: list[PpFormula] = []
    class_of: list[int] = []
    for f in phis:
        for idx, r in enumerate(reps):
            if not _not_semi_counting_equivalent(f, r):
                class_of.append(idx)
                break
        else:
            class_of.append(len(reps))
            reps.append(f)

    max_lib = max(len(f.lib) for f in reps)

    def verify(c: Structure) -> bool:
        if not has_all_loops_element(c):
            return False
        counts = [count_pp(r, c) for r in reps]
        return len(set(counts)) == len(counts) and all(v > 0 for v in counts)

    def fallback() -> Structure:
        for b in enumerate_structures(reps[0].signature, fallback_max_size):
            if has_all_loops_element(b) and verify(b):
                return b
        raise SearchExhaustedError(
            "no joint distinguishing structure found by exhaustive search")

    c = unit_structure(reps[0].signature)
    active: list[PpFormula] = []
    for r in reps:
        active.append(r)
        for _attempt in range(12):
            counts = [count_pp(a, c) for a in active]
            clash = next(((i, j) for i in range(len(active)) for j in range(i + 1, len(active))
                          if counts[i] == counts[j]), None)
            if clash is None:
                break
            i, j = clash
            d_prime = distinguishing_pair_structure(active[i], active[j], max_size=max_size)
            try:
                ell = _choose_power(counts, d_prime.size(), max_lib)
            except SearchExhaustedError:
                return fallback()
            if c.size() ** ell * d_prime.size() > max_universe:
                return fallback()
            c = product(power(c, ell), d_prime)
        else:
            return fallback()
    if not verify(c):
        return fallback()
    return c


def min_hom_order_witness(phis: Sequence[PpFormula], *,
                          validate: bool = True) -> tuple[int, Structure]:
    """Pick the formula minimal in the homomorphism order of the structures
    and return (index, its structure C); C satisfies that formula and none of
    the others.  Inputs must be pairwise semi-counting equivalent and
    pairwise not counting equivalent.
    """
    if not phis:
        raise ValidationError("empty formula list")
    if validate:
        for i in range(len(phis)):
            for j in range(i + 1, len(phis)):
                if counting_equivalent(phis[i], phis[j]).equivalent:
                    raise PreconditionError(
                        f"formulas {i} and {j} are counting equivalent")
                if _not_semi_counting_equivalent(phis[i], phis[j]):
                    raise PreconditionError(
                        f"formulas {i} and {j} are not semi-counting equivalent")
    for i, f in enumerate(phis):
        if all(find_homomorphism(phis[j].structure, f.structure) is None
               for j in range(len(phis)) if j != i):
            assert count_pp(f, f.structure) > 0
            return i, f.structure
    raise PreconditionError(
        "no minimal formula in the homomorphism order; inputs violate the precondition")


def sort_key(pp: PpFormula) -> str:
    return canonical_pp_text(pp)
