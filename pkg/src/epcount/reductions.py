"""Executable oracle reductions between counting on disjunctive formulas and
counting on their pp-formula expansions, in both directions.

All arithmetic is exact: integer counts, rational linear algebra via
fractions.Fraction, and every division checked for zero remainder.  A nonzero
remainder or a non-integral solution means the injected oracle lied and is
reported as an error, never rounded away.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .counting import count_pp
from .equivalence import (joint_distinguishing_structure, min_hom_order_witness,
                          semi_counting_equivalent)
from .errors import (OracleInconsistencyError, PreconditionError, ValidationError)
from .expansion import PlusSet, WeightedPpSum
from .homs import find_homomorphism
from .logic import DisjunctiveEp, PpFormula
from .structures import Structure, disjoint_union_all, power, product

CountOracle = Callable[[Structure], int]
PpCountOracle = Callable[[PpFormula, Structure], int]


def solve_vandermonde(nodes: Sequence[int], rhs: Sequence[int]) -> list[Fraction]:
    """Solve sum_j nodes[j]^l * c_j = rhs[l] for l = 0..s-1, exactly.

    The coefficient matrix is Vandermonde in the nodes, so distinct nodes
    guarantee a unique solution.
    """
    s = len(nodes)
    if len(rhs) != s:
        raise ValidationError("node and right-hand-side lengths differ")
    if s == 0:
        return []
    if len(set(nodes)) != s:
        raise ValidationError(f"duplicate nodes make the system singular: {sorted(nodes)}")
    matrix = [[Fraction(node) ** row for node in nodes] + [Fraction(rhs[row])]
              for row in range(s)]
    for col in range(s):
        pivot = next(r for r in range(col, s) if matrix[r][col] != 0)
        matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
        pv = matrix[col][col]
        matrix[col] = [x / pv for x in matrix[col]]
        for r in range(s):
            if r != col and matrix[r][col] != 0:
                factor = matrix[r][col]
                matrix[r] = [x - factor * y for x, y in zip(matrix[r], matrix[col])]
    return [matrix[r][s] for r in range(s)]


def _exact_div(value: int, divisor: int, what: str) -> int:
    if divisor == 0:
        raise OracleInconsistencyError(f"{what}: division by zero")
    q, r = divmod(value, divisor)
    if r != 0:
        raise OracleInconsistencyError(
            f"{what}: {value} is not divisible by {divisor}; oracle or precondition violated")
    return q


@dataclass(frozen=True)
class ClassSum:
    """One semi-counting-equivalence class of expansion terms: the indices of
    its terms, a representative, its count on the distinguishing structure,
    and the recovered weighted sum over the queried structure."""

    term_indices: tuple[int, ...]
    representative: PpFormula
    node: int
    total: int


def _semi_classes(formulas: Sequence[PpFormula]) -> list[list[int]]:
    classes: list[list[int]] = []
    for i, f in enumerate(formulas):
        for cls in classes:
            if semi_counting_equivalent(f, formulas[cls[0]]).equivalent:
                cls.append(i)
                break
        else:
            classes.append([i])
    return classes


def recover_class_sums(phi: DisjunctiveEp, star: WeightedPpSum, b: Structure,
                       oracle: CountOracle, *,
                       distinguishing: Structure | None = None) -> list[ClassSum]:
    """Recover, per semi-counting class j of the expansion, the value
    sum_{psi in class j} c_psi * |psi(B)|, using exactly one oracle call per
    class on B x C^l for l = 0..s-1.

    C either comes from the caller (verified) or is constructed so that class
    representatives have pairwise distinct positive counts on it, which makes
    the linear system Vandermonde.
    """
    if star.lib != phi.lib:
        raise PreconditionError("expansion does not belong to the given formula")
    formulas = star.formulas()
    if not formulas:
        return []
    classes = _semi_classes(formulas)
    reps = [formulas[cls[0]] for cls in classes]
    c = distinguishing if distinguishing is not None else joint_distinguishing_structure(reps)
    nodes = [count_pp(rep, c) for rep in reps]
    if any(v <= 0 for v in nodes) or len(set(nodes)) != len(nodes):
        raise PreconditionError(
            f"distinguishing structure yields degenerate class counts {nodes}")
    for cls, node in zip(classes, nodes):
        for i in cls[1:]:
            if count_pp(formulas[i], c) != node:
                raise PreconditionError(
                    "class member count differs from its representative on C")
    s = len(classes)
    rhs = []
    for level in range(s):
        queried = b if level == 0 else product(b, power(c, level))
        rhs.append(oracle(queried))
    solution = solve_vandermonde(nodes, rhs)
    totals = []
    for value in solution:
        if value.denominator != 1:
            raise OracleInconsistencyError(
                f"recovered class sum {value} is not an integer")
        totals.append(int(value))
    return [ClassSum(tuple(cls), rep, node, total)
            for cls, rep, node, total in zip(classes, reps, nodes, totals)]


def split_semi_class(terms: Sequence[tuple[int, PpFormula]], b: Structure,
                     sum_oracle: CountOracle, *,
                     validate: bool = True) -> list[int]:
    """Recover each |phi_i(B)| from an oracle for the weighted class sum.

    One oracle call per recursion level: the minimal formula in the
    homomorphism order is isolated on B x C (everything else vanishes there),
    divided out exactly, and the remaining terms are handled recursively
    against a synthesized oracle for the smaller sum.
    """
    if not terms:
        raise ValidationError("empty term list")
    for coeff, _f in terms:
        if coeff == 0:
            raise PreconditionError("zero coefficient in class")
    if len(terms) == 1:
        coeff, f = terms[0]
        value = _exact_div(sum_oracle(b), coeff, "singleton class")
        if value < 0:
            raise OracleInconsistencyError(f"negative count {value} recovered")
        return [value]
    formulas = [f for _c, f in terms]
    idx, c = min_hom_order_witness(formulas, validate=validate)
    coeff = terms[idx][0]
    denom = coeff * count_pp(formulas[idx], c)
    count_idx = _exact_div(sum_oracle(product(b, c)), denom, "class split")
    if count_idx < 0:
        raise OracleInconsistencyError(f"negative count {count_idx} recovered")

    def smaller_sum(b_prime: Structure) -> int:
        value_there = _exact_div(sum_oracle(product(b_prime, c)), denom, "class split")
        return sum_oracle(b_prime) - coeff * value_there

    rest = [t for i, t in enumerate(terms) if i != idx]
    rest_counts = split_semi_class(rest, b, smaller_sum, validate=False)
    out = []
    it = iter(rest_counts)
    for i in range(len(terms)):
        out.append(count_idx if i == idx else next(it))
    return out


def per_term_counts_from_sum_oracle(phi: DisjunctiveEp, star: WeightedPpSum,
                                    b: Structure, oracle: CountOracle, *,
                                    distinguishing: Structure | None = None) -> list[int]:
    """Full recovery of every |psi(B)| for psi in the expansion, from an
    oracle for the whole formula's count: Vandermonde recovery of class sums,
    then splitting inside each class."""
    class_sums = recover_class_sums(phi, star, b, oracle, distinguishing=distinguishing)
    counts: dict[int, int] = {}
    for cls in class_sums:
        members = [star.terms[i] for i in cls.term_indices]
        if len(members) == 1:
            coeff, _f = members[0]
            value = _exact_div(cls.total, coeff, "singleton class")
            if value < 0:
                raise OracleInconsistencyError(f"negative count {value} recovered")
            counts[cls.term_indices[0]] = value
        else:
            def class_sum_oracle(b_prime: Structure, _cls=cls) -> int:
                sums = recover_class_sums(phi, star, b_prime, oracle,
                                          distinguishing=distinguishing)
                for other in sums:
                    if other.term_indices == _cls.term_indices:
                        return other.total
                raise OracleInconsistencyError("class partition changed between calls")

            values = split_semi_class(members, b, class_sum_oracle)
            for i, value in zip(cls.term_indices, values):
                counts[i] = value
    return [counts[i] for i in range(len(star.terms))]


def ep_count_from_pp_oracle(phi: DisjunctiveEp, plus: PlusSet, b: Structure,
                            pp_oracle: PpCountOracle) -> int:
    """Count |phi(B)| given per-formula count oracles for the members of the
    plus set.

    If some sentence disjunct holds on B the answer is |B|^|lib| outright;
    otherwise the surviving expansion terms are summed with their
    coefficients and the dropped terms are answered with zero (they entail a
    sentence disjunct that just failed, so they have no answers).
    """
    if plus.lib != phi.lib:
        raise PreconditionError("plus set does not belong to the given formula")
    n = b.size()
    max_count = n ** len(phi.lib)
    for th in plus.sentences:
        value = pp_oracle(th, b)
        if value not in (0, max_count):
            raise OracleInconsistencyError(
                f"sentence oracle returned {value}, expected 0 or {max_count}")
        if value:
            return max_count
    total = 0
    for (coeff, f), keep in zip(plus.af_star.terms, plus.in_minus):
        if not keep:
            continue
        value = pp_oracle(f, b)
        if value < 0 or value > max_count:
            raise OracleInconsistencyError(f"term oracle returned out-of-range {value}")
        total += coeff * value
    if total < 0 or total > max_count:
        raise OracleInconsistencyError(f"recovered total {total} is out of range")
    return total


def pp_count_from_ep_oracle(psi: PpFormula, phi: DisjunctiveEp, b: Structure,
                            ep_oracle: CountOracle, *,
                            plus: PlusSet | None = None) -> int:
    """Count |psi(B)| for a plus-set member, given a count oracle for phi.

    Sentence disjuncts use the maximum-count test: phi counts (|A|*|B|)^|lib|
    on A x B exactly when B satisfies psi = (A, lib).  Free members are
    recovered through the all-free reduction run against structures carrying
    a factor C (the disjoint union of the surviving term structures), where
    no sentence disjunct can hold and phi agrees with its all-free part.
    """
    from .expansion import plus_set as compute_plus_set

    if plus is None:
        plus = compute_plus_set(phi)
    n = b.size()
    for th in plus.sentences:
        if th.structure == psi.structure and th.lib == psi.lib:
            a = psi.structure
            value = ep_oracle(product(a, b))
            maximum = (a.size() * n) ** len(phi.lib)
            if value > maximum or value < 0:
                raise OracleInconsistencyError(
                    f"oracle returned {value}, above the maximum {maximum}")
            return n ** len(phi.lib) if value == maximum else 0

    minus = plus.minus_terms()
    target = next((i for i, (_c, f) in enumerate(minus)
                   if f.structure == psi.structure and f.lib == psi.lib), None)
    if target is None:
        raise PreconditionError("psi is not a member of the formula's plus set")
    c = disjoint_union_all([f.structure for _coeff, f in minus])
    for th in plus.sentences:
        if find_homomorphism(th.structure, c) is not None:
            raise OracleInconsistencyError(
                "a sentence disjunct holds on the union of surviving terms; "
                "the input was not normalized")
    b_lifted = product(b, c)
    lifted_counts = per_term_counts_from_sum_oracle(phi, plus.af_star, b_lifted, ep_oracle)
    star_index = plus.af_star.terms.index(minus[target])
    on_c = count_pp(psi, c)
    value = _exact_div(lifted_counts[star_index], on_c, "projection to the base structure")
    if value < 0:
        raise OracleInconsistencyError(f"negative count {value} recovered")
    return value
