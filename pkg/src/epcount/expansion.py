"""Inclusion-exclusion expansion of disjunctive formulas into weighted sums
of pp-formulas, with counting-equivalence cancellation, plus the general-case
split into the all-free part, its surviving terms, and sentence disjuncts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

from .equivalence import counting_equivalent
from .errors import PreconditionError, ValidationError
from .logic import (DisjunctiveEp, PpFormula, canonical_pp_text, conjoin_pp, entails)


@dataclass(frozen=True)
class WeightedPpSum:
    """Sum of c_i * |phi_i(.)| with nonzero integer coefficients and pairwise
    non-counting-equivalent formulas sharing one liberal set."""

    lib: tuple[str, ...]
    terms: tuple[tuple[int, PpFormula], ...]

    def __post_init__(self):
        for coeff, f in self.terms:
            if coeff == 0:
                raise ValidationError("zero coefficient in weighted sum")
            if f.lib != self.lib:
                raise ValidationError("term does not carry the sum's liberal set")

    def serialize(self) -> str:
        return "\n".join(f"{coeff} {canonical_pp_text(f)}" for coeff, f in self.terms)

    def formulas(self) -> tuple[PpFormula, ...]:
        return tuple(f for _c, f in self.terms)


class AllFreeSplit(NamedTuple):
    free: tuple[PpFormula, ...]
    sentences: tuple[PpFormula, ...]


def all_free_part(phi: DisjunctiveEp) -> AllFreeSplit:
    """Partition the disjuncts into free ones (some atom uses a liberal
    variable) and sentence disjuncts."""
    free = tuple(d for d in phi.disjuncts if d.is_free())
    sentences = tuple(d for d in phi.disjuncts if not d.is_free())
    return AllFreeSplit(free, sentences)


def star_expansion(phi: DisjunctiveEp) -> WeightedPpSum:
    """Expand an all-free disjunction by inclusion-exclusion and merge
    counting-equivalent terms.

    Every nonempty disjunct subset J contributes its conjunction with sign
    (-1)^(|J|+1); terms found counting equivalent are merged by summing
    coefficients (the kept representative is the one with the smaller
    canonical serialization), and zero coefficients are dropped.  Identical
    conjunctions cancel through the same merge, since syntactic equality is a
    special case of counting equivalence.
    """
    for d in phi.disjuncts:
        if not d.is_free():
            raise PreconditionError("expansion requires every disjunct to be free")
    s = len(phi.disjuncts)
    merged: list[list] = []  # [coefficient, formula, canonical text]
    for size in range(1, s + 1):
        for subset in itertools.combinations(range(s), size):
            conj = conjoin_pp([phi.disjuncts[i] for i in subset])
            sign = 1 if size % 2 == 1 else -1
            text = canonical_pp_text(conj)
            for entry in merged:
                if counting_equivalent(entry[1], conj).equivalent:
                    entry[0] += sign
                    if text < entry[2]:
                        entry[1], entry[2] = conj, text
                    break
            else:
                merged.append([sign, conj, text])
    kept = [(coeff, f) for coeff, f, _text in merged if coeff != 0]
    kept.sort(key=lambda pair: canonical_pp_text(pair[1]))
    return WeightedPpSum(phi.lib, tuple(kept))


@dataclass(frozen=True)
class PlusSet:
    """The general-case decomposition of a normalized disjunctive formula:
    the expansion of its all-free part, a flag per term marking whether it
    avoids entailing every sentence disjunct, and the sentence disjuncts."""

    lib: tuple[str, ...]
    af_star: WeightedPpSum
    in_minus: tuple[bool, ...]
    sentences: tuple[PpFormula, ...]

    def __post_init__(self):
        if len(self.in_minus) != len(self.af_star.terms):
            raise ValidationError("one membership flag per expansion term required")

    def minus_terms(self) -> tuple[tuple[int, PpFormula], ...]:
        return tuple(term for term, keep in zip(self.af_star.terms, self.in_minus) if keep)

    def plus_formulas(self) -> tuple[PpFormula, ...]:
        return tuple(f for _c, f in self.minus_terms()) + self.sentences


def _check_normalized(phi: DisjunctiveEp) -> None:
    sentences = [d for d in phi.disjuncts if d.is_sentence()]
    for th in sentences:
        for d in phi.disjuncts:
            if d is th:
                continue
            if entails(d, th):
                raise PreconditionError(
                    "input is not normalized: a disjunct entails a sentence disjunct")


def plus_set(phi: DisjunctiveEp) -> PlusSet:
    """Compute the expansion of the all-free part and mark the terms that do
    not logically entail any sentence disjunct."""
    _check_normalized(phi)
    free, sentences = all_free_part(phi)
    if free:
        star = star_expansion(DisjunctiveEp(phi.lib, free))
    else:
        star = WeightedPpSum(phi.lib, ())
    flags = tuple(not any(entails(f, th) for th in sentences)
                  for _c, f in star.terms)
    return PlusSet(phi.lib, star, flags, sentences)
