"""Seeded random generators for structures and formulas.

Used by the self-test command and the property suites; everything is driven
by a caller-supplied random.Random so runs are reproducible.
"""

from __future__ import annotations

import random
from typing import Sequence

from .logic import (And, Atom, DisjunctiveEp, EpFormula, Exists, Node, Or, PpFormula, Top,
                    exists_all)
from .structures import Signature, Structure


def random_structure(rng: random.Random, signature: Signature, max_size: int, *,
                     min_size: int = 1, density: float = 0.4) -> Structure:
    n = rng.randint(min_size, max_size)
    universe = tuple(str(i) for i in range(1, n + 1))
    rels = {}
    for name, arity in signature.relations:
        tuples = []
        for combo in _all_tuples(universe, arity):
            if rng.random() < density:
                tuples.append(combo)
        rels[name] = tuples
    return Structure.make(signature, universe, rels)


def _all_tuples(universe: Sequence[str], arity: int):
    if arity == 1:
        return [(e,) for e in universe]
    out = [()]
    for _ in range(arity):
        out = [t + (e,) for t in out for e in universe]
    return out


def random_pp(rng: random.Random, signature: Signature, *,
              lib_size: int = 2, extra_vars: int = 2, max_atoms: int = 3,
              require_free: bool = False) -> PpFormula:
    """Random structure-view pp-formula.  Liberal variables are x1..xk,
    quantified ones y1..ym; some may stay isolated."""
    lib = tuple(f"x{i}" for i in range(1, lib_size + 1))
    quantified = tuple(f"y{i}" for i in range(1, rng.randint(0, extra_vars) + 1))
    universe = lib + quantified
    for _ in range(64):
        rels: dict[str, list[tuple[str, ...]]] = {}
        for _i in range(rng.randint(1, max_atoms)):
            name, arity = rng.choice(signature.relations)
            rels.setdefault(name, []).append(
                tuple(rng.choice(universe) for _ in range(arity)))
        pp = PpFormula(Structure.make(signature, universe, rels), lib)
        if not require_free or pp.is_free():
            return pp
    raise RuntimeError("failed to generate a free formula")


def random_sentence_pp(rng: random.Random, signature: Signature, lib: Sequence[str], *,
                       quantified_vars: int = 3, max_atoms: int = 3) -> PpFormula:
    """Sentence disjunct: atoms only over quantified variables."""
    quantified = tuple(f"z{i}" for i in range(1, quantified_vars + 1))
    universe = tuple(lib) + quantified
    rels: dict[str, list[tuple[str, ...]]] = {}
    for _i in range(rng.randint(1, max_atoms)):
        name, arity = rng.choice(signature.relations)
        rels.setdefault(name, []).append(
            tuple(rng.choice(quantified) for _ in range(arity)))
    return PpFormula(Structure.make(signature, universe, rels), tuple(lib))


def random_all_free_disjunctive(rng: random.Random, signature: Signature, *,
                                max_disjuncts: int = 3, lib_size: int = 2,
                                extra_vars: int = 1, max_atoms: int = 2) -> DisjunctiveEp:
    count = rng.randint(1, max_disjuncts)
    disjuncts = [random_pp(rng, signature, lib_size=lib_size, extra_vars=extra_vars,
                           max_atoms=max_atoms, require_free=True)
                 for _ in range(count)]
    return DisjunctiveEp(disjuncts[0].lib, tuple(disjuncts))


def random_ep_ast(rng: random.Random, signature: Signature, *,
                  lib_size: int = 3, depth: int = 3) -> EpFormula:
    """Random existential positive AST (for evaluator cross-checks)."""
    lib = tuple(f"x{i}" for i in range(1, lib_size + 1))
    counter = [0]

    def gen(d: int, scope: tuple[str, ...]) -> Node:
        choices = ["atom", "atom", "and", "or"]
        if d <= 0:
            choices = ["atom", "atom", "true"]
        else:
            choices.append("exists")
            choices.append("true")
        kind = rng.choice(choices)
        if kind == "atom":
            name, arity = rng.choice(signature.relations)
            return Atom(name, tuple(rng.choice(scope) for _ in range(arity)))
        if kind == "true":
            return Top()
        if kind == "and":
            return And(gen(d - 1, scope), gen(d - 1, scope))
        if kind == "or":
            return Or(gen(d - 1, scope), gen(d - 1, scope))
        var = f"q{counter[0]}"
        counter[0] += 1
        return Exists(var, gen(d - 1, scope + (var,)))

    return EpFormula(signature, lib, gen(depth, lib))


def random_normalized_ep(rng: random.Random, signature: Signature, *,
                         max_free_disjuncts: int = 2, lib_size: int = 2,
                         with_sentence: bool = False) -> DisjunctiveEp:
    """Random normalized disjunctive formula, optionally with a sentence
    disjunct that survives normalization."""
    from .logic import normalize_ep, disjunctive_to_ep

    lib = tuple(f"x{i}" for i in range(1, lib_size + 1))
    disjuncts = [random_pp(rng, signature, lib_size=lib_size, extra_vars=1,
                           max_atoms=2, require_free=True)
                 for _ in range(rng.randint(1, max_free_disjuncts))]
    if with_sentence:
        disjuncts.append(random_sentence_pp(rng, signature, lib, quantified_vars=2,
                                            max_atoms=2))
    raw = DisjunctiveEp(lib, tuple(disjuncts))
    return normalize_ep(disjunctive_to_ep(raw))
