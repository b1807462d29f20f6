"""Finite relational structures and their algebra.

A structure is a named universe plus, per relation symbol, a set of tuples
over the universe.  Everything here is immutable after construction and all
operations are pure, so values can be shared freely between threads.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import SignatureMismatchError, ValidationError

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[0-9]+")

# Relation names generated by formula augmentation start with this prefix;
# user signatures may not use it, which makes clashes impossible.
AUG_RELATION_PREFIX = "__lib_"


def _check_name(kind: str, name: str) -> None:
    if not NAME_RE.fullmatch(name):
        raise ValidationError(f"invalid {kind} name: {name!r}")


@dataclass(frozen=True)
class Signature:
    """Relational vocabulary: an ordered map from relation name to arity >= 1."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        seen = set()
        for name, arity in self.relations:
            _check_name("relation", name)
            if name in seen:
                raise ValidationError(f"duplicate relation name: {name}")
            if arity < 1:
                raise ValidationError(f"relation {name} has arity {arity} < 1")
            seen.add(name)

    @staticmethod
    def of(**arities: int) -> "Signature":
        return Signature(tuple(arities.items()))

    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    def arity(self, name: str) -> int:
        for rel, arity in self.relations:
            if rel == name:
                return arity
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(rel == name for rel, _ in self.relations)

    def extended(self, extra: Sequence[tuple[str, int]]) -> "Signature":
        return Signature(self.relations + tuple(extra))


def _freeze_relations(signature: Signature,
                      relations: Mapping[str, Iterable[tuple[str, ...]]] | None,
                      universe: Sequence[str]) -> tuple[tuple[str, tuple[tuple[str, ...], ...]], ...]:
    elems = set(universe)
    given = dict(relations or {})
    out = []
    for name, arity in signature.relations:
        tuples = set(tuple(t) for t in given.pop(name, ()))
        for t in tuples:
            if len(t) != arity:
                raise ValidationError(
                    f"tuple {t} for relation {name}/{arity} has length {len(t)}")
            for e in t:
                if e not in elems:
                    raise ValidationError(
                        f"tuple entry {e!r} of relation {name} is not in the universe")
        out.append((name, tuple(sorted(tuples))))
    if given:
        raise ValidationError(f"relations not in signature: {sorted(given)}")
    return tuple(out)


@dataclass(frozen=True)
class Structure:
    """A finite relational structure with string-named elements.

    The universe keeps its construction order; serialization sorts it, so
    equality is order-sensitive but `serialize()` is canonical.
    """

    signature: Signature
    universe: tuple[str, ...]
    rels: tuple[tuple[str, tuple[tuple[str, ...], ...]], ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        if len(set(self.universe)) != len(self.universe):
            raise ValidationError("universe has duplicate elements")
        object.__setattr__(self, "_index", {name: frozenset(ts) for name, ts in self.rels})

    @staticmethod
    def make(signature: Signature, universe: Sequence[str],
             relations: Mapping[str, Iterable[tuple[str, ...]]] | None = None) -> "Structure":
        return Structure(signature, tuple(universe),
                         _freeze_relations(signature, relations, universe))

    def rel(self, name: str) -> frozenset[tuple[str, ...]]:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"relation {name} not in signature") from None

    def relation_dict(self) -> dict[str, frozenset[tuple[str, ...]]]:
        return dict(self._index)

    def size(self) -> int:
        return len(self.universe)

    def total_tuples(self) -> int:
        return sum(len(ts) for _, ts in self.rels)

    def induced(self, keep: Iterable[str]) -> "Structure":
        """Induced substructure on `keep` (universe order preserved)."""
        keep_set = set(keep)
        new_universe = tuple(e for e in self.universe if e in keep_set)
        rels = {name: [t for t in ts if all(e in keep_set for e in t)]
                for name, ts in self.rels}
        return Structure.make(self.signature, new_universe, rels)

    def renamed(self, mapping: Mapping[str, str]) -> "Structure":
        """Injectively rename elements."""
        if len(set(mapping.values())) != len(mapping):
            raise ValidationError("renaming is not injective")
        new_universe = tuple(mapping.get(e, e) for e in self.universe)
        rels = {name: [tuple(mapping.get(e, e) for e in t) for t in ts]
                for name, ts in self.rels}
        return Structure.make(self.signature, new_universe, rels)

    def serialize(self, name: str = "s") -> str:
        """Canonical text form mirroring the structure-file grammar."""
        lines = [f"structure {name}"]
        lines.append("domain " + " ".join(sorted(self.universe)))
        for rel, _arity in self.signature.relations:
            ts = sorted(self.rel(rel))
            if ts:
                rendered = " ".join("(" + ",".join(t) + ")" for t in ts)
                lines.append(f"rel {rel}: {rendered}")
        lines.append("end")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.serialize()


def same_signature(a: Structure, b: Structure) -> None:
    if a.signature != b.signature:
        raise SignatureMismatchError(
            f"signatures differ: {a.signature.relations} vs {b.signature.relations}")


def unit_structure(signature: Signature) -> Structure:
    """One-element structure where every relation holds its constant tuple."""
    rels = {name: [("a",) * arity] for name, arity in signature.relations}
    return Structure.make(signature, ("a",), rels)


def full_structure(signature: Signature, size: int) -> Structure:
    """Structure on `size` elements where every relation is total."""
    universe = tuple(str(i) for i in range(size))
    rels = {name: list(itertools.product(universe, repeat=arity))
            for name, arity in signature.relations}
    return Structure.make(signature, universe, rels)


def _pair(a: str, b: str) -> str:
    return f"({a}|{b})"


def product(d1: Structure, d2: Structure) -> Structure:
    """Direct product: tuples hold exactly when both projections do."""
    same_signature(d1, d2)
    universe = tuple(_pair(a, b) for a in d1.universe for b in d2.universe)
    rels = {}
    for name, _arity in d1.signature.relations:
        out = []
        for t1 in sorted(d1.rel(name)):
            for t2 in sorted(d2.rel(name)):
                out.append(tuple(_pair(a, b) for a, b in zip(t1, t2)))
        rels[name] = out
    return Structure.make(d1.signature, universe, rels)


def power(base: Structure, exponent: int) -> Structure:
    """`exponent`-fold direct product; the unit structure for exponent 0."""
    if exponent < 0:
        raise ValidationError("negative exponent")
    result = unit_structure(base.signature)
    for _ in range(exponent):
        result = product(result, base)
    return result


def disjoint_union_all(parts: Sequence[Structure]) -> Structure:
    """Disjoint union; elements of part i are renamed with suffix ``#i``."""
    if not parts:
        raise ValidationError("disjoint union of no structures")
    sig = parts[0].signature
    universe: list[str] = []
    rels: dict[str, list[tuple[str, ...]]] = {name: [] for name, _ in sig.relations}
    for i, part in enumerate(parts):
        same_signature(parts[0], part)
        tag = {e: f"{e}#{i}" for e in part.universe}
        universe.extend(tag[e] for e in part.universe)
        for name, ts in part.rels:
            rels[name].extend(tuple(tag[e] for e in t) for t in ts)
    return Structure.make(sig, tuple(universe), rels)


def disjoint_union(b: Structure, k: int, i: Structure) -> Structure:
    """B + k copies of I: B's elements keep their names, copies get ``#j``."""
    if k < 0:
        raise ValidationError("negative copy count")
    same_signature(b, i)
    universe = list(b.universe)
    rels = {name: list(ts) for name, ts in b.rels}
    for j in range(1, k + 1):
        tag = {e: f"{e}#{j}" for e in i.universe}
        universe.extend(tag[e] for e in i.universe)
        for name, ts in i.rels:
            rels[name].extend(tuple(tag[e] for e in t) for t in ts)
    return Structure.make(b.signature, tuple(universe), rels)


def has_all_loops_element(s: Structure) -> bool:
    """True iff some element carries the constant tuple of every relation.

    Equivalent to the unit structure mapping homomorphically into `s`, and to
    every primitive positive formula having at least one answer on `s`.
    """
    return any(all((e,) * arity in s.rel(name) for name, arity in s.signature.relations)
               for e in s.universe)


def enumerate_structures(signature: Signature, max_size: int,
                         min_size: int = 1) -> Iterator[Structure]:
    """All structures over `signature`, ordered by universe size, then total
    tuple count, then lexicographic tuple choice.  Element names are 1..n.

    The order is fixed so that witness searches are reproducible.
    """
    for n in range(min_size, max_size + 1):
        universe = tuple(str(i) for i in range(1, n + 1))
        slots = [(name, t)
                 for name, arity in signature.relations
                 for t in itertools.product(universe, repeat=arity)]
        slots.sort()
        for count in range(len(slots) + 1):
            for chosen in itertools.combinations(slots, count):
                rels: dict[str, list[tuple[str, ...]]] = {}
                for name, t in chosen:
                    rels.setdefault(name, []).append(t)
                yield Structure.make(signature, universe, rels)
