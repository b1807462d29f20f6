"""Homomorphism search between structures, cores, and hom-sets.

The search is plain backtracking over the source universe with a
most-constrained-variable order, an initial per-position domain pruning pass,
and forward checking after every assignment.  Every map found is re-verified
against all tuples before it is returned.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Mapping, Sequence

from .errors import ValidationError
from .structures import Structure, same_signature


def _constraints(a: Structure) -> list[tuple[str, tuple[str, ...]]]:
    out = []
    for name, ts in a.rels:
        for t in ts:
            out.append((name, t))
    return out


def _initial_domains(a: Structure, b: Structure,
                     partial: Mapping[str, str] | None) -> dict[str, list[str]] | None:
    """Per-element candidate lists after unary (per-position) pruning."""
    domains = {e: set(b.universe) for e in a.universe}
    if partial:
        for e, v in partial.items():
            if e not in domains:
                raise ValidationError(f"partial map mentions {e!r} outside the universe")
            if v not in domains[e]:
                return None
            domains[e] = {v}
    for name, t in _constraints(a):
        rows = b.rel(name)
        if not rows:
            return None
        for pos, e in enumerate(t):
            allowed = {row[pos] for row in rows}
            domains[e] &= allowed
            if not domains[e]:
                return None
    return {e: sorted(d) for e, d in domains.items()}


def _verify(a: Structure, b: Structure, h: Mapping[str, str]) -> bool:
    return all(tuple(h[e] for e in t) in b.rel(name) for name, t in _constraints(a))


class _Search:
    def __init__(self, a: Structure, b: Structure, domains: dict[str, list[str]],
                 bijection_on: tuple[tuple[str, ...], set[str]] | None = None):
        self.a = a
        self.b = b
        self.domains = domains
        self.constraints = _constraints(a)
        self.by_elem: dict[str, list[int]] = {e: [] for e in a.universe}
        for idx, (_name, t) in enumerate(self.constraints):
            for e in set(t):
                self.by_elem[e].append(idx)
        # bijection_on = (source elements, allowed target set); sources are
        # assigned first, pairwise distinctly, inside the backtracker.
        self.bij_sources = bijection_on[0] if bijection_on else ()
        self.bij_targets = bijection_on[1] if bijection_on else set()

    def _pick(self, assigned: dict[str, str]) -> str:
        for e in self.bij_sources:
            if e not in assigned:
                return e
        best, best_key = None, None
        for e in self.a.universe:
            if e in assigned:
                continue
            key = (len(self.domains[e]), -len(self.by_elem[e]), e)
            if best_key is None or key < best_key:
                best, best_key = e, key
        return best

    def _consistent(self, assigned: dict[str, str], e: str) -> bool:
        """Forward check all constraints touching `e`; shrink open domains."""
        for idx in self.by_elem[e]:
            name, t = self.constraints[idx]
            rows = self.b.rel(name)
            open_pos = [p for p, x in enumerate(t) if x not in assigned]
            support = [row for row in rows
                       if all(row[p] == assigned[x]
                              for p, x in enumerate(t) if x in assigned)]
            if not support:
                return False
            for p in open_pos:
                x = t[p]
                allowed = {row[p] for row in support}
                self.domains[x] = [v for v in self.domains[x] if v in allowed]
                if not self.domains[x]:
                    return False
        return True

    def run(self) -> dict[str, str] | None:
        return self._extend({})

    def _extend(self, assigned: dict[str, str]) -> dict[str, str] | None:
        if len(assigned) == len(self.a.universe):
            return dict(assigned)
        e = self._pick(assigned)
        in_bij = e in self.bij_sources
        used = {assigned[x] for x in self.bij_sources if x in assigned}
        saved_domains = self.domains
        for v in self.domains[e]:
            if in_bij and (v not in self.bij_targets or v in used):
                continue
            assigned[e] = v
            self.domains = {x: list(d) for x, d in saved_domains.items()}
            self.domains[e] = [v]
            if self._consistent(assigned, e):
                result = self._extend(assigned)
                if result is not None:
                    return result
            del assigned[e]
        self.domains = saved_domains
        return None


def find_homomorphism(a: Structure, b: Structure,
                      partial: Mapping[str, str] | None = None) -> dict[str, str] | None:
    """One homomorphism a -> b extending `partial`, or None."""
    same_signature(a, b)
    if not a.universe:
        return {}
    if not b.universe:
        return None
    domains = _initial_domains(a, b, partial)
    if domains is None:
        return None
    h = _Search(a, b, domains).run()
    if h is not None:
        assert _verify(a, b, h), "search produced a non-homomorphism"
    return h


def find_lib_bijection_hom(a: Structure, b: Structure,
                           s1: Sequence[str], s2: Sequence[str]) -> dict[str, str] | None:
    """Homomorphism a -> b whose restriction to s1 is a bijection onto s2."""
    same_signature(a, b)
    if len(s1) != len(s2):
        return None
    if not a.universe:
        return {} if not s1 else None
    if not b.universe:
        return None
    domains = _initial_domains(a, b, None)
    if domains is None:
        return None
    targets = set(s2)
    for e in s1:
        domains[e] = [v for v in domains[e] if v in targets]
        if not domains[e]:
            return None
    h = _Search(a, b, domains, bijection_on=(tuple(s1), targets)).run()
    if h is not None:
        assert _verify(a, b, h)
        assert {h[e] for e in s1} == targets
    return h


def hom_set(a: Structure, b: Structure, s: Sequence[str]) -> set[tuple[str, ...]]:
    """All maps s -> B extendable to full homomorphisms, as tuples in s-order.

    This is the answer set of the primitive positive formula (a, s) on b.
    """
    same_signature(a, b)
    for e in s:
        if e not in a.universe:
            raise ValidationError(f"{e!r} is not in the universe of the source structure")
    out = set()
    for values in itertools.product(sorted(b.universe), repeat=len(s)):
        partial = dict(zip(s, values))
        if find_homomorphism(a, b, partial) is not None:
            out.add(values)
    return out


def hom_equivalent(a: Structure, b: Structure) -> bool:
    """True iff homomorphisms exist in both directions."""
    return (find_homomorphism(a, b) is not None
            and find_homomorphism(b, a) is not None)


def core(x: Structure) -> Structure:
    """An induced substructure that is a core and hom-equivalent to `x`.

    Repeatedly drops a single element e such that x maps into x - e; when no
    single element can be dropped, every endomorphism is surjective and the
    remainder is a core.
    """
    current = x
    changed = True
    while changed and len(current.universe) > 1:
        changed = False
        for e in current.universe:
            sub = current.induced([u for u in current.universe if u != e])
            if find_homomorphism(current, sub) is not None:
                current = sub
                changed = True
                break
    return current


def retracts_onto_proper_substructure(x: Structure) -> bool:
    """True iff x maps homomorphically into some one-element-deleted copy."""
    if len(x.universe) <= 1:
        return False
    return any(
        find_homomorphism(x, x.induced([u for u in x.universe if u != e])) is not None
        for e in x.universe)


def all_homomorphisms(a: Structure, b: Structure) -> Iterator[dict[str, str]]:
    """Every homomorphism a -> b (test-scale enumeration)."""
    same_signature(a, b)
    for values in itertools.product(sorted(b.universe), repeat=len(a.universe)):
        h = dict(zip(a.universe, values))
        if _verify(a, b, h):
            yield h
