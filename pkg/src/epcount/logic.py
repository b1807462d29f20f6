"""Formula ASTs and the primitive positive structure-view correspondence.

An existential positive formula is an AST over atoms, conjunction,
disjunction and existential quantification, together with a declared set of
liberal variables (a superset of its free variables) over which answers are
counted.  A prenex primitive positive formula is interchangeable with a pair
(structure, liberal set): the universe holds the liberal set plus all formula
variables, and a relation holds exactly the atom tuples.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import LibMismatchError, PreconditionError, SignatureMismatchError, ValidationError
from .structures import AUG_RELATION_PREFIX, NAME_RE, Signature, Structure

RESERVED_VAR_RE = re.compile(r"_q[0-9]+")


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Node"


@dataclass(frozen=True)
class Top:
    """The empty conjunction, written `true`."""


Node = Union[Atom, And, Or, Exists, Top]


def free_vars(node: Node) -> frozenset[str]:
    if isinstance(node, Atom):
        return frozenset(node.args)
    if isinstance(node, (And, Or)):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Exists):
        return free_vars(node.body) - {node.var}
    return frozenset()


def bound_vars(node: Node) -> list[str]:
    """All Exists binders, in preorder, with duplicates preserved."""
    if isinstance(node, (And, Or)):
        return bound_vars(node.left) + bound_vars(node.right)
    if isinstance(node, Exists):
        return [node.var] + bound_vars(node.body)
    return []


def atoms_of(node: Node) -> list[Atom]:
    if isinstance(node, Atom):
        return [node]
    if isinstance(node, (And, Or)):
        return atoms_of(node.left) + atoms_of(node.right)
    if isinstance(node, Exists):
        return atoms_of(node.body)
    return []


def and_all(parts: Sequence[Node]) -> Node:
    if not parts:
        return Top()
    node = parts[0]
    for p in parts[1:]:
        node = And(node, p)
    return node


def or_all(parts: Sequence[Node]) -> Node:
    if not parts:
        raise ValidationError("empty disjunction")
    node = parts[0]
    for p in parts[1:]:
        node = Or(node, p)
    return node


def exists_all(binders: Sequence[str], body: Node) -> Node:
    for v in reversed(binders):
        body = Exists(v, body)
    return body


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EpFormula:
    """Existential positive formula with a declared liberal-variable set.

    Invariants: every atom matches the signature, free(body) is contained in
    lib, and bound variables are pairwise distinct and disjoint from lib
    (prenex hygiene; the parser guarantees it by renaming).
    """

    signature: Signature
    lib: tuple[str, ...]
    body: Node

    def __post_init__(self):
        if len(set(self.lib)) != len(self.lib):
            raise ValidationError("duplicate liberal variables")
        for v in self.lib:
            if not NAME_RE.fullmatch(v):
                raise ValidationError(f"invalid variable name: {v!r}")
        for atom in atoms_of(self.body):
            if atom.relation not in self.signature:
                raise ValidationError(f"unknown relation in atom: {atom.relation}")
            arity = self.signature.arity(atom.relation)
            if len(atom.args) != arity:
                raise ValidationError(
                    f"atom {atom.relation} has {len(atom.args)} arguments, arity is {arity}")
        bound = bound_vars(self.body)
        if len(set(bound)) != len(bound):
            raise ValidationError("bound variables must be pairwise distinct (rename apart)")
        clash = set(bound) & set(self.lib)
        if clash:
            raise ValidationError(f"variables both liberal and quantified: {sorted(clash)}")
        missing = free_vars(self.body) - set(self.lib)
        if missing:
            raise ValidationError(f"free variables not declared liberal: {sorted(missing)}")


@dataclass(frozen=True)
class PpFormula:
    """Prenex primitive positive formula in structure view: a pair (A, S)."""

    structure: Structure
    lib: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.lib)) != len(self.lib):
            raise ValidationError("duplicate liberal variables")
        universe = set(self.structure.universe)
        missing = [v for v in self.lib if v not in universe]
        if missing:
            raise ValidationError(f"liberal variables outside the universe: {missing}")

    @property
    def signature(self) -> Signature:
        return self.structure.signature

    def quantified(self) -> tuple[str, ...]:
        libset = set(self.lib)
        return tuple(e for e in self.structure.universe if e not in libset)

    def free(self) -> tuple[str, ...]:
        """Liberal variables that occur in some atom."""
        used = {e for _name, ts in self.structure.rels for t in ts for e in t}
        return tuple(v for v in self.lib if v in used)

    def is_free(self) -> bool:
        return bool(self.free())

    def is_sentence(self) -> bool:
        return not self.is_free()

    def is_liberal(self) -> bool:
        return bool(self.lib)


@dataclass(frozen=True)
class DisjunctiveEp:
    """Disjunction of prenex pp-formulas, all sharing one liberal set."""

    lib: tuple[str, ...]
    disjuncts: tuple[PpFormula, ...]

    def __post_init__(self):
        if not self.disjuncts:
            raise ValidationError("disjunction must have at least one disjunct")
        for d in self.disjuncts:
            if d.lib != self.lib:
                raise ValidationError("all disjuncts must carry the formula's liberal set")

    @property
    def signature(self) -> Signature:
        return self.disjuncts[0].signature


# ---------------------------------------------------------------------------
# Structure view conversions
# ---------------------------------------------------------------------------

def to_structure_view(phi: EpFormula) -> PpFormula:
    """Convert a prenex primitive positive EpFormula into its pair form."""
    binders = []
    node = phi.body
    while isinstance(node, Exists):
        binders.append(node.var)
        node = node.body

    def collect(n: Node) -> list[Atom]:
        if isinstance(n, Atom):
            return [n]
        if isinstance(n, Top):
            return []
        if isinstance(n, And):
            return collect(n.left) + collect(n.right)
        if isinstance(n, Or):
            raise ValidationError("formula contains disjunction; not primitive positive")
        raise ValidationError("formula is not prenex (quantifier below a connective)")

    atoms = collect(node)
    universe = list(phi.lib) + binders
    rels: dict[str, list[tuple[str, ...]]] = {}
    for atom in atoms:
        rels.setdefault(atom.relation, []).append(atom.args)
    structure = Structure.make(phi.signature, universe, rels)
    return PpFormula(structure, phi.lib)


def pp_to_ep(pp: PpFormula) -> EpFormula:
    """The AST form of a structure-view pp-formula (deterministic rendering)."""
    atoms = sorted((name, t) for name, ts in pp.structure.rels for t in ts)
    body = and_all([Atom(name, t) for name, t in atoms])
    body = exists_all(pp.quantified(), body)
    return EpFormula(pp.signature, pp.lib, body)


def _render_body(quantified: Sequence[str], atoms: Sequence[tuple[str, tuple[str, ...]]]) -> str:
    conj = " & ".join(f"{name}({','.join(args)})" for name, args in atoms) or "true"
    if quantified:
        return f"exists {','.join(quantified)}. {conj}"
    return conj


def from_structure_view(pp: PpFormula) -> str:
    """Prenex formula text: universe elements outside lib are quantified."""
    atoms = sorted((name, t) for name, ts in pp.structure.rels for t in ts)
    return f"lib({','.join(pp.lib)}): {_render_body(pp.quantified(), atoms)}"


def canonical_pp_text(pp: PpFormula) -> str:
    """Serialization used for ordering and deduplication.

    Quantified variables are renamed to _q0, _q1, ... in sorted-name order, so
    the text does not depend on bound-variable spelling; liberal names are
    user-visible and kept.
    """
    qmap = {q: f"_q{i}" for i, q in enumerate(sorted(pp.quantified()))}
    atoms = sorted((name, tuple(qmap.get(e, e) for e in t))
                   for name, ts in pp.structure.rels for t in ts)
    quantified = sorted(qmap.values(), key=lambda s: int(s[2:]))
    return f"lib({','.join(pp.lib)}): {_render_body(quantified, atoms)}"


# ---------------------------------------------------------------------------
# Augmentation and entailment
# ---------------------------------------------------------------------------

def augment(pp: PpFormula) -> Structure:
    """Extend the structure with one singleton unary relation per liberal
    element, pinning it under homomorphisms."""
    extra = []
    for v in pp.lib:
        name = AUG_RELATION_PREFIX + v
        if name in pp.signature:
            raise ValidationError(f"reserved relation name already in signature: {name}")
        extra.append((name, 1))
    sig = pp.signature.extended(extra)
    rels = {name: list(ts) for name, ts in pp.structure.rels}
    for v in pp.lib:
        rels[AUG_RELATION_PREFIX + v] = [(v,)]
    return Structure.make(sig, pp.structure.universe, rels)


def entails(p: PpFormula, q: PpFormula) -> bool:
    """True iff p logically entails q (every answer of p is one of q).

    Decided by searching a homomorphism from q's augmented structure into
    p's augmented structure.
    """
    from .homs import find_homomorphism
    if p.signature != q.signature:
        raise SignatureMismatchError("entailment across different signatures")
    if set(p.lib) != set(q.lib):
        raise LibMismatchError("entailment requires identical liberal sets")
    return find_homomorphism(augment(q), augment(p)) is not None


# ---------------------------------------------------------------------------
# Components and hat
# ---------------------------------------------------------------------------

def components(pp: PpFormula) -> list[PpFormula]:
    """Split into connected components of the formula graph.

    Vertices are the universe, edges are co-occurrence in a tuple; each
    component keeps its share of the liberal set, so isolated liberal
    variables come back as singleton components with empty relations.
    """
    adj: dict[str, set[str]] = {e: set() for e in pp.structure.universe}
    for _name, ts in pp.structure.rels:
        for t in ts:
            uniq = sorted(set(t))
            for i, a in enumerate(uniq):
                for b in uniq[i + 1:]:
                    adj[a].add(b)
                    adj[b].add(a)
    seen: set[str] = set()
    out = []
    for start in pp.structure.universe:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in sorted(adj[v]):
                if u not in comp:
                    comp.add(u)
                    stack.append(u)
        seen |= comp
        sub = pp.structure.induced(comp)
        lib_c = tuple(v for v in pp.lib if v in comp)
        out.append(PpFormula(sub, lib_c))
    return out


def hat(pp: PpFormula) -> PpFormula:
    """Drop every component without liberal variables.

    Counts agree with the original wherever the original is satisfiable,
    which is what makes this the right normal form for semi-counting
    comparisons.
    """
    if not pp.lib:
        raise PreconditionError("hat is defined only for formulas with liberal variables")
    keep: set[str] = set()
    for comp in components(pp):
        if comp.lib:
            keep |= set(comp.structure.universe)
    return PpFormula(pp.structure.induced(keep), pp.lib)


# ---------------------------------------------------------------------------
# Conjunction
# ---------------------------------------------------------------------------

def _fresh_names(count: int, avoid: set[str], start: int = 0) -> list[str]:
    names = []
    i = start
    while len(names) < count:
        cand = f"_q{i}"
        if cand not in avoid:
            names.append(cand)
        i += 1
    return names


def conjoin_pp(phis: Sequence[PpFormula]) -> PpFormula:
    """Conjunction of pp-formulas sharing a liberal set.

    Quantified variables are renamed pairwise apart, then the structures are
    glued on the shared liberal set.
    """
    if not phis:
        raise ValidationError("empty conjunction list")
    first = phis[0]
    libset = set(first.lib)
    for p in phis[1:]:
        if p.signature != first.signature:
            raise SignatureMismatchError("conjunction across different signatures")
        if set(p.lib) != libset:
            raise LibMismatchError("conjunction requires identical liberal sets")
    universe = list(first.lib)
    rels: dict[str, list[tuple[str, ...]]] = {name: [] for name, _ in first.signature.relations}
    counter = 0
    for p in phis:
        quantified = p.quantified()
        fresh = _fresh_names(len(quantified), libset, start=counter)
        counter += len(quantified)
        rename = dict(zip(quantified, fresh))
        universe.extend(fresh)
        for name, ts in p.structure.rels:
            rels[name].extend(tuple(rename.get(e, e) for e in t) for t in ts)
    return PpFormula(Structure.make(first.signature, universe, rels), first.lib)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def _dnf(node: Node) -> list[tuple[tuple[Atom, ...], tuple[str, ...]]]:
    """Disjuncts as (atoms, binders); sound because binders are renamed apart
    and existential quantification distributes over disjunction."""
    if isinstance(node, Atom):
        return [((node,), ())]
    if isinstance(node, Top):
        return [((), ())]
    if isinstance(node, Or):
        return _dnf(node.left) + _dnf(node.right)
    if isinstance(node, And):
        return [(a1 + a2, b1 + b2)
                for a1, b1 in _dnf(node.left)
                for a2, b2 in _dnf(node.right)]
    if isinstance(node, Exists):
        return [(atoms, (node.var,) + binders) for atoms, binders in _dnf(node.body)]
    raise ValidationError(f"unknown AST node: {node!r}")


def normalize_ep(phi: EpFormula) -> DisjunctiveEp:
    """Logically equivalent disjunction of prenex pp-formulas, normalized.

    Normalized means no disjunct entails a sentence disjunct; offending
    disjuncts are deleted greedily in canonical order until a fixed point.
    Disjunct order is canonical so downstream output is deterministic.
    """
    libset = set(phi.lib)
    disjuncts: list[PpFormula] = []
    seen_keys: set[str] = set()
    for atoms, binders in _dnf(phi.body):
        used_binders = [b for b in binders]
        fresh = _fresh_names(len(used_binders), libset)
        rename = dict(zip(used_binders, fresh))
        universe = list(phi.lib) + fresh
        rels: dict[str, list[tuple[str, ...]]] = {}
        for atom in atoms:
            rels.setdefault(atom.relation, []).append(
                tuple(rename.get(a, a) for a in atom.args))
        pp = PpFormula(Structure.make(phi.signature, universe, rels), phi.lib)
        key = canonical_pp_text(pp)
        if key not in seen_keys:
            seen_keys.add(key)
            disjuncts.append(pp)
    disjuncts.sort(key=canonical_pp_text)

    changed = True
    while changed:
        changed = False
        sentences = [d for d in disjuncts if d.is_sentence()]
        for d in disjuncts:
            for th in sentences:
                if th is d:
                    continue
                if entails(d, th):
                    disjuncts.remove(d)
                    changed = True
                    break
            if changed:
                break
    return DisjunctiveEp(phi.lib, tuple(disjuncts))


def disjunctive_to_ep(phi: DisjunctiveEp) -> EpFormula:
    """AST form of a disjunctive formula, binders renamed apart across
    disjuncts so the result satisfies EpFormula hygiene."""
    libset = set(phi.lib)
    parts = []
    counter = 0
    for d in phi.disjuncts:
        quantified = d.quantified()
        fresh = _fresh_names(len(quantified), libset, start=counter)
        counter += len(quantified)
        rename = dict(zip(quantified, fresh))
        atoms = sorted((name, tuple(rename.get(e, e) for e in t))
                       for name, ts in d.structure.rels for t in ts)
        parts.append(exists_all(fresh, and_all([Atom(n, t) for n, t in atoms])))
    return EpFormula(phi.signature, phi.lib, or_all(parts))
