"""Counting answers |phi(B)| by two independent routes.

`brute_force_count` is the reference evaluator: it considers the full grid of
assignments lib -> B and evaluates the AST recursively (existentials by
witness search over one axis).  The grid lives in numpy boolean arrays, one
axis per variable, which keeps the semantics literal while staying fast.

`count_pp` is the production path for primitive positive formulas: split into
connected components, evaluate each liberal component by join-project
elimination, multiply the factors.

The two must agree exactly everywhere; the test suite enforces that.
"""

from __future__ import annotations

import numpy as np

from .errors import EpcountError, SignatureMismatchError
from .logic import (And, Atom, DisjunctiveEp, EpFormula, Exists, Node, Or, PpFormula, Top,
                    components, normalize_ep, pp_to_ep)
from .structures import Structure

# Upper bound on any intermediate truth-table size (entries, not bytes).
MAX_GRID = 1 << 27


def _check_signatures(fsig, b: Structure) -> None:
    if fsig != b.signature:
        raise SignatureMismatchError("formula and structure signatures differ")


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------

def _grid_guard(n: int, width: int) -> None:
    if n ** max(width, 1) > MAX_GRID:
        raise EpcountError(
            f"brute-force grid {n}^{width} exceeds the size guard; "
            "use count_pp/count_ep for structures this large")


def _broadcast(vars_src: tuple[str, ...], arr: np.ndarray,
               union: tuple[str, ...], n: int) -> np.ndarray:
    perm = [vars_src.index(v) for v in union if v in vars_src]
    arr = np.transpose(arr, perm)
    shape = tuple(n if v in vars_src else 1 for v in union)
    return arr.reshape(shape)


def _eval_node(node: Node, b: Structure, index: dict[str, int],
               n: int) -> tuple[tuple[str, ...], np.ndarray]:
    if isinstance(node, Top):
        return (), np.array(True)
    if isinstance(node, Atom):
        distinct: list[str] = []
        for v in node.args:
            if v not in distinct:
                distinct.append(v)
        _grid_guard(n, len(distinct))
        arr = np.zeros((n,) * len(distinct), dtype=bool)
        for t in b.rel(node.relation):
            vals: dict[str, str] = {}
            ok = True
            for v, e in zip(node.args, t):
                if vals.setdefault(v, e) != e:
                    ok = False
                    break
            if ok:
                arr[tuple(index[vals[v]] for v in distinct)] = True
        return tuple(distinct), arr
    if isinstance(node, Exists):
        vars_, arr = _eval_node(node.body, b, index, n)
        if node.var in vars_:
            axis = vars_.index(node.var)
            return (tuple(v for v in vars_ if v != node.var),
                    arr.any(axis=axis))
        # vacuous quantifier: some witness exists since the universe is nonempty
        return vars_, arr
    if isinstance(node, (And, Or)):
        vl, al = _eval_node(node.left, b, index, n)
        vr, ar = _eval_node(node.right, b, index, n)
        union = vl + tuple(v for v in vr if v not in vl)
        _grid_guard(n, len(union))
        bl = _broadcast(vl, al, union, n)
        br = _broadcast(vr, ar, union, n)
        out = np.logical_and(bl, br) if isinstance(node, And) else np.logical_or(bl, br)
        return union, out
    raise EpcountError(f"unknown AST node: {node!r}")


def _eval_on_empty(node: Node) -> bool:
    if isinstance(node, Top):
        return True
    if isinstance(node, Atom):
        return False
    if isinstance(node, Exists):
        return False
    if isinstance(node, And):
        return _eval_on_empty(node.left) and _eval_on_empty(node.right)
    if isinstance(node, Or):
        return _eval_on_empty(node.left) or _eval_on_empty(node.right)
    raise EpcountError(f"unknown AST node: {node!r}")


def brute_force_count(phi: EpFormula, b: Structure) -> int:
    """Exact |phi(B)| over all |B|^|lib| assignments."""
    _check_signatures(phi.signature, b)
    n = b.size()
    if n == 0:
        return 1 if not phi.lib and _eval_on_empty(phi.body) else 0
    index = {e: i for i, e in enumerate(b.universe)}
    vars_, arr = _eval_node(phi.body, b, index, n)
    sat = int(arr.sum(dtype=np.int64)) if arr.ndim else int(bool(arr))
    missing = sum(1 for v in phi.lib if v not in vars_)
    return sat * n ** missing


def brute_force_count_pp(pp: PpFormula, b: Structure) -> int:
    return brute_force_count(pp_to_ep(pp), b)


# ---------------------------------------------------------------------------
# Join-project evaluation of pp-formulas
# ---------------------------------------------------------------------------

Table = tuple[tuple[str, ...], set[tuple[str, ...]]]


def _atom_table(atom_vars: tuple[str, ...], rows_b, ) -> Table:
    distinct: list[str] = []
    for v in atom_vars:
        if v not in distinct:
            distinct.append(v)
    rows = set()
    for row in rows_b:
        vals: dict[str, str] = {}
        ok = True
        for v, e in zip(atom_vars, row):
            if vals.setdefault(v, e) != e:
                ok = False
                break
        if ok:
            rows.add(tuple(vals[v] for v in distinct))
    return tuple(distinct), rows


def _join(t1: Table, t2: Table) -> Table:
    vars1, rows1 = t1
    vars2, rows2 = t2
    shared = [v for v in vars1 if v in vars2]
    out_vars = vars1 + tuple(v for v in vars2 if v not in vars1)
    pos1 = [vars1.index(v) for v in shared]
    pos2 = [vars2.index(v) for v in shared]
    extra2 = [i for i, v in enumerate(vars2) if v not in vars1]
    by_key: dict[tuple, list[tuple]] = {}
    for r2 in rows2:
        by_key.setdefault(tuple(r2[p] for p in pos2), []).append(
            tuple(r2[p] for p in extra2))
    out = set()
    for r1 in rows1:
        for extra in by_key.get(tuple(r1[p] for p in pos1), ()):
            out.add(r1 + extra)
    return out_vars, out


def _project_out(t: Table, var: str) -> Table:
    vars_, rows = t
    keep = [i for i, v in enumerate(vars_) if v != var]
    return (tuple(vars_[i] for i in keep),
            {tuple(r[i] for i in keep) for r in rows})


def _component_count(comp: PpFormula, b: Structure) -> int:
    tables: list[Table] = []
    for name, ts in comp.structure.rels:
        rows_b = b.rel(name)
        for t in ts:
            tables.append(_atom_table(t, rows_b))
    if not tables:
        # single isolated element, no atoms
        return b.size() if comp.lib else 1
    libset = set(comp.lib)
    while True:
        open_vars = sorted({v for vars_, _ in tables for v in vars_} - libset)
        if not open_vars:
            break

        def degree(v: str) -> int:
            return len({u for vars_, _ in tables if v in vars_ for u in vars_} - {v})

        target = min(open_vars, key=lambda v: (degree(v), v))
        group = [t for t in tables if target in t[0]]
        rest = [t for t in tables if target not in t[0]]
        joined = group[0]
        for t in group[1:]:
            joined = _join(joined, t)
        tables = rest + [_project_out(joined, target)]
    final = tables[0]
    for t in tables[1:]:
        final = _join(final, t)
    vars_, rows = final
    if not comp.lib:
        return 1 if rows else 0
    assert set(vars_) == libset, "liberal variable vanished during elimination"
    return len(rows)


def count_pp(pp: PpFormula, b: Structure) -> int:
    """|pp(B)| via the component product: each liberal component contributes
    its projected answer-set size, isolated liberal variables contribute |B|,
    and an unsatisfiable non-liberal component zeroes the total."""
    _check_signatures(pp.signature, b)
    total = 1
    for comp in components(pp):
        factor = _component_count(comp, b)
        if factor == 0:
            return 0
        total *= factor
    return total


def count_ep(phi: EpFormula | DisjunctiveEp, b: Structure) -> int:
    """|phi(B)| for existential positive formulas.

    Normalizes, answers |B|^|lib| outright when a sentence disjunct holds,
    and otherwise evaluates the inclusion-exclusion expansion with count_pp.
    """
    from .expansion import all_free_part, star_expansion
    from .homs import find_homomorphism

    disj = normalize_ep(phi) if isinstance(phi, EpFormula) else phi
    _check_signatures(disj.signature, b)
    split = all_free_part(disj)
    for th in split.sentences:
        if find_homomorphism(th.structure, b) is not None:
            return b.size() ** len(disj.lib)
    if not split.free:
        return 0
    star = star_expansion(DisjunctiveEp(disj.lib, split.free))
    return sum(c * count_pp(f, b) for c, f in star.terms)
