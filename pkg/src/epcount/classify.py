"""Structural invariants behind the complexity classification: formula
graphs, cores, quantified components, contract graphs, exact treewidth, and
the per-set case report.

Quantified components and the contract graph are computed on the graph of
the formula's core (the core of its augmented structure), never on the raw
formula; the raw-formula variant gives wrong widths once redundant quantified
parts fold away.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GraphTooLargeError, ValidationError
from .homs import core
from .logic import DisjunctiveEp, EpFormula, PpFormula, augment, normalize_ep
from .structures import Structure

EXACT_TREEWIDTH_LIMIT = 20


@dataclass(frozen=True)
class FormulaGraph:
    """Co-occurrence graph: vertices are element names, an edge joins two
    vertices appearing together in some tuple."""

    vertices: tuple[str, ...]
    edges: frozenset[frozenset[str]]

    def __post_init__(self):
        for e in self.edges:
            if len(e) != 2:
                raise ValidationError(f"edge must join two distinct vertices: {set(e)}")
            if not e <= set(self.vertices):
                raise ValidationError(f"edge endpoints outside vertex set: {set(e)}")

    @staticmethod
    def make(vertices: Sequence[str], edges: Iterable[tuple[str, str]]) -> "FormulaGraph":
        return FormulaGraph(tuple(vertices),
                            frozenset(frozenset(e) for e in edges if e[0] != e[1]))

    def adjacency(self) -> dict[str, set[str]]:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            a, b = sorted(e)
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def subgraph(self, keep: Iterable[str]) -> "FormulaGraph":
        keep_set = set(keep)
        return FormulaGraph(tuple(v for v in self.vertices if v in keep_set),
                            frozenset(e for e in self.edges if e <= keep_set))

    def components(self) -> list[tuple[str, ...]]:
        adj = self.adjacency()
        seen: set[str] = set()
        out = []
        for start in self.vertices:
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
            out.append(tuple(v for v in self.vertices if v in comp))
        return out


def graph_of_structure(s: Structure) -> FormulaGraph:
    edges = set()
    for _name, ts in s.rels:
        for t in ts:
            uniq = sorted(set(t))
            for i, a in enumerate(uniq):
                for b in uniq[i + 1:]:
                    edges.add((a, b))
    return FormulaGraph.make(s.universe, edges)


def graph_of(pp: PpFormula) -> FormulaGraph:
    """The formula graph on the whole universe; isolated liberal variables
    appear as isolated vertices."""
    return graph_of_structure(pp.structure)


def core_of_formula(pp: PpFormula) -> Structure:
    """Core of the augmented structure.  Liberal elements survive: their
    pinning relations rule every retraction out."""
    return core(augment(pp))


def _core_graph_and_lib(pp: PpFormula) -> tuple[FormulaGraph, tuple[str, ...]]:
    d = core_of_formula(pp)
    return graph_of_structure(d), pp.lib


def exists_components(pp: PpFormula) -> list[FormulaGraph]:
    """Per component V of quantified core vertices, the induced graph on V
    plus the liberal vertices adjacent to it."""
    g, lib = _core_graph_and_lib(pp)
    libset = set(lib)
    adj = g.adjacency()
    out = []
    for comp in g.subgraph([v for v in g.vertices if v not in libset]).components():
        comp_set = set(comp)
        attached = {s for s in libset if adj[s] & comp_set}
        out.append(g.subgraph(comp_set | attached))
    return out


def contract_graph(pp: PpFormula) -> FormulaGraph:
    """Graph on the liberal set: its induced core-graph edges plus a clique
    over liberal vertices sharing a quantified component."""
    g, lib = _core_graph_and_lib(pp)
    libset = set(lib)
    edges = {tuple(sorted(e)) for e in g.subgraph(libset).edges}
    for comp_graph in exists_components(pp):
        shared = sorted(set(comp_graph.vertices) & libset)
        for i, a in enumerate(shared):
            for b in shared[i + 1:]:
                edges.add((a, b))
    vertices = tuple(v for v in g.vertices if v in libset)
    return FormulaGraph.make(vertices, edges)


# ---------------------------------------------------------------------------
# Exact treewidth
# ---------------------------------------------------------------------------

def _eliminate(adj: dict[str, set[str]], v: str) -> None:
    neigh = adj[v]
    for a in neigh:
        adj[a] |= neigh - {a}
        adj[a].discard(v)
    del adj[v]


def _copy(adj: dict[str, set[str]]) -> dict[str, set[str]]:
    return {v: set(ns) for v, ns in adj.items()}


def _degeneracy(adj: dict[str, set[str]]) -> int:
    """Max over subgraphs of the min degree; a treewidth lower bound."""
    work = _copy(adj)
    best = 0
    while work:
        v = min(work, key=lambda x: (len(work[x]), x))
        best = max(best, len(work[v]))
        for u in work[v]:
            work[u].discard(v)
        del work[v]
    return best


def _min_fill_upper_bound(adj: dict[str, set[str]]) -> int:
    """Width of the min-fill elimination order."""
    work = _copy(adj)
    width = 0
    while work:
        def fill(v: str) -> int:
            ns = sorted(work[v])
            return sum(1 for i, a in enumerate(ns) for b in ns[i + 1:]
                       if b not in work[a])
        v = min(sorted(work), key=lambda x: (fill(x), len(work[x]), x))
        width = max(width, len(work[v]))
        _eliminate(work, v)
    return width


def _is_clique(adj: dict[str, set[str]], vs: Iterable[str]) -> bool:
    vs = list(vs)
    return all(b in adj[a] for i, a in enumerate(vs) for b in vs[i + 1:])


def treewidth_bounds(g: FormulaGraph) -> tuple[int, int]:
    if len(g.vertices) <= 1 or not g.edges:
        return 0, 0
    adj = g.adjacency()
    return _degeneracy(adj), _min_fill_upper_bound(adj)


def treewidth(g: FormulaGraph, *, exact_limit: int = EXACT_TREEWIDTH_LIMIT) -> int:
    """Exact treewidth by branch and bound over elimination orderings.

    Prunes with the degeneracy lower bound, eliminates simplicial vertices
    eagerly (always safe), and memoizes on the set of eliminated vertices
    (the filled graph does not depend on their order).  Graphs above
    `exact_limit` vertices raise GraphTooLargeError carrying the bounds.
    """
    lower, upper = treewidth_bounds(g)
    if lower == upper:
        return lower
    if len(g.vertices) > exact_limit:
        raise GraphTooLargeError(len(g.vertices), lower, upper)
    best = upper
    seen: dict[frozenset, int] = {}

    def dfs(adj: dict[str, set[str]], width: int) -> None:
        nonlocal best
        if width >= best:
            return
        if len(adj) <= 1:
            best = min(best, width)
            return
        if _is_clique(adj, adj.keys()):
            best = min(best, max(width, len(adj) - 1))
            return
        key = frozenset(adj)
        prev = seen.get(key)
        if prev is not None and prev <= width:
            return
        seen[key] = width
        if max(width, _degeneracy(adj)) >= best:
            return
        for v in sorted(adj, key=lambda x: (len(adj[x]), x)):
            if _is_clique(adj, adj[v]):
                new_width = max(width, len(adj[v]))
                if new_width < best:
                    work = _copy(adj)
                    _eliminate(work, v)
                    dfs(work, new_width)
                return
        for v in sorted(adj, key=lambda x: (len(adj[x]), x)):
            new_width = max(width, len(adj[v]))
            if new_width >= best:
                continue
            work = _copy(adj)
            _eliminate(work, v)
            dfs(work, new_width)

    dfs(g.adjacency(), 0)
    return best


# ---------------------------------------------------------------------------
# Set classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FormulaInvariants:
    formula_id: str
    formula: PpFormula
    tw_core: int
    tw_contract: int
    exists_component_count: int


@dataclass(frozen=True)
class StructuralReport:
    """Per pp-formula invariants plus the trichotomy case of the whole set
    under a width threshold.  Case 1: core and contract widths within the
    threshold; case 2: only contract widths within; case 3: neither.  This is
    the finite-set surrogate for bounded-treewidth conditions on classes."""

    width_threshold: int
    rows: tuple[FormulaInvariants, ...]
    max_tw_core: int
    max_tw_contract: int
    case: int

    def to_text(self) -> str:
        lines = ["formula\ttw_core\ttw_contract\texists_components"]
        for row in self.rows:
            lines.append(f"{row.formula_id}\t{row.tw_core}\t{row.tw_contract}"
                         f"\t{row.exists_component_count}")
        lines.append(f"max\t{self.max_tw_core}\t{self.max_tw_contract}\t-")
        lines.append(f"case {self.case} (width threshold {self.width_threshold})")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "width_threshold": self.width_threshold,
            "rows": [{"formula": r.formula_id, "tw_core": r.tw_core,
                      "tw_contract": r.tw_contract,
                      "exists_components": r.exists_component_count}
                     for r in self.rows],
            "max_tw_core": self.max_tw_core,
            "max_tw_contract": self.max_tw_contract,
            "case": self.case,
        }


def analyze_pp(pp: PpFormula, formula_id: str = "phi") -> FormulaInvariants:
    return FormulaInvariants(
        formula_id=formula_id,
        formula=pp,
        tw_core=treewidth(graph_of_structure(core_of_formula(pp))),
        tw_contract=treewidth(contract_graph(pp)),
        exists_component_count=len(exists_components(pp)),
    )


def classify_set(phis: Sequence[tuple[str, EpFormula | DisjunctiveEp]],
                 width: int) -> StructuralReport:
    """Classify a finite set of formulas: expand each into its plus set and
    measure every member's core and contract treewidth."""
    from .expansion import plus_set

    if width < 0:
        raise ValidationError("width threshold must be nonnegative")
    rows = []
    for name, phi in phis:
        disj = normalize_ep(phi) if isinstance(phi, EpFormula) else phi
        members = plus_set(disj).plus_formulas()
        for i, member in enumerate(members):
            rows.append(analyze_pp(member, formula_id=f"{name}[{i}]"))
    max_core = max((r.tw_core for r in rows), default=0)
    max_contract = max((r.tw_contract for r in rows), default=0)
    if max_core <= width and max_contract <= width:
        case = 1
    elif max_contract <= width:
        case = 2
    else:
        case = 3
    return StructuralReport(width, tuple(rows), max_core, max_contract, case)
