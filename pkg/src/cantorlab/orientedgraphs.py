"""Finite oriented graphs with unique successors and acyclic symmetrization.

Everything here is finite and order-insensitive except the duplication
construction, which consumes a caller-supplied vertex enumeration and makes
label copies of one vertex's predecessor cone per stage.  Vertex ids are
opaque hashable values; duplication wraps them in LabeledVertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import DEFAULT, Budgets
from .errors import BadEnumeration, CapExceeded, InvalidArgument, NotConnected


@dataclass(frozen=True)
class LabeledVertex:
    """A base vertex id together with a finite label sequence."""

    base: object
    label: tuple

    def __post_init__(self):
        object.__setattr__(self, "label", tuple(self.label))

    def __repr__(self):
        tail = ".".join(str(j) for j in self.label)
        return f"{self.base}:{tail}"


class FiniteOrientedGraph:
    """An irreflexive, antisymmetric edge set over a finite vertex set.

    Construction rejects malformed data (unknown endpoints, loops fed as
    edges are kept and reported by validate_uogas instead of raised, since
    violations are data for the validator).
    """

    __slots__ = ("vertices", "edges")

    def __init__(self, vertices, edges):
        self.vertices = frozenset(vertices)
        self.edges = frozenset((a, b) for a, b in edges)
        for a, b in self.edges:
            if a not in self.vertices or b not in self.vertices:
                raise InvalidArgument(f"edge endpoint {a!r} or {b!r} not a vertex")

    def __eq__(self, other):
        if not isinstance(other, FiniteOrientedGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"FiniteOrientedGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"


def _vkey(v):
    return repr(v)


def succ(G: FiniteOrientedGraph, x):
    return {b for a, b in G.edges if a == x}


def pred(G: FiniteOrientedGraph, x):
    return {a for a, b in G.edges if b == x}


def max_set(G: FiniteOrientedGraph):
    return {x for x in G.vertices if not succ(G, x)}


def min_set(G: FiniteOrientedGraph):
    return {x for x in G.vertices if not pred(G, x)}


def _sym_adj(G: FiniteOrientedGraph):
    adj = {x: set() for x in G.vertices}
    for a, b in G.edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def components(G: FiniteOrientedGraph):
    """Connected components of the symmetrization, sorted for determinism."""
    adj = _sym_adj(G)
    seen = set()
    out = []
    for start in sorted(G.vertices, key=_vkey):
        if start in seen:
            continue
        comp = {start}
        queue = [start]
        while queue:
            v = queue.pop()
            for w in adj[v]:
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        out.append(frozenset(comp))
    return out


@dataclass
class CheckReport:
    """Outcome of a validation or lemma suite; violations carry witnesses."""

    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, clause: str, witness):
        self.violations.append((clause, witness))


def validate_uogas(G: FiniteOrientedGraph) -> CheckReport:
    """Report every violated clause of the unique-successor acyclic contract."""
    report = CheckReport()
    for a, b in sorted(G.edges, key=lambda e: (_vkey(e[0]), _vkey(e[1]))):
        if a == b:
            report.add("irreflexive", (a, b))
        elif (b, a) in G.edges and _vkey(a) < _vkey(b):
            report.add("antisymmetric", (a, b))
    for x in sorted(G.vertices, key=_vkey):
        out = succ(G, x)
        if len(out) > 1:
            report.add("unique-successor", (x, tuple(sorted(out, key=_vkey))))
    cycle = _find_sym_cycle(G)
    if cycle is not None:
        report.add("acyclic-symmetrization", cycle)
    return report


def _find_sym_cycle(G: FiniteOrientedGraph):
    """An injective symmetrized cycle of length >= 3, or None.

    Parallel edge pairs are the antisymmetry clause's business, so the walk
    runs on the simple undirected graph.
    """
    adj = _sym_adj(G)
    seen = set()
    for start in sorted(G.vertices, key=_vkey):
        if start in seen:
            continue
        parent = {start: None}
        stack = [(start, None)]
        while stack:
            v, par = stack.pop()
            seen.add(v)
            for w in sorted(adj[v], key=_vkey):
                if w == par or w == v:
                    continue
                if w in parent:
                    path_v = _root_path(parent, v)
                    ancestors_w = set(_root_path(parent, w))
                    lca = next(u for u in path_v if u in ancestors_w)
                    seg_v = path_v[: path_v.index(lca) + 1]
                    path_w = _root_path(parent, w)
                    seg_w = path_w[: path_w.index(lca)]
                    return tuple(seg_v + seg_w[::-1])
                parent[w] = v
                stack.append((w, v))
    return None


def _root_path(parent, v):
    out = []
    while v is not None:
        out.append(v)
        v = parent[v]
    return out


def unique_path(G: FiniteOrientedGraph, x, y):
    """The unique injective symmetrized path from x to y, as a tuple."""
    if x not in G.vertices or y not in G.vertices:
        raise InvalidArgument("path endpoints must be vertices")
    adj = _sym_adj(G)
    parent = {x: None}
    queue = [x]
    while queue and y not in parent:
        nxt = []
        for v in queue:
            for w in adj[v]:
                if w not in parent:
                    parent[w] = v
                    nxt.append(w)
        queue = nxt
    if y not in parent:
        raise NotConnected(f"{x!r} and {y!r} lie in different components")
    return tuple(_root_path(parent, y)[::-1])


def p_to_max(G: FiniteOrientedGraph, y):
    """The successor chain from y to its component's maximal vertex."""
    chain = [y]
    seen = {y}
    while True:
        out = succ(G, chain[-1])
        if not out:
            return tuple(chain)
        if len(out) > 1:
            raise InvalidArgument(f"{chain[-1]!r} has two successors; not an uogas")
        (nxt,) = out
        if nxt in seen:
            raise InvalidArgument("successor chain cycles; not an uogas")
        chain.append(nxt)
        seen.add(nxt)


def M_of(G: FiniteOrientedGraph, x) -> int:
    """Longest distance from a minimal vertex whose chain passes through x,
    counted as a path length (number of vertices).
    """
    best = 0
    for y in min_set(G):
        chain = p_to_max(G, y)
        if x in chain:
            best = max(best, chain.index(x) + 1)
    if best == 0:
        raise InvalidArgument(f"no minimal chain passes through {x!r}")
    return best


def lemma42_suite(G: FiniteOrientedGraph) -> CheckReport:
    """Injective chains, forward paths to the maximum, unique maxima, and
    first-step agreement, each checked exhaustively with witnesses.
    """
    report = CheckReport()
    for y in sorted(G.vertices, key=_vkey):
        try:
            chain = p_to_max(G, y)
        except InvalidArgument as err:
            report.add("a-injective-chain", (y, str(err)))
            continue
        if chain != unique_path(G, y, chain[-1]):
            report.add("a-chain-is-the-path", (y, chain))
    for comp in components(G):
        tops = sorted(comp & max_set(G), key=_vkey)
        if len(tops) != 1:
            report.add("c-single-maximum", (tuple(sorted(comp, key=_vkey)), tuple(tops)))
            continue
        top = tops[0]
        for y in sorted(comp, key=_vkey):
            p = unique_path(G, y, top)
            for i in range(len(p) - 1):
                if (p[i], p[i + 1]) not in G.edges:
                    report.add("b-forward-edges", (y, p, i))
                    break
    for a, b in sorted(G.edges, key=lambda e: (_vkey(e[0]), _vkey(e[1]))):
        try:
            p = p_to_max(G, a)
        except InvalidArgument:
            continue
        if len(p) < 2 or p[1] != b:
            report.add("d-first-step", ((a, b), p))
    return report


# ---------------------------------------------------------------------------
# duplication


def _check_enumeration(G, order, paths):
    if len(order) != len(G.vertices) or set(order) != G.vertices:
        raise BadEnumeration("enumeration must list every vertex exactly once")
    lengths = [len(paths[x]) for x in order]
    if any(lengths[i] > lengths[i + 1] for i in range(len(lengths) - 1)):
        raise BadEnumeration("enumeration must have nondecreasing chain lengths")


def duplicate(
    G: FiniteOrientedGraph,
    enumeration,
    m: int,
    p: int | None = None,
    budgets: Budgets = DEFAULT,
) -> FiniteOrientedGraph:
    """Stage m of the labeled duplication along the given enumeration, or the
    intermediate stage after duplicating only the first p label blocks of
    step m.  Blocks are taken in lexicographic label order; any injective
    block order satisfies the construction's contract.

    Stage 0 is the relabeled copy (every vertex gets the one-symbol label 0);
    each later step replaces the predecessor cone of the step's vertex by
    copyCount labeled copies, keeping edges as follows: edges outside the
    cone survive, edges inside are copied into each block, and the one edge
    out of the cone's top keeps its target.
    """
    report = validate_uogas(G)
    if not report.ok:
        raise InvalidArgument(f"not an uogas: {report.violations[:3]}")
    order = tuple(enumeration)
    paths = {x: p_to_max(G, x) for x in G.vertices}
    _check_enumeration(G, order, paths)
    L = len(order)
    if L == 0:
        return FiniteOrientedGraph((), ())
    if not 0 <= m < L:
        raise InvalidArgument("stage index out of range")
    L0 = sum(1 for x in order if len(paths[x]) == 1)
    if p is not None and m < L0:
        raise InvalidArgument("partial stages exist only once duplication starts")

    verts = {LabeledVertex(x, (0,)) for x in G.vertices}
    edges = {(LabeledVertex(a, (0,)), LabeledVertex(b, (0,))) for a, b in G.edges}
    for step in range(L0, m + 1):
        top = order[step]
        cone = {x for x in G.vertices if top in paths[x]}
        block_labels = sorted(v.label for v in verts if v.base == top)
        if step == m and p is not None:
            if not 0 <= p <= len(block_labels):
                raise InvalidArgument("partial block count out of range")
            blocks = set(block_labels[:p])
        else:
            blocks = set(block_labels)

        def dup(v):
            return v.base in cone and v.label in blocks

        new_verts = set()
        for v in verts:
            if dup(v):
                new_verts.update(LabeledVertex(v.base, v.label + (j,)) for j in range(L))
            else:
                new_verts.add(v)
        if len(new_verts) > budgets.duplication_cap:
            raise CapExceeded(
                f"duplication stage {step} needs {len(new_verts)} vertices, "
                f"cap is {budgets.duplication_cap}"
            )
        new_edges = set()
        for a, b in edges:
            if dup(b) and not dup(a):
                raise InvalidArgument("cone invariant broken; enumeration unusable")
            if not dup(a):
                new_edges.add((a, b))
            elif dup(b):
                for j in range(L):
                    new_edges.add(
                        (
                            LabeledVertex(a.base, a.label + (j,)),
                            LabeledVertex(b.base, b.label + (j,)),
                        )
                    )
            else:
                for j in range(L):
                    new_edges.add((LabeledVertex(a.base, a.label + (j,)), b))
        verts, edges = new_verts, new_edges
    return FiniteOrientedGraph(verts, edges)


# ---------------------------------------------------------------------------
# DOT emission


def _render(v) -> str:
    return v if isinstance(v, str) else repr(v)


def to_dot(G: FiniteOrientedGraph, name: str = "G") -> str:
    """Deterministic DOT text: vertices and edges in sorted render order."""
    lines = [f"digraph {name} {{"]
    for v in sorted(G.vertices, key=_vkey):
        lines.append(f'  "{_render(v)}";')
    for a, b in sorted(G.edges, key=lambda e: (_vkey(e[0]), _vkey(e[1]))):
        lines.append(f'  "{_render(a)}" -> "{_render(b)}";')
    lines.append("}")
    return "\n".join(lines)
