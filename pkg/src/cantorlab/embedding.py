"""Clopen assignments on successor graphs and the nested cell scheme.

The working objects are mapping-tuple assignments: a finite successor graph
together with a map strength u(x) and a nonempty clopen cell V(x) per vertex.
Membership tests (exact-image and contained-image form), two refinement
passes, and the copy-splitting construction operate on assignments; on top of
them build_scheme grows the level-by-level cell system whose nested chains
evaluate a point embedding.
"""

from .approximation import detect_L_n, run
from .config import DEFAULT, Budgets
from .cylinders import LazyPoint, SymbolicClopen, atom_const, point_eval, FULL_SPACE
from .errors import (
    BudgetExceeded,
    EmptyRefinement,
    EmptySet,
    InvalidArgument,
    InvalidLevel,
    NotFoundWithinBudget,
    PrefixTooShort,
    TooManyFreeCoordinates,
)
from .maps import MapId, _read_inverse, domain_D, g_point, image_clopen, preimage_clopen
from .orientedgraphs import (
    CheckReport,
    FiniteOrientedGraph,
    LabeledVertex,
    M_of,
    p_to_max,
    validate_uogas,
)
from .sequences import BinWord, anchor_word, stride

__all__ = [
    "CantorInstance",
    "ComplexInstance",
    "MappingTupleAssignment",
    "SchemeState",
    "build_scheme",
    "check_scheme_conditions",
    "h_eval",
    "in_E",
    "in_U",
    "lemma25_check",
    "lemma26_find",
    "refine_45",
    "refine_46",
    "scheme_state_json",
    "shrink_47",
]


# ---------------------------------------------------------------------------
# instances


class ComplexInstance:
    """A space carrying an indexed family of partial clopen-to-clopen maps.

    The surface is what the refinement passes and the splitting construction
    consume: per-index domains, exact images and preimages of cells, a
    supply of distinct preimages of a single point, diameter control, and
    point membership.  point_preimage and cell_around extend the minimal
    surface: the splitting construction needs to aim a preimage at a given
    point and to carve a small cell around a given point, and neither is
    expressible through the other six operations.
    """

    def domain(self, n) -> SymbolicClopen:
        raise NotImplementedError

    def image(self, n, C) -> SymbolicClopen:
        raise NotImplementedError

    def preimage(self, n, C) -> SymbolicClopen:
        raise NotImplementedError

    def pick_distinct_preimages(self, n, C, count):
        """A target point with `count` distinct preimages inside C."""
        raise NotImplementedError

    def point_preimage(self, n, C, target) -> LazyPoint:
        """A point of C mapping exactly to `target` under map n."""
        raise NotImplementedError

    def split_below_diameter(self, C, d) -> SymbolicClopen:
        raise NotImplementedError

    def cell_around(self, C, p, d) -> SymbolicClopen:
        """A clopen neighbourhood of p inside C with diameter <= 2^-d."""
        raise NotImplementedError

    def cell_pinned(self, C, p, coords) -> SymbolicClopen:
        """A clopen neighbourhood of p inside C fixing the given coordinates.

        Sparse variant of cell_around: pinning only the listed coordinates
        keeps the rest of the cell free, which the level scheme depends on
        (a later pairing stage must still find room at the coordinate its
        map forces).
        """
        raise NotImplementedError

    def contains(self, C, p) -> bool:
        raise NotImplementedError


class CantorInstance(ComplexInstance):
    """The reference instance: binary sequence space with the stride maps.

    Cells are SymbolicClopen values, points are LazyPoint values, and every
    operation is exact; nothing is sampled.  `family` picks the expansion
    discipline of the underlying maps (1 is the plain doubling expansion).
    """

    __slots__ = ("family", "budgets")

    def __init__(self, family: int = 1, budgets: Budgets = DEFAULT):
        if family < 1:
            raise InvalidLevel("family level must be >= 1")
        self.family = family
        self.budgets = budgets

    def _ident(self, n) -> MapId:
        return MapId(self.family, n)

    def domain(self, n) -> SymbolicClopen:
        return domain_D(self._ident(n), self.budgets)

    def image(self, n, C) -> SymbolicClopen:
        return image_clopen(self._ident(n), C, self.budgets)

    def preimage(self, n, C) -> SymbolicClopen:
        return preimage_clopen(self._ident(n), C, self.budgets)

    def pick_distinct_preimages(self, n, C, count):
        """A target with `count` preimages in C, pairwise split at free
        coordinates the map never reads, so all share the same image point.

        Stride coordinates of the materializable maps are skipped even when
        free and unread: leaving them untouched keeps every later pairing
        stage satisfiable.
        """
        if count < 1:
            raise InvalidArgument("count must be positive")
        b = self.budgets
        ident = self._ident(n)
        C1 = C.intersect(domain_D(ident, b), b)
        if C1.is_empty():
            raise EmptySet("the cell misses the map's domain")
        need = (count - 1).bit_length()
        if need > b.max_free_coords:
            raise TooManyFreeCoordinates(
                f"{count} preimages need {need} pattern coordinates, "
                f"cap is {b.max_free_coords}"
            )
        w = C1.witness_point()
        linked = set(C1.constrained_coords())
        avoid = _stride_coords(b)
        coords = []
        c = 0
        while len(coords) < need:
            if c > b.point_probe_bits:
                raise NotFoundWithinBudget(
                    "ran out of probe budget hunting unread free coordinates"
                )
            if (
                c not in avoid
                and C1.forced(c) is None
                and c not in linked
                and _read_inverse(self.family, n, c, b) is None
            ):
                coords.append(c)
            c += 1
        pts = []
        for j in range(count):
            bits = {coords[t]: (j >> t) & 1 for t in range(need)}
            pts.append(w.with_bits(bits))
        return g_point(ident, pts[0], b), pts

    def point_preimage(self, n, C, target) -> LazyPoint:
        """Read coordinates come back from the target, unread ones from a
        witness of C; the image of the result is the target, coordinate by
        coordinate, with no approximation.
        """
        b = self.budgets
        ident = self._ident(n)
        C1 = C.intersect(domain_D(ident, b), b)
        if C1.is_empty():
            raise EmptySet("the cell misses the map's domain")
        out_base = anchor_word(n, b).append(1)
        for i in range(len(out_base)):
            if point_eval(target, i) != out_base.bit(i):
                raise InvalidArgument("the target is not an image of the cell")
        w = C1.witness_point()
        fam = self.family

        def pull(c):
            k = _read_inverse(fam, n, c, b)
            if k is not None:
                return point_eval(target, k)
            return point_eval(w, c)

        p = LazyPoint({}, 0, pull)
        if not C.contains(p):
            raise InvalidArgument("the target is not an image of the cell")
        return p

    def split_below_diameter(self, C, d) -> SymbolicClopen:
        if C.is_empty():
            raise EmptySet("cannot shrink the empty set")
        return self.cell_around(C, C.witness_point(), d)

    def cell_around(self, C, p, d) -> SymbolicClopen:
        return self.cell_pinned(C, p, range(d))

    def cell_pinned(self, C, p, coords) -> SymbolicClopen:
        atoms = []
        for i in sorted(set(coords)):
            bit = point_eval(p, i)
            f = C.forced(i)
            if f is None:
                atoms.append(atom_const(i, bit))
            elif f != bit:
                raise InvalidArgument("the point is not in the cell")
        out = C.with_atoms(atoms, self.budgets)
        if out.is_empty():
            raise InvalidArgument("the point is not in the cell")
        return out

    def contains(self, C, p) -> bool:
        return C.contains(p)


# ---------------------------------------------------------------------------
# assignments and membership


class MappingTupleAssignment:
    """A successor graph with a strength and a nonempty cell per vertex."""

    __slots__ = ("graph", "instance", "u", "V")

    def __init__(self, graph: FiniteOrientedGraph, instance: ComplexInstance, u, V):
        self.graph = graph
        self.instance = instance
        self.u = dict(u)
        self.V = dict(V)
        for x in graph.vertices:
            if x not in self.u:
                raise InvalidArgument(f"no strength for vertex {x!r}")
            if self.u[x] < 0:
                raise InvalidArgument("strengths are natural numbers")
            cell = self.V.get(x)
            if cell is None:
                raise InvalidArgument(f"no cell for vertex {x!r}")
            if cell.is_empty():
                raise InvalidArgument(f"the cell at {x!r} is empty")

    def __repr__(self):
        return (
            f"MappingTupleAssignment({len(self.graph.vertices)} vertices, "
            f"{len(self.graph.edges)} edges)"
        )


def in_E(assignment: MappingTupleAssignment, budgets: Budgets = DEFAULT) -> bool:
    """Exact-image membership: every edge's source cell sits in its map's
    domain and pushes forward onto the target cell with equality.
    """
    inst = assignment.instance
    for y, x in assignment.graph.edges:
        n = assignment.u[y]
        Vy, Vx = assignment.V[y], assignment.V[x]
        if not Vy.subset(inst.domain(n)):
            return False
        img = inst.image(n, Vy)
        if not (Vx.subset(img) and img.subset(Vx)):
            return False
    return True


def in_U(assignment: MappingTupleAssignment, budgets: Budgets = DEFAULT) -> bool:
    """Contained-image membership: target cells sit inside the pushforward."""
    inst = assignment.instance
    for y, x in assignment.graph.edges:
        n = assignment.u[y]
        Vy = assignment.V[y]
        if not Vy.subset(inst.domain(n)):
            return False
        if not assignment.V[x].subset(inst.image(n, Vy)):
            return False
    return True


# ---------------------------------------------------------------------------
# refinement passes


def _chains(G: FiniteOrientedGraph):
    return {v: p_to_max(G, v) for v in G.vertices}


def refine_45(assignment: MappingTupleAssignment, budgets: Budgets = DEFAULT):
    """Pull every cell back along its successor chain.

    Maximal vertices keep their cells; below, each cell is cut to the
    preimage of the refined successor cell, walking away from the maxima, so
    the result carries exact images along every edge.  Needs contained-image
    membership to stay nonempty; an emptied cell raises EmptyRefinement.
    """
    chains = _chains(assignment.graph)
    inst = assignment.instance
    W = {}
    for v in sorted(assignment.graph.vertices, key=lambda t: (len(chains[t]), repr(t))):
        ch = chains[v]
        if len(ch) == 1:
            W[v] = assignment.V[v]
            continue
        cut = assignment.V[v].intersect(
            inst.preimage(assignment.u[v], W[ch[1]]), budgets
        )
        if cut.is_empty():
            raise EmptyRefinement(f"chain refinement emptied the cell at {v!r}")
        W[v] = cut
    return MappingTupleAssignment(assignment.graph, inst, assignment.u, W)


def refine_46(assignment: MappingTupleAssignment, x0, W0, budgets: Budgets = DEFAULT):
    """Propagate a refined pivot cell through the pivot's component.

    Away from the pivot the new cell is the image of the refined neighbour
    when the edge points outward, and the preimage cut when it points back.
    Vertices outside the pivot's component are untouched.  Needs exact-image
    membership and a nonempty W0 inside the pivot's cell.
    """
    if x0 not in assignment.graph.vertices:
        raise InvalidArgument(f"{x0!r} is not a vertex")
    if W0.is_empty():
        raise InvalidArgument("the pivot's refined cell must be nonempty")
    if not W0.subset(assignment.V[x0]):
        raise InvalidArgument("the refined cell must sit inside the pivot's cell")
    inst = assignment.instance
    edges = assignment.graph.edges
    adj = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    W = dict(assignment.V)
    W[x0] = W0
    seen = {x0}
    queue = [x0]
    while queue:
        y = queue.pop(0)
        for v in sorted(adj.get(y, ()), key=repr):
            if v in seen:
                continue
            seen.add(v)
            if (y, v) in edges:
                W[v] = inst.image(assignment.u[y], W[y])
            else:
                W[v] = assignment.V[v].intersect(
                    inst.preimage(assignment.u[v], W[y]), budgets
                )
            if W[v].is_empty():
                raise EmptyRefinement(f"component refinement emptied the cell at {v!r}")
            queue.append(v)
    return MappingTupleAssignment(assignment.graph, inst, assignment.u, W)


# ---------------------------------------------------------------------------
# the splitting construction


def _stride_coords(budgets: Budgets) -> frozenset:
    """Stride coordinates of the maps small enough to materialize.

    The scheme's pairing stages force these output coordinates, so the
    construction never pins them of its own accord: a cell whose stride
    coordinate is already fixed can no longer pair with itself there.
    """
    out = []
    n = 0
    while True:
        s = stride(n, budgets)
        if s > budgets.point_probe_bits:
            break
        out.append(s)
        n += 1
    return frozenset(out)


def _first_difference(p: LazyPoint, q: LazyPoint, budgets: Budgets) -> int:
    for c in range(budgets.point_probe_bits):
        if point_eval(p, c) != point_eval(q, c):
            return c
    raise NotFoundWithinBudget(
        f"no separating coordinate below {budgets.point_probe_bits}"
    )


def _separators(points, d, budgets: Budgets):
    """Per-point pin sets making the listed points' cells pairwise disjoint:
    coordinates 0..d-1 plus the first differing coordinate of every pair."""
    k = len(points)
    pins = [set(range(d)) for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            c = _first_difference(points[i], points[j], budgets)
            pins[i].add(c)
            pins[j].add(c)
    return pins


def _point_avoiding(cell: SymbolicClopen, placed, budgets: Budgets) -> LazyPoint:
    """A member of the cell that differs from every listed point the cell
    contains, built by flipping one fresh free coordinate per such point."""
    w = cell.witness_point()
    if not placed:
        return w
    linked = set(cell.constrained_coords())
    avoid = _stride_coords(budgets)
    bits = {}
    c = 0
    for q in placed:
        if not cell.contains(q):
            continue
        while cell.forced(c) is not None or c in linked or c in bits or c in avoid:
            c += 1
            if c > budgets.point_probe_bits:
                raise NotFoundWithinBudget("ran out of free coordinates to flip")
        bits[c] = 1 - point_eval(q, c)
    return w.with_bits(bits)


def _settle(cells, succ, preds, pos, ubase, inst, changed, budgets):
    """Restore exact images after a batch of cells moved.

    `changed` maps the moved vertices to their new cells, already exact along
    their own chain.  Everything whose chain passes through a moved vertex is
    recut against its successor, walking from the maxima downward; cuts that
    reproduce the old cell keep the old object so the cascade dies out.
    """
    affected = set(changed)
    stack = list(changed)
    while stack:
        w = stack.pop()
        for p in preds.get(w, ()):
            if p not in affected:
                affected.add(p)
                stack.append(p)
    really = set()
    for w in sorted(affected, key=lambda t: (pos[t], repr(t))):
        if w in changed:
            cells[w] = changed[w]
            really.add(w)
            continue
        nxt = succ[w]
        if nxt not in really:
            continue
        old = cells[w]
        cut = old.intersect(inst.preimage(ubase[w.base], cells[nxt]), budgets)
        if cut.is_empty():
            raise EmptyRefinement(f"settling emptied the cell at {w!r}")
        if old.subset(cut):
            continue
        cells[w] = cut
        really.add(w)


def shrink_47(assignment: MappingTupleAssignment, d: int, budgets: Budgets = DEFAULT):
    """Shrink a contained-image assignment to exact images on pairwise
    disjoint cells of diameter at most 2^-d.

    The construction follows the full copy-splitting argument: vertices are
    processed by chain length; each non-maximal vertex's labeled copies are
    split into |X| fresh copies around distinct preimages of a common target
    point, the shared image shrink is pushed up the chain, and exactness is
    restored below.  A branch of copies is then chosen point by point, from
    the maxima down, so that every chosen cell avoids all previously placed
    points; separating neighbourhoods around the chosen points and a final
    chain refinement give the result.
    """
    if d < 0:
        raise InvalidArgument("diameter exponent must be a natural number")
    G = assignment.graph
    inst = assignment.instance
    u = assignment.u
    report = validate_uogas(G)
    if not report.ok:
        raise InvalidArgument(f"not a successor graph: {report.violations[:3]}")
    chains = _chains(G)
    order = sorted(G.vertices, key=lambda t: (len(chains[t]), repr(t)))
    L = len(order)
    if L == 0:
        return assignment
    seed = refine_45(assignment, budgets)

    cells = {}
    succ = {}
    preds = {}
    pos = {}
    copies = {v: [] for v in G.vertices}
    for v in G.vertices:
        lv = LabeledVertex(v, (0,))
        cells[lv] = seed.V[v]
        preds[lv] = set()
        pos[lv] = len(chains[v])
        copies[v].append(lv)
    for a, b in G.edges:
        la, lb = LabeledVertex(a, (0,)), LabeledVertex(b, (0,))
        succ[la] = lb
        preds[lb].add(la)

    L0 = sum(1 for v in order if len(chains[v]) == 1)
    for mi in range(L0, L):
        top = order[mi]
        cone = [x for x in order if top in chains[x]]
        for sigma in sorted(lv.label for lv in copies[top]):
            vp = LabeledVertex(top, sigma)
            s = succ[vp]
            target, pts = inst.pick_distinct_preimages(u[top], cells[vp], L)
            pins = _separators(pts, 0, budgets)
            disj = [
                inst.cell_pinned(cells[vp], p, pn) for p, pn in zip(pts, pins)
            ]
            shrunk = cells[s]
            for c in disj:
                shrunk = shrunk.intersect(inst.image(u[top], c), budgets)
            if shrunk.is_empty():
                raise EmptyRefinement("the preimage cells share no image")
            changed = {}
            cur, val = s, shrunk
            while True:
                changed[cur] = val
                nxt = succ.get(cur)
                if nxt is None:
                    break
                val = inst.image(u[cur.base], val)
                cur = nxt

            # replace the sigma-labeled cone copy by L labeled copies
            for x in cone:
                old = LabeledVertex(x, sigma)
                old_succ = succ.pop(old)
                if old_succ in preds:
                    preds[old_succ].discard(old)
                old_cell = cells.pop(old)
                preds.pop(old)
                copies[x].remove(old)
                pos_x = pos.pop(old)
                for j in range(L):
                    new = LabeledVertex(x, sigma + (j,))
                    cells[new] = disj[j] if x == top else old_cell
                    preds[new] = set()
                    pos[new] = pos_x
                    copies[x].append(new)
            for x in cone:
                tgt_base = chains[x][1]
                for j in range(L):
                    new = LabeledVertex(x, sigma + (j,))
                    tgt = s if x == top else LabeledVertex(tgt_base, sigma + (j,))
                    succ[new] = tgt
                    preds[tgt].add(new)
            if len(cells) > budgets.duplication_cap:
                raise BudgetExceeded(
                    f"splitting needs {len(cells)} labeled vertices, "
                    f"cap is {budgets.duplication_cap}"
                )
            _settle(cells, succ, preds, pos, u, inst, changed, budgets)

    # choose one copy per vertex, from the maxima down, avoiding placed points
    chosen = {}
    zpt = {}
    placed = []
    for v in order:
        ch = chains[v]
        if len(ch) == 1:
            lv = copies[v][0]
            z = _point_avoiding(cells[lv], placed, budgets)
        else:
            sv = chosen[ch[1]]
            cands = sorted(
                (p for p in preds[sv] if p.base == v), key=lambda t: t.label
            )
            lv = None
            for cand in cands:
                cc = cells[cand]
                if all(not cc.contains(q) for q in placed):
                    lv = cand
                    break
            if lv is None:
                raise InvalidArgument("copy selection exhausted; splitting broken")
            z = inst.point_preimage(u[v], cells[lv], zpt[ch[1]])
        chosen[v] = lv
        zpt[v] = z
        placed.append(z)

    pins = _separators([zpt[v] for v in order], d, budgets)
    O = {
        v: inst.cell_pinned(cells[chosen[v]], zpt[v], pn)
        for v, pn in zip(order, pins)
    }

    pred_of = {v: set() for v in G.vertices}
    for a, b in G.edges:
        pred_of[b].add(a)
    U = {}
    for v in sorted(order, key=lambda t: (M_of(G, t), repr(t))):
        cell = O[v]
        for y in sorted(pred_of[v], key=repr):
            cell = cell.intersect(inst.image(u[y], U[y]), budgets)
        if cell.is_empty():
            raise EmptyRefinement(f"predecessor images emptied the cell at {v!r}")
        assert cell.contains(zpt[v])
        U[v] = cell
    return refine_45(MappingTupleAssignment(G, inst, u, U), budgets)


# ---------------------------------------------------------------------------
# the two pairing facts


def lemma25_check(instance, V0, V1, m, n, budgets: Budgets = DEFAULT) -> bool:
    """Weaker-map image comparison: with V0 in both domains and V1 caught
    between the stronger image and the weaker domain, does the weaker image
    of V1 land inside the weaker image of V0?
    """
    if m >= n:
        raise InvalidArgument("the first strength must be the smaller one")
    if not V0.subset(instance.domain(m)) or not V0.subset(instance.domain(n)):
        raise InvalidArgument("V0 must sit in both domains")
    if not V1.subset(instance.image(n, V0)):
        raise InvalidArgument("V1 must sit in the stronger image of V0")
    if not V1.subset(instance.domain(m)):
        raise InvalidArgument("V1 must sit in the weaker domain")
    return instance.image(m, V1).subset(instance.image(m, V0))


def lemma26_find(instance, V, m=None, budgets: Budgets = DEFAULT):
    """A map strength above m whose graph meets V x V, with witnessing cells.

    Returns (n, V0, V1) with V0 inside V and the n-th domain and V1 inside V
    and the image of V0.  The search stops at budgets.map_search_max; running
    past it raises NotFoundWithinBudget rather than pretending exhaustion.
    """
    if V.is_empty():
        raise EmptySet("the empty set pairs with nothing")
    if m is not None and m < 0:
        raise InvalidArgument("the lower bound is a natural number or None")
    start = 0 if m is None else m + 1
    for n in range(start, budgets.map_search_max + 1):
        V0 = V.intersect(instance.domain(n), budgets)
        if V0.is_empty():
            continue
        V1 = V.intersect(instance.image(n, V0), budgets)
        if V1.is_empty():
            continue
        return n, V0, V1
    raise NotFoundWithinBudget(
        f"no strength in [{start}, {budgets.map_search_max}] pairs the cell "
        f"with itself"
    )


# ---------------------------------------------------------------------------
# the level scheme


class SchemeState:
    """One level of the cell scheme: cells per level word, strengths so far."""

    __slots__ = ("level", "cells", "phi")

    def __init__(self, level: int, cells, phi):
        self.level = level
        self.cells = dict(cells)
        self.phi = dict(phi)

    def __eq__(self, other):
        if not isinstance(other, SchemeState):
            return NotImplemented
        return (
            self.level == other.level
            and self.cells == other.cells
            and self.phi == other.phi
        )

    __hash__ = None

    def __repr__(self):
        return f"SchemeState(level={self.level}, cells={len(self.cells)}, phi={self.phi})"


def _succ_map(pairs):
    out = {}
    for y, x in pairs:
        out[y] = x
    return out


def _scheme_strengths(state, succ, sphi):
    """Strength per non-maximal level word, through the assigned table."""
    u = {}
    for y, x in succ.items():
        idx = state.phi.get((y, x))
        if idx is None or idx not in sphi:
            raise InvalidLevel(
                f"level {state.level}: no assigned strength for the pair "
                f"({y}, {x})"
            )
        u[y] = sphi[idx]
    return u


def _chain_cells(state, succ, u, cells, inst, budgets):
    """Cells cut back along the level's successor chains (maxima fixed)."""
    depth = {}

    def dist(y):
        if y in depth:
            return depth[y]
        d = 0 if y not in succ else dist(succ[y]) + 1
        depth[y] = d
        return d

    W = {}
    for y in sorted(state.X, key=lambda t: (dist(t), t.code)):
        if y not in succ:
            W[y] = cells[y]
            continue
        cut = cells[y].intersect(inst.preimage(u[y], W[succ[y]]), budgets)
        if cut.is_empty():
            raise EmptyRefinement(f"level {state.level}: chain cut emptied {y}")
        W[y] = cut
    return W


def build_scheme(instance, depth: int, budgets: Budgets = DEFAULT):
    """Grow the nested cell scheme level by level.

    Level 0 assigns the full space to the empty word.  Each step cuts the
    current cells back along the level's chains, assigns the next map
    strength when the level is an anchor splitting level (searching upward
    from the strengths used so far), seeds the next level's cells from the
    parents (anchor children take the freshly paired cells, chain words
    behind the new anchor pair take transported images), and runs the
    splitting construction groupwise so that all postconditions hold with
    cells cut below 2^-(level word length).
    """
    if depth < 0:
        raise InvalidLevel("depth must be a natural number")
    if getattr(instance, "family", 1) != 1:
        raise InvalidLevel("the scheme is built over the family-1 maps")
    approx = run(1, depth, budgets)
    event_at = {lvl: n for n, lvl in detect_L_n(approx, budgets).items()}
    sphi = {}
    cells = {BinWord(): FULL_SPACE}
    states = [SchemeState(0, cells, sphi)]
    for l in range(depth):
        st_l, st_n = approx[l], approx[l + 1]
        succ_l = _succ_map(st_l.A)
        succ_n = _succ_map(st_n.A)
        r = event_at.get(l)
        O0 = O1 = None
        qchain = ()
        if r is not None:
            u_l = _scheme_strengths(st_l, succ_l, sphi)
            W = _chain_cells(st_l, succ_l, u_l, cells, instance, budgets)
            tr = anchor_word(r, budgets)
            prev = max(sphi.values()) if sphi else None
            found, O0, O1 = lemma26_find(instance, W[tr], prev, budgets)
            sphi[r] = found
            t0, t1 = tr.append(0), tr.append(1)
            qchain = [t1]
            while qchain[-1] in succ_n:
                qchain.append(succ_n[qchain[-1]])

        V = {}
        parent = {}
        for x in sorted(st_n.X, key=lambda t: t.code):
            parent[x] = x if x in st_l.X else x.prefix(len(x) - 1)
            V[x] = cells[parent[x]]
        if r is not None:
            V[t0], V[t1] = O0, O1
            for i in range(1, len(qchain)):
                prev_word = qchain[i - 1]
                carrier = parent[prev_word]
                V[qchain[i]] = instance.image(u_l[carrier], V[prev_word])

        u_n = {}
        next_phi = _scheme_strengths(st_n, succ_n, sphi)
        for x in st_n.X:
            u_n[x] = next_phi.get(x, 0)

        # group the level's components so that words sharing a parent are
        # split inside one call; cross-group cells live in disjoint parents
        comp = {x: x for x in st_n.X}

        def find(x):
            while comp[x] is not x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        def link(a, b):
            ra, rb = find(a), find(b)
            if ra is not rb:
                comp[ra] = rb

        for y, x in st_n.A:
            link(y, x)
        by_parent = {}
        for x in st_n.X:
            by_parent.setdefault(parent[x], []).append(x)
        for sibs in by_parent.values():
            for other in sibs[1:]:
                link(sibs[0], other)

        groups = {}
        for x in st_n.X:
            groups.setdefault(find(x), []).append(x)
        d_lvl = max(len(x) for x in st_n.X)
        new_cells = {}
        for root in sorted(groups, key=lambda t: t.code):
            members = set(groups[root])
            sub = FiniteOrientedGraph(
                members, {(y, x) for (y, x) in st_n.A if y in members}
            )
            part = MappingTupleAssignment(
                sub, instance, {x: u_n[x] for x in members}, {x: V[x] for x in members}
            )
            done = shrink_47(part, d_lvl, budgets)
            new_cells.update(done.V)
        for x in st_n.X:
            assert new_cells[x].subset(cells[parent[x]])
        cells = new_cells
        states.append(SchemeState(l + 1, cells, sphi))
    return states


def h_eval(states, alpha_prefix):
    """The chain of scheme cells along a point's branch, one per level.

    Raises PrefixTooShort as soon as some level's word on the branch is not
    determined by the given bits.
    """
    w = BinWord.from_str(alpha_prefix) if isinstance(alpha_prefix, str) else alpha_prefix
    chain = []
    for st in states:
        member = None
        for x in sorted(st.cells, key=lambda t: t.code):
            if x.is_prefix_of(w):
                member = x
                break
        if member is None:
            raise PrefixTooShort(
                f"level {st.level} of the scheme needs more than {len(w)} bits"
            )
        chain.append((member, st.cells[member]))
    return chain


def check_scheme_conditions(states, instance=None, budgets: Budgets = DEFAULT):
    """Every per-level invariant of the scheme, reported clause by clause.

    Clauses: cells match the level words; nesting into the parent cell;
    diameter below 2^-level; sibling cells disjoint; all cells at one level
    pairwise disjoint; chain pairs carried with exact domain and image
    containments; edge pairs and their chain prefixes sitting in the paired
    map's domain; strengths strictly increasing.
    """
    if instance is None:
        instance = CantorInstance(1, budgets)
    report = CheckReport()
    if not states:
        return report
    top = states[-1].level
    approx = run(1, top, budgets)
    for st in states:
        ax = approx[st.level]
        if set(st.cells) != set(ax.X):
            report.add("cells-match-level-words", (st.level,))
        for x, cell in st.cells.items():
            if cell.is_empty():
                report.add("cell-nonempty", (st.level, str(x)))
        if st.level == 0:
            continue
        prev = states[st.level - 1]
        for x, cell in st.cells.items():
            par = x if x in prev.cells else x.prefix(len(x) - 1)
            if par not in prev.cells or not cell.subset(prev.cells[par]):
                report.add("cell-nesting", (st.level, str(x)))
            if cell.first_free_coord() < st.level:
                report.add("cell-diameter", (st.level, str(x)))
        words = sorted(st.cells, key=lambda t: t.code)
        for i, x in enumerate(words):
            for y in words[i + 1 :]:
                if not st.cells[x].intersect(st.cells[y], budgets).is_empty():
                    report.add("level-cells-pairwise-disjoint", (st.level, str(x), str(y)))
        succ = _succ_map(ax.A)
        for y, x in sorted(ax.A, key=lambda p: (p[0].code, p[1].code)):
            idx = ax.phi.get((y, x))
            if idx is None or idx not in st.phi:
                report.add("chain-pair-strength-defined", (st.level, str(y), str(x)))
                continue
            n = st.phi[idx]
            if not st.cells[y].subset(instance.domain(n)):
                report.add("chain-pair-domain", (st.level, str(y), str(x)))
            if not st.cells[x].subset(instance.image(n, st.cells[y])):
                report.add("chain-pair-image", (st.level, str(y), str(x)))
        for (y, x), idx in sorted(
            ax.phi.items(), key=lambda kv: (kv[0][0].code, kv[0][1].code)
        ):
            if idx not in st.phi:
                report.add("edge-pair-strength-defined", (st.level, str(y), str(x)))
                continue
            n = st.phi[idx]
            dom = instance.domain(n)
            if not st.cells[y].subset(dom):
                report.add("edge-containment-domain", (st.level, str(y), str(x)))
            if not st.cells[x].subset(instance.image(n, st.cells[y])):
                report.add("edge-containment-image", (st.level, str(y), str(x)))
            walk = y
            while walk != x and walk in succ:
                if not st.cells[walk].subset(dom):
                    report.add("edge-chain-prefix-domain", (st.level, str(y), str(x), str(walk)))
                walk = succ[walk]
    seen = []
    for st in states:
        for idx in sorted(st.phi):
            if idx < len(seen):
                if st.phi[idx] != seen[idx]:
                    report.add("strength-stable", (st.level, idx))
            else:
                if seen and st.phi[idx] <= max(seen):
                    report.add("strength-increasing", (st.level, idx))
                seen.append(st.phi[idx])
    return report


def scheme_state_json(state: SchemeState) -> dict:
    """A plain rendering: level, strengths, and each cell's description."""
    return {
        "level": state.level,
        "phi": {str(n): v for n, v in sorted(state.phi.items())},
        "cells": {
            str(w): state.cells[w].render()
            for w in sorted(state.cells, key=lambda t: t.code)
        },
    }
