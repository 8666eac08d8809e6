"""Stage-by-stage finite approximants of the map family on the word tree.

Each stage carries a maximal antichain of binary words (one cell per member,
jointly covering sequence space), the set of cell pairs whose cylinders meet
some map's graph together with the witnessing map index, a unique-successor
relation picking one outgoing pair per word, and the set of words whose cells
split before the next stage.  Stepping never carries the edge set forward:
it is recomputed from joint satisfiability at every stage.

The stage interplay is tuned to family level 1, where every successor pair
provably keeps a satisfiability witness.  Higher families run too, but a
split can strand a successor pair outside the edge set (an inherited domain
inequality empties one branch); the stepper then treats the stranded pair as
non-expanding and the check suites report the containment failures instead
of hiding them.
"""

from __future__ import annotations

import threading
from types import MappingProxyType

from .config import DEFAULT, Budgets
from .cylinders import SymbolicClopen
from .errors import (
    CapExceeded,
    DecisionOverflow,
    InvalidArgument,
    InvalidLevel,
    PrefixTooShort,
    ResourceBoundary,
)
from .maps import MapId, domain_D, graph_meets
from .orientedgraphs import CheckReport
from .sequences import BinWord, anchor_word, code_bit, code_len, stride, stride_expand


class ApproxState:
    """One stage: the word antichain X, the edge set B with its witness map
    phi, the successor relation A, and the splitting set E.

    Immutable once produced.  phi is read-only and its key set is exactly B.
    """

    __slots__ = ("family", "level", "X", "A", "E", "phi", "B")

    def __init__(self, family, level, X, A, E, phi):
        self.family = family
        self.level = level
        self.X = frozenset(X)
        self.A = frozenset(A)
        self.E = frozenset(E)
        self.phi = MappingProxyType(dict(phi))
        self.B = frozenset(self.phi)

    def lOf(self, y: BinWord) -> int:
        """The resolved length of y: |y|, plus one exactly when y splits."""
        if y not in self.X:
            raise InvalidArgument(f"{y!r} is not a word of this stage")
        return len(y) + 1 if y in self.E else len(y)

    def __eq__(self, other):
        if not isinstance(other, ApproxState):
            return NotImplemented
        return (
            self.family == other.family
            and self.level == other.level
            and self.X == other.X
            and self.A == other.A
            and self.E == other.E
            and dict(self.phi) == dict(other.phi)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"ApproxState(level={self.level}, words={len(self.X)}, "
            f"edges={len(self.B)}, chain={len(self.A)}, splitting={len(self.E)})"
        )


def init(family: int = 1) -> ApproxState:
    """Stage zero: the lone empty-word cell, already marked as splitting."""
    if family < 1:
        raise InvalidLevel("the stage system needs a family level >= 1")
    empty = BinWord(1)
    return ApproxState(family, 0, (empty,), (), (empty,), {})


# ---------------------------------------------------------------------------
# anchor words (the zero-padded seed words, one per materializable stride)


def _anchor_lengths(max_len: int, budgets: Budgets) -> dict:
    """length -> map index, for every padded seed word that could fit."""
    out = {}
    n = 0
    while True:
        st = stride(n, budgets)
        if st > max_len:
            return out
        out[st] = n
        n += 1


def anchor_index(word: BinWord, budgets: Budgets = DEFAULT):
    """The map index whose padded seed word equals `word`, or None."""
    if len(word) == 0:
        return None
    q = _anchor_lengths(len(word), budgets).get(len(word))
    if q is None:
        return None
    return q if word == anchor_word(q, budgets) else None


# ---------------------------------------------------------------------------
# the three stage computations: edges, successor advancement, splitting


def _stage_edges(family, words, level, budgets) -> dict:
    """The stage edge set as a dict (source, target) -> witnessing map index.

    For each feasible map index the antichain is walked once per potential
    source: a partner bit is forced wherever the map reads inside the source
    word (and at the stride coordinate), and branches freely beyond it.  At
    family level 1 every walk result is a real pair; higher families keep a
    joint-satisfiability filter because a domain inequality can empty a
    branch the walk cannot see.
    """
    phi = {}
    if not words:
        return phi
    member_codes = {w.code for w in words}
    max_len = max(code_len(c) for c in member_codes)
    n = 0
    while stride(n, budgets) < level:
        st = stride(n, budgets)
        seed0 = anchor_word(n, budgets).append(0)
        reads = [stride_expand(family, n, k, budgets) for k in range(max_len + 1)]
        need_filter = family != 1
        ident = MapId(family, n)
        for y in words:
            ylen = len(y)
            if ylen <= st or not seed0.is_prefix_of(y):
                continue
            ycode = y.code
            stack = [1]
            while stack:
                c = stack.pop()
                if c in member_codes:
                    if code_len(c) > st:
                        x = BinWord(c)
                        if not need_filter or graph_meets(ident, y, x, budgets):
                            phi[(y, x)] = n
                    continue
                k = code_len(c)
                if k >= max_len:
                    continue
                if k == st:
                    stack.append((c << 1) | 1)
                    continue
                r = reads[k]
                if r < ylen:
                    stack.append((c << 1) | code_bit(ycode, r))
                else:
                    c2 = c << 1
                    stack.append(c2)
                    stack.append(c2 | 1)
        n += 1
    return phi


def _advanced_chain(state: ApproxState, budgets: Budgets) -> frozenset:
    """The next stage's successor pairs, case by case on whether the two
    endpoints split, with the padded seed words handled by their own rule."""
    family = state.family
    lengths = _anchor_lengths(max((len(w) for w in state.X), default=0), budgets)
    anchors = set()
    for w in state.X:
        q = lengths.get(len(w))
        if q is not None and w == anchor_word(q, budgets):
            anchors.add(w)
    sources = {y for y, _ in state.A}
    out = set()
    for w in anchors:
        if w in state.E and w not in sources:
            out.add((w.append(0), w.append(1)))
    theta = {}
    for y, x in state.A:
        if x not in state.E:
            if y not in state.E:
                out.add((y, x))
            elif y not in anchors:
                out.add((y.append(0), x))
                out.add((y.append(1), x))
            else:
                y1 = y.append(1)
                out.add((y1, x))
                out.add((y.append(0), y1))
        else:
            n = state.phi.get((y, x))
            if n is None:
                raise InvalidArgument(
                    "stage invariant broken: a successor pair with a "
                    "splitting target has no edge witness"
                )
            key = (n, len(x))
            t = theta.get(key)
            if t is None:
                t = theta[key] = stride_expand(family, n, len(x), budgets)
            if y in state.E:
                for eta in (0, 1):
                    yy = y.append(eta)
                    out.add((yy, x.append(yy.bit(t))))
            else:
                out.add((y, x.append(y.bit(t))))
    return frozenset(out)


def _splitting_set(family, words, chain_pairs, phi, budgets) -> frozenset:
    """Decide which stage words split, walking words by their longest known
    distance from a chain-minimal word.

    A word with predecessors splits when every predecessor reads the word's
    next coordinate strictly inside that predecessor's resolved length, and
    the word does not sit beyond the head of a padded-seed word's successor
    chain whose head splits at this same stage.  A pair that lost its edge
    witness never certifies a split.
    """
    succ = {}
    preds = {}
    for y, x in chain_pairs:
        succ[y] = x
        preds.setdefault(x, []).append(y)

    position = {}
    budget = 4 * (len(words) + len(chain_pairs)) + 8
    for w in words:
        stack = [w]
        spent = 0
        while stack:
            spent += 1
            if spent > budget:
                raise InvalidArgument("stage relation cycles; split order undefined")
            v = stack[-1]
            if v in position:
                stack.pop()
                continue
            ps = preds.get(v)
            if not ps:
                position[v] = 1
                stack.pop()
                continue
            todo = [p for p in ps if p not in position]
            if todo:
                stack.extend(todo)
                continue
            position[v] = 1 + max(position[p] for p in ps)
            stack.pop()

    lengths = _anchor_lengths(max((len(w) for w in words), default=0), budgets)
    theta = {}
    chosen = set()
    blocked = set()
    for x in sorted(words, key=lambda w: (position[w], str(w))):
        ps = preds.get(x)
        if ps:
            if x in blocked:
                continue
            ok = True
            for y in ps:
                n = phi.get((y, x))
                if n is None:
                    ok = False
                    break
                key = (n, len(x))
                t = theta.get(key)
                if t is None:
                    t = theta[key] = stride_expand(family, n, len(x), budgets)
                if t >= len(y) + (1 if y in chosen else 0):
                    ok = False
                    break
            if not ok:
                continue
        chosen.add(x)
        q = lengths.get(len(x))
        if q is not None and x == anchor_word(q, budgets):
            v = x
            while v in succ:
                v = succ[v]
                blocked.add(v)
    return frozenset(chosen)


def step(state: ApproxState, budgets: Budgets = DEFAULT) -> ApproxState:
    """The next stage: split every marked cell, recompute the edge set and
    its witnesses, advance the successor relation, re-decide the splits."""
    next_words = set()
    for w in state.X:
        if w in state.E:
            next_words.add(w.append(0))
            next_words.add(w.append(1))
        else:
            next_words.add(w)
    if len(next_words) > budgets.max_words:
        raise CapExceeded(
            f"stage {state.level + 1} needs {len(next_words)} words, "
            f"cap is {budgets.max_words}"
        )
    level = state.level + 1
    phi = _stage_edges(state.family, next_words, level, budgets)
    chain = _advanced_chain(state, budgets)
    splitting = _splitting_set(state.family, next_words, chain, phi, budgets)
    return ApproxState(state.family, level, next_words, chain, splitting, phi)


_stage_cache: dict = {}
_stage_lock = threading.Lock()


def run(L: int, depth: int, budgets: Budgets = DEFAULT) -> list:
    """Stages 0..depth for family L, memoized per family and shift constant
    (budgets only bound what may be materialized, they never change values).
    """
    if depth < 0:
        raise InvalidArgument("depth must be a natural")
    if depth > budgets.max_depth:
        raise DecisionOverflow(
            f"depth {depth} is past the {budgets.max_depth}-stage budget"
        )
    key = (L, budgets.shift_base)
    first = init(L)
    with _stage_lock:
        states = _stage_cache.setdefault(key, [first])
        while len(states) <= depth:
            try:
                states.append(step(states[-1], budgets))
            except ResourceBoundary as err:
                raise type(err)(f"stage {len(states)}: {err}") from err
        out = list(states[: depth + 1])
    for st in out:
        if len(st.X) > budgets.max_words:
            raise CapExceeded(
                f"stage {st.level} holds {len(st.X)} words, cap is {budgets.max_words}"
            )
    return out


def detect_L_n(states, budgets: Budgets = DEFAULT) -> dict:
    """First level whose splitting set contains each padded seed word."""
    top = max((len(w) for st in states for w in st.X), default=0)
    lengths = _anchor_lengths(top, budgets)
    found = {}
    for state in sorted(states, key=lambda s: s.level):
        for w in state.E:
            q = lengths.get(len(w))
            if q is not None and q not in found and w == anchor_word(q, budgets):
                found[q] = state.level
    return found


# ---------------------------------------------------------------------------
# check suites


def check_lemma_53_54(states) -> CheckReport:
    """Per stage: the successor relation is an uogas contained in the edge
    set, and every successor chain fits inside the stage's length bound."""
    report = CheckReport()
    for state in states:
        lvl = state.level
        succ = {}
        seen_undirected = set()
        parent = {}

        def find(c):
            root = c
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(c, c) != c:
                parent[c], c = root, parent[c]
            return root

        for y, x in sorted(state.A, key=lambda p: (p[0].code, p[1].code)):
            if y == x:
                report.add("irreflexive", (lvl, str(y)))
                continue
            if (x, y) in state.A and y.code < x.code:
                report.add("antisymmetric", (lvl, str(y), str(x)))
            prev = succ.get(y)
            if prev is not None and prev != x:
                report.add("unique-successor", (lvl, str(y), str(prev), str(x)))
            succ[y] = x
            if (y, x) not in state.B:
                report.add("contained-in-edge-set", (lvl, str(y), str(x)))
            key = (min(y.code, x.code), max(y.code, x.code))
            if key in seen_undirected:
                continue
            seen_undirected.add(key)
            ry, rx = find(y.code), find(x.code)
            if ry == rx:
                report.add("acyclic-symmetrization", (lvl, str(y), str(x)))
            else:
                parent[ry] = rx
        depth = {}
        bound = max(lvl, 1)
        for w in state.X:
            path = []
            v = w
            broke = False
            while v not in depth and v in succ:
                path.append(v)
                v = succ[v]
                if len(path) > len(state.X):
                    broke = True
                    break
            if broke:
                continue
            d = depth.get(v, 1)
            depth.setdefault(v, d)
            for u in reversed(path):
                d += 1
                depth[u] = d
            if depth[w] > bound:
                report.add("chain-length-bound", (lvl, str(w), depth[w]))
    return report


def check_lemma_57(states) -> CheckReport:
    """Per stage, per edge: the target lies on the source's successor chain
    strictly past the source, the edge's witness reappears at the landing
    step and is the minimum over the walked steps, and the walked witnesses
    are pairwise distinct.  Only defined at family level 1."""
    states = list(states)
    if states and states[0].family != 1:
        raise InvalidLevel("the chain-position suite is defined at family level 1")
    report = CheckReport()
    for state in states:
        lvl = state.level
        succ = {y: x for y, x in state.A}
        chains = {}
        for y, x in sorted(state.B, key=lambda p: (p[0].code, p[1].code)):
            chain = chains.get(y)
            if chain is None:
                chain = [y]
                v = y
                while v in succ and len(chain) <= len(state.X):
                    v = succ[v]
                    chain.append(v)
                chains[y] = chain
            try:
                j = chain.index(x)
            except ValueError:
                report.add("target-on-chain", (lvl, str(y), str(x)))
                continue
            if j < 1:
                report.add("target-on-chain", (lvl, str(y), str(x)))
                continue
            walked = []
            stranded = False
            for i in range(j):
                value = state.phi.get((chain[i], chain[i + 1]))
                if value is None:
                    report.add(
                        "chain-step-in-edge-set",
                        (lvl, str(chain[i]), str(chain[i + 1])),
                    )
                    stranded = True
                    break
                walked.append(value)
            if stranded:
                continue
            witness = state.phi[(y, x)]
            if walked[-1] != witness or min(walked) != witness:
                report.add(
                    "landing-index-minimal",
                    (lvl, str(y), str(x), tuple(walked), witness),
                )
            if len(set(walked)) != len(walked):
                report.add("index-injective", (lvl, str(y), str(x), tuple(walked)))
    return report


def check_lemma_58(states, n: int, alpha_prefix, budgets: Budgets = DEFAULT) -> CheckReport:
    """Follow one input prefix through the stages: wherever a stage antichain
    resolves a strictly longer prefix past the seed block, the stage edge set
    must pair it with that stage's prefix of the image stream, with the right
    witness, and those image prefixes must be nested."""
    states = sorted(states, key=lambda s: s.level)
    if not states:
        raise InvalidArgument("no stages to check against")
    family = states[0].family
    w = BinWord.from_str(alpha_prefix) if isinstance(alpha_prefix, str) else alpha_prefix
    seed0 = anchor_word(n, budgets).append(0)
    if not seed0.is_prefix_of(w):
        raise InvalidArgument("the probe prefix must extend the seed-then-0 word")
    probe = SymbolicClopen(w, (), budgets)
    if probe.intersect(domain_D(MapId(family, n), budgets), budgets).is_empty():
        raise InvalidArgument("the probe prefix already leaves the map's domain")
    st_n = stride(n, budgets)
    wlen = len(w)
    wcode = w.code

    def image_bit(i):
        if i == st_n:
            return 1
        c = stride_expand(family, n, i, budgets)
        if c < wlen:
            return (wcode >> (wlen - 1 - c)) & 1
        return None

    report = CheckReport()
    prev_target = anchor_word(n, budgets).append(1)
    prev_len = st_n + 1
    checks = 0
    for state in states[1:]:
        codes = {x.code for x in state.X}
        source = None
        for m in range(min(wlen, state.level) + 1):
            pc = wcode >> (wlen - m)
            if pc in codes:
                source = BinWord(pc)
                break
        if source is None:
            break
        target_code = 1
        tlen = 0
        target = None
        while tlen <= state.level:
            if target_code in codes:
                target = BinWord(target_code)
                break
            bit = image_bit(tlen)
            if bit is None:
                break
            target_code = (target_code << 1) | bit
            tlen += 1
        if target is None:
            break
        k = len(source)
        if k <= st_n + 1 or k <= prev_len:
            continue
        checks += 1
        pair = (source, target)
        if pair not in state.B:
            report.add("prefix-pair-in-edge-set", (state.level, str(source), str(target)))
        elif state.phi[pair] != n:
            report.add(
                "prefix-pair-witness",
                (state.level, str(source), str(target), state.phi[pair]),
            )
        if not prev_target.is_prefix_of(target):
            report.add(
                "nested-image-prefixes",
                (state.level, str(prev_target), str(target)),
            )
        prev_target = target
        prev_len = k
    if checks == 0:
        raise PrefixTooShort(
            "no stage resolved a checkable prefix past the seed block; "
            "lengthen the prefix or deepen the run"
        )
    return report


# ---------------------------------------------------------------------------
# structural predicates and emission


def is_maximal_antichain(words) -> bool:
    """Prefix-freeness plus exact total measure one."""
    ws = sorted(str(w) for w in words)
    if not ws:
        return False
    for a, b in zip(ws, ws[1:]):
        if b.startswith(a):
            return False
    top = max(len(s) for s in ws)
    return sum(1 << (top - len(s)) for s in ws) == 1 << top


def state_json(state: ApproxState) -> dict:
    """Plain-data snapshot of one stage, ready for json.dump."""
    by_code = lambda w: w.code
    by_pair = lambda p: (p[0].code, p[1].code)
    return {
        "level": state.level,
        "X": [str(w) for w in sorted(state.X, key=by_code)],
        "B": [
            [str(y), str(x), state.phi[(y, x)]]
            for y, x in sorted(state.B, key=by_pair)
        ],
        "A": [[str(y), str(x)] for y, x in sorted(state.A, key=by_pair)],
        "E": [str(w) for w in sorted(state.E, key=by_code)],
    }


def state_dot(state: ApproxState, name=None) -> str:
    """DOT text for one stage: words as nodes (doubled border on splitting
    words), solid arrows for successor pairs, dashed for the other edges,
    every known arrow labeled by its witnessing map index."""
    gname = name if name is not None else f"stage{state.level}"
    def text(w):
        return str(w) if len(w) else "<empty>"
    lines = [f"digraph {gname} {{"]
    for w in sorted(state.X, key=lambda v: v.code):
        marker = " [peripheries=2]" if w in state.E else ""
        lines.append(f'  "{text(w)}"{marker};')
    for y, x in sorted(state.A | state.B, key=lambda p: (p[0].code, p[1].code)):
        value = state.phi.get((y, x))
        label = f'label="{value}"' if value is not None else 'label="?"'
        style = "" if (y, x) in state.A else ", style=dashed"
        lines.append(f'  "{text(y)}" -> "{text(x)}" [{label}{style}];')
    lines.append("}")
    return "\n".join(lines)
