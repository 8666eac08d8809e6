"""The indexed family of coordinate-rearranging partial maps on sequence space.

Map (L, n) is defined on points extending the level-n seed word followed by 0;
it forces a 1 at the stride coordinate and reads every other output coordinate
from the input through the stride-local index expansion.  Everything a caller
can ask is finitary: single output coordinates, compositions evaluated by
threading one coordinate through the expansion chain, exact clopen images and
preimages, and edge decisions between cylinders.

Point-level domain checks are exact for rule-free points.  A point carrying an
evaluation rule is checked on its leading window, its explicit bits, and the
seed word's distinguishing positions; beyond that the check is trusting, and
the docstrings of the entry points say so.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import DEFAULT, Budgets
from .cylinders import (
    EMPTY_SET,
    LazyPoint,
    SymbolicClopen,
    atom_const,
    atom_ne,
    point_eval,
)
from .errors import InvalidArgument, OutsideDomain
from .sequences import (
    BinWord,
    anchor_bit,
    anchor_word,
    expand_index_inverse,
    lenlex_word,
    padded_word,
    stride,
    stride_expand,
    tower_exp,
)

EDGE_YES = "yes"
EDGE_NO = "no"
EDGE_UNKNOWN = "unknown-at-this-precision"


@dataclass(frozen=True)
class MapId:
    """Names one map of the family: level L >= 1 and index n >= 0."""

    L: int
    n: int

    def __post_init__(self):
        if self.L < 1:
            raise InvalidArgument("family level must be >= 1")
        if self.n < 0:
            raise InvalidArgument("map index must be a natural")


@dataclass(frozen=True)
class PathSpec:
    """A finite sequence of map indices; stage 0 is applied last (outermost)."""

    stages: tuple

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if any((not isinstance(v, int)) or v < 0 for v in stages):
            raise InvalidArgument("path stages are naturals")

    def __len__(self):
        return len(self.stages)

    def __iter__(self):
        return iter(self.stages)

    def __getitem__(self, i):
        return self.stages[i]

    def tail(self) -> "PathSpec":
        """Drop the outermost stage."""
        if not self.stages:
            raise InvalidArgument("tail of an empty path")
        return PathSpec(self.stages[1:])

    def drop_last(self) -> "PathSpec":
        """Drop the innermost stage."""
        if not self.stages:
            raise InvalidArgument("drop_last of an empty path")
        return PathSpec(self.stages[:-1])

    def reverse(self) -> "PathSpec":
        if not self.stages:
            raise InvalidArgument("reverse of an empty path")
        return PathSpec(self.stages[::-1])


def _as_word(w) -> BinWord:
    if isinstance(w, BinWord):
        return w
    if isinstance(w, str):
        return BinWord.from_str(w)
    raise InvalidArgument(f"expected a binary word, got {type(w).__name__}")


def _stages_of(s):
    if isinstance(s, PathSpec):
        return s.stages
    return tuple(s)


# ---------------------------------------------------------------------------
# domains


def domain_D(ident: MapId, budgets: Budgets = DEFAULT) -> SymbolicClopen:
    """The clopen domain of map (L, n): the seed-word-then-0 cylinder, plus at
    levels >= 2 the n+1 inequality atoms along the powers-of-three ladder.
    """
    base = anchor_word(ident.n, budgets).append(0)
    if ident.L == 1:
        return SymbolicClopen(base, (), budgets)
    st = stride(ident.n, budgets)
    atoms = [atom_ne(st * 3**m, st * 3 ** (m + 1)) for m in range(ident.n + 1)]
    return SymbolicClopen(base, atoms, budgets)


def _point_in_seed(n: int, p: LazyPoint, budgets: Budgets) -> bool:
    """Does p extend the level-n seed word followed by 0?

    Exact for rule-free points.  For a point with a rule the check covers the
    leading probe window, all explicit bits, and the final 0 position.
    """
    st = stride(n, budgets)
    w = lenlex_word(n)
    if p.rule is None:
        if p.default == 0:
            for i, b in enumerate(w.bits()):
                if p.eval(i) != b:
                    return False
            for k, v in p.explicit.items():
                if 0 <= k <= st and v != (anchor_bit(n, k, budgets) if k < st else 0):
                    return False
            return True
        pinned = sum(1 for k in p.explicit if 0 <= k <= st)
        if st + 1 - pinned > sum(w.bits()):
            return False
        return all(
            p.eval(i) == (anchor_bit(n, i, budgets) if i < st else 0)
            for i in range(st + 1)
        )
    limit = min(st + 1, budgets.point_probe_bits)
    for i in range(limit):
        if p.eval(i) != (anchor_bit(n, i, budgets) if i < st else 0):
            return False
    if point_eval(p, st) != 0:
        return False
    for k in p.explicit:
        if 0 <= k <= st and p.eval(k) != (anchor_bit(n, k, budgets) if k < st else 0):
            return False
    return True


def point_in_domain(ident: MapId, p: LazyPoint, budgets: Budgets = DEFAULT) -> bool:
    """Membership of a point in the full domain of map (L, n), inequality
    atoms included (checked exactly; the cylinder part as in _point_in_seed).
    """
    if not _point_in_seed(ident.n, p, budgets):
        return False
    if ident.L >= 2:
        st = stride(ident.n, budgets)
        vals = [point_eval(p, st * 3**m) for m in range(ident.n + 2)]
        if any(vals[m] == vals[m + 1] for m in range(ident.n + 1)):
            return False
    return True


def domain_point(ident: MapId, extra=None, budgets: Budgets = DEFAULT) -> LazyPoint:
    """A rule-free member of the map's domain: the seed bits, alternating bits
    on the powers-of-three ladder when the level asks for them, and any extra
    explicit bits merged last (the caller keeps membership when overriding).
    """
    w = lenlex_word(ident.n)
    bits = {i: 1 for i, b in enumerate(w.bits()) if b}
    if ident.L >= 2:
        st = stride(ident.n, budgets)
        for m in range(ident.n + 1):
            bits[st * 3 ** (m + 1)] = (m + 1) % 2
    if extra:
        bits.update(extra)
    return LazyPoint(bits)


# ---------------------------------------------------------------------------
# evaluation


def g_eval_coord(ident: MapId, p: LazyPoint, k: int, budgets: Budgets = DEFAULT) -> int:
    """Output coordinate k of map (L, n) applied to p: the forced 1 at the
    stride coordinate, the expanded input coordinate everywhere else.
    """
    if k < 0:
        raise InvalidArgument("coordinates are natural numbers")
    if not _point_in_seed(ident.n, p, budgets):
        raise OutsideDomain(
            f"point does not extend the seed word of map ({ident.L},{ident.n})"
        )
    st = stride(ident.n, budgets)
    if k == st:
        return 1
    return point_eval(p, stride_expand(ident.L, ident.n, k, budgets))


def g_point(ident: MapId, p: LazyPoint, budgets: Budgets = DEFAULT) -> LazyPoint:
    """The image point, evaluated lazily; raises OutsideDomain up front."""
    if not _point_in_seed(ident.n, p, budgets):
        raise OutsideDomain(
            f"point does not extend the seed word of map ({ident.L},{ident.n})"
        )
    st = stride(ident.n, budgets)
    L, n = ident.L, ident.n

    def derived(k):
        if k == st:
            return 1
        return point_eval(p, stride_expand(L, n, k, budgets))

    return LazyPoint({}, 0, derived)


def _virtual_eval(L, stages, p, c, budgets):
    """Coordinate c of the composition of `stages` applied to p (no checks)."""
    for n in stages:
        if c == stride(n, budgets):
            return 1
        c = stride_expand(L, n, c, budgets)
    return point_eval(p, c)


def _seed_check_positions(n, budgets):
    """(coordinate, expected bit) pairs that distinguish the seed-then-0 word."""
    st = stride(n, budgets)
    if st <= 64:
        return [(i, anchor_bit(n, i, budgets)) for i in range(st)] + [(st, 0)]
    w = lenlex_word(n)
    out = [(i, w.bit(i)) for i in range(len(w))]
    out.append((len(w), 0))
    out.append((st, 0))
    return out


def _check_composition_stages(L, stages, p, budgets):
    """Verify, innermost first, that each stage's input sits in that stage's
    seed cylinder.  Inner stages are checked on the distinguishing positions
    only (the inputs there are derived points read through the expansion).
    """
    last = len(stages) - 1
    for i in range(last, -1, -1):
        n = stages[i]
        if i == last:
            ok = _point_in_seed(n, p, budgets)
        else:
            suffix = stages[i + 1 :]
            ok = all(
                _virtual_eval(L, suffix, p, c, budgets) == want
                for c, want in _seed_check_positions(n, budgets)
            )
        if not ok:
            raise OutsideDomain(
                f"stage {i} input does not extend the seed word of map ({L},{n})",
                stage=i,
            )


def g_compose_eval(L: int, s, p: LazyPoint, k: int, budgets: Budgets = DEFAULT) -> int:
    """Coordinate k of the composition along s (stage 0 outermost, the last
    stage applied to p first).  The coordinate threads through the stages in
    outer-to-inner order: a stride hit returns the forced 1, otherwise the
    coordinate expands and moves one stage inward.
    """
    stages = _stages_of(s)
    if not stages:
        raise InvalidArgument("empty composition")
    if k < 0:
        raise InvalidArgument("coordinates are natural numbers")
    _check_composition_stages(L, stages, p, budgets)
    for n in stages:
        if k == stride(n, budgets):
            return 1
        k = stride_expand(L, n, k, budgets)
    return point_eval(p, k)


def check_condition_d(
    L: int, m: int, n: int, p: LazyPoint, coords, budgets: Budgets = DEFAULT
) -> bool:
    """Does applying map n and then map m agree with applying map m alone,
    at every coordinate in coords?  Exact at level 1; at higher levels the
    two-step route lands on shifted coordinates and the identity can fail.
    """
    if m >= n:
        raise InvalidArgument("needs m < n")
    return all(
        g_compose_eval(L, (m, n), p, k, budgets) == g_compose_eval(L, (m,), p, k, budgets)
        for k in coords
    )


# ---------------------------------------------------------------------------
# clopen transport


def _read_inverse(L, n, c, budgets):
    """The output coordinate k that reads input coordinate c, or None.

    k is the unique solution of stride_expand(L, n, k) == c, except that the
    stride coordinate never counts: its output bit is forced to 1, so the
    input bit at its expansion target is forgotten by the map.
    """
    st = stride(n, budgets)
    if c == 0 or c % st:
        return c
    i = expand_index_inverse(L, c // st, budgets)
    if i is None:
        return None
    k = st * i
    return None if k == st else k


def image_clopen(ident: MapId, C: SymbolicClopen, budgets: Budgets = DEFAULT) -> SymbolicClopen:
    """Exact image of C under map (L, n).

    C is first restricted to the map's domain (inequality atoms included at
    levels >= 2); a disjoint input yields the empty set.  Constraints of the
    restriction survive exactly when their coordinates are read by some output
    coordinate, and transport along the inverse expansion; constraint classes
    project member by member, so derived equalities carry over.
    """
    D = domain_D(ident, budgets)
    C1 = C.intersect(D, budgets)
    if C1.is_empty():
        return EMPTY_SET
    L, n = ident.L, ident.n
    st = stride(n, budgets)
    atoms = []
    for c in range(st, len(C1.base)):
        k = _read_inverse(L, n, c, budgets)
        if k is not None:
            atoms.append(atom_const(k, C1.base.bit(c)))
    for const_v, members in C1.classes():
        kept = []
        for c, parity in members:
            k = _read_inverse(L, n, c, budgets)
            if k is not None:
                kept.append((k, parity))
        if not kept:
            continue
        if const_v is not None:
            atoms.extend(atom_const(k, const_v ^ parity) for k, parity in kept)
        else:
            k0, p0 = kept[0]
            atoms.extend(("rel", k0, k, p0 ^ parity) for k, parity in kept[1:])
    return SymbolicClopen(anchor_word(n, budgets).append(1), atoms, budgets)


def preimage_clopen(ident: MapId, C: SymbolicClopen, budgets: Budgets = DEFAULT) -> SymbolicClopen:
    """Exact preimage of C under map (L, n), intersected with the map's domain.

    Output-side constraints pull back along the expansion; the forced 1 at the
    stride coordinate either holds in C (no input constraint) or empties the
    preimage outright.
    """
    L, n = ident.L, ident.n
    st = stride(n, budgets)
    range_cyl = SymbolicClopen(anchor_word(n, budgets).append(1), (), budgets)
    C1 = C.intersect(range_cyl, budgets)
    if C1.is_empty():
        return EMPTY_SET
    atoms = []
    for c in range(st + 1, len(C1.base)):
        atoms.append(atom_const(stride_expand(L, n, c, budgets), C1.base.bit(c)))
    for const_v, members in C1.classes():
        mapped = [(stride_expand(L, n, c, budgets), parity) for c, parity in members]
        if const_v is not None:
            atoms.extend(atom_const(k, const_v ^ parity) for k, parity in mapped)
        else:
            k0, p0 = mapped[0]
            atoms.extend(("rel", k0, k, p0 ^ parity) for k, parity in mapped[1:])
    pre = SymbolicClopen(anchor_word(n, budgets).append(0), atoms, budgets)
    return pre.intersect(domain_D(ident, budgets), budgets)


# ---------------------------------------------------------------------------
# edge decisions


def graph_meets(ident: MapId, y, x, budgets: Budgets = DEFAULT) -> bool:
    """Does the graph of map (L, n), restricted to its domain, meet N_y x N_x?

    Decided exactly by joint satisfiability: the y prefix, the domain atoms,
    and one pulled-back constraint per readable x position.
    """
    y = _as_word(y)
    x = _as_word(x)
    L, n = ident.L, ident.n
    st = stride(n, budgets)
    if st < len(x) and x.bit(st) == 0:
        return False
    yset = SymbolicClopen(y, (), budgets).intersect(domain_D(ident, budgets), budgets)
    if yset.is_empty():
        return False
    atoms = []
    for k in range(len(x)):
        if k == st:
            continue
        atoms.append(atom_const(stride_expand(L, n, k, budgets), x.bit(k)))
    return not yset.with_atoms(atoms, budgets).is_empty()


def is_G0_edge(a, b) -> str:
    """Edge decision for the dense-word digraph, from two finite prefixes.

    "yes" when some level's full edge pattern is visible inside the prefixes:
    the level word is a common prefix, a continues with 0 and b with 1, and
    the visible tails agree.  "no" when every level is refuted.  Comparable
    prefixes can never refute every level, so they answer "unknown".
    """
    a = _as_word(a)
    b = _as_word(b)
    lo = min(len(a), len(b))
    for n in range(lo):
        if (
            a.bit(n) == 0
            and b.bit(n) == 1
            and a.prefix(n) == padded_word(n) == b.prefix(n)
            and all(a.bit(i) == b.bit(i) for i in range(n + 1, lo))
        ):
            return EDGE_YES
    if a.prefix(lo) == b.prefix(lo):
        return EDGE_UNKNOWN
    for n in range(max(len(a), len(b)) + 1):
        if _pattern_compatible(a, b, n):
            return EDGE_UNKNOWN
    return EDGE_NO


def _pattern_compatible(a, b, n):
    """Could extensions of (a, b) realize the level-n edge pattern?"""
    w = padded_word(n)
    if not _compat(a, w.append(0)) or not _compat(b, w.append(1)):
        return False
    return all(a.bit(i) == b.bit(i) for i in range(n + 1, min(len(a), len(b))))


def _compat(u, v):
    m = min(len(u), len(v))
    return u.prefix(m) == v.prefix(m)


# ---------------------------------------------------------------------------
# tagged direct sums


def _primes(count):
    out = []
    cand = 2
    while len(out) < count:
        if all(cand % q for q in out):
            out.append(cand)
        cand += 1
    return out


def sum_tag_set(alpha_prefix) -> list:
    """The leading tag values selected by a binary prefix: the running product
    of primes, each raised to one more than the corresponding bit.
    """
    w = _as_word(alpha_prefix)
    ps = _primes(len(w))
    out = []
    acc = 1
    for i, bit in enumerate(w.bits()):
        acc *= ps[i] ** (bit + 1)
        out.append(acc)
    return out


@dataclass(frozen=True)
class TaggedSumSpace:
    """Finitely many tagged copies of sequence space, edges only within a copy.

    Within the copy tagged 0 edges follow the dense-word digraph and keep its
    tri-state answers.  Within a copy tagged L >= 1 the edge relation of the
    level-L map family is exactly decidable on cylinders: when the two words
    are prefix-compatible, every sufficiently deep member map witnesses a
    meeting pair, and otherwise only the finitely many maps whose stride fits
    inside the words can.  Cross-tag pairs never have edges.
    """

    tags: tuple

    def __post_init__(self):
        tags = tuple(self.tags)
        object.__setattr__(self, "tags", tags)
        if any((not isinstance(t, int)) or t < 0 for t in tags):
            raise InvalidArgument("sum tags are naturals")
        if len(set(tags)) != len(tags):
            raise InvalidArgument("sum tags must be distinct")

    def has_tag(self, t) -> bool:
        return t in self.tags

    def edge_rule(self, tag_y, y, tag_x, x, budgets: Budgets = DEFAULT) -> str:
        if not self.has_tag(tag_y) or not self.has_tag(tag_x):
            raise InvalidArgument("unknown tag")
        if tag_y != tag_x:
            return EDGE_NO
        if tag_y == 0:
            return is_G0_edge(y, x)
        y = _as_word(y)
        x = _as_word(x)
        if _compat(y, x):
            # any map whose stride clears both words carries N_y into N_x:
            # pad the common extension into the map's seed word and the
            # transported bits all land on untouched coordinates.
            return EDGE_YES
        bound = max(len(y), len(x), 1)
        n = 0
        while tower_exp(n, budgets) < bound.bit_length():
            if graph_meets(MapId(tag_y, n), y, x, budgets):
                return EDGE_YES
            n += 1
        return EDGE_NO
