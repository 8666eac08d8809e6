"""Assignment-toolkit tests: frozen refinement examples worked out through
the clopen transport oracle, randomized postcondition suites for the
splitting construction, and the level scheme checked against hand traces."""

import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantorlab.config import DEFAULT, Budgets
from cantorlab.cylinders import FULL_SPACE, atom_const, cylinder, point_eval
from cantorlab.embedding import (
    CantorInstance,
    MappingTupleAssignment,
    SchemeState,
    build_scheme,
    check_scheme_conditions,
    h_eval,
    in_E,
    in_U,
    lemma25_check,
    lemma26_find,
    refine_45,
    refine_46,
    scheme_state_json,
    shrink_47,
)
from cantorlab.errors import (
    EmptyRefinement,
    EmptySet,
    InvalidArgument,
    InvalidLevel,
    NotFoundWithinBudget,
    PrefixTooShort,
    TooManyFreeCoordinates,
)
from cantorlab.maps import MapId, domain_D, g_point, image_clopen
from cantorlab.orientedgraphs import FiniteOrientedGraph
from cantorlab.sequences import BinWord

W = BinWord.from_str
SCHEME_BUDGETS = dataclasses.replace(DEFAULT, max_free_coords=4096)
INST = CantorInstance()
BIG_INST = CantorInstance(1, SCHEME_BUDGETS)


def edge_graph():
    return FiniteOrientedGraph({"a", "b"}, {("a", "b")})


# ---------------------------------------------------------------------------
# instance operations


def test_pick_distinct_preimages_shares_image():
    """Five preimages of one target, pairwise distinct at probe coordinates."""
    target, pts = INST.pick_distinct_preimages(0, cylinder("00"), 5)
    assert len(pts) == 5
    for i in range(5):
        for j in range(i + 1, 5):
            assert any(point_eval(pts[i], c) != point_eval(pts[j], c) for c in range(24))
    for p in pts:
        q = g_point(MapId(1, 0), p)
        assert all(point_eval(q, c) == point_eval(target, c) for c in range(40))


def test_pick_distinct_preimages_errors():
    """Bad count, off-domain cell, and oversized requests are rejected."""
    with pytest.raises(InvalidArgument):
        INST.pick_distinct_preimages(0, cylinder("00"), 0)
    with pytest.raises(EmptySet):
        INST.pick_distinct_preimages(0, cylinder("1"), 2)
    with pytest.raises(TooManyFreeCoordinates):
        INST.pick_distinct_preimages(0, cylinder("00"), 1 << 25)


def test_point_preimage_is_exact():
    """The preimage point maps back onto the target coordinate by coordinate."""
    target = g_point(MapId(1, 0), cylinder("001").witness_point())
    p = INST.point_preimage(0, cylinder("00"), target)
    q = g_point(MapId(1, 0), p)
    assert all(point_eval(q, c) == point_eval(target, c) for c in range(50))
    assert cylinder("00").contains(p)


def test_point_preimage_rejects_non_image():
    """A target violating the forced output coordinate has no preimage."""
    from cantorlab.cylinders import LazyPoint

    with pytest.raises(InvalidArgument):
        INST.point_preimage(0, cylinder("00"), LazyPoint({}, 0))


def test_cell_around_frozen():
    p = cylinder("01").witness_point()
    got = INST.cell_around(cylinder("01"), p, 4)
    assert got.render() == "N=0100"
    with pytest.raises(InvalidArgument):
        INST.cell_around(cylinder("01"), cylinder("10").witness_point(), 4)


def test_split_below_diameter():
    """The shrunk cell pins every coordinate below the requested depth."""
    got = INST.split_below_diameter(cylinder("0"), 6)
    assert got.first_free_coord() >= 6
    assert got.subset(cylinder("0"))
    from cantorlab.cylinders import EMPTY_SET

    with pytest.raises(EmptySet):
        INST.split_below_diameter(EMPTY_SET, 3)


def test_instance_validation():
    with pytest.raises(InvalidLevel):
        CantorInstance(0)
    assert INST.domain(0).render() == "N=00"
    assert INST.contains(cylinder("01"), cylinder("01").witness_point())


# ---------------------------------------------------------------------------
# assignments and membership


def test_assignment_validation():
    """Missing strengths, missing cells, and empty cells are all rejected."""
    G = edge_graph()
    V = {"a": cylinder("00"), "b": cylinder("01")}
    with pytest.raises(InvalidArgument):
        MappingTupleAssignment(G, INST, {"a": 0}, V)
    with pytest.raises(InvalidArgument):
        MappingTupleAssignment(G, INST, {"a": -1, "b": 0}, V)
    with pytest.raises(InvalidArgument):
        MappingTupleAssignment(G, INST, {"a": 0, "b": 0}, {"a": cylinder("00")})
    from cantorlab.cylinders import EMPTY_SET

    with pytest.raises(InvalidArgument):
        MappingTupleAssignment(G, INST, {"a": 0, "b": 0}, {"a": EMPTY_SET, "b": cylinder("01")})


def test_membership_frozen():
    """The exact-image pair (N_00, N_01) under map 0; shrinking the target
    keeps containment but breaks equality."""
    G = edge_graph()
    exact = MappingTupleAssignment(
        G, INST, {"a": 0, "b": 0}, {"a": cylinder("00"), "b": cylinder("01")}
    )
    assert in_E(exact)
    assert in_U(exact)
    shrunk = MappingTupleAssignment(
        G, INST, {"a": 0, "b": 0}, {"a": cylinder("00"), "b": cylinder("011")}
    )
    assert not in_E(shrunk)
    assert in_U(shrunk)


def test_membership_needs_domain():
    """A source cell outside the map's domain fails both memberships."""
    G = edge_graph()
    bad = MappingTupleAssignment(
        G, INST, {"a": 1, "b": 0}, {"a": cylinder("01"), "b": cylinder("01")}
    )
    assert not in_U(bad)
    assert not in_E(bad)


# ---------------------------------------------------------------------------
# random contained-image assignments


def random_in_u(rng, inst=BIG_INST):
    """A random assignment with contained images: cells are seeded at the
    minimal vertices and pushed forward, targets optionally shrunk at a free
    coordinate so that exactness fails while containment survives."""
    kind = rng.choice(("edge", "fan", "chain"))
    if kind == "edge":
        vertices, edges = {"a", "b"}, {("a", "b")}
        u = {"a": 0, "b": 0}
        Va = cylinder("00")
        if rng.random() < 0.7:
            Va = Va.with_atoms([atom_const(rng.choice((2, 3, 4, 6, 8)), rng.randint(0, 1))])
        V = {"a": Va, "b": inst.image(0, Va)}
        if rng.random() < 0.5:
            V["b"] = V["b"].with_atoms([atom_const(rng.choice((4, 5, 6)), rng.randint(0, 1))])
    elif kind == "fan":
        vertices, edges = {"y1", "y2", "x"}, {("y1", "x"), ("y2", "x")}
        u = {"y1": 0, "y2": 0, "x": 0}
        c = rng.choice((2, 4, 6))
        V = {
            "y1": cylinder("00").with_atoms([atom_const(c, 0)]),
            "y2": cylinder("00").with_atoms([atom_const(c, 1)]),
        }
        V["x"] = inst.image(0, V["y1"]).intersect(inst.image(0, V["y2"]))
        if rng.random() < 0.5:
            V["x"] = V["x"].with_atoms([atom_const(rng.choice((4, 5, 6)), rng.randint(0, 1))])
    else:
        vertices, edges = {"a", "b", "c"}, {("a", "b"), ("b", "c")}
        u = {"a": 1, "b": 0, "c": 0}
        Va = domain_D(MapId(1, 1))
        if rng.random() < 0.5:
            Va = Va.with_atoms([atom_const(rng.choice((16, 32)), rng.randint(0, 1))])
        Vb = inst.image(1, Va)
        if rng.random() < 0.5:
            Vb = Vb.with_atoms([atom_const(rng.choice((10, 12, 14)), rng.randint(0, 1))])
        V = {"a": Va, "b": Vb, "c": inst.image(0, Vb)}
    for extra in range(rng.randint(0, 5 - len(vertices))):
        name = f"z{extra}"
        vertices = vertices | {name}
        u[name] = 0
        V[name] = cylinder("".join(rng.choice("01") for _ in range(rng.randint(0, 3))))
    G = FiniteOrientedGraph(vertices, edges)
    return MappingTupleAssignment(G, inst, u, V)


def test_random_in_u_generator_is_in_u():
    """The generator's output really has contained images."""
    for seed in range(30):
        assert in_U(random_in_u(random.Random(seed)))


# ---------------------------------------------------------------------------
# chain refinement


def test_refine_45_frozen():
    """Cutting N_00 back to the preimage of N_011 pins input coordinate 5."""
    asg = MappingTupleAssignment(
        edge_graph(), INST, {"a": 0, "b": 0}, {"a": cylinder("00"), "b": cylinder("011")}
    )
    out = refine_45(asg)
    assert out.V["a"].render() == "N=00; bit(5)=1"
    assert out.V["b"].render() == "N=011"
    assert in_E(out)


def test_refine_45_empty():
    """Disjoint source and target images empty the cut."""
    asg = MappingTupleAssignment(
        edge_graph(), INST, {"a": 0, "b": 0}, {"a": cylinder("00"), "b": cylinder("11")}
    )
    with pytest.raises(EmptyRefinement):
        refine_45(asg)


@given(seed=st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_refine_45_restores_exactness(seed):
    """On contained images the chain cut lands in the exact-image class,
    shrinking every cell and fixing the maximal ones."""
    asg = random_in_u(random.Random(seed))
    out = refine_45(asg)
    assert in_E(out)
    succs = {y for y, x in asg.graph.edges}
    for v in asg.graph.vertices:
        assert out.V[v].subset(asg.V[v])
        if v not in succs:
            assert asg.V[v].subset(out.V[v])


# ---------------------------------------------------------------------------
# component refinement


def test_refine_46_backward_frozen():
    """A shrunk target pulls the source back through the preimage."""
    asg = MappingTupleAssignment(
        edge_graph(), INST, {"a": 0, "b": 0}, {"a": cylinder("00"), "b": cylinder("01")}
    )
    out = refine_46(asg, "b", cylinder("011"))
    assert out.V["a"].render() == "N=00; bit(5)=1"
    assert out.V["b"].render() == "N=011"
    assert in_E(out)


def test_refine_46_forward_frozen():
    """A shrunk source pushes the target forward through the image."""
    asg = MappingTupleAssignment(
        edge_graph(), INST, {"a": 0, "b": 0}, {"a": cylinder("00"), "b": cylinder("01")}
    )
    out = refine_46(asg, "a", cylinder("001"))
    assert out.V["a"].render() == "N=001"
    assert out.V["b"].render() == "N=01"
    assert in_E(out)


def test_refine_46_leaves_other_components():
    """Vertices outside the pivot's component keep their cells."""
    G = FiniteOrientedGraph({"a", "b", "z"}, {("a", "b")})
    asg = MappingTupleAssignment(
        G,
        INST,
        {"a": 0, "b": 0, "z": 0},
        {"a": cylinder("00"), "b": cylinder("01"), "z": cylinder("1")},
    )
    out = refine_46(asg, "a", cylinder("001"))
    assert out.V["z"].render() == "N=1"


def test_refine_46_validation():
    asg = MappingTupleAssignment(
        edge_graph(), INST, {"a": 0, "b": 0}, {"a": cylinder("00"), "b": cylinder("01")}
    )
    with pytest.raises(InvalidArgument):
        refine_46(asg, "nope", cylinder("0"))
    from cantorlab.cylinders import EMPTY_SET

    with pytest.raises(InvalidArgument):
        refine_46(asg, "a", EMPTY_SET)
    with pytest.raises(InvalidArgument):
        refine_46(asg, "a", cylinder("1"))


# ---------------------------------------------------------------------------
# the splitting construction


def test_shrink_47_frozen_edge():
    """The hand-traced two-vertex run: the source splits at coordinate 2 and
    the chosen branch lands on (N_000, N_01)."""
    asg = MappingTupleAssignment(
        edge_graph(), INST, {"a": 0, "b": 0}, {"a": cylinder("00"), "b": cylinder("01")}
    )
    out = shrink_47(asg, 2)
    assert out.V["a"].render() == "N=000"
    assert out.V["b"].render() == "N=01"
    assert in_E(out)
    assert out.V["a"].intersect(out.V["b"]).is_empty()


def test_shrink_47_validation():
    asg = MappingTupleAssignment(
        edge_graph(), INST, {"a": 0, "b": 0}, {"a": cylinder("00"), "b": cylinder("01")}
    )
    with pytest.raises(InvalidArgument):
        shrink_47(asg, -1)
    G = FiniteOrientedGraph({"a", "b", "c"}, {("a", "b"), ("a", "c")})
    bad = MappingTupleAssignment(
        G,
        INST,
        {"a": 0, "b": 0, "c": 0},
        {"a": cylinder("00"), "b": cylinder("01"), "c": cylinder("01")},
    )
    with pytest.raises(InvalidArgument):
        shrink_47(bad, 2)


def check_shrink_postconditions(asg, d):
    out = shrink_47(asg, d, SCHEME_BUDGETS)
    assert in_E(out)
    vs = sorted(asg.graph.vertices)
    for v in vs:
        assert out.V[v].subset(asg.V[v])
        assert out.V[v].first_free_coord() >= d
    for i, x in enumerate(vs):
        for y in vs[i + 1 :]:
            assert out.V[x].intersect(out.V[y]).is_empty()


@given(seed=st.integers(0, 10**6), d=st.sampled_from((3, 5)))
@settings(max_examples=40, deadline=None)
def test_shrink_47_postconditions(seed, d):
    """Exact images, nested cells, pairwise disjointness, diameter bound."""
    check_shrink_postconditions(random_in_u(random.Random(seed)), d)


# ---------------------------------------------------------------------------
# the two pairing facts


def test_lemma25_frozen():
    """The weaker image of the stronger image stays inside the weaker image."""
    V0 = domain_D(MapId(1, 1))
    V1 = image_clopen(MapId(1, 1), V0)
    assert lemma25_check(INST, V0, V1, 0, 1)
    a = image_clopen(MapId(1, 0), V1)
    b = image_clopen(MapId(1, 0), V0)
    assert a.render() == b.render() == "N=0100"


def test_lemma25_premises():
    V0 = domain_D(MapId(1, 1))
    V1 = image_clopen(MapId(1, 1), V0)
    with pytest.raises(InvalidArgument):
        lemma25_check(INST, V0, V1, 1, 0)
    with pytest.raises(InvalidArgument):
        lemma25_check(INST, cylinder("1"), V1, 0, 1)
    with pytest.raises(InvalidArgument):
        lemma25_check(INST, V0, cylinder("00"), 0, 1)


@given(bits=st.lists(st.sampled_from((16, 32, 48)), max_size=2, unique=True))
@settings(max_examples=20, deadline=None)
def test_lemma25_on_shrunk_cells(bits):
    """Valid premises built from shrunk domain cells always pass."""
    V0 = domain_D(MapId(1, 1)).with_atoms([atom_const(c, 0) for c in bits])
    V1 = image_clopen(MapId(1, 1), V0)
    assert lemma25_check(INST, V0, V1, 0, 1)


def test_lemma26_frozen():
    """The full space pairs with itself through map 0, then map 1 above it."""
    n, V0, V1 = lemma26_find(INST, FULL_SPACE)
    assert (n, V0.render(), V1.render()) == (0, "N=00", "N=01")
    n, V0, V1 = lemma26_find(INST, FULL_SPACE, 0)
    assert n == 1
    assert V0.render() == "N=00000000_0"
    assert V1.render() == "N=00000000_1"


def test_lemma26_errors():
    from cantorlab.cylinders import EMPTY_SET

    with pytest.raises(EmptySet):
        lemma26_find(INST, EMPTY_SET)
    with pytest.raises(NotFoundWithinBudget):
        lemma26_find(INST, FULL_SPACE, 1)
    with pytest.raises(NotFoundWithinBudget):
        lemma26_find(INST, cylinder("1"))


# ---------------------------------------------------------------------------
# the level scheme


def test_build_scheme_frozen_low_levels():
    """Hand-traced levels: the first split lands on (N_0, N_1), the second
    pairs the zero cell with itself through map 0."""
    states = build_scheme(INST, 2)
    assert [st.level for st in states] == [0, 1, 2]
    assert scheme_state_json(states[0]) == {
        "level": 0,
        "phi": {},
        "cells": {"": "N="},
    }
    assert scheme_state_json(states[1]) == {
        "level": 1,
        "phi": {},
        "cells": {"0": "N=0", "1": "N=1"},
    }
    assert scheme_state_json(states[2]) == {
        "level": 2,
        "phi": {"0": 0},
        "cells": {"00": "N=000", "01": "N=01", "10": "N=100", "11": "N=101"},
    }


def test_build_scheme_first_split_disjoint():
    states = build_scheme(INST, 2)
    c0, c1 = states[1].cells[W("0")], states[1].cells[W("1")]
    assert not c0.is_empty() and not c1.is_empty()
    assert c0.intersect(c1).is_empty()


def test_build_scheme_assigns_strength_at_first_event():
    """The first strength appears while stepping away from level 1."""
    states = build_scheme(INST, 3)
    assert states[1].phi == {}
    assert states[2].phi == {0: 0}
    assert states[3].phi == {0: 0}


def test_build_scheme_validation():
    with pytest.raises(InvalidLevel):
        build_scheme(INST, -1)
    with pytest.raises(InvalidLevel):
        build_scheme(CantorInstance(2), 1)


def test_build_scheme_conditions_to_depth_five():
    """Every per-level clause of the condition report holds to depth 5."""
    states = build_scheme(INST, 5, SCHEME_BUDGETS)
    report = check_scheme_conditions(states, INST, SCHEME_BUDGETS)
    assert report.ok, report.violations[:5]


def test_build_scheme_diameters_shrink():
    states = build_scheme(INST, 4, SCHEME_BUDGETS)
    for st_ in states:
        for cell in st_.cells.values():
            assert cell.first_free_coord() >= st_.level


def test_scheme_edge_containment_frozen():
    """The level-3 branch cells of 0^inf and its image satisfy the edge
    containment through map 0 exactly."""
    states = build_scheme(INST, 3, SCHEME_BUDGETS)
    src = states[3].cells[W("000")]
    tgt = states[3].cells[W("01")]
    img = INST.image(0, src)
    assert tgt.subset(img)


def test_h_eval_chain_nested():
    states = build_scheme(INST, 3, SCHEME_BUDGETS)
    chain = h_eval(states, "000")
    assert [str(w) for w, _ in chain] == ["", "0", "00", "000"]
    for (_, outer), (_, inner) in zip(chain, chain[1:]):
        assert inner.subset(outer)


def test_h_eval_distinct_branches_disjoint():
    states = build_scheme(INST, 3, SCHEME_BUDGETS)
    a = h_eval(states, "000")[-1][1]
    b = h_eval(states, "100")[-1][1]
    assert a.intersect(b).is_empty()


def test_h_eval_prefix_too_short():
    states = build_scheme(INST, 2)
    with pytest.raises(PrefixTooShort):
        h_eval(states, "0")
    chain = h_eval(states, W("01"))
    assert str(chain[-1][0]) == "01"


def test_scheme_state_equality():
    states = build_scheme(INST, 1)
    same = SchemeState(1, states[1].cells, states[1].phi)
    assert same == states[1]
    assert SchemeState(0, {BinWord(): FULL_SPACE}, {}) != states[1]


def test_check_scheme_conditions_flags_tampering():
    """Swapping a cell out of its parent trips nesting and disjointness."""
    states = build_scheme(INST, 2)
    bad = [
        states[0],
        states[1],
        SchemeState(
            2,
            {**states[2].cells, W("00"): cylinder("10")},
            states[2].phi,
        ),
    ]
    report = check_scheme_conditions(bad, INST)
    clauses = {v[0] for v in report.violations}
    assert "cell-nesting" in clauses
    assert not check_scheme_conditions(states, INST).violations
