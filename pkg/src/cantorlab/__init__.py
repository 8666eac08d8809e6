"""cantorlab: exact finitary machinery for a digraph family on the Cantor space."""

from .approximation import (
    ApproxState,
    anchor_index,
    check_lemma_53_54,
    check_lemma_57,
    check_lemma_58,
    detect_L_n,
    is_maximal_antichain,
    run,
    state_dot,
    state_json,
)
from .config import DEFAULT, Budgets
from .embedding import (
    CantorInstance,
    ComplexInstance,
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
from .cylinders import (
    EMPTY_SET,
    FULL_SPACE,
    ClopenUnion,
    LazyPoint,
    SymbolicClopen,
    atom_const,
    atom_eq,
    atom_ne,
    cylinder,
    point_eval,
)
from .maps import (
    EDGE_NO,
    EDGE_UNKNOWN,
    EDGE_YES,
    MapId,
    PathSpec,
    TaggedSumSpace,
    check_condition_d,
    domain_D,
    domain_point,
    g_compose_eval,
    g_eval_coord,
    g_point,
    graph_meets,
    image_clopen,
    is_G0_edge,
    point_in_domain,
    preimage_clopen,
    sum_tag_set,
)
from .orientedgraphs import (
    CheckReport,
    FiniteOrientedGraph,
    LabeledVertex,
    M_of,
    duplicate,
    lemma42_suite,
    p_to_max,
    to_dot,
    unique_path,
    validate_uogas,
)
from .sequences import (
    BinWord,
    EMPTY,
    Pow23,
    anchor_bit,
    anchor_word,
    expand_index,
    expand_index_inverse,
    in_shift_set,
    in_skip_set,
    in_stride_set,
    lenlex_rank,
    lenlex_word,
    padded_word,
    stride,
    stride_expand,
    tower_exp,
)

__all__ = [
    "anchor_bit",
    "anchor_index",
    "anchor_word",
    "ApproxState",
    "atom_const",
    "atom_eq",
    "atom_ne",
    "BinWord",
    "Budgets",
    "build_scheme",
    "CantorInstance",
    "check_condition_d",
    "check_lemma_53_54",
    "check_lemma_57",
    "check_lemma_58",
    "check_scheme_conditions",
    "CheckReport",
    "ClopenUnion",
    "ComplexInstance",
    "cylinder",
    "DEFAULT",
    "detect_L_n",
    "domain_D",
    "domain_point",
    "duplicate",
    "EDGE_NO",
    "EDGE_UNKNOWN",
    "EDGE_YES",
    "EMPTY",
    "EMPTY_SET",
    "expand_index",
    "expand_index_inverse",
    "FiniteOrientedGraph",
    "FULL_SPACE",
    "g_compose_eval",
    "g_eval_coord",
    "g_point",
    "graph_meets",
    "h_eval",
    "image_clopen",
    "in_E",
    "in_shift_set",
    "in_skip_set",
    "in_stride_set",
    "in_U",
    "is_G0_edge",
    "is_maximal_antichain",
    "LabeledVertex",
    "LazyPoint",
    "lemma25_check",
    "lemma26_find",
    "lemma42_suite",
    "lenlex_rank",
    "lenlex_word",
    "M_of",
    "MapId",
    "MappingTupleAssignment",
    "p_to_max",
    "padded_word",
    "PathSpec",
    "point_eval",
    "point_in_domain",
    "Pow23",
    "preimage_clopen",
    "refine_45",
    "refine_46",
    "run",
    "scheme_state_json",
    "SchemeState",
    "shrink_47",
    "state_dot",
    "state_json",
    "stride",
    "stride_expand",
    "sum_tag_set",
    "SymbolicClopen",
    "TaggedSumSpace",
    "to_dot",
    "tower_exp",
    "unique_path",
    "validate_uogas",
]
