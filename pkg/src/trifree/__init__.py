"""Maximum triangle-free 2-matchings: local-search PTAS, exact oracle, and
chunk-by-chunk augmenting-trail construction."""

from .graph import (
    EdgeSet,
    Graph,
    GraphParseError,
    Triangle,
    degree_in,
    is_feasible,
    is_triangle_free,
    is_two_matching,
    list_triangles,
    parse_graph,
    render_graph,
    symmetric_difference,
    triangles_containing_edge,
)
from .trails import Trail, apply_trail, concat, is_alternating, is_augmenting
from .search import (
    SearchConfig,
    SolveReport,
    find_augmenting_trail,
    max_trail_length,
    maximal_solve,
    ptas_solve,
)
from .oracle import (
    OracleGuardError,
    enumerate_maximum,
    exact_max,
    exact_max_tiebreak,
)
from .construct import (
    Chunk,
    ConstructionError,
    ConstructionState,
    PreconditionError,
    apply_tiebreak,
    assert_parity_and_uniqueness,
    candidate_extension_chunks,
    candidate_first_chunks,
    check_preconditions,
    check_state_properties,
    construct_trails,
    deficient_nodes,
)

__all__ = [
    "EdgeSet",
    "Graph",
    "GraphParseError",
    "Triangle",
    "Trail",
    "Chunk",
    "ConstructionError",
    "ConstructionState",
    "OracleGuardError",
    "PreconditionError",
    "SearchConfig",
    "SolveReport",
    "apply_tiebreak",
    "apply_trail",
    "assert_parity_and_uniqueness",
    "candidate_extension_chunks",
    "candidate_first_chunks",
    "check_preconditions",
    "check_state_properties",
    "concat",
    "construct_trails",
    "deficient_nodes",
    "degree_in",
    "enumerate_maximum",
    "exact_max",
    "exact_max_tiebreak",
    "find_augmenting_trail",
    "is_alternating",
    "is_augmenting",
    "is_feasible",
    "is_triangle_free",
    "is_two_matching",
    "list_triangles",
    "max_trail_length",
    "maximal_solve",
    "parse_graph",
    "ptas_solve",
    "render_graph",
    "symmetric_difference",
    "triangles_containing_edge",
]

__version__ = "0.1.0"
