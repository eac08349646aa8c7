"""Exact ECH capacities, embedding functions and infinite staircases."""

from .atf import (
    BaseDiagram,
    Ray,
    RecursionState,
    contains_ellipsoid_triangle,
    diagram_svg,
    lattice_key,
    mutate,
    nodal_trade,
    pregame,
    recursion_step,
)
from .capacities import (
    CapacitySequence,
    ball_sequence,
    cap_function,
    count_below,
    ech_convex_toric,
    ech_ellipsoid,
    seq_sub,
    seq_union,
)
from .core import (
    CertificationError,
    FieldMixError,
    InternalCheckError,
    NegativeWeightExpansion,
    Q,
    QuadraticSurd,
    UnsupportedShapeError,
    negative_weight_expansion,
    parse_expansion,
    solve_accumulation_quadratic,
    surd_sqrt,
    weight_expansion,
)
from .embedfn import (
    FunctionSample,
    ObstructionReport,
    accumulation_point,
    detect_corners,
    fit_linear_recurrence,
    sample_embedding_function,
    staircase_obstruction,
)
from .latticepaths import (
    FANO_DOMAINS,
    REFLEXIVE_DOMAINS,
    ck_via_paths,
    enumerate_reflexive,
    fano_catalogue,
    lambda_family,
    path_ell,
    path_lattice_count,
    verify_lambda,
)
from .obstructions import (
    CapacityCertificate,
    ObstructiveClass,
    dbound_squared,
    enumerate_classes,
    exact_c_at,
    mu,
    singular_point_of,
)
from .staircases import (
    FAMILIES,
    Corner,
    RecurrenceFamily,
    StaircaseGraph,
    corners,
    family,
    g,
    staircase_graph,
    verify_identities,
    verify_outer_obstruction,
    verify_structure,
)

__version__ = "0.1.0"

__all__ = [
    "BaseDiagram",
    "CapacityCertificate",
    "CapacitySequence",
    "CertificationError",
    "Corner",
    "FAMILIES",
    "FANO_DOMAINS",
    "FieldMixError",
    "FunctionSample",
    "InternalCheckError",
    "NegativeWeightExpansion",
    "ObstructionReport",
    "ObstructiveClass",
    "Q",
    "QuadraticSurd",
    "REFLEXIVE_DOMAINS",
    "Ray",
    "RecurrenceFamily",
    "RecursionState",
    "StaircaseGraph",
    "UnsupportedShapeError",
    "__version__",
    "accumulation_point",
    "ball_sequence",
    "cap_function",
    "ck_via_paths",
    "contains_ellipsoid_triangle",
    "corners",
    "count_below",
    "dbound_squared",
    "detect_corners",
    "diagram_svg",
    "ech_convex_toric",
    "ech_ellipsoid",
    "enumerate_classes",
    "enumerate_reflexive",
    "exact_c_at",
    "family",
    "fano_catalogue",
    "fit_linear_recurrence",
    "g",
    "lambda_family",
    "mu",
    "negative_weight_expansion",
    "parse_expansion",
    "path_ell",
    "path_lattice_count",
    "sample_embedding_function",
    "seq_sub",
    "seq_union",
    "singular_point_of",
    "solve_accumulation_quadratic",
    "staircase_graph",
    "staircase_obstruction",
    "surd_sqrt",
    "verify_identities",
    "verify_lambda",
    "verify_outer_obstruction",
    "verify_structure",
    "weight_expansion",
]
