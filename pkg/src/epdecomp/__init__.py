"""Explain atom-atom maps as sequences of electron pushing diagrams."""

from .diffgraph import (
    DegreeSplit,
    DifferenceGraph,
    apply_difference,
    build_difference,
    check_balance,
    degree_split,
    unbalanced_vertices,
)
from .epd import (
    EPD,
    QuadType,
    Split,
    apply_epd,
    classify_quad,
    is_homovalent,
    quad_schedule,
    rewrite_type_iii,
    split_epd,
    split_to_quads,
)
from .errors import (
    EPDError,
    InapplicableEPDError,
    InternalConsistencyError,
    InvalidMapError,
    MalformedWalkError,
    ParseError,
    RewriteError,
    UnbalancedError,
    UnknownVertexError,
)
from .formats import (
    example_names,
    export_dot,
    format_reaction,
    load_example,
    parse_reaction,
    trace_to_dict,
    trace_to_json,
)
from .mechanism import (
    Decomposition,
    ElementaryStep,
    FormalReaction,
    MechanismTrace,
    TraceStep,
    active_parts,
    decompose_formal,
    decompose,
    explain,
    full_mechanism,
    is_elementary,
    parse_formal,
)
from .multigraph import AtomAtomMap, LabeledMultigraph, MapReport, Violation, degree, degrees, validate_aam
from .walks import (
    AlternatingWalk,
    AuxGraph,
    build_aux,
    contract_walk,
    find_alternating_closed_walk,
    merge_euler_tour,
    partition_walks,
)

__version__ = "0.1.0"
