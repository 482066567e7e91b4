"""Decide whether a tropical curve is of hyperelliptic type, with certificates."""

from .connectivity import (
    C1Partition,
    Connectivization,
    c1_equivalent,
    c1_sets,
    separating_edges,
    three_edge_connectivization,
    two_edge_connectivization,
)
from .decision import (
    GramMatrix,
    HyperellipticModel,
    HyptypeCertificate,
    gram_determinant_oracle,
    hyperelliptic_model,
    is_hyperelliptic_type,
    is_specialization,
    jacobian_gram,
    jacobians_isomorphic,
    obstruction,
    verify_certificate,
)
from .ears import (
    Ear,
    EarDecomposition,
    ensure_three_initial_ears,
    hedify,
    htedify,
    involution_from_hed,
    nested_ear_decomposition,
    verify,
)
from .errors import (
    DisconnectedError,
    GraphError,
    HyptypeError,
    InvalidInvolutionError,
    PipelineError,
    SizeGuardError,
)
from .graph import (
    Block,
    EdgeTrace,
    TropicalCurve,
    WeightedGraph,
    are_isomorphic,
    as_curve,
    blocks,
    contract_edges,
    d_invariant,
    delete_edges,
    genus,
    is_stable,
    make_curve,
    make_graph,
    random_stable_graph,
    stable_model,
    subdivide,
)
from .hyperelliptic import (
    Involution,
    QuotientResult,
    check_involution,
    enumerate_involutions,
    hyperelliptic_involutions,
    hyperelliptify_lengths,
    is_hyperelliptic,
    is_strongly_hyperelliptic_type,
    quotient,
)
from .io import DocumentError, load_curve, parse_document, serialize
from .matroid import TwoIsomorphism, circuits, find_two_isomorphism, verify_two_isomorphism
from .minors import (
    K4,
    L3,
    MinorModel,
    Pattern,
    blocks_series_parallel,
    find_minor_model,
    has_minor,
    is_series_parallel,
    verify_minor_model,
)

__version__ = "0.1.0"

__all__ = [
    "are_isomorphic",
    "as_curve",
    "Block",
    "blocks",
    "blocks_series_parallel",
    "c1_equivalent",
    "c1_sets",
    "C1Partition",
    "check_involution",
    "circuits",
    "Connectivization",
    "contract_edges",
    "d_invariant",
    "delete_edges",
    "DisconnectedError",
    "DocumentError",
    "Ear",
    "EarDecomposition",
    "EdgeTrace",
    "ensure_three_initial_ears",
    "enumerate_involutions",
    "find_minor_model",
    "find_two_isomorphism",
    "genus",
    "gram_determinant_oracle",
    "GramMatrix",
    "GraphError",
    "has_minor",
    "hedify",
    "htedify",
    "hyperelliptic_involutions",
    "hyperelliptic_model",
    "HyperellipticModel",
    "hyperelliptify_lengths",
    "HyptypeCertificate",
    "HyptypeError",
    "InvalidInvolutionError",
    "Involution",
    "involution_from_hed",
    "is_hyperelliptic",
    "is_hyperelliptic_type",
    "is_series_parallel",
    "is_specialization",
    "is_stable",
    "is_strongly_hyperelliptic_type",
    "jacobian_gram",
    "jacobians_isomorphic",
    "K4",
    "L3",
    "load_curve",
    "make_curve",
    "make_graph",
    "MinorModel",
    "nested_ear_decomposition",
    "obstruction",
    "parse_document",
    "Pattern",
    "PipelineError",
    "quotient",
    "QuotientResult",
    "random_stable_graph",
    "separating_edges",
    "serialize",
    "SizeGuardError",
    "stable_model",
    "subdivide",
    "three_edge_connectivization",
    "TropicalCurve",
    "two_edge_connectivization",
    "TwoIsomorphism",
    "verify",
    "verify_certificate",
    "verify_minor_model",
    "verify_two_isomorphism",
    "WeightedGraph",
]
