"""Markov partitions of rational maps from invariant graphs on the Riemann sphere."""
from .errors import (
    ConvergenceFailure, CriticalValueOnEdge, Degeneracy, DepthUnreachable, EmbeddingInconsistent,
    IncidenceMismatch, Inadmissible, IndeterminateForm, InfiniteIntersection, InvalidInput,
    InvalidMap, LeftExistenceSet, MarkovViolation, NeighbourhoodTooCoarse, NonConvergence,
    NotInvariant, ParseError, PreconditionError, ProjectionPoleOnGraph, RatMarkovError,
    Reducible, ResourceLimit, RootFindingFailure, RoutingFailure, TraceAmbiguous,
)
from .graph import EmbeddedGraph, graph_hausdorff, isotopy_signature
from .invariant import (
    ConvergenceReport, IterationConfig, choose_depth, continue_graph, invariance_residual,
    promote_union, refine_to_invariant,
)
from .markov import (
    MarkovPartition, address_to_point, build_partition, edge_transition_matrix, itinerary,
    perron, trace_edge, verify_markov,
)
from .numerics import RationalMap, SpherePoint, sph_dist
from .param_space import (
    CellDescriptor, FamilySpec, NotFound, cell_address, combinatorial_distance,
    connectivity_report, continue_along, quadratic_family, scan_grid,
)
from .pullback import extract_isotopic_subgraph, graph_preimage, iterated_preimage, lift_edge
from .regularity import (
    IntervalSystem, bounded_turning_constant, boundary_interval_system, invert_conjugacy,
    qs_conjugacy, qs_norm_estimate,
)
from .render import render_svg

__version__ = "0.1.0"
