"""Exception hierarchy.

Every concrete error belongs to exactly one of three families, and each
family carries the process exit code used by the command line front end.
"""


class RatMarkovError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ConvergenceFailure(RatMarkovError):
    """An iterative procedure did not reach its target."""

    exit_code = 2


class InvalidInput(RatMarkovError):
    """Inputs violate a documented precondition or file format."""

    exit_code = 3


class Degeneracy(RatMarkovError):
    """Geometric degeneracy: critical values on a graph, overlapping arcs..."""

    exit_code = 4


# convergence family
class NonConvergence(ConvergenceFailure):
    pass


class RoutingFailure(ConvergenceFailure):
    pass


class NeighbourhoodTooCoarse(ConvergenceFailure):
    pass


class LeftExistenceSet(ConvergenceFailure):
    pass


class DepthUnreachable(ConvergenceFailure):
    pass


class RootFindingFailure(ConvergenceFailure):
    pass


class ResourceLimit(ConvergenceFailure):
    pass


# input family
class ParseError(InvalidInput):
    pass


class InvalidMap(InvalidInput):
    pass


class EmbeddingInconsistent(InvalidInput):
    pass


class NotInvariant(InvalidInput):
    pass


class MarkovViolation(InvalidInput):
    def __init__(self, message, piece=None, target=None, component=None):
        super().__init__(message)
        self.piece = piece
        self.target = target
        self.component = component


class Reducible(InvalidInput):
    def __init__(self, message, components=()):
        super().__init__(message)
        self.components = [tuple(c) for c in components]


class Inadmissible(InvalidInput):
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class IncidenceMismatch(InvalidInput):
    pass


class PreconditionError(InvalidInput):
    pass


# degeneracy family
class IndeterminateForm(Degeneracy):
    pass


class CriticalValueOnEdge(Degeneracy):
    pass


class InfiniteIntersection(Degeneracy):
    pass


class TraceAmbiguous(Degeneracy):
    pass


class ProjectionPoleOnGraph(Degeneracy):
    pass


ALL_ERRORS = [
    NonConvergence, RoutingFailure, NeighbourhoodTooCoarse, LeftExistenceSet,
    DepthUnreachable, RootFindingFailure, ResourceLimit,
    ParseError, InvalidMap, EmbeddingInconsistent, NotInvariant,
    MarkovViolation, Reducible, Inadmissible, IncidenceMismatch,
    PreconditionError,
    IndeterminateForm, CriticalValueOnEdge, InfiniteIntersection,
    TraceAmbiguous, ProjectionPoleOnGraph,
]
