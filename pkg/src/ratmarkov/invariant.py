"""Invariant graphs by iterated pullback and subgraph extraction.

Starting from a seed ``G0`` the iteration
``G_{k+1} = extract(G_k, f^{-N}(G_k), delta1)`` converges geometrically
when ``f^N`` expands near the limit graph.  Each step's residual is the
Hausdorff distance between successive graphs; convergence is declared from
these measured values only.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CriticalValueOnEdge, InfiniteIntersection, NeighbourhoodTooCoarse, NonConvergence,
    PreconditionError, RoutingFailure,
)
from .graph import (
    SAMPLE_STEP, directed_distance, graph_hausdorff, isotopy_signature,
)
from .overlay import INTERSECTION_CAP, overlay
from .pullback import extract_isotopic_subgraph, iterated_preimage


@dataclass(frozen=True)
class IterationConfig:
    """Parameters of the refinement loop.

    Attributes
    ----------
    N : int
        Pullback depth per step.
    max_iters : int
    eps_inv : float
        Stop once successive graphs are this close (radians).
    lambda_max : float
        Bound on successive residual ratios after ``burn_in`` steps.
    delta1 : float
        Tube radius for subgraph extraction.
    collapse_floor : float
        An edge whose diameter drops below this means the seed is shrinking
        to a point rather than converging.
    sample_step : float
        Maximal spacing of polyline samples.
    """

    N: int = 1
    max_iters: int = 40
    eps_inv: float = 1e-6
    lambda_max: float = 0.9
    delta1: float = 0.5
    burn_in: int = 3
    collapse_floor: float = 1e-3
    sample_step: float = SAMPLE_STEP

    def __post_init__(self):
        if not 0 < self.lambda_max < 1:
            raise PreconditionError("lambda_max must lie in (0, 1)")
        if self.eps_inv <= 0 or self.N < 1 or self.max_iters < 1:
            raise PreconditionError("eps_inv, N and max_iters must be positive")


@dataclass(frozen=True)
class ConvergenceReport:
    iterations: int
    residuals: tuple
    final_residual: float
    contraction: float
    signature: tuple = field(repr=False, default=())

    def ratios(self):
        r = np.asarray(self.residuals)
        with np.errstate(divide="ignore", invalid="ignore"):
            return r[1:] / r[:-1]

    def to_text(self):
        lines = [f"iterations {self.iterations}",
                 f"final_residual {self.final_residual!r}",
                 f"contraction {self.contraction!r}"]
        lines += [f"residual {k} {r!r}" for k, r in enumerate(self.residuals)]
        return "\n".join(lines) + "\n"


def _contraction(res, burn_in):
    r = np.asarray(res[burn_in:], dtype=float)
    r = r[r > 0]
    if len(r) < 2:
        return 0.0
    return float(np.max(r[1:] / r[:-1]))


def refine_to_invariant(f, G0, cfg=None):
    """Converge ``G0`` to a graph ``G`` with ``G`` inside ``f^{-N}(G)`` up to ``eps_inv``.

    Returns
    -------
    (EmbeddedGraph, ConvergenceReport)

    Raises
    ------
    NonConvergence
        Iteration budget exhausted, residual ratios above ``lambda_max``
        after burn-in, or the graph collapsing to a point.
    NeighbourhoodTooCoarse, RoutingFailure
        From the extraction step; the caller may retry with larger ``N``.
    """
    cfg = cfg or IterationConfig()
    sig = isotopy_signature(G0)
    G = G0
    res = []
    for k in range(cfg.max_iters):
        gamma = iterated_preimage(f, G, cfg.N, cfg.sample_step)
        G_new = extract_isotopic_subgraph(G, gamma, cfg.delta1)
        r = graph_hausdorff(G_new, G)
        res.append(r)
        if G_new.min_edge_diameter() < cfg.collapse_floor:
            raise NonConvergence(
                f"graph collapses to a point after {k + 1} iterations "
                "(pullback leaves the isotopy class)")
        if len(res) > cfg.burn_in + 1:
            a, b = res[-2], res[-1]
            if a > 0 and b > cfg.eps_inv and b / a > cfg.lambda_max:
                raise NonConvergence(
                    f"residual ratio {b / a:.3g} exceeds lambda_max at iteration {k + 1}")
        G = G_new
        if r < cfg.eps_inv:
            rep = ConvergenceReport(k + 1, tuple(res), r, _contraction(res, cfg.burn_in), sig)
            return G, rep
    raise NonConvergence(f"no convergence in {cfg.max_iters} iterations; "
                         f"last residual {res[-1]:.3g}")


def invariance_residual(f, G, power=1, refine=1):
    """``max dist(f^power(x), G)`` over graph samples ``x``, optionally subdivided."""
    if power == 0:
        return 0.0
    x = G.support_samples(refine)
    y = f.iterate_xyz(x, power)
    return float(G.distance_to_support(y).max())


def choose_depth(f, G0, delta1, n_max=8, sample_step=SAMPLE_STEP):
    """Smallest ``N <= n_max`` with ``G0`` inside the ``delta1/2``-neighbourhood of ``f^{-N}(G0)``."""
    gamma = G0
    for n in range(1, n_max + 1):
        gamma = iterated_preimage(f, gamma, 1, sample_step)
        if directed_distance(G0, gamma) <= delta1 / 2:
            return n
    raise NeighbourhoodTooCoarse(f"no depth up to {n_max} brings the pullback near the seed")


def promote_union(f, Gp, N, cap=INTERSECTION_CAP):
    """Overlay ``f^{-i}(Gp)`` for ``0 <= i < N`` into one graph."""
    layers = [Gp]
    for _ in range(1, N):
        layers.append(iterated_preimage(f, layers[-1], 1))
    if N == 1:
        return Gp
    return overlay(layers, cap=cap)


def continue_graph(f_old, f_new, G_old, cfg=None):
    """Refine ``G_old`` under ``f_new``; failure means the step left the persistence region."""
    try:
        G, rep = refine_to_invariant(f_new, G_old, cfg)
    except (RoutingFailure, NeighbourhoodTooCoarse, CriticalValueOnEdge,
            InfiniteIntersection) as exc:
        raise NonConvergence(f"continuation failed: {exc}") from exc
    return G, rep
