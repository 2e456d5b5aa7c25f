"""Markov partitions, transition matrices and symbolic dynamics on an invariant graph."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    Inadmissible, MarkovViolation, NonConvergence, NotInvariant,
    PreconditionError, Reducible, TraceAmbiguous,
)
from .graph import EPS_GEOM, point_set_distance, subdivide
from .invariant import invariance_residual
from .numerics import SpherePoint, as_point, slerp, sph_dist_xyz
from .pullback import graph_preimage, lift_polyline

EPS_INV = 1e-6
POWER_TOL = 1e-12
POWER_MAX = 100_000
EIGEN_TOL = 1e-9


@dataclass(frozen=True)
class PerronData:
    eigenvalue: float
    vector: np.ndarray
    entropy: float


@dataclass(frozen=True)
class Address:
    """Itinerary symbols with their kinds (``face``, ``edge`` or ``vertex``)."""

    symbols: tuple
    kinds: tuple
    level: str = "face"

    def __len__(self):
        return len(self.symbols)


@dataclass
class MarkovPartition:
    """Face closures of an invariant graph together with both transition matrices.

    ``face_matrix[i, j]`` counts components of ``f^{-1}(P_j)`` inside ``P_i``;
    ``edge_matrix[a, b]`` counts traversals of edge ``edge_ids[b]`` by the
    image of edge ``edge_ids[a]``.
    """

    f: object
    graph: object
    pieces: list
    face_matrix: np.ndarray
    edge_matrix: np.ndarray
    edge_ids: tuple
    incidence: list = field(default_factory=list)

    def to_text(self):
        lines = [f"pieces {len(self.pieces)}", "face_matrix"]
        lines += [" ".join(str(int(x)) for x in row) for row in self.face_matrix]
        lines.append("edge_ids " + " ".join(map(str, self.edge_ids)))
        lines.append("edge_matrix")
        lines += [" ".join(str(int(x)) for x in row) for row in self.edge_matrix]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# partition and verification

def build_partition(f, G, tol=EPS_INV, check_invariance=True):
    """Markov partition of the sphere by the faces of ``G``.

    Raises
    ------
    NotInvariant
        ``invariance_residual(f, G) > tol``.
    MarkovViolation
        From :func:`verify_markov`.
    """
    if check_invariance:
        r = invariance_residual(f, G, 1)
        if r > tol:
            raise NotInvariant(f"invariance residual {r:.3g} exceeds {tol:.3g}")
    p = MarkovPartition(f, G, list(G.faces), None, None, tuple(sorted(G.edges)))
    verify_markov(p, tol)
    p.edge_matrix = edge_transition_matrix(f, G, tol=max(10 * tol, 1e-6))
    return p


def verify_markov(p, tol=EPS_INV):
    """Check that every piece is a union of components of preimages of pieces.

    Components of ``f^{-1}(P_j)`` are the faces of ``f^{-1}(G)``.  Each must
    lie in one piece (its boundary samples stay in that piece's closure) and
    ``G`` must be contained in ``f^{-1}(G)``.  Fills ``face_matrix`` and the
    incidence list ``(component, j, i)``.
    """
    f, G = p.f, p.graph
    cls_tol = max(10 * tol, 1e-5)
    G1 = graph_preimage(f, G)
    if not G1.is_connected():
        raise PreconditionError("preimage graph is disconnected; components are not faces")
    n = len(p.pieces)
    M = np.zeros((n, n), dtype=int)
    incidence = []
    for C in G1.faces:
        i = G.face_containing(C.sample_xyz, cls_tol)
        img = G.face_containing(f.eval_xyz(C.sample_xyz[None])[0], cls_tol)
        if not hasattr(img, "index"):
            raise MarkovViolation("component sample maps onto the graph", None, None, C.index)
        j = img.index
        if not hasattr(i, "index"):
            raise MarkovViolation("component sample lies on the graph", None, j, C.index)
        i = i.index
        pts = np.concatenate([G1.dart_points(d) for d in C.boundary_walk])
        off = pts[G.distance_to_support(pts) > cls_tol]
        if len(off) > 64:
            off = off[np.linspace(0, len(off) - 1, 64).astype(int)]
        for x in off:
            loc = G.locate(x, cls_tol)
            if loc[0] == "face" and loc[1] != i:
                raise MarkovViolation(
                    f"component {C.index} of f^-1(P{j}) meets pieces {i} and {loc[1]}",
                    i, j, C.index)
        M[i, j] += 1
        incidence.append((C.index, j, i))
    # G must lie on f^{-1}(G); otherwise some component straddles two pieces
    gs = G.support_samples()
    bad = np.nonzero(G1.distance_to_support(gs) > cls_tol)[0]
    if len(bad):
        loc = G1.locate(gs[bad[0]], cls_tol)
        C = loc[1] if loc[0] == "face" else None
        j = None
        if C is not None:
            img = G.face_containing(f.eval_xyz(G1.faces[C].sample_xyz[None])[0], cls_tol)
            j = getattr(img, "index", None)
        i = G.face_containing(G1.faces[C].sample_xyz, cls_tol) if C is not None else None
        raise MarkovViolation("the graph is not contained in its preimage; a component "
                              "of a preimage piece straddles two pieces",
                              getattr(i, "index", None), j, C)
    p.face_matrix = M
    p.incidence = incidence
    return incidence


# ---------------------------------------------------------------------------
# edge matrix

def _classify_on_graph(G, y):
    """Nearest edge, parameter and distance for points ``y`` (m,3)."""
    _, _, eid, idx = G._segments
    dist, k, tau = G.segment_index.nearest(y, with_tau=True)
    e = eid[k]
    par = np.array([G._edge_parameter(int(e[r]), int(idx[k[r]]), float(tau[r]))
                    for r in range(len(y))])
    return e, par, dist


def _trace_samples(f, pts, step):
    """Subdivide ``pts`` until consecutive images are ``<= step`` apart."""
    for _ in range(8):
        y = f.eval_xyz(pts)
        gap = sph_dist_xyz(y[:-1], y[1:])
        if gap.max() <= step:
            return pts, y
        k = np.maximum(1, np.ceil(gap / step).astype(int))
        parts = [subdivide(pts[i:i + 2], int(k[i]))[:-1] for i in range(len(pts) - 1)]
        pts = np.concatenate(parts + [pts[-1:]])
    return pts, f.eval_xyz(pts)


def trace_edge(f, G, e, tol=1e-5):
    """Darts of ``G`` traversed by ``f`` along edge ``e``, in order.

    The image of a densified edge polyline is classified sample by sample
    to the nearest edge; samples near a vertex are skipped, and a new run
    starts on a change of edge or a jump of the edge parameter.
    """
    vx = np.array([G.vertex_xyz(v) for v in G.vertices])
    step = min(1e-2, min(x.length() for x in G.edges.values()) / 16)
    _, y = _trace_samples(f, G.edges[e].points, step)
    eid, par, dist = _classify_on_graph(G, y)
    if dist.max() > tol:
        raise NotInvariant(f"image of edge {e} leaves the graph by {dist.max():.3g}")
    near_v = sph_dist_xyz(y[:, None], vx[None]).min(axis=1) < 4 * step
    if near_v.all():
        raise TraceAmbiguous(f"image of edge {e} stays next to a vertex")
    runs = []
    for k in np.nonzero(~near_v)[0]:
        if runs and runs[-1][0] == eid[k] and abs(par[k] - runs[-1][2]) < 0.5:
            runs[-1][1].append(par[k])
            runs[-1][2] = par[k]
            continue
        runs.append([int(eid[k]), [par[k]], par[k]])
    darts = []
    for edge, ps, _ in runs:
        if len(ps) > 1 and ps[-1] == ps[0]:
            raise TraceAmbiguous(f"cannot orient the image of edge {e} along edge {edge}")
        darts.append((edge, 1 if len(ps) == 1 or ps[-1] > ps[0] else -1))
    return darts


def edge_transition_matrix(f, G, tol=1e-5):
    """``A[a, b]`` = number of times ``f(e_a)`` runs along ``e_b`` (sorted edge ids)."""
    ids = sorted(G.edges)
    pos = {e: k for k, e in enumerate(ids)}
    A = np.zeros((len(ids), len(ids)), dtype=int)
    for e in ids:
        for r, _ in trace_edge(f, G, e, tol):
            A[pos[e], pos[r]] += 1
    return A


# ---------------------------------------------------------------------------
# Perron data

def perron(A):
    """Dominant eigenvalue and positive eigenvector (sum 1) of an irreducible matrix.

    Power iteration on ``A + I`` (primitive whenever ``A`` is irreducible),
    with the eigenvalue taken as the Rayleigh-type quotient ``sum(A v)``.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or (A < 0).any():
        raise PreconditionError("expected a square nonnegative matrix")
    n, labels = connected_components(A > 0, directed=True, connection="strong")
    if n > 1:
        comps = [tuple(np.nonzero(labels == c)[0].tolist()) for c in range(n)]
        raise Reducible(f"matrix has {n} strongly connected components", comps)
    if not (A > 0).any():
        raise Reducible("zero matrix", [tuple(range(len(A)))])
    B = A + np.eye(len(A))
    v = np.full(len(A), 1.0 / len(A))
    for _ in range(POWER_MAX):
        w = B @ v
        w /= w.sum()
        if np.abs(w - v).sum() < POWER_TOL:
            v = w
            break
        v = w
    else:
        raise NonConvergence("power iteration did not converge")
    lam = float((A @ v).sum() / v.sum())
    return PerronData(lam, v, float(np.log(lam)) if lam > 0 else -np.inf)


def expanding_lengths(f, G, A, pd):
    """Edge lengths from the Perron vector, certified by ``A v = lambda v``.

    Returns a dict mapping edge id to length.
    """
    A = np.asarray(A, dtype=float)
    v = np.asarray(pd.vector, dtype=float)
    if (v <= 0).any():
        raise PreconditionError("Perron vector is not positive")
    err = np.abs(A @ v - pd.eigenvalue * v).max() / (pd.eigenvalue * v.max())
    if err > EIGEN_TOL:
        raise NonConvergence(f"eigen-identity off by {err:.3g}")
    ids = sorted(G.edges) if G is not None else range(len(v))
    return {e: float(x) for e, x in zip(ids, v)}


# ---------------------------------------------------------------------------
# itineraries and addresses

def _edge_symbol(G, y, eps):
    vids = list(G.vertices)
    dv = sph_dist_xyz(np.array([G.vertex_xyz(v) for v in vids]), y[None])
    if dv.min() <= eps:
        return vids[int(np.argmin(dv))], "vertex"
    e, _, _ = _classify_on_graph(G, y[None])
    return int(e[0]), "edge"


def itinerary(p, z, n, level="face", eps=EPS_GEOM):
    """Symbols of ``z, f(z), ..., f^{n-1}(z)``.

    ``level="face"`` records the piece (or edge/vertex when the orbit lands
    on the graph); ``level="edge"`` is for points of the graph and records
    the nearest edge, or a vertex within ``eps``.
    """
    G, f = p.graph, p.f
    y = as_point(z).xyz if not isinstance(z, np.ndarray) else np.asarray(z, dtype=float)
    syms, kinds = [], []
    for _ in range(n):
        if level == "edge":
            s, k = _edge_symbol(G, y, eps)
        else:
            loc = G.locate(y, eps)
            s, k = loc[1], loc[0]
        syms.append(s)
        kinds.append(k)
        y = f.eval_xyz(y[None])[0]
    return Address(tuple(syms), tuple(kinds), level)


def _diameter(pts):
    return float(sph_dist_xyz(pts[:, None], pts[None]).max())


def _arc_midpoint(pts):
    seg = sph_dist_xyz(pts[:-1], pts[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    half = cum[-1] / 2
    k = min(int(np.searchsorted(cum, half, side="right")) - 1, len(seg) - 1)
    t = (half - cum[k]) / seg[k] if seg[k] > 0 else 0.0
    return slerp(pts[k], pts[k + 1], t)


def address_to_point(p, symbols, min_points=16):
    """Point with edge itinerary ``symbols`` and the diameters of its cylinders.

    The cylinder of ``symbols[k:]`` is the lift of the cylinder of
    ``symbols[k+1:]`` lying in edge ``symbols[k]``.

    Returns
    -------
    (SpherePoint, float, list)
        Arc-length midpoint of the full cylinder, its diameter, and the
        diameters of the cylinders of lengths 1, 2, ..., n.
    """
    G, f, A = p.graph, p.f, p.edge_matrix
    pos = {e: k for k, e in enumerate(p.edge_ids)}
    symbols = list(symbols)
    for k, s in enumerate(symbols):
        if s not in pos:
            raise Inadmissible(f"unknown edge {s}", k)
    for k in range(len(symbols) - 1):
        if A[pos[symbols[k]], pos[symbols[k + 1]]] < 1:
            raise Inadmissible(f"transition {symbols[k]} -> {symbols[k + 1]} not allowed", k + 1)
    C = G.edges[symbols[-1]].points
    diams = [_diameter(C)]
    for s in reversed(symbols[:-1]):
        seg = sph_dist_xyz(C[:-1], C[1:]).sum()
        if len(C) < min_points:
            C = subdivide(C, int(np.ceil(min_points / (len(C) - 1))))
        step = max(seg / min_points, 1e-300)
        lifts = lift_polyline(f, C, max_step=min(step, 1e-2), check_cv=False)
        e = G.edges[s]
        # lifts are disjoint, so one interior sample decides which lies in e
        mids = np.array([L[len(L) // 2] for L in lifts])
        C = lifts[int(np.argmin(point_set_distance(mids, e.points[:-1], e.points[1:])))]
        diams.append(_diameter(C))
    return SpherePoint.from_xyz(_arc_midpoint(C)), diams[-1], diams

