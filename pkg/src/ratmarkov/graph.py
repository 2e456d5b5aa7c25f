"""Graphs embedded in the sphere.

Edges are polylines of unit vectors joined by minor great arcs.  The
combinatorial embedding is an explicit rotation system: for every vertex
the counter-clockwise cyclic order (orientation of the complex plane, i.e.
as seen from inside the sphere) of the
incident edge-ends.  An edge-end is ``(edge_id, 0)`` for the start of the
edge and ``(edge_id, 1)`` for its end.  A *dart* ``(edge_id, +1 | -1)`` is
an edge traversed forward or backward; faces are the orbits of darts under
"turn to the next end clockwise", so every face lies to the left of its
darts.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmbeddingInconsistent
from .numerics import (
    SpherePoint, as_point, cross3, densify, direction_angle, normalize, slerp,
    sph_dist_xyz, to_xyz,
)

EPS_GEOM = 1e-7
SAMPLE_STEP = 1e-2
_TAU_EDGE = 1e-9


# ---------------------------------------------------------------------------
# point-to-arc geometry

def arc_distances(q, a, b):
    """Distances from points ``q`` (m,3) to great arcs ``a -> b`` (k,3).

    Returns ``(dist, tau)`` of shape ``(m, k)``; ``tau`` in [0, 1] locates the
    nearest point on each arc by angle fraction.
    """
    q = np.atleast_2d(q)
    n = cross3(a, b)
    nn = np.linalg.norm(n, axis=1)
    ab = sph_dist_xyz(a, b)
    good = nn > 1e-15
    nh = np.where(good[:, None], n / np.where(good, nn, 1)[:, None], 0.0)
    qn = q @ nh.T                                    # (m,k)
    proj = q[:, None, :] - qn[..., None] * nh[None]  # (m,k,3)
    inside = (np.einsum("kj,mkj->mk", cross3(nh, a), proj) >= 0) & \
             (np.einsum("mkj,kj->mk", cross3(proj, b), nh) >= 0) & good[None]
    da = sph_dist_xyz(q[:, None, :], a[None])
    db = sph_dist_xyz(q[:, None, :], b[None])
    d_in = np.arcsin(np.clip(np.abs(qn), 0, 1))
    plen = np.linalg.norm(proj, axis=2)
    with np.errstate(invalid="ignore", divide="ignore"):
        foot = proj / plen[..., None]
        tau_in = sph_dist_xyz(foot, a[None]) / np.where(ab > 0, ab, 1)[None]
    inside &= plen > 1e-15
    end_a = da <= db
    dist = np.where(inside, d_in, np.where(end_a, da, db))
    tau = np.where(inside, np.clip(np.nan_to_num(tau_in), 0, 1), np.where(end_a, 0.0, 1.0))
    return dist, tau


def point_set_distance(q, a, b, chunk=2048, k=8):
    """Minimum distance from each of ``q`` to the union of arcs ``a -> b``."""
    return SegmentIndex(a, b, k).nearest(q, chunk=chunk)[0]


def nearest_segment(q, a, b, chunk=2048, k=8):
    """Distance to, index of, and angle fraction along the nearest arc ``a -> b``."""
    return SegmentIndex(a, b, k).nearest(q, with_tau=True, chunk=chunk)


class SegmentIndex:
    """Nearest-arc queries against a fixed set of great arcs ``a -> b``.

    Candidate arcs come from a KD-tree on arc midpoints; a query falls back
    to the dense computation when the candidate bound cannot exclude the
    remaining arcs.
    """

    def __init__(self, a, b, k=8):
        self.a, self.b = a, b
        self.k = min(k, len(a))
        self.dense = len(a) <= 4 * k
        if not self.dense:
            mid = a + b
            self.mid = mid / np.linalg.norm(mid, axis=1, keepdims=True)
            self.half = sph_dist_xyz(a, b).max() / 2
            self.tree = cKDTree(self.mid)

    def nearest(self, q, with_tau=False, chunk=2048):
        a, b, k = self.a, self.b, self.k
        q = np.atleast_2d(q)
        if self.dense or len(q) < 8:
            best, arg = _dense_nearest(q, a, b, chunk)
        else:
            _, idx = self.tree.query(q, k=k)
            d = _paired_arc_distance(np.repeat(q, k, axis=0), a[idx.ravel()],
                                     b[idx.ravel()]).reshape(len(q), k)
            jbest = np.argmin(d, axis=1)
            rows = np.arange(len(q))
            best = d[rows, jbest]
            arg = idx[rows, jbest]
            # arcs beyond the k-th midpoint are at least angle(kth) - half away
            far = 2 * np.arcsin(np.clip(
                np.linalg.norm(q - self.mid[idx[:, -1]], axis=1) / 2, 0, 1))
            redo = np.nonzero(far - self.half < best)[0]
            if len(redo):
                best[redo], arg[redo] = self._ball_nearest(q[redo], best[redo])
        if not with_tau:
            return best, arg
        return best, arg, _paired_tau(q, a[arg], b[arg])


    def _ball_nearest(self, q, bound):
        # every arc closer than ``bound`` has its midpoint within bound + half
        r = 2 * np.sin(np.minimum(bound + self.half, np.pi) / 2) * (1 + 1e-12) + 1e-15
        cand = self.tree.query_ball_point(q, r)
        counts = np.array([len(c) for c in cand])
        idx = np.concatenate(cand).astype(int)
        rows = np.repeat(np.arange(len(q)), counts)
        d = _paired_arc_distance(q[rows], self.a[idx], self.b[idx])
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        best = np.minimum.reduceat(d, starts)
        # first index attaining the minimum within each group
        hit = d == np.repeat(best, counts)
        pos = np.arange(len(d))
        first = np.minimum.reduceat(np.where(hit, pos, len(d)), starts)
        return best, idx[first]


def _dense_nearest(q, a, b, chunk):
    out = np.empty(len(q))
    arg = np.empty(len(q), dtype=int)
    for s in range(0, len(q), chunk):
        d, _ = arc_distances(q[s:s + chunk], a, b)
        arg[s:s + chunk] = np.argmin(d, axis=1)
        out[s:s + chunk] = d[np.arange(len(d)), arg[s:s + chunk]]
    return out, arg


def _paired_tau(q, a, b):
    """Angle fraction of the nearest point of arc ``a[i] -> b[i]`` to ``q[i]``."""
    n = cross3(a, b)
    nn = np.linalg.norm(n, axis=1)
    good = nn > 1e-15
    nh = n / np.where(good, nn, 1)[:, None]
    proj = q - np.einsum("ij,ij->i", q, nh)[:, None] * nh
    ab = sph_dist_xyz(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        x = np.einsum("ij,ij->i", proj, a)
        y = np.einsum("ij,ij->i", cross3(a, proj), nh)
        ang = np.arctan2(y, x)
        tau = ang / np.where(ab > 0, ab, 1)
    tau = np.where(good, np.nan_to_num(tau), 0.0)
    # beyond either end: the nearer endpoint
    out = (tau < 0) | (tau > 1)
    end1 = sph_dist_xyz(q, b) < sph_dist_xyz(q, a)
    return np.where(out, np.where(end1, 1.0, 0.0), tau)


def _paired_arc_distance(q, a, b):
    """Distance from ``q[i]`` to arc ``a[i] -> b[i]``."""
    n = cross3(a, b)
    nn = np.linalg.norm(n, axis=1)
    good = nn > 1e-15
    nh = n / np.where(good, nn, 1)[:, None]
    qn = np.einsum("ij,ij->i", q, nh)
    proj = q - qn[:, None] * nh
    inside = (np.einsum("ij,ij->i", cross3(nh, a), proj) >= 0) & \
             (np.einsum("ij,ij->i", cross3(proj, b), nh) >= 0) & good & \
             (np.linalg.norm(proj, axis=1) > 1e-15)
    d_in = np.arcsin(np.clip(np.abs(qn), 0, 1))
    d_end = np.minimum(sph_dist_xyz(q, a), sph_dist_xyz(q, b))
    return np.where(inside, d_in, d_end)


def subdivide(points, refine):
    """Split every segment of a polyline into ``refine`` geodesic pieces."""
    if refine <= 1:
        return points
    t = np.arange(refine) / refine
    parts = [slerp(points[i], points[i + 1], t) for i in range(len(points) - 1)]
    parts.append(points[-1:])
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# data types

@dataclass(frozen=True)
class Edge:
    v_from: int
    v_to: int
    points: np.ndarray
    source: tuple | None = None   # SpherePoints as read from text, kept for exact output

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def is_loop(self):
        return self.v_from == self.v_to

    def length(self):
        return float(np.sum(sph_dist_xyz(self.points[:-1], self.points[1:])))

    def point_list(self):
        return [SpherePoint.from_xyz(p) for p in self.points]


@dataclass(frozen=True, eq=False)
class Face:
    index: int
    boundary_walk: tuple
    sample_xyz: np.ndarray

    @property
    def sample_interior_point(self):
        return SpherePoint.from_xyz(self.sample_xyz)

    def __eq__(self, other):
        return isinstance(other, Face) and other.index == self.index and \
            other.boundary_walk == self.boundary_walk

    __hash__ = None


@dataclass(frozen=True)
class OnEdge:
    edge: int
    parameter: float


@dataclass(frozen=True)
class OnVertex:
    vertex: int


def _end_dart(end):
    e, s = end
    return (e, 1 if s == 0 else -1)


def _dart_start_end(dart):
    e, d = dart
    return (e, 0) if d == 1 else (e, 1)


def _dart_arrive_end(dart):
    e, d = dart
    return (e, 1) if d == 1 else (e, 0)


class EmbeddedGraph:
    """Connected graph embedded in the sphere with a rotation system.

    Parameters
    ----------
    vertices : dict
        ``id -> SpherePoint`` (complex numbers and unit vectors accepted).
    edges : dict
        ``id -> Edge`` or ``id -> (v_from, v_to, points)``.
    rotation : dict, optional
        ``vertex -> sequence of edge-ends`` in counter-clockwise order.
        Derived from the geometry when omitted.
    validate : bool
        Check endpoint incidence, connectivity, valence and Euler formula.
    """

    def __init__(self, vertices, edges, rotation=None, *, validate=True,
                 provenance=None, connected=True):
        self.vertices = {}
        for k, v in vertices.items():
            if isinstance(v, np.ndarray) and v.shape == (3,):
                v = SpherePoint.from_xyz(v)
            self.vertices[int(k)] = as_point(v)
        self.edges = {}
        for k, e in edges.items():
            if not isinstance(e, Edge):
                e = Edge(int(e[0]), int(e[1]), e[2])
            self.edges[int(k)] = e
        self._vxyz = {k: v.xyz for k, v in self.vertices.items()}
        if rotation is None:
            rotation = self._geometric_rotation()
        self.rotation = {int(v): tuple((int(e), int(s)) for e, s in ends)
                         for v, ends in rotation.items()}
        self.provenance = provenance or {}
        self._check_rotation()
        if validate:
            self.validate(connected)

    # construction helpers ----------------------------------------------
    @classmethod
    def from_polylines(cls, vertices, edges, max_step=SAMPLE_STEP, **kw):
        """Build with geodesic densification of every polyline.

        ``edges`` maps ids to ``(v_from, v_to, points)`` where points may be
        complex numbers; endpoints are snapped to the vertex positions.
        """
        vx = {k: as_point(v).xyz for k, v in vertices.items()}
        out = {}
        for k, (a, b, pts) in edges.items():
            pts = np.asarray(pts)
            if np.iscomplexobj(pts) or pts.ndim == 1:
                pts = to_xyz(pts)
            pts = np.array(pts, dtype=float)
            pts[0], pts[-1] = vx[a], vx[b]
            out[k] = (a, b, densify(pts, max_step))
        return cls({k: SpherePoint.from_xyz(v) for k, v in vx.items()}, out, **kw)

    def _geometric_rotation(self):
        ends = {v: [] for v in self.vertices}
        for k, e in self.edges.items():
            if len(e.points) < 2:
                raise EmbeddingInconsistent(f"edge {k} has fewer than 2 samples")
            if e.v_from not in ends or e.v_to not in ends:
                raise EmbeddingInconsistent(f"edge {k} references unknown vertex")
            ends[e.v_from].append(((k, 0), e.points[1]))
            ends[e.v_to].append(((k, 1), e.points[-2]))
        rot = {}
        for v, lst in ends.items():
            p = self._vxyz[v]
            rot[v] = tuple(end for end, q in sorted(
                lst, key=lambda t: (direction_angle(p, t[1]), t[0])))
        return rot

    def _check_rotation(self):
        seen = set()
        for v, ends in self.rotation.items():
            for e, s in ends:
                edge = self.edges.get(e)
                if edge is None or (edge.v_from if s == 0 else edge.v_to) != v:
                    raise EmbeddingInconsistent(f"rotation at {v} lists foreign end {(e, s)}")
                if (e, s) in seen:
                    raise EmbeddingInconsistent(f"edge-end {(e, s)} listed twice")
                seen.add((e, s))
        if len(seen) != 2 * len(self.edges):
            raise EmbeddingInconsistent("rotation system misses edge-ends")

    def validate(self, connected=True):
        for k, e in self.edges.items():
            for v, p in ((e.v_from, e.points[0]), (e.v_to, e.points[-1])):
                if sph_dist_xyz(p, self._vxyz[v]) > EPS_GEOM:
                    raise EmbeddingInconsistent(f"edge {k} does not end at vertex {v}")
        for v, ends in self.rotation.items():
            if len(ends) < 2:
                raise EmbeddingInconsistent(f"vertex {v} has valence {len(ends)} < 2")
        C = self.n_components()
        if connected and C != 1:
            raise EmbeddingInconsistent("graph is not connected")
        # face walks of a disconnected graph count one outer walk per component
        V, E, F = len(self.vertices), len(self.edges), len(self._walks[0])
        if V - E + F != 2 * C:
            raise EmbeddingInconsistent(f"Euler characteristic {V - E + F} != {2 * C}")

    def n_components(self):
        adj = {v: set() for v in self.vertices}
        for e in self.edges.values():
            adj[e.v_from].add(e.v_to)
            adj[e.v_to].add(e.v_from)
        seen, count = set(), 0
        for start in adj:
            if start in seen:
                continue
            count += 1
            seen.add(start)
            stack = [start]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
        return count

    def is_connected(self):
        return bool(self.vertices) and self.n_components() == 1

    # accessors ----------------------------------------------------------
    def vertex_xyz(self, v):
        return self._vxyz[v]

    def valence(self, v):
        return len(self.rotation[v])

    def trivalence_lint(self):
        """Vertices whose valence is not 3 (informational only)."""
        return sorted(v for v in self.vertices if self.valence(v) != 3)

    def dart_points(self, dart):
        e, d = dart
        pts = self.edges[e].points
        return pts if d == 1 else pts[::-1]

    def dart_tail(self, dart):
        e, d = dart
        edge = self.edges[e]
        return edge.v_from if d == 1 else edge.v_to

    def dart_head(self, dart):
        e, d = dart
        edge = self.edges[e]
        return edge.v_to if d == 1 else edge.v_from

    @cached_property
    def _end_index(self):
        return {end: (v, i) for v, ends in self.rotation.items() for i, end in enumerate(ends)}

    def next_in_face(self, dart):
        v, i = self._end_index[_dart_arrive_end(dart)]
        ends = self.rotation[v]
        return _end_dart(ends[(i - 1) % len(ends)])

    def sigma(self, dart):
        """Next dart counter-clockwise around the tail vertex."""
        v, i = self._end_index[_dart_start_end(dart)]
        ends = self.rotation[v]
        return _end_dart(ends[(i + 1) % len(ends)])

    def darts(self):
        return [(e, d) for e in sorted(self.edges) for d in (1, -1)]

    @cached_property
    def _walks(self):
        dart_face = {}
        walks = []
        for start in self.darts():
            if start in dart_face:
                continue
            walk, d = [], start
            while True:
                if d in dart_face:
                    raise EmbeddingInconsistent(f"dart {d} traversed twice")
                dart_face[d] = len(walks)
                walk.append(d)
                d = self.next_in_face(d)
                if d == start:
                    break
                if len(walk) > 2 * len(self.edges):
                    raise EmbeddingInconsistent("face walk does not close")
            walks.append(tuple(walk))
        return walks, dart_face

    @property
    def dart_face(self):
        return self._walks[1]

    @cached_property
    def faces(self):
        """Faces from the rotation system, each with an interior sample point."""
        walks, _ = self._walks
        out = []
        for i, w in enumerate(walks):
            out.append(Face(i, w, self._face_sample(i, w)))
        return out

    # segment table -------------------------------------------------------
    @cached_property
    def _segments(self):
        a, b, eid, idx = [], [], [], []
        for k in sorted(self.edges):
            pts = self.edges[k].points
            a.append(pts[:-1])
            b.append(pts[1:])
            eid.append(np.full(len(pts) - 1, k))
            idx.append(np.arange(len(pts) - 1))
        return (np.concatenate(a), np.concatenate(b), np.concatenate(eid),
                np.concatenate(idx))

    def support_arcs(self):
        a, b, _, _ = self._segments
        return a, b

    def support_samples(self, refine=1):
        pts = [subdivide(self.edges[k].points, refine) for k in sorted(self.edges)]
        return np.concatenate(pts)

    @cached_property
    def segment_index(self):
        a, b, _, _ = self._segments
        return SegmentIndex(a, b)

    def distance_to_support(self, q):
        return self.segment_index.nearest(np.atleast_2d(q))[0]

    # location -----------------------------------------------------------
    def _edge_parameter(self, e, j, tau):
        pts = self.edges[e].points
        seg = sph_dist_xyz(pts[:-1], pts[1:])
        total = seg.sum()
        if total == 0:
            return 0.0
        return float((seg[:j].sum() + tau * seg[j]) / total)

    def locate(self, q, eps=EPS_GEOM):
        """Classify a unit vector: ``('vertex', v)``, ``('edge', e, t)`` or ``('face', i)``."""
        q = np.asarray(q, dtype=float)
        vids = list(self.vertices)
        vx = np.array([self._vxyz[v] for v in vids])
        dv = sph_dist_xyz(vx, q[None])
        iv = int(np.argmin(dv))
        if dv[iv] <= eps:
            best = [v for v, dd in zip(vids, dv) if dd == dv[iv]]
            return ("vertex", min(best))
        a, b, eid, idx = self._segments
        dist, tau = arc_distances(q[None], a, b)
        dist, tau = dist[0], tau[0]
        k = int(np.argmin(dist))
        e, j, t = int(eid[k]), int(idx[k]), float(tau[k])
        if dist[k] <= eps:
            return ("edge", e, self._edge_parameter(e, j, t))
        pts = self.edges[e].points
        if _TAU_EDGE < t < 1 - _TAU_EDGE:
            side = np.dot(q, cross3(pts[j], pts[j + 1]))
            dart = (e, 1) if side < 0 else (e, -1)
            return ("face", self.dart_face[dart])
        knot = j if t <= _TAU_EDGE else j + 1
        if 0 < knot < len(pts) - 1:
            p = pts[knot]
            a_out = direction_angle(p, pts[knot + 1])
            a_in = direction_angle(p, pts[knot - 1])
            aq = direction_angle(p, q)
            left = (aq - a_out) % (2 * np.pi) < (a_in - a_out) % (2 * np.pi)
            dart = (e, 1) if left else (e, -1)
            return ("face", self.dart_face[dart])
        v = self.edges[e].v_from if knot == 0 else self.edges[e].v_to
        return ("face", self.dart_face[self._wedge_dart(v, q)])

    def _wedge_dart(self, v, q):
        p = self._vxyz[v]
        ends = self.rotation[v]
        angs = []
        for e, s in ends:
            pts = self.edges[e].points
            angs.append(direction_angle(p, pts[1] if s == 0 else pts[-2]))
        aq = direction_angle(p, q)
        k = len(ends)
        for i in range(k):
            span = (angs[(i + 1) % k] - angs[i]) % (2 * np.pi)
            if k == 1 or span == 0:
                span = 2 * np.pi
            if (aq - angs[i]) % (2 * np.pi) < span:
                return _end_dart(ends[i])
        return _end_dart(ends[0])

    def face_containing(self, z, eps=EPS_GEOM):
        """Face, :class:`OnEdge` or :class:`OnVertex` for a point."""
        q = z if isinstance(z, np.ndarray) else as_point(z).xyz
        loc = self.locate(q, eps)
        if loc[0] == "vertex":
            return OnVertex(loc[1])
        if loc[0] == "edge":
            return OnEdge(loc[1], loc[2])
        return self.faces[loc[1]]

    def _face_sample(self, i, walk):
        # offset a little to the left of a segment midpoint, then verify
        cands = sorted(walk, key=lambda d: -len(self.edges[d[0]].points))
        for eta in (1e-2, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6):
            for dart in cands[:4]:
                pts = self.dart_points(dart)
                m = len(pts) // 2
                a, b = pts[m - 1], pts[m]
                c = normalize(a + b)
                t = b - a
                left = normalize(cross3(t, c))
                x = normalize(np.cos(eta) * c + np.sin(eta) * left)
                loc = self.locate(x, EPS_GEOM)
                if loc == ("face", i):
                    return x
        raise EmbeddingInconsistent(f"no interior sample found for face {i}")

    # geometry checks ------------------------------------------------------
    def check_crossings(self, eps=EPS_GEOM):
        """Raise if two distinct edges meet away from shared endpoint vertices."""
        from .overlay import arc_crossings
        keys = sorted(self.edges)
        for ii, k1 in enumerate(keys):
            for k2 in keys[ii:]:
                e1, e2 = self.edges[k1], self.edges[k2]
                hits = arc_crossings(e1.points, e2.points, same=(k1 == k2))
                shared = {e1.v_from, e1.v_to} & {e2.v_from, e2.v_to}
                for _, _, x in hits:
                    if not any(sph_dist_xyz(x, self._vxyz[v]) <= 1e3 * eps for v in shared):
                        raise EmbeddingInconsistent(f"edges {k1} and {k2} cross")

    def polyline_lengths(self):
        return {k: e.length() for k, e in self.edges.items()}

    def min_edge_diameter(self):
        out = np.inf
        for e in self.edges.values():
            pts = e.points
            d = sph_dist_xyz(pts[:, None, :], pts[None, ::max(1, len(pts) // 16), :]).max()
            out = min(out, d)
        return float(out)

    def relabeled(self, provenance=None):
        return EmbeddedGraph(self.vertices, self.edges, self.rotation, validate=False,
                             provenance=provenance if provenance is not None else self.provenance)

    def __repr__(self):
        return (f"EmbeddedGraph(V={len(self.vertices)}, E={len(self.edges)}, "
                f"F={len(self.faces)})")


# ---------------------------------------------------------------------------
# metric comparisons

def graph_hausdorff(a, b, refine=1):
    """Symmetric Hausdorff distance between graph supports.

    Samples of one support (polyline knots, optionally subdivided
    ``refine`` times) are measured against the exact great arcs of the other.
    """
    pa = a.support_samples(refine)
    pb = b.support_samples(refine)
    d1 = b.distance_to_support(pa).max()
    d2 = a.distance_to_support(pb).max()
    return float(max(d1, d2))


def directed_distance(a, b, refine=1):
    """``sup_{x in a} dist(x, b)`` over samples of ``a``."""
    return float(b.distance_to_support(a.support_samples(refine)).max())


# ---------------------------------------------------------------------------
# combinatorial signature

def isotopy_signature(g, marks=None):
    """Canonical code of the rotation system, invariant under relabeling.

    With ``marks`` (points of the sphere), the number of marks in the face to
    the left of every dart is folded into the code, so isotopies must keep
    marked points on the same sides.
    """
    darts = g.darts()
    face_marks = None
    if marks is not None:
        counts = [0] * len(g.faces)
        for m in marks:
            loc = g.locate(as_point(m).xyz if not isinstance(m, np.ndarray) else m)
            if loc[0] == "face":
                counts[loc[1]] += 1
        face_marks = counts
    best = None
    for start in darts:
        label = {start: 0}
        order = [start]
        code = []
        i = 0
        while i < len(order):
            d = order[i]
            for t in (g.sigma(d), (d[0], -d[1])):
                if t not in label:
                    label[t] = len(order)
                    order.append(t)
                code.append(label[t])
            i += 1
        if face_marks is not None:
            code.extend(face_marks[g.dart_face[d]] for d in order)
        code = tuple(code)
        if best is None or code < best:
            best = code
    return (len(g.vertices), len(g.edges), len(g._walks[0])) + (best or ())
