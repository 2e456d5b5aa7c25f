"""Preimages of embedded graphs under a rational map.

Lifting follows every branch of ``f^{-1}`` along a polyline by nearest
fiber continuation; a source step is halved whenever the assignment of old
to new fiber points is not unambiguous.  The subgraph extraction routes,
for every edge of a reference graph, a path of the pulled-back graph inside
a tube around that edge.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import (
    CriticalValueOnEdge, EmbeddingInconsistent, NeighbourhoodTooCoarse,
    ResourceLimit, RoutingFailure,
)
from .graph import (
    SAMPLE_STEP, EmbeddedGraph, SegmentIndex, directed_distance,
    isotopy_signature, point_set_distance,
)
from .numerics import SpherePoint, direction_angle, slerp, sph_dist_xyz, thin

EPS_CV = 1e-4
EPS_LIFT = 1e-8
MAX_HALVINGS = 40
EDGE_CAP = 20000


@dataclass(frozen=True)
class LiftedEdge:
    source_edge: int
    branch_index: int
    polyline: np.ndarray
    endpoint_fiber_ids: tuple


def _critical_clearance(f, points):
    cv = f.critical_values_xyz()
    if len(points) < 2:
        return float(sph_dist_xyz(cv, points[0]).min())
    return float(point_set_distance(cv, points[:-1], points[1:]).min())


def _match(cur, new):
    """Permutation sending branch ``b`` to ``new[perm[b]]``, or None if ambiguous."""
    d = len(cur)
    D = sph_dist_xyz(cur[:, None, :], new[None, :, :])
    perm = np.argmin(D, axis=1)
    if len(set(perm.tolist())) != d:
        return None
    if d > 1:
        sep = sph_dist_xyz(new[:, None, :], new[None, :, :])
        sep = sep[~np.eye(d, dtype=bool)].min()
        if sep < 10 * EPS_LIFT or D[np.arange(d), perm].max() >= 0.5 * sep:
            return None
    return perm


def _batch_perms(A, B):
    """Per-step nearest matchings ``A[i] -> B[i]`` (shape (n,d,3)); ``ok`` marks unambiguous ones."""
    n, d, _ = A.shape
    D = sph_dist_xyz(A[:, :, None, :], B[:, None, :, :])           # (n,d,d)
    perm = np.argmin(D, axis=2)
    ok = np.ones(n, dtype=bool)
    if d > 1:
        srt = np.sort(perm, axis=1)
        ok &= (np.diff(srt, axis=1) > 0).all(axis=1)
        S = sph_dist_xyz(B[:, :, None, :], B[:, None, :, :])
        S[:, np.arange(d), np.arange(d)] = np.inf
        sep = S.min(axis=(1, 2))
        step = np.take_along_axis(D, perm[:, :, None], axis=2)[..., 0].max(axis=1)
        ok &= (sep >= 10 * EPS_LIFT) & (step < 0.5 * sep)
    return perm, ok


def _rows_of(F, cur):
    """Index of each row of ``cur`` inside ``F`` (exact copies)."""
    return np.argmin(((F[None, :, :] - cur[:, None, :]) ** 2).sum(axis=2), axis=1)


def _walk_step(f, cur, last, w, F, max_step):
    """Follow the branches from ``last`` to ``w`` with step halving; returns new points per branch."""
    stack = [(w, F)]
    out = []
    halvings = 0
    while stack:
        w, F = stack[-1]
        perm = _match(cur, F)
        if perm is not None:
            if sph_dist_xyz(cur, F[perm]).max() > max_step and sph_dist_xyz(last, w) > 1e-12:
                perm = None
        if perm is None:
            halvings += 1
            if halvings > MAX_HALVINGS * 64 or sph_dist_xyz(last, w) < 1e-13:
                raise CriticalValueOnEdge("branch tracking failed; critical value too close")
            mid = slerp(last, w, 0.5)
            stack.append((mid, f.fibers_xyz(mid[None])[0]))
            continue
        stack.pop()
        cur = F[perm]
        last = w
        out.append(cur)
    return out, perm


def lift_polyline(f, points, max_step=SAMPLE_STEP, start=None, check_cv=True):
    """All ``d`` lifts of a polyline; ``start`` fixes the branch order at the first point.

    Returns a list of ``d`` polylines, each an (m,3) array.
    """
    pts = np.asarray(points, dtype=float)
    if check_cv and _critical_clearance(f, pts) < EPS_CV:
        raise CriticalValueOnEdge("polyline passes within eps_cv of a critical value")
    fib = f.fibers_xyz(pts)
    if start is not None:
        p0 = _match(np.asarray(start, dtype=float), fib[0])
        if p0 is None:
            raise CriticalValueOnEdge("start fiber does not match the first point")
        fib[0] = fib[0][p0]
    # batch pass over the unambiguous steps; sigma maps branch -> fiber row
    perm, ok = _batch_perms(fib[:-1], fib[1:])
    seq = [fib[0][None]]
    cur = fib[0]
    i = 1
    while i < len(pts):
        sigmas = [_rows_of(fib[i - 1], cur)]
        j = i
        while j < len(pts) and ok[j - 1]:
            sigmas.append(perm[j - 1][sigmas[-1]])
            j += 1
        if j > i:
            run = fib[np.arange(i, j)[:, None], np.array(sigmas[1:])]     # (j-i,d,3)
            prev = np.concatenate([cur[None], run[:-1]])
            big = np.nonzero(sph_dist_xyz(prev, run).max(axis=1) > max_step)[0]
            stop = i + (int(big[0]) if len(big) else j - i)
            seq.append(run[:stop - i])
            if stop > i:
                cur = run[stop - i - 1]
            i = stop
            if i == j and not len(big):
                continue
        if i >= len(pts):
            break
        out, _ = _walk_step(f, cur, pts[i - 1], pts[i], fib[i], max_step)
        seq.append(np.array(out))
        cur = out[-1]
        i += 1
    arr = np.concatenate(seq)                             # (m,d,3)
    return [thin(arr[:, b], max_step) for b in range(arr.shape[1])]


def lift_edge(f, g, edge_id, max_step=SAMPLE_STEP):
    """The ``d`` lifts of one edge of ``g``, with fiber indices of their endpoints."""
    e = g.edges[edge_id]
    Fa = f.fiber_xyz(g.vertex_xyz(e.v_from))
    Fb = f.fiber_xyz(g.vertex_xyz(e.v_to))
    lifts = lift_polyline(f, e.points, max_step, start=Fa)
    out = []
    for b, pl in enumerate(lifts):
        kb = int(np.argmin(sph_dist_xyz(Fb, pl[-1])))
        pl = pl.copy()
        pl[0], pl[-1] = Fa[b], Fb[kb]
        out.append(LiftedEdge(edge_id, b, pl, (b, kb)))
    return out


def graph_preimage(f, G, max_step=SAMPLE_STEP):
    """``f^{-1}(G)`` as an embedded graph, possibly disconnected.

    Vertex ``(v, k)`` of the preimage is the ``k``-th fiber point over ``v``;
    the rotation system is pulled back from ``G`` because ``f`` is a local
    orientation-preserving homeomorphism away from critical points.
    ``provenance`` maps new edge ids to ``(source edge, branch)``.
    """
    d = f.degree
    cv = f.critical_values_xyz()
    if G.distance_to_support(cv).min() < EPS_CV:
        raise CriticalValueOnEdge("graph passes within eps_cv of a critical value")
    vids = sorted(G.vertices)
    vnew = {}
    verts = {}
    for v in vids:
        F = f.fiber_xyz(G.vertex_xyz(v))
        sep = sph_dist_xyz(F[:, None], F[None])[~np.eye(d, dtype=bool)]
        if d > 1 and sep.min() < 10 * EPS_LIFT:
            raise CriticalValueOnEdge(f"vertex {v} is a critical value")
        for k in range(d):
            vnew[(v, k)] = len(verts)
            verts[len(verts)] = SpherePoint.from_xyz(F[k])
    edges, prov, end_at = {}, {}, {}
    for e in sorted(G.edges):
        src = G.edges[e]
        for lift in lift_edge(f, G, e, max_step):
            k0, k1 = lift.endpoint_fiber_ids
            nid = len(edges)
            edges[nid] = (vnew[(src.v_from, k0)], vnew[(src.v_to, k1)], lift.polyline)
            prov[nid] = (e, lift.branch_index)
            for s, (v, k) in ((0, (src.v_from, k0)), (1, (src.v_to, k1))):
                key = (vnew[(v, k)], (e, s))
                if key in end_at:
                    raise EmbeddingInconsistent("two lifts share an end; branch swap")
                end_at[key] = (nid, s)
    rotation = {}
    for v in vids:
        for k in range(d):
            u = vnew[(v, k)]
            try:
                rotation[u] = tuple(end_at[(u, end)] for end in G.rotation[v])
            except KeyError:
                raise EmbeddingInconsistent(f"lift missing at fiber point {(v, k)}") from None
    return EmbeddedGraph(verts, edges, rotation, provenance=prov, connected=False)


def iterated_preimage(f, G, n, max_step=SAMPLE_STEP, edge_cap=EDGE_CAP):
    """``f^{-n}(G)`` by ``n`` successive pullbacks."""
    for _ in range(n):
        if len(G.edges) * f.degree > edge_cap:
            raise ResourceLimit(f"preimage would exceed {edge_cap} edges")
        G = graph_preimage(f, G, max_step)
    return G


# ---------------------------------------------------------------------------
# subgraph extraction

def _tube_members(G0, Gamma, delta1):
    """Gamma edges assigned to each G0 edge (nearest by mean distance, within delta1)."""
    keys0 = sorted(G0.edges)
    vx = np.array([G0.vertex_xyz(v) for v in G0.vertices])
    member = {k: set() for k in keys0}
    index = {k0: SegmentIndex(G0.edges[k0].points[:-1], G0.edges[k0].points[1:])
             for k0 in keys0}
    for k, e in Gamma.edges.items():
        pts = e.points
        dists = np.array([index[k0].nearest(pts)[0] for k0 in keys0])   # (E0, n)
        near_vertex = sph_dist_xyz(pts[:, None], vx[None]).min(axis=1) <= delta1
        for i, k0 in enumerate(keys0):
            ok = (dists[i] <= delta1) | near_vertex
            if ok.all():
                member[k0].add(k)
        # keep only the nearest G0 edge unless the Gamma edge hugs a vertex
        if not near_vertex.all():
            means = dists.mean(axis=1)
            best = keys0[int(np.argmin(means))]
            for k0 in keys0:
                if k0 != best:
                    member[k0].discard(k)
    return member


def _dijkstra(Gamma, allowed, source, target, banned_vertices, first_dart=None):
    """Shortest dart path from source to target through allowed edges."""
    adj = {}
    for k in allowed:
        e = Gamma.edges[k]
        w = e.length()
        adj.setdefault(e.v_from, []).append(((k, 1), e.v_to, w))
        adj.setdefault(e.v_to, []).append(((k, -1), e.v_from, w))
    start_cost = 0.0
    path0 = []
    if first_dart is not None:
        k, d = first_dart
        start_cost = Gamma.edges[k].length()
        path0 = [first_dart]
        source = Gamma.dart_head(first_dart)
        allowed = allowed - {k}
        if source == target:
            return path0
    heap = [(start_cost, 0, source, tuple(path0))]
    best = {}
    count = 1
    while heap:
        c, _, v, path = heapq.heappop(heap)
        if v == target and path:
            return list(path)
        if v in best:
            continue
        best[v] = c
        for dart, w, L in adj.get(v, ()):
            if dart[0] not in allowed or any(p[0] == dart[0] for p in path):
                continue
            if w in banned_vertices and w != target:
                continue
            if w in best:
                continue
            heapq.heappush(heap, (c + L, count, w, path + (dart,)))
            count += 1
    return None


def extract_isotopic_subgraph(G0, Gamma, delta1, check_signature=True):
    """Subgraph of ``Gamma`` isotopic to ``G0`` inside its ``delta1``-neighbourhood.

    Every ``G0`` vertex is matched to the nearest ``Gamma`` vertex (ties to
    the lowest id); every ``G0`` edge is realized by a shortest path of
    ``Gamma`` edges inside a tube of radius ``delta1`` around it, paths being
    disjoint apart from matched vertices.  Unmatched ``Gamma`` vertices along
    a path become interior polyline samples.  The result keeps the vertex
    and edge ids of ``G0``; ``provenance`` lists the ``Gamma`` darts of
    every edge.
    """
    if directed_distance(G0, Gamma) > delta1:
        raise NeighbourhoodTooCoarse(
            "reference graph leaves the delta1-neighbourhood of the pullback; "
            "increase the pullback depth")
    gids = sorted(Gamma.vertices)
    gx = np.array([Gamma.vertex_xyz(v) for v in gids])
    match = {}
    for v in sorted(G0.vertices):
        d = sph_dist_xyz(gx, G0.vertex_xyz(v)[None])
        i = int(np.argmin(d))
        if d[i] > delta1:
            raise RoutingFailure(f"no pullback vertex within delta1 of vertex {v}")
        match[v] = gids[i]
    if len(set(match.values())) != len(match):
        raise RoutingFailure("two vertices matched to the same pullback vertex")

    members = _tube_members(G0, Gamma, delta1)
    used_edges = set()
    interior = set()
    matched = set(match.values())
    paths = {}
    for k0 in sorted(G0.edges):
        e0 = G0.edges[k0]
        s, t = match[e0.v_from], match[e0.v_to]
        allowed = members[k0] - used_edges
        banned = (interior | matched) - {s, t}
        p0 = G0.vertex_xyz(e0.v_from)
        want = direction_angle(p0, e0.points[1])
        starts = []
        for e, side in Gamma.rotation[s]:
            if e not in allowed:
                continue
            pts = Gamma.edges[e].points
            ang = direction_angle(Gamma.vertex_xyz(s), pts[1] if side == 0 else pts[-2])
            diff = abs((ang - want + np.pi) % (2 * np.pi) - np.pi)
            starts.append((diff, e, side))
        path = None
        for _, e, side in sorted(starts):
            dart = (e, 1) if side == 0 else (e, -1)
            if Gamma.dart_head(dart) in banned:
                continue
            path = _dijkstra(Gamma, allowed, s, t, banned, first_dart=dart)
            if path is not None:
                break
        if path is None:
            raise RoutingFailure(f"no path in the tube around edge {k0}")
        paths[k0] = path
        used_edges.update(d[0] for d in path)
        interior.update(Gamma.dart_head(d) for d in path[:-1])

    verts = {v: Gamma.vertices[match[v]] for v in G0.vertices}
    edges = {}
    for k0, path in paths.items():
        chunks = [Gamma.dart_points(path[0])]
        chunks += [Gamma.dart_points(d)[1:] for d in path[1:]]
        e0 = G0.edges[k0]
        edges[k0] = (e0.v_from, e0.v_to, np.concatenate(chunks))
    # rotation inherited from the order of the chosen ends around each Gamma vertex
    ends_at = {v: [] for v in G0.vertices}
    for k0, path in paths.items():
        e0 = G0.edges[k0]
        first, last = path[0], path[-1]
        f_end = (first[0], 0) if first[1] == 1 else (first[0], 1)
        l_end = (last[0], 1) if last[1] == 1 else (last[0], 0)
        ends_at[e0.v_from].append((Gamma._end_index[f_end][1], (k0, 0)))
        ends_at[e0.v_to].append((Gamma._end_index[l_end][1], (k0, 1)))
    rotation = {v: tuple(end for _, end in sorted(lst)) for v, lst in ends_at.items()}
    try:
        G1 = EmbeddedGraph(verts, edges, rotation, provenance=dict(paths))
    except EmbeddingInconsistent as exc:
        raise RoutingFailure(f"routed paths do not form an embedding: {exc}") from exc
    if check_signature and isotopy_signature(G1) != isotopy_signature(G0):
        raise RoutingFailure("routed subgraph is not isotopic to the reference graph")
    return G1
