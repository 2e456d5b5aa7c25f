"""Crossings of polylines and overlay of several graphs into one."""
from __future__ import annotations

import numpy as np

from .errors import InfiniteIntersection
from .graph import EPS_GEOM, EmbeddedGraph, arc_distances, point_set_distance
from .numerics import SpherePoint, cross3, normalize, sph_dist_xyz

INTERSECTION_CAP = 16


def _within(x, a, b, n):
    return (np.einsum("...j,...j->...", cross3(a, x), n) >= -1e-15) & \
           (np.einsum("...j,...j->...", cross3(x, b), n) >= -1e-15)


def arc_crossings(p1, p2, same=False):
    """Intersection points of two polylines as ``(i, j, x)`` triples.

    ``i`` and ``j`` index the segments; consecutive segments of the same
    polyline (``same=True``) are skipped.
    """
    a1, a2 = p1[:-1], p1[1:]
    b1, b2 = p2[:-1], p2[1:]
    m1 = normalize(a1 + a2)
    m2 = normalize(b1 + b2)
    r1 = sph_dist_xyz(a1, a2) / 2
    r2 = sph_dist_xyz(b1, b2) / 2
    near = sph_dist_xyz(m1[:, None], m2[None]) <= (r1[:, None] + r2[None]) * 1.0001 + 1e-12
    if same:
        k = np.arange(len(a1))
        near[k[:, None] >= k[None] - 1] = False
    ii, jj = np.nonzero(near)
    out = []
    if len(ii) == 0:
        return out
    n1 = cross3(a1[ii], a2[ii])
    n2 = cross3(b1[jj], b2[jj])
    line = cross3(n1, n2)
    ln = np.linalg.norm(line, axis=1)
    for s in range(len(ii)):
        i, j = int(ii[s]), int(jj[s])
        if ln[s] < 1e-14:
            # coplanar arcs: report any endpoint of one lying on the other
            for x in (a1[i], a2[i]):
                if _within(x, b1[j], b2[j], n2[s]) and abs(np.dot(x, normalize(n2[s]))) < 1e-12:
                    out.append((i, j, x))
                    break
            continue
        x = line[s] / ln[s]
        for cand in (x, -x):
            if _within(cand, a1[i], a2[i], n1[s]) and _within(cand, b1[j], b2[j], n2[s]):
                out.append((i, j, cand))
                break
    return out


def _split_points(pts, cuts):
    """Split a polyline at ``cuts`` = list of (segment index, point)."""
    cuts = sorted(cuts, key=lambda c: (c[0], sph_dist_xyz(pts[c[0]], c[1])))
    pieces, cur, last = [], [pts[0]], 0
    for i, x in cuts:
        cur.extend(pts[last + 1:i + 1])
        if sph_dist_xyz(cur[-1], x) > 1e-14:
            cur.append(x)
        else:
            cur[-1] = x
        pieces.append(np.array(cur))
        cur, last = [x], i
    cur.extend(pts[last + 1:])
    pieces.append(np.array(cur))
    return [p for p in pieces if len(p) >= 2]


def overlay(graphs, eps=EPS_GEOM, cap=INTERSECTION_CAP, coincide_tol=None):
    """Union of graph supports as one embedded graph.

    Edges of later graphs that coincide entirely with the current support
    contribute only their endpoints (as new vertices); edges crossing it
    transversally are split at the crossings.  Partial coincidence along a
    sub-arc, or more than ``cap`` crossings for one pair of edges, raises
    :class:`InfiniteIntersection`.
    """
    tol = coincide_tol if coincide_tol is not None else max(eps, 1e-6)
    base = graphs[0]
    verts = [base.vertex_xyz(v) for v in sorted(base.vertices)]
    vid = {v: i for i, v in enumerate(sorted(base.vertices))}
    edges = [(vid[e.v_from], vid[e.v_to], e.points) for _, e in sorted(base.edges.items())]

    def find_vertex(x):
        d = sph_dist_xyz(np.array(verts), x[None])
        k = int(np.argmin(d))
        return k if d[k] <= tol else None

    def insert_point(x):
        k = find_vertex(x)
        if k is not None:
            return k
        for ei, (a, b, pts) in enumerate(edges):
            dist, tau = arc_distances(x[None], pts[:-1], pts[1:])
            j = int(np.argmin(dist[0]))
            if dist[0, j] <= tol:
                verts.append(x)
                k = len(verts) - 1
                p1, p2 = _split_points(pts, [(j, x)])
                edges[ei] = (a, k, p1)
                edges.append((k, b, p2))
                return k
        verts.append(x)
        return len(verts) - 1

    for g in graphs[1:]:
        for _, e in sorted(g.edges.items()):
            pts = e.points
            sa = np.concatenate([p[:-1] for _, _, p in edges])
            sb = np.concatenate([p[1:] for _, _, p in edges])
            on = point_set_distance(pts, sa, sb) <= tol
            if on.all():
                insert_point(pts[0])
                insert_point(pts[-1])
                continue
            if on[1:-1].any():
                raise InfiniteIntersection("arcs coincide along a sub-arc")
            # transverse crossings with every existing edge
            cuts = []
            for ei in range(len(edges)):
                a, b, q = edges[ei]
                hits = [h for h in arc_crossings(pts, q)
                        if sph_dist_xyz(h[2], pts[0]) > tol and sph_dist_xyz(h[2], pts[-1]) > tol]
                if len(hits) > cap:
                    raise InfiniteIntersection(f"more than {cap} crossings between two edges")
                cuts.extend((i, x) for i, _, x in hits)
            ka = insert_point(pts[0])
            kb = insert_point(pts[-1])
            ks = [insert_point(x) for _, x in sorted(cuts, key=lambda c: c[0])]
            pieces = _split_points(pts, cuts)
            chain = [ka] + ks + [kb]
            for t, piece in enumerate(pieces):
                piece = piece.copy()
                piece[0], piece[-1] = verts[chain[t]], verts[chain[t + 1]]
                edges.append((chain[t], chain[t + 1], piece))
    vdict = {i: SpherePoint.from_xyz(x) for i, x in enumerate(verts)}
    edict = {}
    for i, (a, b, pts) in enumerate(edges):
        pts = np.array(pts)
        pts[0], pts[-1] = verts[a], verts[b]
        edict[i] = (a, b, pts)
    return EmbeddedGraph(vdict, edict)
