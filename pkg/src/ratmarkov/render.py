"""SVG output by stereographic projection.

Output is a pure function of the inputs: coordinates are printed with a
fixed number of decimals and colours come from a cryptographic hash, so
identical inputs give byte-identical files.
"""
from __future__ import annotations

import colorsys
import hashlib

import numpy as np

from .errors import ProjectionPoleOnGraph
from .graph import EPS_GEOM, EmbeddedGraph
from .markov import MarkovPartition
from .numerics import cross3, normalize
from .param_space import ScanReport

AXIS_POLES = ((0, 0, 1), (0, 0, -1), (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0))


def _rotation_to_north(pole):
    """Rotation matrix taking ``pole`` to ``(0, 0, 1)``."""
    p = normalize(np.asarray(pole, dtype=float))
    n = np.array([0.0, 0.0, 1.0])
    c = float(p @ n)
    if c > 1 - 1e-15:
        return np.eye(3)
    if c < -1 + 1e-15:
        return np.diag([1.0, -1.0, -1.0])
    v = cross3(p, n)
    K = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + K + K @ K / (1 + c)


def project(points, pole=(0, 0, 1)):
    """Stereographic projection from ``pole`` of unit vectors ``(m, 3)`` to ``(m, 2)``."""
    q = np.atleast_2d(points) @ _rotation_to_north(pole).T
    return q[:, :2] / (1 - q[:, 2:3])


def choose_pole(G, pole=None):
    """``pole`` if it is off ``G``; with ``pole=None`` the first axis pole off ``G``."""
    cands = [pole] if pole is not None else AXIS_POLES
    for p in cands:
        p = normalize(np.asarray(p, dtype=float))
        if G.distance_to_support(p[None])[0] > EPS_GEOM:
            return p
    raise ProjectionPoleOnGraph(
        "projection pole lies on the graph" if pole is not None
        else "every axis pole lies on the graph")


def _hue(key, sat=0.55, val=0.85):
    h = int.from_bytes(hashlib.sha256(key.encode()).digest()[:4], "big") / 2 ** 32
    r, g, b = colorsys.hsv_to_rgb(h, sat, val)
    return f"#{round(r * 255):02x}{round(g * 255):02x}{round(b * 255):02x}"


class _Canvas:
    def __init__(self, xy, size, margin=0.05):
        lo, hi = xy.min(axis=0), xy.max(axis=0)
        span = max(float((hi - lo).max()), 1e-12)
        self.scale = size * (1 - 2 * margin) / span
        self.off = lo - (span - (hi - lo)) / 2
        self.size = size
        self.m = size * margin

    def pt(self, p):
        x = self.m + (p[0] - self.off[0]) * self.scale
        y = self.size - self.m - (p[1] - self.off[1]) * self.scale
        return f"{x:.3f} {y:.3f}"

    def path(self, xy, close=False):
        d = "M " + " L ".join(self.pt(p) for p in xy)
        return d + (" Z" if close else "")


def _header(size):
    return [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
            f'viewBox="0 0 {size} {size}">',
            f'<rect width="{size}" height="{size}" fill="white"/>']


def _graph_svg(G, pole, size, stroke, fill_faces):
    pole = choose_pole(G, pole)
    proj = {e: project(ed.points, pole) for e, ed in G.edges.items()}
    xy = np.concatenate(list(proj.values()))
    cv = _Canvas(xy, size)
    out = _header(size)
    if fill_faces:
        # the face holding the pole is unbounded: fill it as frame minus its boundary
        frame = f"M 0 0 L {size} 0 L {size} {size} L 0 {size} Z "
        outer = G.locate(pole, EPS_GEOM)[1]
        for face in G.faces:
            ring = np.concatenate([project(G.dart_points(d), pole)[:-1] for d in face.boundary_walk])
            d = cv.path(ring, close=True)
            if face.index == outer:
                d = frame + d
            out.append(f'<path d="{d}" fill="{_hue(str(face.index))}" fill-rule="evenodd" '
                       f'stroke="none"/>')
    for e in sorted(G.edges):
        ed = G.edges[e]
        closed = ed.v_from == ed.v_to
        pts = proj[e][:-1] if closed else proj[e]
        out.append(f'<path d="{cv.path(pts, close=closed)}" fill="none" stroke="black" '
                   f'stroke-width="{stroke:g}"/>')
    for v in sorted(G.vertices):
        p = project(G.vertex_xyz(v)[None], pole)[0]
        x, y = cv.pt(p).split()
        out.append(f'<circle cx="{x}" cy="{y}" r="{2 * stroke:g}" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _scan_svg(rep, size):
    W, H = rep.shape
    cell = size / max(W, H)
    out = _header(size)
    for (ix, iy), (status, desc) in sorted(rep.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        colour = _hue(desc) if status == "ok" else "#808080"
        x, y = ix * cell, size - (iy + 1) * cell
        out.append(f'<rect x="{x:.3f}" y="{y:.3f}" width="{cell:.3f}" height="{cell:.3f}" '
                   f'fill="{colour}"><title>{status} {desc}</title></rect>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(obj, pole=None, size=512, stroke=1.0, fill=None):
    """SVG text for an embedded graph, a Markov partition or a scan report.

    Parameters
    ----------
    obj : EmbeddedGraph, MarkovPartition or ScanReport
    pole : array_like, optional
        Projection pole.  When omitted the six axis poles are tried in turn.
    size : int
        Image width and height in pixels.
    stroke : float
        Edge width; vertex dots are twice as wide.
    fill : bool, optional
        Fill faces by piece; defaults to True for partitions only.

    Raises
    ------
    ProjectionPoleOnGraph
        The pole (or every axis pole) lies on the graph.
    """
    if isinstance(obj, ScanReport):
        return _scan_svg(obj, size)
    if isinstance(obj, MarkovPartition):
        G = obj.graph
        fill = True if fill is None else fill
    elif isinstance(obj, EmbeddedGraph):
        G = obj
        fill = bool(fill)
    else:
        raise TypeError(f"cannot render {type(obj).__name__}")
    return _graph_svg(G, pole, size, stroke, fill)
