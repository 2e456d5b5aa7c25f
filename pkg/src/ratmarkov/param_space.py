"""Parameter space: continuation of invariant graphs and cell addresses of a free critical value."""
from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CriticalValueOnEdge, DepthUnreachable, EmbeddingInconsistent,
    LeftExistenceSet, NonConvergence, RatMarkovError,
)
from .graph import EPS_GEOM
from .invariant import IterationConfig, continue_graph
from .numerics import as_point
from .pullback import graph_preimage

STEP_FLOOR = 2.0 ** -16
FACE_TOL = 1e-6


@dataclass(frozen=True)
class FamilySpec:
    """One-parameter family of rational maps with a designated free critical value.

    Attributes
    ----------
    rect : tuple
        ``(x0, y0, x1, y1)`` parameter rectangle.
    map_at : callable
        Parameter -> :class:`RationalMap`.
    free_cv : callable
        Parameter -> free critical value (complex or SpherePoint).
    base_param : complex
    base_graph : EmbeddedGraph
        Invariant graph at ``base_param``.
    cfg : IterationConfig
    """

    rect: tuple
    map_at: object
    free_cv: object
    base_param: complex
    base_graph: object
    cfg: IterationConfig = field(default_factory=IterationConfig)
    name: str = "family"


@dataclass(frozen=True)
class CellDescriptor:
    """Nested address ``(Q_0, ..., Q_{n-1})``; entries are ``(kind, label)``."""

    depth: int
    entries: tuple

    def __str__(self):
        return "|".join(f"{k}:{lab}" for k, lab in self.entries)


@dataclass(frozen=True)
class NotFound:
    r_max: int
    reason: str


# ---------------------------------------------------------------------------
# continuation

def continue_along(fam, c, start_param=None, start_graph=None):
    """Invariant graph at ``c`` by continuation along the segment from ``start_param``.

    The parameter step is halved on failure down to ``2^-16`` of the segment.
    """
    p0 = complex(fam.base_param if start_param is None else start_param)
    G = fam.base_graph if start_graph is None else start_graph
    c = complex(c)
    if c == p0:
        return G
    s, h = 0.0, 1.0
    while s < 1.0:
        h = min(h, 1.0 - s)
        a, b = p0 + s * (c - p0), p0 + (s + h) * (c - p0)
        try:
            G, _ = continue_graph(fam.map_at(a), fam.map_at(b), G, fam.cfg)
        except (NonConvergence, CriticalValueOnEdge, EmbeddingInconsistent) as exc:
            h /= 2
            if h < STEP_FLOOR:
                raise LeftExistenceSet(
                    f"continuation stalls at parameter {a.real!r} {a.imag!r}: {exc}") from exc
            continue
        s += h
        h *= 2
    return G


def face_label(G, face):
    """Label of a face independent of the walk start: its smallest dart."""
    e, d = min(face.boundary_walk)
    return f"{e}{'+' if d > 0 else '-'}"


def _g_label(G, x):
    loc = G.locate(x, EPS_GEOM)
    if loc[0] == "face":
        return face_label(G, G.faces[loc[1]])
    return f"{loc[0][0]}{loc[1]}"


def cell_address(fam, c, n, graph=None):
    """Descriptor of the free critical value ``v2`` at parameter ``c`` to depth ``n``.

    Level ``i`` classifies ``v2`` against ``G_i = f^{-i}(G)``.  A face of
    ``G_i`` is labelled by the ``G``-faces visited by ``f^j`` of its sample
    point, ``j = 0..i``; an edge or vertex of ``G_i`` by the same itinerary
    of ``v2`` itself.  Nesting is checked: the sample of ``Q_{i+1}`` must lie
    in ``Q_i``.
    """
    G = continue_along(fam, c) if graph is None else graph
    f = fam.map_at(complex(c))
    v2 = as_point(fam.free_cv(complex(c))).xyz
    entries = []
    Gi = G
    prev = None
    for i in range(n):
        if i > 0:
            try:
                Gi = graph_preimage(f, Gi)
            except RatMarkovError as exc:
                raise DepthUnreachable(f"pullback to level {i} failed: {exc}") from exc
        loc = Gi.locate(v2, EPS_GEOM)
        if loc[0] == "face":
            face = Gi.faces[loc[1]]
            x = face.sample_xyz
            kind = "face"
        else:
            x, kind = v2, loc[0]
        labels = []
        y = x
        for _ in range(i + 1):
            labels.append(_g_label(G, y))
            y = f.eval_xyz(y[None])[0]
        if prev is not None and kind == "face":
            pG, pface = prev
            ploc = pG.locate(x, EPS_GEOM)
            if ploc != ("face", pface):
                raise DepthUnreachable(f"nesting fails between levels {i - 1} and {i}")
        prev = (Gi, loc[1]) if kind == "face" else None
        entries.append((kind, ".".join(labels)))
    return CellDescriptor(n, tuple(entries))


# ---------------------------------------------------------------------------
# combinatorial distance

def combinatorial_distance(f, G, r_max, tol=1e-6):
    """Smallest ``r <= r_max`` at which ``G`` is combinatorially bounded.

    ``U`` is the union of closed faces of ``f^{-r}(G)`` meeting ``G``.  ``r``
    qualifies when (a) no critical value lies in ``U`` and (b) the faces of
    ``f^{-r-1}(G)`` forming the component of ``f^{-1}(U)`` that contains
    ``G`` all lie in ``U``.

    Returns
    -------
    int or NotFound
    """
    cvs = f.critical_values_xyz()
    Gr = G
    reason = "r_max = 0"
    for r in range(1, r_max + 1):
        Gr = graph_preimage(f, Gr)
        if not Gr.is_connected():
            reason = f"f^-{r}(G) is disconnected"
            continue
        U = _faces_meeting(Gr, G, tol)
        hit = [k for k, v in enumerate(cvs) if _in_closure(Gr, v, U)]
        if hit:
            reason = (f"critical values lie in faces adjacent to G at every depth "
                      f"up to {r_max} (faces never separate them from G)")
            continue
        if _preimage_component_inside(f, Gr, G, U, tol):
            return r
        reason = f"component of f^-1(U) containing G leaves U up to depth {r_max}"
    return NotFound(r_max, reason)


def _faces_meeting(Gr, G, tol):
    on_g = {e for e, ed in Gr.edges.items()
            if G.distance_to_support(ed.points).max() <= tol}
    vg = {v for v in Gr.vertices if G.distance_to_support(Gr.vertex_xyz(v)[None])[0] <= tol}
    U = set()
    for face in Gr.faces:
        if any(d[0] in on_g for d in face.boundary_walk) or \
                any(Gr.dart_tail(d) in vg for d in face.boundary_walk):
            U.add(face.index)
    return U


def _in_closure(Gr, x, U):
    loc = Gr.locate(x, EPS_GEOM)
    if loc[0] == "face":
        return loc[1] in U
    if loc[0] == "edge":
        return Gr.dart_face[(loc[1], 1)] in U or Gr.dart_face[(loc[1], -1)] in U
    ends = Gr.rotation[loc[1]]
    return any(Gr.dart_face[(e, 1 if s == 0 else -1)] in U for e, s in ends)


def _preimage_component_inside(f, Gr, G, U, tol):
    G1 = graph_preimage(f, Gr)
    if not G1.is_connected():
        return False
    inner = {}
    for face in G1.faces:
        img = Gr.locate(f.eval_xyz(face.sample_xyz[None])[0], EPS_GEOM)
        if img[0] == "face" and img[1] in U:
            inner[face.index] = face
    # faces of f^{-1}(U) glued along edges whose image is interior to U
    adj = {k: set() for k in inner}
    for e in G1.edges:
        a, b = G1.dart_face[(e, 1)], G1.dart_face[(e, -1)]
        if a in inner and b in inner and a != b:
            adj[a].add(b)
            adj[b].add(a)
    on_g = {e for e, ed in G1.edges.items() if G.distance_to_support(ed.points).max() <= tol}
    seeds = {G1.dart_face[(e, s)] for e in on_g for s in (1, -1)} & set(inner)
    seen, stack = set(seeds), list(seeds)
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    for k in seen:
        loc = Gr.locate(inner[k].sample_xyz, EPS_GEOM)
        if loc[0] != "face" or loc[1] not in U:
            return False
    return True


# ---------------------------------------------------------------------------
# grid scans

@dataclass
class ScanReport:
    rect: tuple
    shape: tuple
    depth: int
    entries: dict

    def param(self, ix, iy):
        x0, y0, x1, y1 = self.rect
        W, H = self.shape
        re = x0 + (x1 - x0) * ix / (W - 1) if W > 1 else x0
        im = y0 + (y1 - y0) * iy / (H - 1) if H > 1 else y0
        return complex(re, im)

    def to_text(self):
        W, H = self.shape
        lines = [f"# grid {W}x{H} rect {' '.join(repr(float(v)) for v in self.rect)} "
                 f"depth {self.depth}"]
        for iy in range(H):
            for ix in range(W):
                c = self.param(ix, iy)
                status, desc = self.entries[(ix, iy)]
                lines.append(f"{c.real!r} {c.imag!r} {status} {desc}")
        return "\n".join(lines) + "\n"


def _bfs_layers(W, H, start):
    layer = {start: 0}
    parent = {start: None}
    order = deque([start])
    while order:
        ix, iy = order.popleft()
        for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (ix + dx, iy + dy)
            if 0 <= nb[0] < W and 0 <= nb[1] < H and nb not in layer:
                layer[nb] = layer[(ix, iy)] + 1
                parent[nb] = (ix, iy)
                order.append(nb)
    layers = {}
    for node, k in layer.items():
        layers.setdefault(k, []).append(node)
    return [sorted(layers[k]) for k in sorted(layers)], parent


def scan_grid(fam, shape, depth, rect=None, workers=1):
    """Cell descriptors on a ``W x H`` grid of parameters.

    Nodes are visited in breadth-first layers from the node nearest the
    base parameter; each node continues from its breadth-first parent, or
    from the base when the parent failed.  Layers run in parallel, so the
    report does not depend on ``workers``.
    """
    W, H = shape
    rect = tuple(fam.rect if rect is None else rect)
    rep = ScanReport(rect, (W, H), depth, {})
    nodes = [(ix, iy) for iy in range(H) for ix in range(W)]
    base = min(nodes, key=lambda n: (abs(rep.param(*n) - fam.base_param), n[1], n[0]))
    layers, parent = _bfs_layers(W, H, base)
    graphs = {}

    def run(node):
        c = rep.param(*node)
        par = parent[node]
        if par is not None and par in graphs:
            start, G0 = rep.param(*par), graphs[par]
        else:
            start, G0 = fam.base_param, fam.base_graph
        try:
            G = continue_along(fam, c, start, G0)
            desc = cell_address(fam, c, depth, graph=G)
        except LeftExistenceSet as exc:
            return node, None, ("left", _oneword(exc))
        except RatMarkovError as exc:
            return node, None, (type(exc).__name__, _oneword(exc))
        return node, G, ("ok", str(desc))

    ex = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for layer in layers:
            for node, G, entry in (ex.map(run, layer) if ex else map(run, layer)):
                rep.entries[node] = entry
                if G is not None:
                    graphs[node] = G
    finally:
        if ex:
            ex.shutdown()
    return rep


def _oneword(exc):
    return type(exc).__name__


def connectivity_report(scan):
    """4-neighbour component counts of each descriptor's nodes and of their complement.

    Only successful nodes take part.  Returns ``{descriptor: (components,
    complement_components)}``; grid-scale evidence only.
    """
    ok = {n: d for n, (s, d) in scan.entries.items() if s == "ok"}
    out = {}
    for desc in sorted(set(ok.values())):
        mine = {n for n, d in ok.items() if d == desc}
        rest = set(ok) - mine
        out[desc] = (_count_components(mine), _count_components(rest))
    return out


def _count_components(nodes):
    seen, count = set(), 0
    for n in sorted(nodes):
        if n in seen:
            continue
        count += 1
        seen.add(n)
        stack = [n]
        while stack:
            ix, iy = stack.pop()
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nb = (ix + dx, iy + dy)
                if nb in nodes and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
    return count


def connectivity_text(report):
    lines = ["# grid-scale evidence only: 4-neighbour components per descriptor"]
    for desc, (k, kc) in report.items():
        lines.append(f"{desc} components {k} complement {kc}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the flagship family

def quadratic_family(rect=(-0.2, -0.2, 0.2, 0.2), cfg=None):
    """``z^2 + c`` around ``c = 0`` with the unit circle as base graph; ``v2 = c``."""
    from .fixtures import circle_graph, quadratic

    cfg = cfg or IterationConfig(eps_inv=5e-3, max_iters=30)
    return FamilySpec(tuple(rect), quadratic, lambda c: complex(c), 0j,
                      circle_graph(), cfg, "z2+c")
