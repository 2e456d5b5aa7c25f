"""Text formats for maps, graphs, interval systems and parameter families.

All numbers are written with ``repr`` so a write/read cycle reproduces the
same doubles, and parsed with ``float`` (correctly rounded, locale free).
Blank lines and lines starting with ``#`` are ignored on input.
"""
from __future__ import annotations

import os

import numpy as np

from .errors import EmbeddingInconsistent, ParseError
from .graph import EPS_GEOM, Edge, EmbeddedGraph
from .invariant import IterationConfig
from .numerics import Chart, RationalMap, SpherePoint, sph_dist_xyz
from .param_space import FamilySpec, ScanReport
from .regularity import IntervalSystem


def _lines(text):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line.split()


def _num(tok, n):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"line {n}: not a number: {tok!r}") from None


def _int(tok, n):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"line {n}: not an integer: {tok!r}") from None


def read_text(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


# ---------------------------------------------------------------------------
# maps

def map_to_text(f):
    lines = [f"degree {f.degree}"]
    for tag, cs in (("num", f.numerator), ("den", f.denominator)):
        for k, c in enumerate(cs):
            lines.append(f"{tag} {k} {float(c.real)!r} {float(c.imag)!r}")
    return "\n".join(lines) + "\n"


def map_from_text(text):
    """Parse ``degree d`` / ``num k re im`` / ``den k re im`` lines.

    A missing denominator means ``1``.
    """
    degree, num, den = None, {}, {}
    for n, tok in _lines(text):
        if tok[0] == "degree" and len(tok) == 2:
            degree = _int(tok[1], n)
        elif tok[0] in ("num", "den") and len(tok) == 4:
            k = _int(tok[1], n)
            if k < 0:
                raise ParseError(f"line {n}: negative coefficient index")
            target = num if tok[0] == "num" else den
            if k in target:
                raise ParseError(f"line {n}: coefficient {tok[0]} {k} given twice")
            target[k] = complex(_num(tok[2], n), _num(tok[3], n))
        else:
            raise ParseError(f"line {n}: unrecognised map line")
    if degree is None:
        raise ParseError("missing 'degree' header")
    if not num:
        raise ParseError("no numerator coefficients")
    den = den or {0: 1}
    p = np.zeros(max(num) + 1, dtype=complex)
    q = np.zeros(max(den) + 1, dtype=complex)
    for k, c in num.items():
        p[k] = c
    for k, c in den.items():
        q[k] = c
    f = RationalMap(p, q)
    if f.degree != degree:
        raise ParseError(f"header says degree {degree}, coefficients give {f.degree}")
    return f


def read_map(path):
    return map_from_text(read_text(path))


# ---------------------------------------------------------------------------
# graphs

def _point_text(p):
    if not isinstance(p, SpherePoint):
        p = SpherePoint.from_xyz(p)
    return f"{p.chart.value} {float(p.coords.real)!r} {float(p.coords.imag)!r}"


def _point_parse(tok, n):
    try:
        chart = Chart(tok[0])
    except ValueError:
        raise ParseError(f"line {n}: chart must be 'std' or 'inv'") from None
    return SpherePoint(chart, complex(_num(tok[1], n), _num(tok[2], n)))


def graph_to_text(G):
    """``vertex``, ``edge`` (+ polyline) and ``rot`` lines; ends are ``edge:0|1``."""
    lines = []
    for v in sorted(G.vertices):
        lines.append(f"vertex {v} {_point_text(G.vertices[v])}")
    for e in sorted(G.edges):
        ed = G.edges[e]
        lines.append(f"edge {e} {ed.v_from} {ed.v_to} {len(ed.points)}")
        lines += [_point_text(x) for x in (ed.source or ed.points)]
    for v in sorted(G.rotation):
        ends = " ".join(f"{e}:{s}" for e, s in G.rotation[v])
        lines.append(f"rot {v} {ends}")
    return "\n".join(lines) + "\n"


def graph_from_text(text):
    """Parse the graph format.

    A rotation entry may omit the ``:end`` suffix when the edge is not a loop.
    """
    rows = list(_lines(text))
    vertices, edges, rotation = {}, {}, {}
    i = 0
    while i < len(rows):
        n, tok = rows[i]
        if tok[0] == "vertex" and len(tok) == 5:
            v = _int(tok[1], n)
            if v in vertices:
                raise ParseError(f"line {n}: vertex {v} given twice")
            vertices[v] = _point_parse(tok[2:], n)
            i += 1
        elif tok[0] == "edge" and len(tok) == 5:
            e, a, b, m = (_int(t, n) for t in tok[1:])
            if e in edges:
                raise ParseError(f"line {n}: edge {e} given twice")
            if m < 2:
                raise ParseError(f"line {n}: edge {e} needs at least 2 points")
            pts = []
            for k in range(1, m + 1):
                if i + k >= len(rows) or len(rows[i + k][1]) != 3:
                    raise ParseError(f"line {n}: edge {e} polyline is short")
                pts.append(_point_parse(rows[i + k][1], rows[i + k][0]))
            edges[e] = (a, b, pts)
            i += m + 1
        elif tok[0] == "rot" and len(tok) >= 2:
            v = _int(tok[1], n)
            rotation[v] = (n, tok[2:])
            i += 1
        else:
            raise ParseError(f"line {n}: unrecognised graph line")
    for e, (a, b, _) in edges.items():
        if a not in vertices or b not in vertices:
            raise ParseError(f"edge {e} refers to a missing vertex")
    rot = None
    if rotation:
        rot = {}
        for v, (n, toks) in rotation.items():
            rot[v] = [_end_parse(t, v, edges, n) for t in toks]
    built = {}
    for e, (a, b, pts) in edges.items():
        xyz = np.array([p.xyz for p in pts])
        if max(sph_dist_xyz(xyz[0], vertices[a].xyz), sph_dist_xyz(xyz[-1], vertices[b].xyz)) > EPS_GEOM:
            raise EmbeddingInconsistent(f"edge {e} does not end at its vertices")
        xyz[0], xyz[-1] = vertices[a].xyz, vertices[b].xyz
        built[e] = Edge(a, b, xyz, tuple(pts))
    return EmbeddedGraph(vertices, built, rotation=rot)


def _end_parse(tok, v, edges, n):
    if ":" in tok:
        e, s = tok.split(":", 1)
        e, s = _int(e, n), _int(s, n)
        if s not in (0, 1):
            raise ParseError(f"line {n}: edge end must be 0 or 1")
        return e, s
    e = _int(tok, n)
    if e not in edges:
        raise ParseError(f"line {n}: unknown edge {e}")
    a, b, _ = edges[e]
    if a == b:
        raise ParseError(f"line {n}: loop {e} needs an explicit end")
    if v not in (a, b):
        raise ParseError(f"line {n}: edge {e} does not meet vertex {v}")
    return e, 0 if a == v else 1


def read_graph(path):
    return graph_from_text(read_text(path))


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# interval systems

def system_from_text(text):
    """Parse ``interval i a b`` and ``branch i ...`` lines.

    A branch is either ``branch i affine c d`` (affine onto ``[c, d]``,
    decreasing when ``c > d``) or ``branch i table x0 y0 x1 y1 ...``.
    """
    intervals, branches = {}, {}
    for n, tok in _lines(text):
        if tok[0] == "interval" and len(tok) == 4:
            intervals[_int(tok[1], n)] = (_num(tok[2], n), _num(tok[3], n))
        elif tok[0] == "branch" and len(tok) >= 4:
            branches[_int(tok[1], n)] = (n, tok[2], [_num(t, n) for t in tok[3:]])
        else:
            raise ParseError(f"line {n}: unrecognised interval-system line")
    k = len(intervals)
    if k == 0 or sorted(intervals) != list(range(k)) or sorted(branches) != list(range(k)):
        raise ParseError("intervals and branches must be numbered 0..k-1, one branch each")
    tables = []
    for i in range(k):
        n, kind, vals = branches[i]
        a, b = intervals[i]
        if kind == "affine" and len(vals) == 2:
            tables.append(((a, b), tuple(vals)))
        elif kind == "table" and len(vals) >= 4 and len(vals) % 2 == 0:
            tables.append((vals[0::2], vals[1::2]))
        else:
            raise ParseError(f"line {n}: branch must be 'affine c d' or 'table x y ...'")
    return IntervalSystem([intervals[i] for i in range(k)], tables)


def read_system(path):
    return system_from_text(read_text(path))


# ---------------------------------------------------------------------------
# parameter families

_CFG_KEYS = {"N": int, "max_iters": int, "eps_inv": float, "delta1": float,
             "lambda_max": float, "sample_step": float}


def family_from_text(text, base_dir="."):
    """Family ``f_c`` with coefficients affine in ``c``.

    Lines: ``num k a_re a_im b_re b_im`` (coefficient ``a + b c``), the same
    for ``den``, ``freecv a_re a_im b_re b_im``, ``base re im``,
    ``graph path`` (relative to the family file), optional
    ``rect x0 y0 x1 y1``, ``name word`` and iteration overrides such as
    ``eps_inv 5e-3``.
    """
    num, den, cv = {}, {}, None
    base, gpath, rect, name, cfg = 0j, None, (-0.2, -0.2, 0.2, 0.2), "family", {}
    for n, tok in _lines(text):
        key = tok[0]
        if key in ("num", "den") and len(tok) == 6:
            vals = [_num(t, n) for t in tok[2:]]
            (num if key == "num" else den)[_int(tok[1], n)] = (
                complex(vals[0], vals[1]), complex(vals[2], vals[3]))
        elif key == "freecv" and len(tok) == 5:
            vals = [_num(t, n) for t in tok[1:]]
            cv = (complex(vals[0], vals[1]), complex(vals[2], vals[3]))
        elif key == "base" and len(tok) == 3:
            base = complex(_num(tok[1], n), _num(tok[2], n))
        elif key == "graph" and len(tok) == 2:
            gpath = os.path.join(base_dir, tok[1])
        elif key == "rect" and len(tok) == 5:
            rect = tuple(_num(t, n) for t in tok[1:])
        elif key == "name" and len(tok) == 2:
            name = tok[1]
        elif key in _CFG_KEYS and len(tok) == 2:
            cfg[key] = _int(tok[1], n) if _CFG_KEYS[key] is int else _num(tok[1], n)
        else:
            raise ParseError(f"line {n}: unrecognised family line")
    if not num or cv is None or gpath is None:
        raise ParseError("family needs num, freecv and graph lines")
    den = den or {0: (1 + 0j, 0j)}

    def coeffs(table, c):
        out = np.zeros(max(table) + 1, dtype=complex)
        for k, (a, b) in table.items():
            out[k] = a + b * c
        return out

    def map_at(c):
        return RationalMap(coeffs(num, c), coeffs(den, c))

    def free_cv(c):
        return cv[0] + cv[1] * c

    return FamilySpec(rect, map_at, free_cv, base, read_graph(gpath), IterationConfig(**cfg), name)


def read_family(source):
    """``z2+c`` names the built-in quadratic family; anything else is a family file."""
    if source == "z2+c":
        from .param_space import quadratic_family
        return quadratic_family()
    return family_from_text(read_text(source), os.path.dirname(os.path.abspath(source)))


# ---------------------------------------------------------------------------
# scan reports

def scan_from_text(text):
    """Inverse of :meth:`ScanReport.to_text`."""
    rows = list(_lines(text.replace("# grid", "grid", 1)))
    if not rows or rows[0][1][0] != "grid" or len(rows[0][1]) != 9:
        raise ParseError("scan report needs a '# grid WxH rect x0 y0 x1 y1 depth n' header")
    n, head = rows[0]
    try:
        W, H = (int(t) for t in head[1].split("x"))
    except ValueError:
        raise ParseError(f"line {n}: bad grid shape {head[1]!r}") from None
    rect = tuple(_num(t, n) for t in head[3:7])
    rep = ScanReport(rect, (W, H), _int(head[8], n), {})
    body = rows[1:]
    if len(body) != W * H:
        raise ParseError(f"scan report has {len(body)} rows, expected {W * H}")
    for k, (n, tok) in enumerate(body):
        if len(tok) != 4:
            raise ParseError(f"line {n}: expected 're im status descriptor'")
        rep.entries[(k % W, k // W)] = (tok[2], tok[3])
    return rep


__all__ = [
    "map_to_text", "map_from_text", "read_map", "graph_to_text", "graph_from_text",
    "read_graph", "write_text", "system_from_text", "read_system", "family_from_text",
    "read_family", "scan_from_text", "read_text",
]
