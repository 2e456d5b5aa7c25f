"""Standard maps and graphs used by the demos, the CLI and the tests."""
from __future__ import annotations

import numpy as np

from .graph import SAMPLE_STEP, EmbeddedGraph
from .numerics import RationalMap, to_xyz


def power_map(d):
    """``z -> z^d``."""
    c = np.zeros(d + 1, dtype=complex)
    c[d] = 1
    return RationalMap(c)


def quadratic(c):
    """``z -> z^2 + c``."""
    return RationalMap([c, 0, 1])


def closed_curve_graph(curve, n_vertices=1, samples=256, max_step=SAMPLE_STEP):
    """Jordan curve ``curve(theta)``, theta in [0, 2pi), with equally spaced vertices.

    Edge ``k`` runs from vertex ``k`` to vertex ``k + 1`` in increasing theta.
    """
    per = max(2, samples // n_vertices)
    verts = {k: complex(curve(2 * np.pi * k / n_vertices)) for k in range(n_vertices)}
    edges = {}
    for k in range(n_vertices):
        th = 2 * np.pi * (k + np.linspace(0, 1, per + 1)) / n_vertices
        edges[k] = (k, (k + 1) % n_vertices, to_xyz(np.array([curve(t) for t in th])))
    return EmbeddedGraph.from_polylines(verts, edges, max_step=max_step)


def circle_graph(radius=1.0, n_vertices=1, center=0.0, samples=256, **kw):
    """Circle ``|z - center| = radius`` with vertices starting at ``center + radius``."""
    return closed_curve_graph(lambda t: center + radius * np.exp(1j * t),
                              n_vertices, samples, **kw)


def ellipse_graph(a=1.2, b=0.8, n_vertices=1, samples=64, **kw):
    """Axis-parallel ellipse through ``a`` and ``i b``."""
    return closed_curve_graph(lambda t: a * np.cos(t) + 1j * b * np.sin(t),
                              n_vertices, samples, **kw)


def theta_graph(radius=1.0):
    """Two vertices at ``+-radius`` joined by the upper, real and lower arcs."""
    verts = {0: radius, 1: -radius}
    t = np.linspace(0, np.pi, 129)
    edges = {
        0: (0, 1, radius * np.exp(1j * t)),
        1: (0, 1, np.linspace(radius, -radius, 129) + 0j),
        2: (0, 1, radius * np.exp(-1j * t)),
    }
    return EmbeddedGraph.from_polylines(verts, edges)


def doubling_system():
    from .regularity import IntervalSystem
    return IntervalSystem.piecewise_affine([(0.0, 0.5), (0.5, 1.0)],
                                           [(0.0, 1.0), (0.0, 1.0)])


def third_breakpoint_system():
    """Full-branch Markov map with breakpoint 1/3 (slopes 3 and 3/2)."""
    from .regularity import IntervalSystem
    return IntervalSystem.piecewise_affine([(0.0, 1 / 3), (1 / 3, 1.0)],
                                           [(0.0, 1.0), (0.0, 1.0)])
