import numpy as np
import pytest

from ratmarkov import ProjectionPoleOnGraph, build_partition, render_svg, scan_grid
from ratmarkov import io
from ratmarkov.fixtures import circle_graph, power_map, theta_graph
from ratmarkov.render import choose_pole, project


def test_projection_sends_pole_antipode_to_origin():
    for pole in ([0, 0, 1], [1, 0, 0], [0.6, 0, -0.8]):
        p = np.array(pole, dtype=float)
        assert np.allclose(project(-p, p), 0)


def test_circle_is_one_closed_path():
    svg = render_svg(circle_graph())
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    paths = [ln for ln in svg.splitlines() if ln.startswith("<path")]
    assert len(paths) == 1 and ' Z"' in paths[0]
    assert svg.count("<circle") == 1


def test_partition_fills_each_face():
    p = build_partition(power_map(2), circle_graph(n_vertices=2))
    svg = render_svg(p)
    assert svg.count('fill-rule="evenodd"') == len(p.graph.faces) == 2
    assert svg.count("<circle") == 2


def test_render_is_deterministic():
    G = theta_graph()
    assert render_svg(G, fill=True) == render_svg(G, fill=True)


def test_pole_on_graph():
    with pytest.raises(ProjectionPoleOnGraph):
        render_svg(circle_graph(), pole=(1, 0, 0))
    # the north pole is off the unit circle, so it is picked first
    assert np.allclose(choose_pole(circle_graph()), [0, 0, 1])


def test_scan_cells():
    rep = scan_grid(io.read_family("z2+c"), (2, 3), 1, rect=(-0.05, -0.05, 0.05, 0.05))
    svg = render_svg(rep, size=60)
    assert svg.count("<rect") == 1 + 6
    assert svg.count("<title>ok ") == 6


def test_render_rejects_other_objects():
    with pytest.raises(TypeError):
        render_svg(42)
