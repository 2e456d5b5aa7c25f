import numpy as np
import pytest

from ratmarkov import EmbeddedGraph, EmbeddingInconsistent, graph_hausdorff, isotopy_signature
from ratmarkov.fixtures import circle_graph, ellipse_graph, theta_graph
from ratmarkov.graph import SegmentIndex, _dense_nearest, arc_distances, directed_distance
from ratmarkov.numerics import to_xyz


def test_circle_faces_and_euler():
    G = circle_graph(n_vertices=3)
    assert len(G.vertices) == 3 and len(G.edges) == 3
    assert len(G.faces) == 2
    assert G.is_connected()


def test_theta_graph_has_three_faces():
    G = theta_graph()
    assert len(G.faces) == 3
    assert sorted(len(f.boundary_walk) for f in G.faces) == [2, 2, 2]


def test_faces_lie_left_of_their_darts():
    G = circle_graph()
    # forward dart of the ccw circle bounds the inner disc
    inner = G.dart_face[(0, 1)]
    assert G.locate(to_xyz(0.1 + 0.2j))[:2] == ("face", inner)
    assert G.locate(to_xyz(10.0))[:2] == ("face", G.dart_face[(0, -1)])


def test_locate_vertex_edge_face():
    G = circle_graph(n_vertices=2)
    assert G.locate(to_xyz(1.0))[0] == "vertex"
    loc = G.locate(to_xyz(1j))
    assert loc[0] == "edge" and 0 < loc[2] < 1
    assert G.locate(to_xyz(0.0))[0] == "face"


def test_sample_points_are_interior():
    for G in (circle_graph(), theta_graph(), ellipse_graph(n_vertices=2)):
        for f in G.faces:
            assert G.locate(f.sample_xyz) == ("face", f.index)


def test_dangling_vertex_is_rejected():
    verts = {0: 0.0, 1: 1.0}
    with pytest.raises(EmbeddingInconsistent):
        EmbeddedGraph.from_polylines(verts, {0: (0, 1, np.array([0.0, 0.5, 1.0]))})


def test_bad_rotation_is_rejected():
    G = circle_graph()
    with pytest.raises(EmbeddingInconsistent):
        EmbeddedGraph(G.vertices, G.edges, {0: [(0, 0), (0, 0)]})


def test_signature_ignores_labels_but_sees_structure():
    a = circle_graph(0.5)
    b = circle_graph(2.0)
    assert isotopy_signature(a) == isotopy_signature(b)
    assert isotopy_signature(a) != isotopy_signature(theta_graph())


def test_hausdorff_between_concentric_circles():
    a, b = circle_graph(1.0), circle_graph(1.5)
    # latitude of |z| = r is 2 atan(r) - pi/2
    exact = 2 * np.arctan(1.5) - np.pi / 2
    assert graph_hausdorff(a, b) == pytest.approx(exact, abs=1e-4)
    assert directed_distance(a, b) == pytest.approx(exact, abs=1e-4)


def test_segment_index_matches_dense_search():
    G = ellipse_graph(n_vertices=3)
    rng = np.random.default_rng(3)
    q = rng.normal(size=(300, 3))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    si = G.segment_index
    d1, i1 = si.nearest(q)
    d2, i2 = _dense_nearest(q, si.a, si.b, 4096)
    assert np.abs(d1 - d2).max() < 1e-14
    assert np.array_equal(i1, i2)
    # index built directly on the arcs agrees as well
    d3, _ = SegmentIndex(si.a, si.b, k=4).nearest(q)
    assert np.abs(d3 - d2).max() < 1e-14


def test_arc_distance_brute_force():
    a, b = to_xyz(np.array([1.0])), to_xyz(np.array([1j]))
    q = to_xyz(np.array([0.3 + 0.3j, -1.0]))
    d, _ = arc_distances(q, a, b)
    t = np.linspace(0, 1, 20001)
    arc = np.sin((1 - t)[:, None] * np.pi / 2) * a + np.sin(t[:, None] * np.pi / 2) * b
    brute = np.arccos(np.clip(q @ arc.T, -1, 1)).min(axis=1)
    assert np.allclose(d[:, 0], brute, atol=1e-6)
