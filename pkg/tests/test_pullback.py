import numpy as np
import pytest

from ratmarkov import (
    CriticalValueOnEdge, NeighbourhoodTooCoarse, ResourceLimit, RoutingFailure,
    extract_isotopic_subgraph, graph_preimage, isotopy_signature, iterated_preimage, lift_edge,
)
from ratmarkov.fixtures import circle_graph, power_map, quadratic
from ratmarkov.graph import graph_hausdorff
from ratmarkov.numerics import to_xyz, xyz_to_complex
from ratmarkov.pullback import lift_polyline


def test_circle_pulls_back_to_itself_with_doubled_vertices():
    f = power_map(2)
    G1 = graph_preimage(f, circle_graph())
    assert (len(G1.vertices), len(G1.edges)) == (2, 2)
    assert graph_hausdorff(G1, circle_graph()) < 1e-6
    verts = sorted(np.round(xyz_to_complex(np.array([G1.vertex_xyz(v) for v in G1.vertices])), 9),
                   key=lambda z: z.real)
    assert np.allclose(verts, [-1, 1])


def test_lifts_map_onto_the_edge():
    f = quadratic(-0.1)
    G = circle_graph(1.2)
    lifts = lift_edge(f, G, 0, 1e-2)
    assert len(lifts) == 2
    for L in lifts:
        img = f.eval_xyz(L.polyline)
        assert G.distance_to_support(img).max() < 1e-6


def test_lift_polyline_follows_branches():
    f = power_map(3)
    z = 2 * np.exp(1j * np.linspace(0, 1, 40))
    pieces = lift_polyline(f, to_xyz(z), 1e-2)
    assert len(pieces) == 3
    for P in pieces:
        w = xyz_to_complex(P)
        assert np.allclose(np.abs(w), 2 ** (1 / 3))
        # consecutive samples stay on one branch
        assert np.abs(np.diff(np.angle(w))).max() < 0.05


def test_preimage_provenance():
    f = power_map(2)
    G1 = graph_preimage(f, circle_graph(0.5, n_vertices=2))
    assert len(G1.edges) == 4
    assert sorted(G1.provenance.values()) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_edge_through_critical_value():
    with pytest.raises(CriticalValueOnEdge):
        graph_preimage(power_map(2), circle_graph(0.5, center=0.5))


def test_iterated_preimage_edge_cap():
    with pytest.raises(ResourceLimit):
        iterated_preimage(power_map(2), circle_graph(), 6, edge_cap=16)


def test_extract_keeps_combinatorics():
    f = power_map(2)
    G0 = circle_graph(1.05)
    gamma = iterated_preimage(f, G0, 1)
    G1 = extract_isotopic_subgraph(G0, gamma, 0.5)
    assert isotopy_signature(G1) == isotopy_signature(G0)
    assert sorted(G1.vertices) == sorted(G0.vertices)


def test_extract_rejects_far_pullback():
    f = power_map(2)
    G0 = circle_graph(1.5)
    with pytest.raises((NeighbourhoodTooCoarse, RoutingFailure)):
        extract_isotopic_subgraph(G0, iterated_preimage(f, G0, 1), 0.05)
