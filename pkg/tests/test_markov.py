import numpy as np
import pytest

from ratmarkov import (
    Inadmissible, MarkovViolation, NotInvariant, Reducible, address_to_point, build_partition,
    edge_transition_matrix, itinerary, perron, trace_edge,
)
from ratmarkov.fixtures import circle_graph, power_map
from ratmarkov.numerics import identity_map, sph_dist


@pytest.fixture(scope="module")
def z2():
    return build_partition(power_map(2), circle_graph(n_vertices=2))


def test_matrices_for_power_maps(z2):
    assert np.array_equal(z2.face_matrix, np.eye(2, dtype=int))
    assert np.array_equal(z2.edge_matrix, np.ones((2, 2), dtype=int))
    p3 = build_partition(power_map(3), circle_graph())
    assert p3.edge_matrix.tolist() == [[3]]


def test_trace_edge_darts():
    f, G = power_map(2), circle_graph(n_vertices=2)
    assert trace_edge(f, G, 0) == [(0, 1), (1, 1)]
    assert trace_edge(f, G, 1) == [(0, 1), (1, 1)]


def test_identity_map_gives_identity_edge_matrix():
    G = circle_graph(n_vertices=3)
    assert np.array_equal(edge_transition_matrix(identity_map(), G), np.eye(3, dtype=int))


def test_perron_examples():
    pd = perron([[0, 1], [1, 1]])
    assert pd.eigenvalue == pytest.approx((1 + 5 ** 0.5) / 2, abs=1e-12)
    assert (pd.vector > 0).all() and pd.vector.sum() == pytest.approx(1)
    assert perron([[3]]).entropy == pytest.approx(np.log(3))
    with pytest.raises(Reducible) as exc:
        perron([[1, 1], [0, 1]])
    assert sorted(exc.value.components) == [(0,), (1,)]


def test_non_invariant_graph():
    f, G = power_map(2), circle_graph(1.1)
    with pytest.raises(NotInvariant):
        build_partition(f, G)
    with pytest.raises(MarkovViolation) as exc:
        build_partition(f, G, check_invariance=False)
    assert (exc.value.piece, exc.value.target) == (0, 1)


def test_itineraries(z2):
    inner = z2.graph.locate(np.array([0.0, 0.0, -1.0]))[1]
    assert itinerary(z2, 0.3, 5).symbols == (inner,) * 5
    assert set(itinerary(z2, 2.0, 4).kinds) == {"face"}
    assert itinerary(z2, 1.0, 3).kinds == ("vertex",) * 3
    # e^{2 pi i / 3} has period two under doubling: upper, lower, upper, ...
    w = itinerary(z2, np.exp(2j * np.pi / 3), 6, level="edge")
    assert len(set(w.symbols[0::2])) == 1 and len(set(w.symbols[1::2])) == 1
    assert w.symbols[0] != w.symbols[1]


def test_address_to_point(z2):
    w = itinerary(z2, np.exp(2j * np.pi / 3), 10, level="edge").symbols
    pt, diam, diams = address_to_point(z2, w)
    assert sph_dist(pt, np.exp(2j * np.pi / 3)) <= np.pi * 2.0 ** -10
    assert all(a > b for a, b in zip(diams, diams[1:]))
    with pytest.raises(Inadmissible) as exc:
        address_to_point(z2, [0, 7])
    assert exc.value.index == 1
