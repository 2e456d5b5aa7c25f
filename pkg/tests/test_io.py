import numpy as np
import pytest

from ratmarkov import EmbeddingInconsistent, ParseError, scan_grid
from ratmarkov import io
from ratmarkov.fixtures import (
    circle_graph, doubling_system, ellipse_graph, power_map, theta_graph,
    third_breakpoint_system,
)


@pytest.mark.parametrize("G", [circle_graph(), theta_graph(), ellipse_graph(1.2, 0.8, samples=32)],
                         ids=["circle", "theta", "ellipse"])
def test_graph_round_trip_is_exact(G):
    text = io.graph_to_text(G)
    H = io.graph_from_text(text)
    assert io.graph_to_text(H) == text
    assert H.rotation == G.rotation
    assert len(H.faces) == len(G.faces)


def test_map_round_trip():
    f = power_map(3)
    g = io.map_from_text(io.map_to_text(f))
    z = np.array([0.3 + 0.1j, -2 + 1j])
    assert np.allclose(g(z), z ** 3)
    assert g.degree == 3


def test_map_den_defaults_to_one():
    g = io.map_from_text("degree 2\nnum 2 1 0\nnum 0 -0.5 0\n")
    assert np.isclose(g(1j), -1.5)


@pytest.mark.parametrize("text, msg", [
    ("num 2 1 0\n", "degree"),
    ("degree 3\nnum 2 1 0\n", "degree 3"),
    ("degree 2\nnum 2 1 0\nnum 2 1 0\n", "twice"),
    ("degree 2\nnum 2 x 0\n", "line 2"),
    ("degree 2\nbogus\n", "line 2"),
])
def test_map_parse_errors(text, msg):
    with pytest.raises(ParseError, match=msg):
        io.map_from_text(text)


def test_graph_parse_errors():
    good = io.graph_to_text(circle_graph())
    with pytest.raises(ParseError, match="unrecognised"):
        io.graph_from_text(good + "face 0\n")
    with pytest.raises(ParseError, match="chart"):
        io.graph_from_text(good.replace("std", "xyz", 1))
    with pytest.raises(ParseError, match="missing vertex"):
        io.graph_from_text(good.replace("edge 0 0 0", "edge 0 0 7", 1))


def test_graph_endpoint_off_vertex():
    text = io.graph_to_text(circle_graph())
    with pytest.raises(EmbeddingInconsistent):
        io.graph_from_text(text.replace("vertex 0 std 1.0 0.0", "vertex 0 std 0.9 0.0"))


def test_system_round_trip():
    for h in (doubling_system(), third_breakpoint_system()):
        text = h.to_text()
        assert io.system_from_text(text).to_text() == text


def test_system_affine_branch():
    h = io.system_from_text("interval 0 0 0.5\ninterval 1 0.5 1\n"
                            "branch 0 affine 0 1\nbranch 1 affine 0 1\n")
    assert h.to_text() == doubling_system().to_text()


def test_system_parse_errors():
    with pytest.raises(ParseError):
        io.system_from_text("interval 0 0 1\n")
    with pytest.raises(ParseError, match="affine"):
        io.system_from_text("interval 0 0 1\nbranch 0 cubic 1\n")


def test_family_file(tmp_path):
    io.write_text(tmp_path / "c.graph", io.graph_to_text(circle_graph()))
    io.write_text(tmp_path / "q.family",
                  "name q\nnum 0 0 0 1 0\nnum 2 1 0 0 0\nfreecv 0 0 1 0\n"
                  "graph c.graph\nrect -0.1 -0.1 0.1 0.1\neps_inv 5e-3\nmax_iters 30\n")
    fam = io.read_family(str(tmp_path / "q.family"))
    builtin = io.read_family("z2+c")
    c = 0.05 - 0.02j
    assert np.isclose(fam.map_at(c)(0.3j), builtin.map_at(c)(0.3j))
    assert fam.free_cv(c) == c
    assert fam.rect == (-0.1, -0.1, 0.1, 0.1)
    assert fam.cfg.eps_inv == 5e-3 and fam.cfg.max_iters == 30
    with pytest.raises(ParseError, match="needs"):
        io.family_from_text("name q\n")


def test_scan_round_trip():
    fam = io.read_family("z2+c")
    rep = scan_grid(fam, (2, 2), 1, rect=(-0.05, -0.05, 0.05, 0.05))
    text = rep.to_text()
    assert io.scan_from_text(text).to_text() == text
    with pytest.raises(ParseError, match="header"):
        io.scan_from_text(text.split("\n", 1)[1])


def test_missing_file():
    with pytest.raises(ParseError, match="cannot read"):
        io.read_map("/nonexistent/z.map")
