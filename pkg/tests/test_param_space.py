import dataclasses

import numpy as np
import pytest

from ratmarkov import (
    LeftExistenceSet, NotFound, cell_address, combinatorial_distance, connectivity_report,
    continue_along, isotopy_signature, quadratic_family, scan_grid,
)
from ratmarkov import param_space
from ratmarkov.fixtures import circle_graph, power_map
from ratmarkov.param_space import ScanReport, face_label


@pytest.fixture(scope="module")
def fam():
    return quadratic_family()


def test_cell_address_is_nested(fam):
    d = cell_address(fam, -0.05, 3)
    assert str(d) == "face:0+|face:0+.0+|face:0+.0+.0+"
    assert d.depth == 3


def test_face_labels_do_not_depend_on_walk_start():
    G = circle_graph()
    assert sorted(face_label(G, f) for f in G.faces) == ["0+", "0-"]


def test_continuation_keeps_signature(fam):
    G = continue_along(fam, 0.1 + 0.1j)
    assert isotopy_signature(G) == isotopy_signature(fam.base_graph)


def test_continuation_leaves_existence_set(fam, monkeypatch):
    # a coarse floor gives up after a few halvings instead of sixteen
    monkeypatch.setattr(param_space, "STEP_FLOOR", 2.0 ** -5)
    quick = dataclasses.replace(fam, cfg=dataclasses.replace(fam.cfg, max_iters=8))
    with pytest.raises(LeftExistenceSet):
        continue_along(quick, -2.5)


def test_combinatorial_distance_not_found():
    nf = combinatorial_distance(power_map(2), circle_graph(), 3)
    assert isinstance(nf, NotFound) and nf.r_max == 3
    assert "critical values" in nf.reason
    assert combinatorial_distance(power_map(2), circle_graph(), 0) == NotFound(0, "r_max = 0")


def test_small_scan_is_thread_independent(fam):
    a = scan_grid(fam, (3, 3), 1, rect=(-0.1, -0.1, 0.1, 0.1))
    b = scan_grid(fam, (3, 3), 1, rect=(-0.1, -0.1, 0.1, 0.1), workers=3)
    assert a.to_text() == b.to_text()
    assert {s for s, _ in a.entries.values()} == {"ok"}
    lines = a.to_text().splitlines()
    assert lines[0] == "# grid 3x3 rect -0.1 -0.1 0.1 0.1 depth 1"
    assert lines[1] == "-0.1 -0.1 ok face:0+"


def test_connectivity_counts_components():
    entries = {(x, y): ("ok", "A" if x != 1 else "B") for x in range(3) for y in range(2)}
    entries[(0, 0)] = ("left", "LeftExistenceSet")
    rep = ScanReport((0, 0, 1, 1), (3, 2), 1, entries)
    conn = connectivity_report(rep)
    assert conn == {"A": (2, 1), "B": (1, 2)}
