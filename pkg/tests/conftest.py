import os

import pytest

from ratmarkov import io
from ratmarkov.fixtures import circle_graph, power_map

ACCEPTANCE = {}


@pytest.fixture
def record():
    def put(k, ok, detail):
        ACCEPTANCE[k] = (ok, detail)
        print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    return put


@pytest.fixture
def files(tmp_path):
    """Write maps and graphs to ``tmp_path``; returns a name -> path helper."""
    def put(name, obj):
        path = os.path.join(tmp_path, name)
        text = obj if isinstance(obj, str) else (
            io.map_to_text(obj) if hasattr(obj, "degree") else io.graph_to_text(obj))
        io.write_text(path, text)
        return path
    put("z2.map", power_map(2))
    put("circle.graph", circle_graph())
    put.dir = str(tmp_path)
    return put


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
