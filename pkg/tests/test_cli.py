import subprocess
import sys

import pytest

from ratmarkov import cli, io
from ratmarkov.fixtures import circle_graph, doubling_system, power_map, third_breakpoint_system


@pytest.fixture()
def data(tmp_path):
    paths = {}
    for name, text in [
        ("z2.map", io.map_to_text(power_map(2))),
        ("circle.graph", io.graph_to_text(circle_graph(n_vertices=2))),
        ("small.graph", io.graph_to_text(circle_graph(0.1, center=1.0))),
        ("doubling.sys", doubling_system().to_text()),
        ("third.sys", third_breakpoint_system().to_text()),
    ]:
        paths[name] = str(tmp_path / name)
        io.write_text(paths[name], text)
    paths["dir"] = tmp_path
    return paths


def test_partition(data, capsys):
    assert cli.run(["partition", "--map", data["z2.map"], "--graph", data["circle.graph"]]) == 0
    out = capsys.readouterr().out
    assert "eigenvalue 2.0" in out
    assert "entropy 0.693147" in out


def test_preimage_writes_a_graph(data):
    out = str(data["dir"] / "pre.graph")
    assert cli.run(["preimage", "--map", data["z2.map"], "--graph", data["circle.graph"],
                    "--out", out]) == 0
    G = io.read_graph(out)
    assert len(G.vertices) == 4 and len(G.faces) == 2


def test_itinerary(data, capsys):
    assert cli.run(["itinerary", "--map", data["z2.map"], "--graph", data["circle.graph"],
                    "--point", "0.3 0.1", "--depth", "3"]) == 0
    toks = capsys.readouterr().out.split()
    assert len(toks) == 3 and all(t.startswith("face:") for t in toks)


def test_conjugacy(data, capsys):
    assert cli.run(["conjugacy", "--sys1", data["doubling.sys"], "--sys2", data["third.sys"],
                    "--grid-bits", "8", "--samples", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("residual")
    assert "phi 0.5 0.3333333333333333" in lines


def test_render(data):
    out = str(data["dir"] / "p.svg")
    assert cli.run(["render", "--graph", data["circle.graph"], "--map", data["z2.map"],
                    "--out", out]) == 0
    assert io.read_text(out).count('fill-rule="evenodd"') == 2
    assert cli.run(["render", "--graph", data["circle.graph"], "--pole", "1 0 0"]) == 4


def test_invariant_failure_exit_code(data, capsys):
    code = cli.run(["invariant", "--map", data["z2.map"], "--graph", data["small.graph"],
                    "--N", "1"])
    assert code == 2
    assert "ratmarkov invariant:" in capsys.readouterr().err


def test_invalid_input_exit_codes(data):
    assert cli.run(["partition", "--map", "/nonexistent.map", "--graph", data["circle.graph"]]) == 3
    assert cli.run(["partition", "--map", data["z2.map"]]) == 3
    assert cli.run(["scan", "--grid", "17by17"]) == 3
    assert cli.run(["partition", "--map", data["circle.graph"], "--graph", data["circle.graph"]]) == 3


def test_profile_env(data, monkeypatch):
    monkeypatch.setenv(cli.PROFILE_ENV, "turbo")
    assert cli.run(["partition", "--map", data["z2.map"], "--graph", data["circle.graph"]]) == 3
    monkeypatch.setenv(cli.PROFILE_ENV, "fast")
    args = cli.build_parser().parse_args(["invariant", "--map", "m", "--graph", "g"])
    cfg = cli._invariant_cfg(args)
    assert cfg.eps_inv == 1e-4 and cfg.max_iters == 20
    args = cli.build_parser().parse_args(["invariant", "--map", "m", "--graph", "g",
                                          "--tol", "1e-5"])
    assert cli._invariant_cfg(args).eps_inv == 1e-5


def test_console_entry_point(data):
    proc = subprocess.run([sys.executable, "-m", "ratmarkov.cli", "partition", "--map",
                           data["z2.map"], "--graph", "/nonexistent.graph"],
                          capture_output=True, text=True)
    assert proc.returncode == 3
    assert "no such file" in proc.stderr
