"""Write the demo input files into demos/data."""
import os

from ratmarkov import io
from ratmarkov.fixtures import (
    circle_graph, doubling_system, ellipse_graph, power_map, quadratic,
    third_breakpoint_system,
)

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def put(name, text):
    io.write_text(os.path.join(HERE, name), text)


if __name__ == "__main__":
    os.makedirs(HERE, exist_ok=True)
    put("z2.map", io.map_to_text(power_map(2)))
    put("z3.map", io.map_to_text(power_map(3)))
    put("z2_minus_0.05.map", io.map_to_text(quadratic(-0.05)))
    put("circle.graph", io.graph_to_text(circle_graph()))
    put("ellipse.graph", io.graph_to_text(ellipse_graph()))
    put("small_circle.graph", io.graph_to_text(circle_graph(0.1, center=1.0)))
    put("doubling.sys", doubling_system().to_text())
    put("third.sys", third_breakpoint_system().to_text())
    put("quadratic.family", "\n".join([
        "# z^2 + c around c = 0, free critical value c",
        "name z2+c",
        "num 0 0 0 1 0",
        "num 2 1 0 0 0",
        "freecv 0 0 1 0",
        "base 0 0",
        "graph circle.graph",
        "rect -0.2 -0.2 0.2 0.2",
        "eps_inv 5e-3",
        "max_iters 30",
    ]) + "\n")
