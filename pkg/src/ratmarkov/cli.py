"""Command line front end.

Exit codes: 0 success, 2 convergence failure, 3 invalid input, 4 degeneracy.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import io
from .errors import (
    ConvergenceFailure, Degeneracy, InvalidInput, NeighbourhoodTooCoarse, NonConvergence,
    ParseError, PreconditionError, RatMarkovError, Reducible, RoutingFailure,
)
from .invariant import IterationConfig, choose_depth, promote_union, refine_to_invariant
from .markov import build_partition, itinerary, perron
from .param_space import connectivity_report, connectivity_text, scan_grid
from .pullback import iterated_preimage
from .regularity import qs_conjugacy
from .render import render_svg

PROFILE_ENV = "RATMARKOV_PROFILE"
PROFILES = {
    "strict": {},
    "fast": {"eps_inv": 1e-4, "max_iters": 20},
}
MAX_N = 8

EPILOG = f"""\
environment:
  {PROFILE_ENV}=strict|fast
      default tolerance profile for `invariant`; strict: eps_inv 1e-6 and
      40 iterations, fast: eps_inv 1e-4 and 20 iterations.  Flags override it.

exit codes: 0 success, 2 convergence failure, 3 invalid input, 4 degeneracy
"""


def exit_code(exc):
    if isinstance(exc, ConvergenceFailure):
        return 2
    if isinstance(exc, InvalidInput):
        return 3
    if isinstance(exc, Degeneracy):
        return 4
    return 1


def _profile():
    name = os.environ.get(PROFILE_ENV, "strict")
    if name not in PROFILES:
        raise PreconditionError(f"{PROFILE_ENV} must be one of {', '.join(PROFILES)}")
    return PROFILES[name]


def _positive(kind):
    def conv(s):
        try:
            v = kind(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
        return v
    return conv


def _floats(count):
    def conv(s):
        try:
            vals = tuple(float(t) for t in s.replace(",", " ").split())
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {count} numbers: {s!r}") from None
        if len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} numbers: {s!r}")
        return vals
    return conv


def _grid(s):
    try:
        W, H = (int(t) for t in s.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 17x17: {s!r}") from None
    if W < 1 or H < 1:
        raise argparse.ArgumentTypeError("grid sides must be positive")
    return W, H


def build_parser():
    p = argparse.ArgumentParser(
        prog="ratmarkov", description="Markov partitions of rational maps from invariant graphs.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("preimage", help="pull a graph back under the map")
    s.add_argument("--map", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--depth", type=_positive(int), default=1)
    s.add_argument("--out")

    s = sub.add_parser("invariant", help="refine a seed graph to an invariant one")
    s.add_argument("--map", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--N", type=_positive(int),
                   help="pullback depth per step; chosen and escalated automatically when omitted")
    s.add_argument("--tol", type=_positive(float), help="target residual (radians)")
    s.add_argument("--max-iters", type=_positive(int))
    s.add_argument("--delta1", type=_positive(float))
    s.add_argument("--promote", action="store_true",
                   help="overlay f^-i(G) for i < N so the output is invariant under f itself")
    s.add_argument("--out")
    s.add_argument("--report")

    s = sub.add_parser("partition", help="verify the Markov property and print transition matrices")
    s.add_argument("--map", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--tol", type=_positive(float), default=1e-6)
    s.add_argument("--out")

    s = sub.add_parser("itinerary", help="symbolic itinerary of a point")
    s.add_argument("--map", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--point", required=True, type=_floats(2), help='"re im"')
    s.add_argument("--depth", type=_positive(int), default=8)
    s.add_argument("--level", choices=("face", "edge"), default="face")
    s.add_argument("--out")

    s = sub.add_parser("conjugacy", help="conjugacy between two interval systems")
    s.add_argument("--sys1", required=True)
    s.add_argument("--sys2", required=True)
    s.add_argument("--grid-bits", type=_positive(int), default=14)
    s.add_argument("--samples", type=_positive(int), default=9,
                   help="grid values listed in the output (besides the summary)")
    s.add_argument("--out")

    s = sub.add_parser("scan", help="cell descriptors over a parameter grid")
    s.add_argument("--family", required=True, help="family file, or z2+c for the built-in family")
    s.add_argument("--grid", type=_grid, default=(17, 17))
    s.add_argument("--rect", type=_floats(4), help='"x0 y0 x1 y1"')
    s.add_argument("--depth", type=_positive(int), default=1)
    s.add_argument("--workers", type=_positive(int), default=1)
    s.add_argument("--connectivity", help="also write per-descriptor component counts here")
    s.add_argument("--out")

    s = sub.add_parser("render", help="SVG of a graph, a partition or a scan")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--graph")
    g.add_argument("--scan")
    s.add_argument("--map", help="with --graph: fill the faces of the Markov partition")
    s.add_argument("--pole", type=_floats(3), help='"x y z"; default tries the six axis poles')
    s.add_argument("--size", type=_positive(int), default=512)
    s.add_argument("--stroke", type=_positive(float), default=1.0)
    s.add_argument("--fill", action="store_true", help="fill faces by index")
    s.add_argument("--out")
    return p


def _emit(text, path):
    if path:
        io.write_text(path, text)
    else:
        sys.stdout.write(text)


def _check_inputs(args):
    for key in ("map", "graph", "sys1", "sys2", "scan"):
        path = getattr(args, key, None)
        if path is not None and not os.path.isfile(path):
            raise ParseError(f"no such file: {path}")
    fam = getattr(args, "family", None)
    if fam is not None and fam != "z2+c" and not os.path.isfile(fam):
        raise ParseError(f"no such file: {fam}")


def cmd_preimage(args):
    f, G = io.read_map(args.map), io.read_graph(args.graph)
    _emit(io.graph_to_text(iterated_preimage(f, G, args.depth)), args.out)


def _invariant_cfg(args):
    over = dict(_profile())
    for key, val in (("eps_inv", args.tol), ("max_iters", args.max_iters), ("delta1", args.delta1)):
        if val is not None:
            over[key] = val
    return IterationConfig(**over)


def cmd_invariant(args):
    f, G0 = io.read_map(args.map), io.read_graph(args.graph)
    cfg = _invariant_cfg(args)
    if args.N is not None:
        G, rep = refine_to_invariant(f, G0, dataclasses.replace(cfg, N=args.N))
        N = args.N
    else:
        N = choose_depth(f, G0, cfg.delta1, MAX_N)
        while True:
            try:
                G, rep = refine_to_invariant(f, G0, dataclasses.replace(cfg, N=N))
                break
            except (NonConvergence, RoutingFailure, NeighbourhoodTooCoarse) as exc:
                if N >= MAX_N:
                    raise
                print(f"N={N}: {exc}; retrying with N={N + 1}", file=sys.stderr)
                N += 1
    if args.promote and N > 1:
        G = promote_union(f, G, N)
    _emit(io.graph_to_text(G), args.out)
    text = f"N {N}\n" + rep.to_text()
    if args.report:
        io.write_text(args.report, text)
    else:
        sys.stderr.write(text)


def cmd_partition(args):
    f, G = io.read_map(args.map), io.read_graph(args.graph)
    p = build_partition(f, G, tol=args.tol)
    text = p.to_text()
    try:
        pd = perron(p.edge_matrix)
        text += f"eigenvalue {pd.eigenvalue!r}\nentropy {pd.entropy!r}\n"
    except Reducible as exc:
        text += f"reducible {' '.join('{' + ','.join(map(str, c)) + '}' for c in exc.components)}\n"
    _emit(text, args.out)


def cmd_itinerary(args):
    f, G = io.read_map(args.map), io.read_graph(args.graph)
    p = build_partition(f, G)
    z = complex(*args.point)
    addr = itinerary(p, z, args.depth, level=args.level)
    _emit(" ".join(f"{k}:{s}" for k, s in zip(addr.kinds, addr.symbols)) + "\n", args.out)


def cmd_conjugacy(args):
    h1, h2 = io.read_system(args.sys1), io.read_system(args.sys2)
    res = qs_conjugacy(h1, h2, grid_bits=args.grid_bits)
    _emit(res.to_text(args.samples), args.out)


def cmd_scan(args):
    fam = io.read_family(args.family)
    rep = scan_grid(fam, args.grid, args.depth, rect=args.rect, workers=args.workers)
    _emit(rep.to_text(), args.out)
    if args.connectivity:
        io.write_text(args.connectivity, connectivity_text(connectivity_report(rep)))


def cmd_render(args):
    if args.scan:
        obj = io.scan_from_text(io.read_text(args.scan))
    else:
        obj = io.read_graph(args.graph)
        if args.map:
            obj = build_partition(io.read_map(args.map), obj)
    pole = None if args.pole is None else np.array(args.pole)
    fill = True if args.fill else None
    _emit(render_svg(obj, pole=pole, size=args.size, stroke=args.stroke, fill=fill), args.out)


COMMANDS = {
    "preimage": cmd_preimage, "invariant": cmd_invariant, "partition": cmd_partition,
    "itinerary": cmd_itinerary, "conjugacy": cmd_conjugacy, "scan": cmd_scan,
    "render": cmd_render,
}


def run(argv=None):
    """Parse ``argv`` and dispatch; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse reports usage errors with status 2; those are invalid input here
        return 0 if exc.code == 0 else 3
    try:
        _check_inputs(args)
        _profile()
        COMMANDS[args.cmd](args)
    except RatMarkovError as exc:
        print(f"ratmarkov {args.cmd}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code(exc)
    except OSError as exc:
        print(f"ratmarkov {args.cmd}: {exc}", file=sys.stderr)
        return 3
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
