"""Regularity diagnostics: bounded turning of curves and conjugacies of interval maps.

Interval systems are expanding Markov maps on finitely many closed real
intervals, each branch strictly monotone and piecewise linear.  The
conjugacy between two systems with the same combinatorics is evaluated
pointwise by pulling an affine initial guess back along orbits.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IncidenceMismatch, NonConvergence, PreconditionError
from .numerics import sph_dist_xyz

ALIGN_TOL = 1e-12
GRID_BITS = 14
CONJ_TOL = 1e-10
MAX_DEPTH = 200
TURNING_SAMPLES = 512


# ---------------------------------------------------------------------------
# bounded turning

def _resample_closed(pts, n):
    pts = np.asarray(pts, dtype=float)
    closed = np.concatenate([pts, pts[:1]])
    seg = sph_dist_xyz(closed[:-1], closed[1:])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    s = np.linspace(0, cum[-1], n, endpoint=False)
    k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(seg) - 1)
    t = np.where(seg[k] > 0, (s - cum[k]) / np.where(seg[k] > 0, seg[k], 1), 0.0)
    a, b = closed[k], closed[k + 1]
    out = (1 - t)[:, None] * a + t[:, None] * b
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def bounded_turning_constant(boundary, max_samples=TURNING_SAMPLES):
    """Bounded-turning constant of a closed polyline (unit vectors).

    ``max min(diam arc_1, diam arc_2) / dist(x, y)`` over pairs of samples,
    the arcs being the two pieces of the curve between ``x`` and ``y``.
    Curves with more than ``max_samples`` points are resampled by arc length.

    Returns
    -------
    (float, tuple)
        The constant and the witnessing index pair.
    """
    P = np.asarray(boundary, dtype=float)
    if len(P) > 1 and sph_dist_xyz(P[0], P[-1]) < 1e-15:
        P = P[:-1]
    if len(P) > max_samples:
        P = _resample_closed(P, max_samples)
    n = len(P)
    if n < 3:
        raise PreconditionError("need at least three distinct boundary samples")
    P2 = np.concatenate([P, P])
    D2 = sph_dist_xyz(P2[:, None], P2[None])
    # M[i, j] = max_{i <= k <= j} D2[k, j]; diam[i, j] = max over i <= a, b <= j
    M = np.triu(D2)
    M = np.maximum.accumulate(M[::-1], axis=0)[::-1]
    diam = np.maximum.accumulate(M, axis=1)
    i, j = np.triu_indices(n, 1)
    d = D2[i, j]
    arc1 = diam[i, j]
    arc2 = diam[j, i + n]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(d > 0, np.minimum(arc1, arc2) / d, 1.0)
    k = int(np.argmax(ratio))
    return float(max(ratio[k], 1.0)), (int(i[k]), int(j[k]))


# ---------------------------------------------------------------------------
# interval systems

class IntervalSystem:
    """Markov map on closed intervals with strictly monotone piecewise-linear branches.

    Parameters
    ----------
    intervals : sequence of (a, b)
        Disjoint (up to shared endpoints), increasing order.
    branches : sequence of (xs, ys)
        Knot tables: branch ``i`` maps ``xs[k] -> ys[k]`` linearly between
        knots, with ``xs`` running from ``a_i`` to ``b_i``.
    """

    def __init__(self, intervals, branches, n_exp=8):
        self.intervals = np.array(intervals, dtype=float)
        k = len(self.intervals)
        if (self.intervals[:, 1] <= self.intervals[:, 0]).any():
            raise PreconditionError("degenerate interval")
        if k > 1 and (self.intervals[1:, 0] < self.intervals[:-1, 1] - ALIGN_TOL).any():
            raise PreconditionError("intervals overlap or are not sorted")
        self.xs, self.ys = [], []
        for i, (xs, ys) in enumerate(branches):
            xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
            a, b = self.intervals[i]
            if abs(xs[0] - a) > ALIGN_TOL or abs(xs[-1] - b) > ALIGN_TOL or (np.diff(xs) <= 0).any():
                raise PreconditionError(f"branch {i} knots do not span its interval")
            dy = np.diff(ys)
            if not ((dy > 0).all() or (dy < 0).all()):
                raise PreconditionError(f"branch {i} is not strictly monotone")
            self.xs.append(xs)
            self.ys.append(ys)
        self.incidence = self._incidence()
        self.n_exp = n_exp
        if self.expansion(n_exp) <= 1:
            raise PreconditionError(f"no iterate up to {n_exp} is uniformly expanding")

    @classmethod
    def piecewise_affine(cls, intervals, images, **kw):
        """Affine branch ``i`` mapping ``intervals[i]`` onto ``images[i]`` (a, b).

        ``images[i] = (c, d)`` with ``c > d`` gives a decreasing branch.
        """
        return cls(intervals, [((a, b), img) for (a, b), img in zip(intervals, images)], **kw)

    def __len__(self):
        return len(self.intervals)

    def _incidence(self):
        k = len(self.intervals)
        A = np.zeros((k, k), dtype=int)
        ends = self.intervals.ravel()
        for i in range(k):
            lo, hi = sorted((self.ys[i][0], self.ys[i][-1]))
            for y in (lo, hi):
                if np.abs(ends - y).min() > ALIGN_TOL:
                    raise PreconditionError(f"image of branch {i} does not end at an interval endpoint")
            for j, (a, b) in enumerate(self.intervals):
                if a >= lo - ALIGN_TOL and b <= hi + ALIGN_TOL:
                    A[i, j] = 1
                elif a < hi - ALIGN_TOL and b > lo + ALIGN_TOL:
                    raise PreconditionError(f"image of branch {i} cuts interval {j}")
        return A

    def increasing(self, i):
        return self.ys[i][-1] > self.ys[i][0]

    def interval_of(self, x):
        """Index of the (lowest) interval containing each ``x``; nearest one otherwise."""
        x = np.asarray(x, dtype=float)
        a, b = self.intervals[:, 0], self.intervals[:, 1]
        gap = np.maximum(a[None] - x[..., None], x[..., None] - b[None])
        return np.argmin(np.maximum(gap, 0), axis=-1)

    def branch(self, i, x):
        return np.interp(x, self.xs[i], self.ys[i])

    def __call__(self, x, idx=None):
        x = np.asarray(x, dtype=float)
        idx = self.interval_of(x) if idx is None else idx
        out = np.empty_like(x)
        for i in range(len(self)):
            m = idx == i
            if m.any():
                out[m] = self.branch(i, x[m])
        return out

    def inverse_branch(self, i, y):
        """``h_i^{-1}(y)`` with exact knot values at knot images."""
        xs, ys = self.xs[i], self.ys[i]
        if not self.increasing(i):
            xs, ys = xs[::-1], ys[::-1]
        y = np.asarray(y, dtype=float)
        k = np.clip(np.searchsorted(ys, y, side="right") - 1, 0, len(ys) - 2)
        s = (y - ys[k]) / (ys[k + 1] - ys[k])
        s = np.clip(s, 0.0, 1.0)
        return xs[k] * (1 - s) + xs[k + 1] * s

    def slopes(self, i):
        return np.diff(self.ys[i]) / np.diff(self.xs[i])

    def derivative(self, x, idx=None):
        x = np.asarray(x, dtype=float)
        idx = self.interval_of(x) if idx is None else idx
        out = np.empty_like(x)
        for i in range(len(self)):
            m = idx == i
            if m.any():
                k = np.clip(np.searchsorted(self.xs[i], x[m], side="right") - 1,
                            0, len(self.xs[i]) - 2)
                out[m] = self.slopes(i)[k]
        return out

    def expansion(self, n_max=8, samples=4097):
        """Largest ``min |(h^n)'|`` over ``n <= n_max`` on a sample grid."""
        x = self.grid(samples)
        best = 0.0
        deriv = np.ones_like(x)
        for _ in range(n_max):
            idx = self.interval_of(x)
            deriv = deriv * np.abs(self.derivative(x, idx))
            x = self._clamp(self(x, idx))
            best = max(best, float(deriv.min()))
            if best > 1:
                break
        return best

    def _clamp(self, x):
        lo, hi = self.intervals[0, 0], self.intervals[-1, 1]
        return np.clip(x, lo, hi)

    def grid(self, n=2 ** GRID_BITS + 1):
        """Equally spaced points of the hull that lie in some interval."""
        lo, hi = self.intervals[0, 0], self.intervals[-1, 1]
        x = lo + (hi - lo) * np.arange(n) / (n - 1)
        a, b = self.intervals[:, 0], self.intervals[:, 1]
        inside = ((x[:, None] >= a - ALIGN_TOL) & (x[:, None] <= b + ALIGN_TOL)).any(axis=1)
        return x[inside]

    def to_text(self):
        lines = []
        for i, (a, b) in enumerate(self.intervals):
            lines.append(f"interval {i} {float(a)!r} {float(b)!r}")
        for i in range(len(self)):
            knots = " ".join(f"{float(x)!r} {float(y)!r}" for x, y in zip(self.xs[i], self.ys[i]))
            lines.append(f"branch {i} table {knots}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ConjugacyResult:
    """Sampled conjugacy ``phi`` with ``phi o h1 = h2 o phi``.

    ``evaluate`` computes ``phi`` at arbitrary points by the same pullback
    used for the grid.
    """

    grid: np.ndarray
    values: np.ndarray
    residual: float
    qs_norm: float
    qs_witness: tuple
    depth: int
    h1: IntervalSystem
    h2: IntervalSystem

    def evaluate(self, x, tol=CONJ_TOL):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return _converged_phi(self.h1, self.h2, x, tol)[0]

    def to_text(self, samples=9):
        """Summary lines, then ``phi x value`` at ``samples`` evenly spaced grid points."""
        lines = [f"residual {self.residual!r}",
                 f"qs_norm {self.qs_norm!r}",
                 f"qs_witness {' '.join(repr(float(t)) for t in self.qs_witness)}",
                 f"depth {self.depth}",
                 f"grid_points {len(self.grid)}"]
        for k in np.unique(np.linspace(0, len(self.grid) - 1, max(samples, 2)).round().astype(int)):
            lines.append(f"phi {float(self.grid[k])!r} {float(self.values[k])!r}")
        return "\n".join(lines) + "\n"


def _phi0(h1, h2, x, idx):
    a1, b1 = h1.intervals[idx, 0], h1.intervals[idx, 1]
    a2, b2 = h2.intervals[idx, 0], h2.intervals[idx, 1]
    s = (x - a1) / (b1 - a1)
    return a2 * (1 - s) + b2 * s


def _orbit(h1, x, n):
    xs, idx = [x], []
    for _ in range(n):
        i = h1.interval_of(xs[-1])
        idx.append(i)
        xs.append(h1._clamp(h1(xs[-1], i)))
    return xs, idx


def _pullback(h1, h2, xs, idx, n):
    y = _phi0(h1, h2, xs[n], h1.interval_of(xs[n]))
    for k in range(n - 1, -1, -1):
        out = np.empty_like(y)
        for i in range(len(h2)):
            m = idx[k] == i
            if m.any():
                out[m] = h2.inverse_branch(i, y[m])
        y = out
    return y


def _converged_phi(h1, h2, x, tol=CONJ_TOL, max_depth=MAX_DEPTH):
    """``phi_n(x)`` with ``n`` doubled until ``|phi_2n - phi_n| < tol``."""
    xs, idx = _orbit(h1, x, max_depth)
    n = 8
    prev = _pullback(h1, h2, xs, idx, n)
    while 2 * n <= max_depth:
        cur = _pullback(h1, h2, xs, idx, 2 * n)
        if np.abs(cur - prev).max() < tol:
            return cur, 2 * n
        n, prev = 2 * n, cur
    raise NonConvergence(f"conjugacy pullback not settled after {max_depth} steps")


def _check_compatible(h1, h2):
    if len(h1) != len(h2) or not np.array_equal(h1.incidence, h2.incidence):
        raise IncidenceMismatch("incidence matrices differ")
    for i in range(len(h1)):
        if h1.increasing(i) != h2.increasing(i):
            raise IncidenceMismatch(f"branch {i} has opposite orientations")


def qs_conjugacy(h1, h2, grid_bits=GRID_BITS, tol=CONJ_TOL, max_depth=MAX_DEPTH):
    """Conjugacy from ``h1`` to ``h2`` preserving the interval labels.

    ``phi_n(x) = h2^{-1}_{i_0} o ... o h2^{-1}_{i_{n-1}} (phi_0(h1^n x))`` where
    ``i_k`` is the interval of ``h1^k x`` and ``phi_0`` is affine per
    interval; ``n`` grows until successive grids differ by less than ``tol``.
    """
    _check_compatible(h1, h2)
    x = h1.grid(2 ** grid_bits + 1)
    cur, n = _converged_phi(h1, h2, x, tol, max_depth)
    idx = [h1.interval_of(x)]
    # residual: phi(h1 x) against h2(phi x), both by the same pullback
    hx = h1._clamp(h1(x, idx[0]))
    lhs = _converged_phi(h1, h2, hx, tol, max_depth)[0]
    rhs = h2(cur, idx[0])
    residual = float(np.abs(lhs - rhs).max())
    for i in range(len(h1)):
        m = idx[0] == i
        if (np.diff(cur[m]) <= 0).any():
            raise NonConvergence(f"conjugacy not strictly increasing on interval {i}")
    qn, wit = qs_norm_estimate(x, cur, components=_components(h1))
    return ConjugacyResult(x, cur, residual, qn, wit, n, h1, h2)


def _components(h):
    """Connected components of the union of intervals, as (lo, hi)."""
    comps = [list(h.intervals[0])]
    for a, b in h.intervals[1:]:
        if a <= comps[-1][1] + ALIGN_TOL:
            comps[-1][1] = b
        else:
            comps.append([a, b])
    return [tuple(c) for c in comps]


def qs_norm_estimate(x, phi, scales=None, components=None):
    """Quasi-symmetry ratio ``max(r, 1/r)``, ``r = (phi(x+t)-phi(x)) / (phi(x)-phi(x-t))``.

    ``x`` is an increasing grid and ``t`` runs over index offsets (powers of
    two by default); triples must stay inside one component.

    Returns
    -------
    (float, tuple)
        The estimate and the witness ``(x, t)``.
    """
    x = np.asarray(x, dtype=float)
    phi = np.asarray(phi, dtype=float)
    n = len(x)
    comp = np.zeros(n, dtype=int)
    if components:
        for c, (lo, hi) in enumerate(components):
            comp[(x >= lo - ALIGN_TOL) & (x <= hi + ALIGN_TOL)] = c
    if scales is None:
        scales = [2 ** k for k in range(int(np.log2(max(n - 1, 1))))]
    best, wit = 1.0, (float(x[0]), 0.0)
    for s in scales:
        if 2 * s >= n:
            break
        mid = np.arange(s, n - s)
        ok = (comp[mid - s] == comp[mid]) & (comp[mid + s] == comp[mid])
        mid = mid[ok]
        if not len(mid):
            continue
        r = (phi[mid + s] - phi[mid]) / (phi[mid] - phi[mid - s])
        q = np.maximum(r, 1 / r)
        k = int(np.argmax(q))
        if q[k] > best:
            best, wit = float(q[k]), (float(x[mid[k]]), float(x[mid[k] + s] - x[mid[k]]))
    return best, wit


def invert_conjugacy(res):
    """Conjugacy in the opposite direction, evaluated on its own grid."""
    return qs_conjugacy(res.h2, res.h1)


# ---------------------------------------------------------------------------
# boundary systems of a Markov partition

def boundary_interval_system(p, piece):
    """Interval system of ``f`` on the boundary of a piece in expanding-metric length.

    Dart ``k`` of the boundary walk becomes the interval ``[s_k, s_k + v(e_k)]``
    with ``v`` the Perron lengths; each branch is affine with slope
    ``+-lambda``.  Raises :class:`PreconditionError` when the boundary is
    not a Jordan curve, when an edge image leaves the boundary, or when an
    image wraps around the starting point of the walk.
    """
    from .markov import expanding_lengths, perron, trace_edge

    G, f = p.graph, p.f
    walk0 = list(p.pieces[piece].boundary_walk)
    if len({d[0] for d in walk0}) != len(walk0):
        raise PreconditionError("piece boundary is not a Jordan curve")
    lengths = expanding_lengths(f, G, p.edge_matrix, perron(p.edge_matrix))
    images = {e: trace_edge(f, G, e) for e, _ in walk0}
    last = None
    # the seam of the parametrization must not be crossed by any image
    for r in range(len(walk0)):
        walk = walk0[r:] + walk0[:r]
        try:
            return _walk_system(walk, lengths, images)
        except PreconditionError as exc:
            last = exc
    raise last


def _walk_system(walk, lengths, images):
    v = np.array([lengths[e] for e, _ in walk])
    starts = np.concatenate([[0.0], np.cumsum(v)])
    where = {d: k for k, d in enumerate(walk)}
    m = len(walk)
    intervals, targets = [], []
    for k, (e, sgn) in enumerate(walk):
        image = images[e]
        if sgn < 0:
            image = [(x, -s) for x, s in reversed(image)]
        if any(d not in where and (d[0], -d[1]) not in where for d in image):
            raise PreconditionError(f"image of edge {e} leaves the piece boundary")
        if image[0] in where:
            p0 = where[image[0]]
            if p0 + len(image) > m or walk[p0:p0 + len(image)] != image:
                raise PreconditionError(f"image of edge {e} wraps across the walk start")
            lo, hi = starts[p0], starts[p0 + len(image)]
        else:
            p0 = where[(image[0][0], -image[0][1])]
            seq = [(walk[p0 - t][0], -walk[p0 - t][1]) for t in range(len(image))]
            if p0 - len(image) + 1 < 0 or seq != image:
                raise PreconditionError(f"image of edge {e} wraps across the walk start")
            lo, hi = starts[p0 + 1], starts[p0 - len(image) + 1]
        intervals.append((starts[k], starts[k + 1]))
        targets.append((lo, hi))
    return IntervalSystem.piecewise_affine(intervals, targets)
