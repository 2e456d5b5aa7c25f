"""Riemann sphere arithmetic and rational maps.

Points are exchanged at API boundaries as :class:`SpherePoint` (two complex
charts, ``w = 1/z`` near infinity).  Bulk computations work on unit vectors
of R^3 through the stereographic correspondence, north pole = infinity, on
the sphere of radius 1.
"""
from __future__ import annotations

import bisect
import enum
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import IndeterminateForm, InvalidMap, RootFindingFailure

CHART_HYSTERESIS = 0.1
ROOT_TOL = 1e-9
_TRIM = 1e-14


class Chart(enum.Enum):
    STANDARD = "std"
    INVERTED = "inv"


# ---------------------------------------------------------------------------
# vector helpers

def to_xyz(z):
    """Complex numbers (``inf`` allowed) to unit vectors, shape ``(..., 3)``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (3,))
    inf = ~np.isfinite(z)
    small = (np.abs(z) <= 1) & ~inf
    big = ~small & ~inf
    zs = z[small]
    r2 = np.abs(zs) ** 2
    out[small, 0] = 2 * zs.real / (1 + r2)
    out[small, 1] = 2 * zs.imag / (1 + r2)
    out[small, 2] = (r2 - 1) / (1 + r2)
    w = 1 / z[big]
    r2 = np.abs(w) ** 2
    out[big, 0] = 2 * w.real / (1 + r2)
    out[big, 1] = -2 * w.imag / (1 + r2)
    out[big, 2] = (1 - r2) / (1 + r2)
    out[inf] = (0.0, 0.0, 1.0)
    return out


def hom_from_xyz(v):
    """Homogeneous coordinates ``(X, Y)`` with ``z = X / Y``, both bounded."""
    v = np.asarray(v, dtype=float)
    x, y, h = v[..., 0], v[..., 1], v[..., 2]
    south = h <= 0
    X = np.where(south, x + 1j * y, 1 + h)
    Y = np.where(south, 1 - h, x - 1j * y)
    return X.astype(complex), Y.astype(complex)


def xyz_from_hom(X, Y):
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    ax, ay = np.abs(X), np.abs(Y)
    out = np.empty(np.broadcast(X, Y).shape + (3,))
    std = ax <= ay
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(std, X / np.where(std, Y, 1), 0)
        w = np.where(std, 0, Y / np.where(std, 1, X))
    r2 = np.abs(z) ** 2
    s2 = np.abs(w) ** 2
    out[..., 0] = np.where(std, 2 * z.real / (1 + r2), 2 * w.real / (1 + s2))
    out[..., 1] = np.where(std, 2 * z.imag / (1 + r2), -2 * w.imag / (1 + s2))
    out[..., 2] = np.where(std, (r2 - 1) / (1 + r2), (1 - s2) / (1 + s2))
    return out


def xyz_to_complex(v):
    X, Y = hom_from_xyz(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = X / Y
    return np.where(np.abs(Y) == 0, complex(np.inf, 0), z)


def cross3(a, b):
    """Cross product over the last axis of length 3 (cheaper than ``np.cross`` for small batches)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0], axis=-1)


def normalize(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def sph_dist_xyz(a, b):
    """Great-circle distance between unit vectors (broadcasting)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return 2 * np.arctan2(np.linalg.norm(a - b, axis=-1),
                          np.linalg.norm(a + b, axis=-1))


def slerp(a, b, t):
    """Points along the minor great arc from ``a`` to ``b``."""
    t = np.asarray(t, dtype=float)[..., None]
    om = sph_dist_xyz(a, b)
    if om < 1e-15:
        return normalize(a + t * (b - a))
    s = np.sin(om)
    return normalize((np.sin((1 - t) * om) * a + np.sin(t * om) * b) / s)


def densify(points, max_step):
    """Insert geodesic points so consecutive samples are ``<= max_step``."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return pts.copy()
    out = [pts[:1]]
    steps = sph_dist_xyz(pts[:-1], pts[1:])
    for i, s in enumerate(steps):
        k = int(np.ceil(s / max_step))
        if k > 1:
            t = np.arange(1, k) / k
            out.append(slerp(pts[i], pts[i + 1], t))
        out.append(pts[i + 1:i + 2])
    return np.concatenate(out)


def thin(points, max_step, min_points=4):
    """Drop samples while keeping the path length between kept ones ``<= max_step``.

    At least ``min_points`` samples (or all of them) survive, so short
    closed loops keep a shape.
    """
    pts = np.asarray(points)
    n = len(pts)
    if n <= min_points:
        return pts
    cum = np.concatenate([[0.0], np.cumsum(sph_dist_xyz(pts[:-1], pts[1:]))])
    cl = cum.tolist()
    keep = [0]
    while keep[-1] < n - 1:
        j = bisect.bisect_right(cl, cl[keep[-1]] + max_step) - 1
        keep.append(min(max(j, keep[-1] + 1), n - 1))
    if len(keep) < min_points:
        keep = np.unique(np.linspace(0, n - 1, min_points).round().astype(int))
    return pts[keep]


def tangent_basis(p):
    """Orthonormal tangent basis ``(u, w)`` at ``p``, oriented like the complex plane."""
    p = np.asarray(p, dtype=float)
    ref = np.array([0.0, 0.0, 1.0]) if abs(p[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = normalize(cross3(ref, p))
    w = cross3(u, p)
    return u, w


def direction_angle(p, q):
    """Angle of the tangent direction at ``p`` pointing toward ``q``."""
    u, w = tangent_basis(p)
    d = np.asarray(q, dtype=float) - p
    return np.arctan2(d @ w, d @ u) % (2 * np.pi)


# ---------------------------------------------------------------------------
# points

@dataclass(frozen=True, eq=False)
class SpherePoint:
    """Point of the Riemann sphere in the standard or the inverted chart."""

    chart: Chart
    coords: complex

    def __post_init__(self):
        chart = Chart(self.chart)
        c = complex(self.coords)
        if abs(c) > 1 + CHART_HYSTERESIS:
            chart = Chart.INVERTED if chart is Chart.STANDARD else Chart.STANDARD
            c = 1 / c
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_complex(cls, z):
        z = complex(z)
        if not np.isfinite(z.real) or not np.isfinite(z.imag):
            return cls(Chart.INVERTED, 0j)
        if abs(z) > 1:
            return cls(Chart.INVERTED, 1 / z)
        return cls(Chart.STANDARD, z)

    @classmethod
    def infinity(cls):
        return cls(Chart.INVERTED, 0j)

    @classmethod
    def from_xyz(cls, v):
        X, Y = hom_from_xyz(np.asarray(v, dtype=float))
        X, Y = complex(X), complex(Y)
        if abs(X) <= abs(Y):
            return cls(Chart.STANDARD, X / Y)
        return cls(Chart.INVERTED, Y / X)

    @property
    def xyz(self):
        if self.chart is Chart.STANDARD:
            return to_xyz(self.coords)
        return xyz_from_hom(1.0 + 0j, self.coords)

    def to_complex(self):
        if self.chart is Chart.STANDARD:
            return self.coords
        if self.coords == 0:
            return complex(np.inf, 0)
        return 1 / self.coords

    def is_infinity(self):
        return self.chart is Chart.INVERTED and self.coords == 0

    def __eq__(self, other):
        if not isinstance(other, SpherePoint):
            return NotImplemented
        if self.chart is other.chart:
            return self.coords == other.coords
        return bool(np.allclose(self.xyz, other.xyz, rtol=0, atol=1e-14))

    __hash__ = None

    def __repr__(self):
        return f"SpherePoint({self.chart.value}, {self.coords!r})"


def as_point(z):
    """Coerce a complex number, ``inf`` or a SpherePoint."""
    if isinstance(z, SpherePoint):
        return z
    return SpherePoint.from_complex(z)


def sph_dist(a, b):
    """Spherical (arc-length) distance in radians, sphere of radius 1."""
    return float(sph_dist_xyz(as_point(a).xyz, as_point(b).xyz))


# ---------------------------------------------------------------------------
# polynomial roots

def _trim(c, rel=_TRIM):
    c = np.asarray(c, dtype=complex)
    scale = np.max(np.abs(c)) if len(c) else 0.0
    n = len(c)
    while n > 0 and abs(c[n - 1]) <= rel * scale:
        n -= 1
    return c[:n]


def _newton_polish(c, r, steps=3):
    dc = P.polyder(c)
    for _ in range(steps):
        val = P.polyval(r, c)
        der = P.polyval(r, dc)
        ok = np.abs(der) > 0
        step = np.where(ok, val / np.where(ok, der, 1), 0)
        cand = r - step
        better = np.abs(P.polyval(cand, c)) < np.abs(val)
        r = np.where(better, cand, r)
    return r


def poly_roots(coeffs):
    """Roots of a polynomial with ascending coefficients.

    Eigenvalues of the companion matrix, polished by Newton steps (in the
    reversed polynomial for roots outside the unit disc).
    """
    c = _trim(coeffs)
    n = len(c) - 1
    if n <= 0:
        return np.empty(0, dtype=complex)
    M = np.zeros((n, n), dtype=complex)
    M[1:, :-1] = np.eye(n - 1)
    M[:, -1] = -c[:-1] / c[-1]
    r = np.linalg.eigvals(M)
    if not np.all(np.isfinite(r)):
        raise RootFindingFailure("companion eigenvalues are not finite")
    inside = np.abs(r) <= 1
    r = r.astype(complex)
    if inside.any():
        r[inside] = _newton_polish(c, r[inside])
    if (~inside).any():
        rev = c[::-1]
        u = _newton_polish(rev, 1 / r[~inside])
        r[~inside] = 1 / u
    return r


def roots_xyz(coeffs, degree):
    """Roots of a degree-``degree`` binary form, as unit vectors.

    ``coeffs`` are ascending coefficients of the dehomogenized polynomial;
    a degree drop is accounted as roots at infinity.
    """
    c = _trim(coeffs)
    r = poly_roots(c)
    pts = to_xyz(r) if len(r) else np.empty((0, 3))
    missing = degree - len(r)
    if missing < 0:
        raise RootFindingFailure("more roots than the form degree")
    if missing:
        pts = np.concatenate([pts, np.tile([0.0, 0.0, 1.0], (missing, 1))])
    return pts


def _hom_eval(c, X, Y):
    """Evaluate sum c_k X^k Y^(d-k) up to a positive common scale."""
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    std = np.abs(X) <= np.abs(Y)
    out = np.empty(np.broadcast(X, Y).shape, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(std, X / np.where(std, Y, 1), 0)
        u = np.where(std, 0, Y / np.where(std, 1, X))
    out[std] = P.polyval(z[std], c)
    out[~std] = P.polyval(u[~std], c[::-1])
    return out, std


# ---------------------------------------------------------------------------
# rational maps

class RationalMap:
    """Rational map ``p(z) / q(z)`` of the Riemann sphere.

    Parameters
    ----------
    numerator, denominator : sequence of complex
        Ascending coefficients.
    """

    def __init__(self, numerator, denominator=(1,)):
        p = _trim(np.atleast_1d(np.asarray(numerator, dtype=complex)), 0.0)
        q = _trim(np.atleast_1d(np.asarray(denominator, dtype=complex)), 0.0)
        if len(q) == 0:
            raise InvalidMap("zero denominator")
        if len(p) == 0:
            raise InvalidMap("zero numerator")
        d = max(len(p), len(q)) - 1
        if d < 1:
            raise InvalidMap("constant map")
        self.degree = d
        self.numerator = p
        self.denominator = q
        self._p = np.zeros(d + 1, dtype=complex)
        self._q = np.zeros(d + 1, dtype=complex)
        self._p[:len(p)] = p
        self._q[:len(q)] = q
        if self._resultant_small():
            raise InvalidMap("numerator and denominator share a root")
        w = P.polysub(P.polymul(P.polyder(self._p), self._q),
                      P.polymul(self._p, P.polyder(self._q)))
        self._wronskian = np.zeros(2 * d - 1, dtype=complex)
        self._wronskian[:len(w)] = w[:2 * d - 1]
        self._crit = None

    def _resultant_small(self):
        d = self.degree
        S = np.zeros((2 * d, 2 * d), dtype=complex)
        for i in range(d):
            S[i, i:i + d + 1] = self._p[::-1]
            S[d + i, i:i + d + 1] = self._q[::-1]
        s = np.linalg.svd(S, compute_uv=False)
        return s[-1] <= ROOT_TOL * s[0]

    @classmethod
    def polynomial(cls, coeffs):
        return cls(coeffs, (1,))

    def __repr__(self):
        return f"RationalMap(num={self.numerator.tolist()}, den={self.denominator.tolist()})"

    # evaluation --------------------------------------------------------
    def hom(self, X, Y):
        Pv, _ = _hom_eval(self._p, X, Y)
        Qv, _ = _hom_eval(self._q, X, Y)
        return Pv, Qv

    def eval_xyz(self, v):
        X, Y = hom_from_xyz(v)
        Pv, Qv = self.hom(X, Y)
        bad = (np.abs(Pv) < 1e-300) & (np.abs(Qv) < 1e-300)
        if np.any(bad):
            raise IndeterminateForm("numerator and denominator both vanish")
        return xyz_from_hom(Pv, Qv)

    def iterate_xyz(self, v, n):
        for _ in range(n):
            v = self.eval_xyz(v)
        return v

    def evaluate(self, z):
        """Value at a point, with ``inf`` handled in the inverted chart."""
        pt = as_point(z)
        X, Y = hom_from_xyz(pt.xyz)
        Pv, Qv = self.hom(X, Y)
        scale = max(np.max(np.abs(self._p)), np.max(np.abs(self._q)))
        if abs(Pv) <= ROOT_TOL * scale and abs(Qv) <= ROOT_TOL * scale:
            raise IndeterminateForm(f"0/0 at {pt!r}")
        return SpherePoint.from_xyz(xyz_from_hom(Pv, Qv))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return xyz_to_complex(self.eval_xyz(to_xyz(z)))

    def sph_derivative_xyz(self, v):
        X, Y = hom_from_xyz(v)
        Pv, std = _hom_eval(self._p, X, Y)
        Qv, _ = _hom_eval(self._q, X, Y)
        W, _ = _hom_eval(self._wronskian, X, Y)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(std, X / np.where(std, Y, 1), Y / np.where(std, 1, X))
        # the reversed Wronskian picks up a sign only, so |W| is chart-free
        return np.abs(W) * (1 + np.abs(t) ** 2) / (np.abs(Pv) ** 2 + np.abs(Qv) ** 2)

    def spherical_derivative(self, z):
        """``|f'(z)| (1+|z|^2) / (1+|f(z)|^2)``, finite everywhere."""
        return float(self.sph_derivative_xyz(as_point(z).xyz))

    # critical points and fibers ---------------------------------------------
    def critical_points_xyz(self):
        if self._crit is None:
            self._crit = roots_xyz(self._wronskian, 2 * self.degree - 2)
        return self._crit

    def critical_points(self):
        """Critical points with multiplicity (``2d - 2`` of them)."""
        return [SpherePoint.from_xyz(v) for v in self.critical_points_xyz()]

    def critical_values_xyz(self):
        return self.eval_xyz(self.critical_points_xyz())

    def fiber_xyz(self, w):
        W0, W1 = hom_from_xyz(np.asarray(w, dtype=float))
        h = complex(W1) * self._p - complex(W0) * self._q
        return roots_xyz(h, self.degree)

    def fibers_xyz(self, ws):
        """Fibers of many points at once, shape ``(n, d, 3)``."""
        ws = np.asarray(ws, dtype=float).reshape(-1, 3)
        d = self.degree
        W0, W1 = hom_from_xyz(ws)
        H = W1[:, None] * self._p[None, :] - W0[:, None] * self._q[None, :]
        lead = np.abs(H[:, -1])
        full = lead > _TRIM * np.max(np.abs(H), axis=1)
        out = np.empty((len(ws), d, 3))
        idx = np.nonzero(full)[0]
        if len(idx):
            Hf = H[idx]
            M = np.zeros((len(idx), d, d), dtype=complex)
            if d > 1:
                M[:, np.arange(1, d), np.arange(d - 1)] = 1
            M[:, :, -1] = -Hf[:, :-1] / Hf[:, -1:]
            r = np.linalg.eigvals(M)
            if not np.all(np.isfinite(r)):
                raise RootFindingFailure("companion eigenvalues are not finite")
            r = self._polish_batch(Hf, r)
            out[idx] = to_xyz(r)
        for i in np.nonzero(~full)[0]:
            out[i] = roots_xyz(H[i], d)
        return out

    @staticmethod
    def _polish_batch(H, r):
        # one Newton step per root, in the chart where the root is bounded
        d = H.shape[1] - 1
        inside = np.abs(r) <= 1
        k = np.arange(d + 1)
        z = np.where(inside, r, 1 / np.where(inside, 1, r))
        c = np.where(inside[..., None], H[:, None, :], H[:, None, ::-1])
        pw = z[..., None] ** k
        val = np.sum(c * pw, axis=-1)
        der = np.sum(c[..., 1:] * k[1:] * pw[..., :-1], axis=-1)
        ok = np.abs(der) > 1e-300
        step = np.where(ok, val / np.where(ok, der, 1), 0)
        cand = z - step
        pwc = cand[..., None] ** k
        better = np.abs(np.sum(c * pwc, axis=-1)) < np.abs(val)
        z = np.where(better, cand, z)
        return np.where(inside, z, 1 / z)

    def fiber(self, w):
        """All solutions of ``f(z) = w`` with multiplicity."""
        return [SpherePoint.from_xyz(v) for v in self.fiber_xyz(as_point(w).xyz)]

    # composition -------------------------------------------------------
    def compose(self, inner):
        """The map ``self o inner``."""
        d = self.degree
        a, b = inner._p, inner._q
        num = np.zeros(1, dtype=complex)
        den = np.zeros(1, dtype=complex)
        for k in range(d + 1):
            term = P.polymul(P.polypow(a, k), P.polypow(b, d - k))
            num = P.polyadd(num, self._p[k] * term)
            den = P.polyadd(den, self._q[k] * term)
        return RationalMap(num, den)

    def iterate(self, n):
        g = self
        for _ in range(n - 1):
            g = self.compose(g)
        return g



def identity_map():
    return RationalMap([0, 1], [1])
