import numpy as np
import pytest

from ratmarkov import (
    IncidenceMismatch, IntervalSystem, PreconditionError, bounded_turning_constant,
    boundary_interval_system, build_partition, qs_conjugacy, qs_norm_estimate,
)
from ratmarkov.fixtures import (
    circle_graph, doubling_system, power_map, third_breakpoint_system,
)
from ratmarkov.numerics import sph_dist_xyz, to_xyz


def _naive_turning(P):
    """Definition applied literally: every pair, both arcs, every pair inside each arc."""
    n = len(P)
    D = sph_dist_xyz(P[:, None], P[None])
    best = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            a1 = list(range(i, j + 1))
            a2 = list(range(j, n)) + list(range(0, i + 1))
            d1 = D[np.ix_(a1, a1)].max()
            d2 = D[np.ix_(a2, a2)].max()
            best = max(best, min(d1, d2) / D[i, j])
    return best


def _square(side=0.4, per_side=12):
    t = np.arange(per_side) / per_side
    h = side / 2
    corners = [(-h - 1j * h), (h - 1j * h), (h + 1j * h), (-h + 1j * h)]
    z = np.concatenate([a + (b - a) * t for a, b in zip(corners, corners[1:] + corners[:1])])
    return to_xyz(z)


def test_square_against_brute_force():
    P = _square()
    K, (i, j) = bounded_turning_constant(P)
    assert K == pytest.approx(_naive_turning(P), abs=1e-12)
    assert K > 1.05


def test_turning_of_circle_and_rotations():
    t = np.linspace(0, 2 * np.pi, 200, endpoint=False)
    circle = np.stack([np.cos(t), np.zeros_like(t), np.sin(t)], axis=1)
    assert bounded_turning_constant(circle)[0] == pytest.approx(1.0, abs=1e-3)


def test_turning_resamples_long_input():
    P = to_xyz(0.5 * np.exp(1j * np.linspace(0, 2 * np.pi, 3000, endpoint=False)))
    assert bounded_turning_constant(P, max_samples=256)[0] == pytest.approx(1.0, abs=1e-3)


def test_interval_system_validation():
    with pytest.raises(PreconditionError):
        IntervalSystem.piecewise_affine([(0, 0.6), (0.5, 1)], [(0, 1), (0, 1)])
    with pytest.raises(PreconditionError):       # slope one never expands
        IntervalSystem.piecewise_affine([(0, 1)], [(0, 1)])
    with pytest.raises(PreconditionError):       # image cuts an interval
        IntervalSystem.piecewise_affine([(0, 0.5), (0.5, 1)], [(0, 0.75), (0, 1)])


def test_inverse_branch_exact_at_knots():
    h = third_breakpoint_system()
    assert h.inverse_branch(0, np.array([1.0]))[0] == 1 / 3
    assert h.inverse_branch(1, np.array([0.0]))[0] == 1 / 3
    assert np.array_equal(h.incidence, np.ones((2, 2), dtype=int))


def test_incidence_mismatch():
    flip = IntervalSystem.piecewise_affine([(0, 0.5), (0.5, 1)], [(1, 0), (0, 1)])
    with pytest.raises(IncidenceMismatch):
        qs_conjugacy(doubling_system(), flip)


def test_conjugacy_values_at_dyadics():
    res = qs_conjugacy(doubling_system(), third_breakpoint_system(), grid_bits=10)
    # phi maps the doubling partition points to the 1/3-system ones: 1/4 -> 1/9, 3/4 -> 5/9
    assert res.evaluate(np.array([0.25, 0.75])) == pytest.approx([1 / 9, 5 / 9], abs=1e-12)
    assert (np.diff(res.values) > 0).all()


def test_qs_norm_grows_with_the_grid():
    # at every dyadic point phi follows different power laws on its two
    # sides, so the ratio grows without bound as the scale shrinks
    h1, h2 = doubling_system(), third_breakpoint_system()
    coarse = qs_conjugacy(h1, h2, grid_bits=8).qs_norm
    fine = qs_conjugacy(h1, h2, grid_bits=12).qs_norm
    assert fine > 4 * coarse


def test_qs_norm_of_identity_and_power():
    x = np.linspace(0, 1, 1025)
    assert qs_norm_estimate(x, x)[0] == pytest.approx(1.0)
    q, (x0, t) = qs_norm_estimate(x, x ** 2)
    assert q > 2 and x0 - t >= 0


@pytest.mark.parametrize("d", [2, 3])
def test_boundary_system_of_power_map(d):
    p = build_partition(power_map(d), circle_graph(n_vertices=d))
    h = boundary_interval_system(p, 0)
    assert len(h) == d
    for i in range(d):
        assert h.slopes(i) == pytest.approx([d])
