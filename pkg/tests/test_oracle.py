import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochsynth.dispatch import analytic_time
from blochsynth.errors import DomainError
from blochsynth.geometry import NORTH, SOUTH, ModelParams, endpoint, gamma, rotate
from blochsynth.oracle import (
    E1,
    _cube_bins,
    _next_zero,
    fibonacci_sphere,
    icosphere,
    mesh_spacing,
    min_time_grid,
    schedule_search,
)


@settings(max_examples=60, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(0, 2 * math.pi))
def test_next_zero_against_dense_scan(a, b, c, phi):
    k = np.array([a, b, c])
    if np.linalg.norm(k) < 1e-2:
        return
    k = k / np.linalg.norm(k)
    m = np.array([0.0, math.cos(phi), math.sin(phi)])  # e1 . m = 0
    t = float(_next_zero(k, m))
    ts = np.linspace(1e-6, 2 * math.pi, 200001)
    f = rotate(k, ts, np.broadcast_to(m, ts.shape + (3,))) @ E1
    assert abs(float(rotate(k, t, m) @ E1)) < 1e-9
    change = ts[np.nonzero(f[:-1] * f[1:] < 0)[0]]
    if len(change):
        # no sign change is skipped before the returned zero
        assert t <= change[0] + 1e-4


def test_search_known_points():
    env = ModelParams(math.pi / 3)
    assert schedule_search(env, gamma(env, 1, 1.0)).total_time == pytest.approx(1.0, abs=1e-12)
    assert schedule_search(env, SOUTH).total_time == pytest.approx(2 * math.pi, abs=1e-9)
    assert schedule_search(env, NORTH).total_time == 0.0
    small = ModelParams(0.13)
    r = schedule_search(small, SOUTH, s_grid=10000)
    assert r.total_time == pytest.approx(38.0678546, abs=1e-6)
    assert np.linalg.norm(endpoint(small, r.schedule) - SOUTH) < 1e-8
    with pytest.raises(DomainError):
        schedule_search(env, SOUTH, s_grid=100)


def test_search_without_singular_family_is_slower_in_singular_region():
    env = ModelParams(math.pi / 3)
    y = np.array([0.0, -0.2, -0.98])
    y = y / np.linalg.norm(y)
    with_s = schedule_search(env, y).total_time
    without = schedule_search(env, y, include_singular=False).total_time
    assert without >= with_s - 1e-12


@pytest.mark.parametrize("level", [0, 1, 2, 3])
def test_icosphere(level):
    v, f = icosphere(level)
    assert len(v) == 10 * 4**level + 2
    assert len(f) == 20 * 4**level
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0)
    edges = {tuple(sorted(e)) for t in f for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))}
    assert len(v) - len(edges) + len(f) == 2
    assert mesh_spacing(v, f) < 1.4 / 2**level


def test_fibonacci_sphere_is_balanced():
    p = fibonacci_sphere(4000)
    assert np.allclose(np.linalg.norm(p, axis=1), 1.0)
    assert np.allclose(p.mean(axis=0), 0.0, atol=1e-3)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 50))
def test_cube_bins_in_range(n):
    p = fibonacci_sphere(500).T
    cell, off = _cube_bins(p, n, offsets=True)
    assert cell.min() >= 0 and cell.max() < 6 * n * n
    assert np.all(off <= 0.5 + 1e-12)


@pytest.mark.parametrize("alpha", [0.3, math.pi / 3])
def test_front_grid_is_never_faster_than_optimal(alpha):
    env = ModelParams(alpha)
    grid = min_time_grid(env, level=3, dt=0.01)
    assert grid.converged
    for i in range(0, len(grid.nodes), 7):
        lag = grid.value[i] - analytic_time(env, grid.witness[i])
        assert lag >= -1e-9
        assert lag <= grid.error_bound
    assert grid.to_csv().splitlines()[0] == "x,y,z,value"
    assert len(grid.to_csv().splitlines()) == len(grid.nodes) + 1


def test_front_grid_arguments():
    env = ModelParams(1.0)
    with pytest.raises(DomainError):
        min_time_grid(env, level=2)
    with pytest.raises(DomainError):
        min_time_grid(env, dt=0.05)


def test_front_grid_pole_values():
    env = ModelParams(math.pi / 3)
    grid = min_time_grid(env, level=5, dt=0.005)
    assert grid.value_at(NORTH) == 0.0
    assert grid.value_at(SOUTH) == pytest.approx(2 * math.pi, abs=0.05)


def test_error_bound_shrinks_under_refinement():
    env = ModelParams(1.0)
    coarse = min_time_grid(env, level=3, dt=0.01)
    fine = min_time_grid(env, level=4, dt=0.005)
    assert fine.error_bound < coarse.error_bound
