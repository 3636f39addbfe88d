import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochsynth.errors import DomainError
from blochsynth.geometry import NORTH, SOUTH, ModelParams, endpoint, mirror, named_points
from blochsynth.large_alpha import (
    BIFURCATION_ALPHA,
    COVERAGE_ALPHA_MIN,
    Region,
    classify,
    coverage_profile,
    coverage_time,
    cut_locus_trace,
    d_point_bifurcation,
    family_times,
    optimal_time,
    optimal_to,
    pole_schedules,
    singular_bound,
    singular_strategy,
    xi2_slope_at_zero,
)
from blochsynth.oracle import fibonacci_sphere, schedule_search
from blochsynth.small_alpha import local_optimality_test, switching_curve_point
from conftest import random_unit, rk4_schedule

ALPHAS = [math.pi / 4, 0.95, math.pi / 3, 1.2, 1.45]


@pytest.mark.parametrize("alpha", ALPHAS)
def test_pole_schedules(alpha):
    env = ModelParams(alpha)
    scheds = pole_schedules(env)
    assert len(scheds) == (2 if alpha == math.pi / 4 else 4)
    for s in scheds:
        assert sum(a.duration for a in s) == pytest.approx(2 * math.pi, abs=1e-12)
        assert np.linalg.norm(rk4_schedule(alpha, s, h=5e-3) - SOUTH) < 1e-7


@pytest.mark.parametrize("alpha", ALPHAS)
def test_synthesis_matches_extremal_search(alpha, rng):
    env = ModelParams(alpha)
    for y in random_unit(rng, 25):
        ans = optimal_to(y, env)
        ref = schedule_search(env, y)
        assert ans.total_time == pytest.approx(ref.total_time, abs=1e-8), ans.case_tag
        assert ref.total_time >= ans.total_time - 1e-9
        for tr in ans.trajectories:
            assert np.linalg.norm(tr.endpoint - y) < 1e-7


@settings(max_examples=40, deadline=None)
@given(st.floats(0.8, 1.5), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_mirror_symmetry(alpha, a, b, c):
    y = np.array([a, b, c])
    if np.linalg.norm(y) < 1e-2:
        return
    env = ModelParams(alpha)
    y = y / np.linalg.norm(y)
    assert optimal_time(mirror(y), env) == pytest.approx(optimal_time(y, env), abs=1e-9)
    r1, r2 = classify(y, env), classify(mirror(y), env)
    assert r1.base == r2.base and r1.sign == -r2.sign


def test_equator_point_on_the_x_axis():
    env = ModelParams(math.pi / 3)
    ans = optimal_to([1.0, 0.0, 0.0], env)
    assert ans.case_tag == "T3"
    assert [a.control for a in ans.schedules[0]] == [1, 0]
    assert ans.schedules[0][0].duration == pytest.approx(env.t1)


def test_named_point_tags():
    env = ModelParams(1.1)
    pts = named_points(env)
    assert classify(NORTH, env) == Region.POLE_N
    assert classify(SOUTH, env) == Region.POLE_S
    for name in ("A+", "B-", "D+", "O-"):
        assert classify(pts[name], env).value == "Point" + name
    assert optimal_to(NORTH, env).total_time == 0.0
    ans = optimal_to(SOUTH, env)
    assert ans.on_cut_locus and ans.total_time == pytest.approx(2 * math.pi)


def test_region_counts_stable_under_refinement():
    env = ModelParams(math.pi / 3)

    def fractions(n):
        tags = [classify(p, env).value for p in fibonacci_sphere(n)]
        return {t: tags.count(t) / n for t in set(tags)}

    f1, f2 = fractions(2000), fractions(8000)
    assert set(f1) == set(f2)
    assert {r.base for r in map(Region, f1)} == {"Omega1", "Omega2", "Omega3", "OmegaN"}
    for k in f1:
        assert f1[k] == pytest.approx(f2[k], abs=0.01)


def test_singular_strategy_on_the_equator():
    env = ModelParams(math.pi / 3)
    phi = 0.5 * math.acos(env.cos / env.sin)
    y = np.array([math.cos(phi), math.sin(phi), 0.0])
    trs = singular_strategy(y, env)
    assert len(trs) == 2
    assert trs[0].total_time == pytest.approx(schedule_search(env, y).total_time, abs=1e-9)
    assert singular_bound(env) == pytest.approx(math.acos(env.cos / env.sin) / env.cos)
    with pytest.raises(DomainError):
        singular_strategy(np.array([0.0, 1.0, 0.0]), env)


def test_bifurcation_threshold():
    a0 = BIFURCATION_ALPHA
    assert xi2_slope_at_zero(a0) == pytest.approx(0.0, abs=1e-15)
    assert xi2_slope_at_zero(a0 - 1e-6) > 0 > xi2_slope_at_zero(a0 + 1e-6)
    for a, case in ((0.9, "Case1"), (0.95, "Case1"), (1.0, "Case2"), (1.3, "Case2")):
        b = d_point_bifurcation(ModelParams(a))
        assert b.case == case
        assert b.tangent_cosine == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("alpha", [0.9, 1.0, 1.2])
def test_slope_sign_matches_curve_test(alpha):
    # the closed-form slope has the sign of the minus-field test just after D+
    env = ModelParams(alpha)
    p, d = switching_curve_point(1, 1, 1e-3, env)
    xi = local_optimality_test(p, d, env).xi_minus
    assert math.copysign(1, xi) == math.copysign(1, xi2_slope_at_zero(alpha))


@pytest.mark.parametrize("alpha", [0.95, math.pi / 3])
def test_cut_locus_points_are_equal_time(alpha):
    env = ModelParams(alpha)
    cl = cut_locus_trace(env, n_lines=20)
    assert cl.case == ("Case1" if alpha < BIFURCATION_ALPHA else "Case2")
    assert cl.unbracketed <= 1
    for p in cl.points[1:-1]:
        ta, tb = family_times(env, p)
        assert ta == pytest.approx(tb, abs=1e-8)
        assert optimal_time(p, env) == pytest.approx(ta, abs=1e-8)
        assert classify(p, env) == Region.OMEGAN_P


def test_coverage_time_closed_form():
    env = ModelParams(1.4)
    cov = coverage_time(env)
    assert cov.profile_max == pytest.approx(cov.T, abs=1e-12)
    betas = np.linspace(1e-4, math.acos(env.cos / env.sin) - 1e-4, 2001)
    prof = [coverage_profile(env.alpha, b) for b in betas]
    assert max(prof) == pytest.approx(cov.T, abs=1e-6)
    for p in cov.last_points:
        assert optimal_time(p, env) == pytest.approx(cov.T, abs=1e-9)
    with pytest.raises(DomainError):
        coverage_time(ModelParams(COVERAGE_ALPHA_MIN - 0.01))


def test_large_regime_rejects_small_alpha():
    with pytest.raises(DomainError):
        optimal_to(NORTH, ModelParams(0.5))
