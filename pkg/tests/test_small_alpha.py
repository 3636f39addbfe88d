import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochsynth.errors import DomainError
from blochsynth.geometry import SOUTH, ModelParams, endpoint
from blochsynth.oracle import schedule_search
from blochsynth.small_alpha import (
    Pattern,
    Verdict,
    alpha_for,
    classify_pattern,
    curve_optimality_profile,
    k_last,
    local_optimality_test,
    optimal_to_small,
    pole_to_pole_small,
    sweep_pattern_boundaries,
    switch_bounds,
    switching_curve,
    switching_curve_point,
    time_bounds,
)
from conftest import random_unit


@pytest.mark.parametrize("alpha", [0.07, 0.13, 0.2, 0.3, 0.5, 0.7])
def test_pole_to_pole_matches_extremal_search(alpha):
    env = ModelParams(alpha)
    res = pole_to_pole_small(env)
    ref = schedule_search(env, SOUTH, s_grid=4000)
    assert res.T_opt == pytest.approx(ref.total_time, abs=1e-9)
    for c in res.optimal:
        assert np.linalg.norm(endpoint(env, c.schedule) - SOUTH) < 1e-8
    assert res.bounds_ok


def test_alpha_013_structure():
    env = ModelParams(0.13)
    res = pole_to_pole_small(env)
    assert res.pattern == Pattern.A
    assert res.N_switch == 12
    assert {c.kind.value for c in res.optimal} == {"TYPE1"}
    assert len(res.all_candidates) == 8


@settings(max_examples=25, deadline=None)
@given(st.floats(0.03, 0.78))
def test_bounds_hold(alpha):
    env = ModelParams(alpha)
    res = pole_to_pole_small(env)
    lo, hi = time_bounds(alpha)
    nlo, nhi = switch_bounds(alpha)
    assert lo < res.T_opt < hi
    assert nlo <= res.N_switch < nhi


def test_alpha_for_inverts_ratio():
    a = alpha_for(12, 0.3)
    env = ModelParams(a)
    assert env.m == 12 and env.remainder == pytest.approx(0.3)


def test_pattern_classes():
    assert classify_pattern(ModelParams(alpha_for(10, 0.05))).pattern == Pattern.A
    assert classify_pattern(ModelParams(alpha_for(10, 0.9))).pattern == Pattern.C
    assert classify_pattern(ModelParams(math.pi / 20)).pattern == Pattern.DEGENERATE


def test_sweep_sequence_and_boundary():
    sw = sweep_pattern_boundaries(10, n_R=32)
    assert sw.sequence[0] == "A" and sw.sequence[-1] == "C"
    assert sw.r1 is not None and sw.r2 is not None and sw.r1 <= sw.r2
    eps = 1e-6
    assert classify_pattern(ModelParams(alpha_for(10, sw.r2 - eps))).type1_time is not None
    assert classify_pattern(ModelParams(alpha_for(10, sw.r2 + eps))).type1_time is None
    with pytest.raises(DomainError):
        sweep_pattern_boundaries(2)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 0.7), st.integers(1, 3), st.sampled_from([1, -1]), st.floats(0.05, math.pi - 0.05))
def test_switching_curve_tangent(alpha, k, eps, s):
    env = ModelParams(alpha)
    if k > env.n_max - 1:
        return
    p, d = switching_curve_point(k, eps, s, env)
    h = 1e-6
    fd = (switching_curve_point(k, eps, s + h, env)[0] - switching_curve_point(k, eps, s - h, env)[0]) / (2 * h)
    assert np.allclose(d, fd, atol=1e-6)
    assert np.linalg.norm(p) == pytest.approx(1.0)


def test_switching_curve_points_are_switchings():
    # the k-th curve point is the (k+1)-th arc start of an extremal with first bang s
    env = ModelParams(0.3)
    from blochsynth.geometry import bang
    from blochsynth.synthmath import v_raw

    s = 1.1
    vs = float(v_raw(s, env))
    for k in (1, 2, 3):
        sched = [bang((-1) ** k, s)] + [bang((-1) ** (k - j), vs) for j in range(1, k + 1)]
        assert np.allclose(endpoint(env, sched), switching_curve_point(k, 1, s, env)[0], atol=1e-12)


def test_k_last_separates_optimal_curves():
    for alpha in (0.13, 0.2, 0.3):
        env = ModelParams(alpha)
        prof = curve_optimality_profile(env, 101)
        kl = k_last(env)
        assert all(prof[k] == 1.0 for k in range(1, kl + 1))
        assert prof[kl + 1] < 1.0


def test_local_optimality_verdicts():
    env = ModelParams(0.3)
    p = np.array([0.0, 0.6, 0.8])
    assert local_optimality_test(p, np.array([0.0, 0.8, -0.6]), env).verdict in (Verdict.OPTIMAL, Verdict.NOT_OPTIMAL)
    assert local_optimality_test(p, np.zeros(3), env).verdict == Verdict.CONJUGATE
    with pytest.raises(DomainError):
        switching_curve(0, 1, 1.0, env)
    with pytest.raises(DomainError):
        switching_curve(1, 1, 4.0, env)
    with pytest.raises(DomainError):
        switching_curve_point(1, 0, 1.0, env)


@pytest.mark.parametrize("alpha", [0.2, 0.45])
def test_arbitrary_targets_match_extremal_search(alpha, rng):
    env = ModelParams(alpha)
    for y in random_unit(rng, 15):
        ans = optimal_to_small(y, env)
        assert ans.total_time == pytest.approx(schedule_search(env, y).total_time, abs=1e-8)
        for sch in ans.schedules:
            assert np.linalg.norm(endpoint(env, sch) - y) < 1e-8


def test_small_regime_rejects_large_alpha():
    with pytest.raises(DomainError):
        pole_to_pole_small(ModelParams(1.0))
