"""Bang-bang extremals B_s (B_v(s))^(n-1) B_t that reach a given point.

Every family is parameterized by the first-bang duration ``s``.  The point
reached just before the last bang is a smooth function P(s); the last bang
rotates about a known axis, so the target is reachable iff P(s) lies on the
target's circle about that axis.  Roots of that scalar condition are
bracketed on a grid and polished with Brent's method, then the last
duration follows from the rotation angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .geometry import (
    NORTH,
    TWO_PI,
    ModelParams,
    bang,
    bang_axis,
    compact,
    endpoint,
    rotate,
    rotation_angle,
    unit,
)

HIT_TOL = 1e-9


@dataclass(frozen=True)
class Extremal:
    schedule: tuple
    total_time: float
    first: float
    switches: int
    start_sign: int


def _prelast(env: ModelParams, sign: int, n: int, s: np.ndarray, interior: np.ndarray) -> np.ndarray:
    """Point reached after the first n arcs (first arc s, then n-1 arcs of ``interior``)."""
    y = np.broadcast_to(NORTH, s.shape + (3,))
    y = rotate(unit(bang_axis(env, sign)), s, y)
    sg = sign
    for _ in range(n - 1):
        sg = -sg
        y = rotate(unit(bang_axis(env, sg)), interior, y)
    return y


def _bracket_roots(fun: Callable[[float], float], grid: np.ndarray, values: np.ndarray) -> list[float]:
    roots = []
    for i in range(len(grid) - 1):
        a, b = values[i], values[i + 1]
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0.0:
            roots.append(brentq(fun, float(grid[i]), float(grid[i + 1]), xtol=1e-15, rtol=8.9e-16, maxiter=200))
    if values[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def bang_bang_extremals(
    env: ModelParams,
    target: np.ndarray,
    s_intervals: Sequence[tuple[float, float]],
    interior: Callable[[np.ndarray], np.ndarray],
    max_switches: int,
    signs: Iterable[int] = (1, -1),
    grid_points: int = 1024,
    single_bang_max: float = TWO_PI,
) -> list[Extremal]:
    """All extremals of the alternating family with at most ``max_switches`` switchings.

    ``interior(s)`` gives the interior/maximal last-arc duration for first
    bang ``s`` (vectorized).  The last arc is constrained to [0, interior(s)].
    """
    y = np.asarray(target, dtype=float)
    out: list[Extremal] = []
    for sign in signs:
        ax = unit(bang_axis(env, sign))
        # no switching: the target must sit on the bang circle through P_N
        t = rotation_angle(ax, NORTH, y)
        if t <= single_bang_max and np.linalg.norm(rotate(ax, t, NORTH) - y) < HIT_TOL:
            out.append(Extremal((bang(sign, t),), t, t, 0, sign))
        for n in range(1, max_switches + 1):
            last_sign = sign * (-1) ** n
            last_ax = unit(bang_axis(env, last_sign))
            level = float(np.dot(last_ax, y))
            for lo, hi in s_intervals:
                if hi - lo <= 0:
                    continue
                grid = np.linspace(lo, hi, grid_points)
                vals = _prelast(env, sign, n, grid, interior(grid)) @ last_ax - level

                def g(s: float, n=n) -> float:
                    sa = np.array([s])
                    return float(_prelast(env, sign, n, sa, interior(sa))[0] @ last_ax - level)

                for s in _bracket_roots(g, grid, vals):
                    vs = float(interior(np.array([s]))[0])
                    p = _prelast(env, sign, n, np.array([s]), np.array([vs]))[0]
                    t = rotation_angle(last_ax, p, y)
                    if t > vs + 1e-12:
                        # allow a wrap-around of numerically zero length
                        if TWO_PI - t < 1e-10:
                            t = 0.0
                        else:
                            continue
                    durs = [s] + [vs] * (n - 1) + [t]
                    sched = tuple(bang(sign * (-1) ** i, d) for i, d in enumerate(durs))
                    miss = float(np.linalg.norm(endpoint(env, sched) - y))
                    if miss > 1e-8:
                        continue
                    out.append(Extremal(sched, float(math.fsum(durs)), s, n, sign))
    return out


def best(extremals: Sequence[Extremal], tie_tol: float = 1e-9) -> list[Extremal]:
    if not extremals:
        return []
    tmin = min(e.total_time for e in extremals)
    keep = [e for e in extremals if e.total_time <= tmin + tie_tol]
    # drop duplicates that differ only by zero-length arcs
    seen, uniq = set(), []
    for e in sorted(keep, key=lambda e: (e.switches, e.start_sign, e.first)):
        key = tuple((a.control, round(a.duration, 7)) for a in compact(e.schedule, 1e-9))
        if key not in seen:
            seen.add(key)
            uniq.append(e)
    return uniq
