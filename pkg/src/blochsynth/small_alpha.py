"""Pole-to-pole optimal control and synthesis structure for alpha < pi/4."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ConsistencyError, DomainError
from .extremals import Extremal, bang_bang_extremals, best
from .geometry import (
    NORTH,
    QUARTER_PI,
    SOUTH,
    ModelParams,
    bang_axis,
    compact,
    endpoint,
    rotate,
    switch_count,
    unit,
)
from .synthmath import (
    CandidateKind,
    CandidateSolution,
    is_integer_ratio,
    solve_type1,
    solve_type2,
    v_prime,
    v_raw,
)

TIE_TOL = 1e-9


class Pattern(str, enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    DEGENERATE = "Degenerate"


def _require_small(env: ModelParams) -> None:
    if env.alpha >= QUARTER_PI:
        raise DomainError(f"alpha must be below pi/4 (alpha={env.alpha})")


def alpha_for(m: int, R: float) -> float:
    """Angle with pi/(2 alpha) = m + R."""
    return math.pi / (2.0 * (m + R))


def time_bounds(alpha: float) -> tuple[float, float]:
    """Open interval containing the optimal pole-to-pole time."""
    c = math.pi**2 / (2.0 * alpha)
    return c - 2.0 * math.pi, c + math.pi


def switch_bounds(alpha: float) -> tuple[float, float]:
    """Half-open interval [lo, hi) containing the optimal switching count."""
    r = math.pi / (2.0 * alpha)
    return r - 1.0, r + 1.0


# ---------------------------------------------------------------------------
# pole to pole


@dataclass(frozen=True)
class PoleToPoleResult:
    optimal: list
    all_candidates: list
    pattern: Pattern
    T_opt: float
    N_switch: int
    bounds_ok: bool = True
    notes: tuple = field(default_factory=tuple)


def _pattern_from(env: ModelParams, t1: list, t2: list) -> Pattern:
    if is_integer_ratio(env):
        return Pattern.DEGENERATE
    if not t1:
        return Pattern.C
    best1 = min(c.total_time for c in t1)
    best2 = min(c.total_time for c in t2)
    # an exact tie is reported as A (TYPE1 optimal, not strictly)
    return Pattern.A if best1 <= best2 + TIE_TOL else Pattern.B


def pole_to_pole_small(env: ModelParams) -> PoleToPoleResult:
    """Collect TYPE1/TYPE2 candidates for both starting signs and keep the fastest."""
    _require_small(env)
    t1, t2 = solve_type1(env), solve_type2(env)
    cands: list[CandidateSolution] = []
    for c in t1 + t2:
        for sign in (1, -1):
            cc = c.with_sign(sign)
            miss = float(np.linalg.norm(endpoint(env, cc.schedule) - SOUTH))
            if miss > 1e-6:
                raise ConsistencyError(f"candidate {cc.kind.value} s={cc.s} misses P_S by {miss:.2e}")
            cands.append(cc)
    tmin = min(c.total_time for c in cands)
    optimal, seen = [], set()
    for c in cands:
        if c.total_time <= tmin + TIE_TOL and c.key() not in seen:
            seen.add(c.key())
            optimal.append(c)
    n_sw = switch_count(optimal[0].schedule)
    lo, hi = time_bounds(env.alpha)
    nlo, nhi = switch_bounds(env.alpha)
    ok = lo < tmin < hi and nlo <= n_sw < nhi
    return PoleToPoleResult(optimal, cands, _pattern_from(env, t1, t2), tmin, n_sw, ok)


@dataclass(frozen=True)
class PatternReport:
    pattern: Pattern
    m: int
    R: float
    type1_time: float | None
    type2_time: float


def classify_pattern(env: ModelParams) -> PatternReport:
    _require_small(env)
    t1, t2 = solve_type1(env), solve_type2(env)
    return PatternReport(
        _pattern_from(env, t1, t2),
        env.m,
        env.remainder,
        min((c.total_time for c in t1), default=None),
        min(c.total_time for c in t2),
    )


def _pattern_at(m: int, R: float) -> Pattern:
    return classify_pattern(ModelParams(alpha_for(m, R))).pattern


def _boundary(m: int, lo: float, hi: float, left: Pattern, tol: float) -> float:
    """Bisect for the R where the pattern stops being ``left``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _pattern_at(m, mid) == left:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PatternSweep:
    m: int
    R: list
    patterns: list
    sequence: list
    r1: float | None
    r2: float | None

    @property
    def gap(self) -> float | None:
        if self.r1 is None or self.r2 is None:
            return None
        return self.r2 - self.r1


def sweep_pattern_boundaries(m: int, n_R: int = 64, tol: float = 1e-10) -> PatternSweep:
    """Scan R in (0, 1) at fixed m; measure the A/B and B/C pattern boundaries.

    ``r1`` is where TYPE1 candidates stop being optimal, ``r2`` where they
    stop existing.  Without a B band the two coincide.
    """
    if m < 3:
        raise DomainError("the remainder sweep needs m >= 3")
    Rs = [(i + 0.5) / n_R for i in range(n_R)]
    pats = [_pattern_at(m, R) for R in Rs]
    seq: list[Pattern] = []
    for p in pats:
        if not seq or seq[-1] != p:
            seq.append(p)
    r1 = r2 = None
    idx_a = [i for i, p in enumerate(pats) if p == Pattern.A]
    idx_c = [i for i, p in enumerate(pats) if p == Pattern.C]
    if idx_a and idx_a[-1] + 1 < n_R:
        i = idx_a[-1]
        r1 = _boundary(m, Rs[i], Rs[i + 1], Pattern.A, tol)
    if idx_c and idx_c[0] > 0:
        i = idx_c[0]
        lo = Rs[i - 1]
        # r2: last R with TYPE1 solutions present
        hi = Rs[i]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if _pattern_at(m, mid) == Pattern.C:
                hi = mid
            else:
                lo = mid
        r2 = 0.5 * (lo + hi)
    return PatternSweep(m, Rs, [p.value for p in pats], [p.value for p in seq], r1, r2)


# ---------------------------------------------------------------------------
# switching curves


class Verdict(str, enum.Enum):
    OPTIMAL = "locally_optimal"
    NOT_OPTIMAL = "not_locally_optimal"
    CONJUGATE = "conjugate"


@dataclass(frozen=True)
class LocalOptimality:
    xi_plus: float
    xi_minus: float
    verdict: Verdict

    @property
    def locally_optimal(self) -> bool:
        return self.verdict == Verdict.OPTIMAL


def local_optimality_test(point: np.ndarray, tangent: np.ndarray, env: ModelParams) -> LocalOptimality:
    """Do both bang fields cross the curve through ``point`` in the same direction?"""
    p = np.asarray(point, dtype=float)
    d = np.asarray(tangent, dtype=float)
    xp = float(np.linalg.det(np.array([p, d, np.cross(bang_axis(env, 1), p)])))
    xm = float(np.linalg.det(np.array([p, d, np.cross(bang_axis(env, -1), p)])))
    if abs(xp) < 1e-12 and abs(xm) < 1e-12:
        return LocalOptimality(xp, xm, Verdict.CONJUGATE)
    return LocalOptimality(xp, xm, Verdict.OPTIMAL if xp * xm > 0 else Verdict.NOT_OPTIMAL)


@dataclass(frozen=True)
class SwitchingCurvePoint:
    k: int
    eps: int
    s: float
    point: np.ndarray
    tangent: np.ndarray
    optimality: LocalOptimality

    @property
    def locally_optimal(self) -> bool:
        return self.optimality.locally_optimal


def switching_curve_point(k: int, eps: int, s: float, env: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """C_k^eps(s) and its s-derivative by the product rule on the rotations."""
    if eps not in (1, -1):
        raise DomainError("eps must be +1 or -1")
    vs = float(v_raw(s, env))
    dv = float(v_prime(s, env))
    # build from the first arc outwards: arcs -eps*(-1)^(k-1) ... ending with eps
    signs = [eps * (-1) ** (k - j) for j in range(k + 1)]
    # signs[0] is the first bang (duration s), the others last v(s)
    ax0 = unit(bang_axis(env, signs[0]))
    y = rotate(ax0, s, NORTH)
    dy = np.cross(ax0, y)
    for sg in signs[1:]:
        ax = unit(bang_axis(env, sg))
        y_new = rotate(ax, vs, y)
        dy = rotate(ax, vs, dy) + dv * np.cross(ax, y_new)
        y = y_new
    return y, dy


def switching_curve(k: int, eps: int, s: float, env: ModelParams) -> SwitchingCurvePoint:
    """Point of the k-th switching curve with its local-optimality verdict."""
    kmax = max(env.n_max - 1, 1)
    if k < 1 or (not env.is_large and k > kmax) or (env.is_large and k != 1):
        raise DomainError(f"curve index k={k} out of range")
    if not (0.0 <= s <= math.pi):
        raise DomainError("s must lie in [0, pi]")
    p, d = switching_curve_point(k, eps, s, env)
    return SwitchingCurvePoint(k, eps, float(s), p, d, local_optimality_test(p, d, env))


def k_last(env: ModelParams) -> int:
    """Index of the last switching curve expected to be locally optimal."""
    return math.floor((math.pi - env.alpha) / (2.0 * env.alpha)) - 1


def curve_optimality_profile(env: ModelParams, s_points: int = 401) -> dict[int, float]:
    """Fraction of an interior s-grid on which each C_k^+ tests locally optimal."""
    _require_small(env)
    grid = np.linspace(0.0, math.pi, s_points)[1:-1]
    out = {}
    for k in range(1, env.n_max):
        ok = [switching_curve(k, 1, float(s), env).locally_optimal for s in grid]
        out[k] = float(np.mean(ok))
    return out


# ---------------------------------------------------------------------------
# arbitrary targets


@dataclass(frozen=True)
class SmallAlphaAnswer:
    extremals: list
    total_time: float

    @property
    def schedules(self) -> list:
        return [e.schedule for e in self.extremals]


def optimal_to_small(y: np.ndarray, env: ModelParams, grid_points: int = 1024) -> SmallAlphaAnswer:
    """Fastest candidate extremal from P_N to an arbitrary point.

    Candidates are bang-bang with first bang s in [0, pi], interior bangs
    of length v(s), a last bang of at most v(s) and at most N_M switchings.
    """
    _require_small(env)
    y = np.asarray(y, dtype=float)
    if np.linalg.norm(y - NORTH) < 1e-12:
        return SmallAlphaAnswer([Extremal((), 0.0, 0.0, 0, 1)], 0.0)
    ext = bang_bang_extremals(
        env,
        y,
        [(0.0, math.pi)],
        lambda s: np.asarray(v_raw(s, env)),
        env.n_max,
        grid_points=grid_points,
        single_bang_max=math.pi,
    )
    if not ext:
        raise ConsistencyError("no candidate extremal reaches the target")
    top = best(ext)
    return SmallAlphaAnswer(top, top[0].total_time)
