"""Scalar functions of the pole-to-pole synthesis and their root solvers.

``v(s)`` is the common duration of the interior bangs of an extremal whose
first bang lasts ``s``.  ``theta(s)`` is the rotation angle of the composed
double bang exp(v X-) exp(v X+), ``beta(s)`` the angle about the same axis
that separates the first switching point from the pre-image of the south
pole.  Pole-to-pole candidates solve F(s) = n or G(s) = n for integer n.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConsistencyError, DomainError
from .geometry import (
    NORTH,
    QUARTER_PI,
    SOUTH,
    TWO_PI,
    Arc,
    ModelParams,
    bang,
    compact,
    endpoint,
    schedule_time,
)

# ScalarEnv and ModelParams carry the same cached constants.
ScalarEnv = ModelParams

ROOT_XTOL = 1e-14
INTEGER_TOL = 1e-12


def _require_small(env: ModelParams) -> None:
    if env.alpha >= QUARTER_PI:
        raise DomainError(f"defined only for alpha < pi/4 (alpha={env.alpha})")


def _check_unit_interval(s, hi: float = math.pi) -> np.ndarray:
    arr = np.asarray(s, dtype=float)
    if np.any(arr < -1e-15) or np.any(arr > hi + 1e-15):
        raise DomainError(f"s must lie in [0, {hi}]")
    return np.clip(arr, 0.0, hi)


def _ret(x: np.ndarray):
    return float(x) if np.ndim(x) == 0 else x


# ---------------------------------------------------------------------------
# v and s*


def _v_den(s, env: ModelParams):
    # cos(s) + cot^2(a) written without cancellation near s = pi, a = pi/4
    return 2.0 * np.cos(0.5 * np.asarray(s)) ** 2 + math.cos(2 * env.alpha) / env.sin**2


def v_raw(s, env: ModelParams):
    """Interior-arc duration for a first bang of length s in [0, pi]."""
    s = _check_unit_interval(s)
    den = _v_den(s, env)
    with np.errstate(divide="ignore"):
        out = math.pi + 2.0 * np.arctan(np.sin(s) / den)
    # den vanishes only for alpha >= pi/4 at s = t1, where v reaches 2 pi
    out = np.where(den == 0.0, TWO_PI, out)
    return _ret(out)


def v_domain_ok(s: float, env: ModelParams, tol: float = 1e-12) -> bool:
    if not env.is_large:
        return -tol <= s <= math.pi + tol
    return (-tol <= s <= env.t1 + tol) or (math.pi - tol <= s <= env.t3 + tol)


def v(s: float, env: ModelParams) -> float:
    """Interior-arc duration with the admissible first-bang domain enforced.

    For alpha < pi/4 the domain is [0, pi].  For alpha >= pi/4 it is
    [0, t1] U [pi, t3], and the value at t1 and t3 is 2 pi by convention.
    """
    s = float(s)
    if not v_domain_ok(s, env):
        raise DomainError(f"s={s} outside the admissible first-bang domain")
    if not env.is_large:
        return float(v_raw(min(max(s, 0.0), math.pi), env))
    t1, t3 = env.t1, env.t3
    if abs(s - t1) <= 1e-12 or abs(s - t3) <= 1e-12:
        return TWO_PI
    den = float(_v_den(s, env))
    if den == 0.0:
        return TWO_PI
    return math.pi + 2.0 * math.atan(math.sin(s) / den)


def v_prime(s, env: ModelParams):
    """Derivative of v with respect to s."""
    s = np.asarray(s, dtype=float)
    c2 = env.cot2
    return _ret(2.0 * (1.0 + c2 * np.cos(s)) / (1.0 + 2.0 * c2 * np.cos(s) + c2 * c2))


def s_bar(env: ModelParams) -> float:
    """Fixed point of s* and maximiser of v, arccos(-tan^2 alpha)."""
    _require_small(env)
    return math.acos(-math.tan(env.alpha) ** 2)


def s_star(s, env: ModelParams):
    """Paired final-arc duration v(s) - s."""
    _require_small(env)
    s = _check_unit_interval(s)
    return _ret(np.asarray(v_raw(s, env)) - s)


# ---------------------------------------------------------------------------
# theta, beta, F, G


def theta(s, env: ModelParams):
    """Rotation angle of exp(v X-) exp(v X+)."""
    s = _check_unit_interval(s)
    half = 0.5 * np.asarray(v_raw(s, env))
    arg = np.sin(half) ** 2 * math.cos(2 * env.alpha) - np.cos(half) ** 2
    return _ret(2.0 * np.arccos(np.clip(arg, -1.0, 1.0)))


def beta(s, env: ModelParams):
    s = _check_unit_interval(s)
    arg = env.sin * env.cos * (1.0 - np.cos(s))
    return _ret(2.0 * np.arccos(np.clip(arg, -1.0, 1.0)))


def big_F(s, env: ModelParams):
    _require_small(env)
    return _ret(TWO_PI / np.asarray(theta(s, env)))


def big_G(s, env: ModelParams):
    _require_small(env)
    return _ret(2.0 * np.asarray(beta(s, env)) / np.asarray(theta(s, env)) + 1.0)


def f_min_point(env: ModelParams) -> float:
    """Unique interior minimiser of F, pi - arccos(tan^2 alpha)."""
    _require_small(env)
    return math.pi - math.acos(math.tan(env.alpha) ** 2)


def z_axis(s: float, env: ModelParams) -> np.ndarray:
    """Unit axis of exp(v X-) exp(v X+), proportional to (0, sin a, cot(v/2)).

    Written as (0, sin a sin(v/2), cos(v/2)) so it stays finite for every v
    in [pi, 2 pi].
    """
    half = 0.5 * float(v_raw(s, env))
    a = np.array([0.0, env.sin * math.sin(half), math.cos(half)])
    return a / np.linalg.norm(a)


def z_rotation(s: float, env: ModelParams) -> np.ndarray:
    """Single-rotation form of the double bang exp(v X-) exp(v X+).

    The composition turns by ``theta(s)`` clockwise about ``z_axis(s)``,
    i.e. it equals exp(theta Z) with Z the cross-product matrix of -z_axis.
    """
    from .geometry import rotation_matrix

    return rotation_matrix(-z_axis(s, env), float(theta(s, env)))


# ---------------------------------------------------------------------------
# pole-to-pole candidates


class CandidateKind(str, enum.Enum):
    TYPE1 = "TYPE1"
    TYPE2 = "TYPE2"


@dataclass(frozen=True)
class CandidateSolution:
    kind: CandidateKind
    s: float
    n: int
    schedule: tuple
    total_time: float
    start_sign: int = 1
    degenerate: bool = False

    def with_sign(self, sign: int) -> "CandidateSolution":
        if sign == self.start_sign:
            return self
        sched = tuple(Arc(-a.control, a.duration) for a in self.schedule)
        return CandidateSolution(self.kind, self.s, self.n, sched, self.total_time, sign, self.degenerate)

    @property
    def effective(self) -> tuple:
        """Schedule with zero-length arcs removed and equal neighbours merged."""
        return compact(self.schedule)

    def key(self) -> tuple:
        return tuple((a.control, round(a.duration, 9)) for a in self.effective)


def alternating_schedule(first: float, n: int, interior: float, last: float, start_sign: int = 1) -> tuple:
    """B_first (B_interior)^(n-1) B_last with alternating controls."""
    durs = [first] + [interior] * (n - 1) + [last]
    sign = 1 if start_sign > 0 else -1
    return tuple(bang(sign * (-1) ** i, d) for i, d in enumerate(durs))


def _make(kind: CandidateKind, env: ModelParams, s: float, n: int, last: float, degenerate=False) -> CandidateSolution:
    vs = float(v_raw(s, env))
    sched = alternating_schedule(s, n, vs, last)
    cand = CandidateSolution(kind, s, n, sched, schedule_time(sched), 1, degenerate)
    miss = float(np.linalg.norm(endpoint(env, sched, NORTH) - SOUTH))
    if miss > 1e-6:
        raise ConsistencyError(f"{kind.value} candidate s={s}, n={n} misses the south pole by {miss:.3e}")
    return cand


def is_integer_ratio(env: ModelParams) -> bool:
    r = env.ratio
    return abs(r - round(r)) <= INTEGER_TOL * max(1.0, r)


def _roots_on(fun, lo: float, hi: float, target: float) -> float | None:
    a, b = fun(lo) - target, fun(hi) - target
    if a == 0.0:
        return lo
    if b == 0.0:
        return hi
    if a * b > 0:
        return None
    return brentq(lambda x: fun(x) - target, lo, hi, xtol=ROOT_XTOL, rtol=8.9e-16, maxiter=200)


def solve_type1(env: ModelParams) -> list[CandidateSolution]:
    """Solutions (s, n) of F(s) = n, returned in pairs (s, s*(s)).

    F decreases on [0, s_min] and increases on [s_min, pi]; each integer
    level between min F and F(0) gives one root per branch, and the root on
    the right branch is s* of the root on the left.
    """
    _require_small(env)
    F = lambda x: float(big_F(x, env))
    sm = f_min_point(env)
    f0, fmin = F(0.0), F(sm)
    if is_integer_ratio(env):
        n = round(env.ratio)
        return [
            _make(CandidateKind.TYPE1, env, 0.0, n, math.pi, degenerate=True),
            _make(CandidateKind.TYPE1, env, math.pi, n, 0.0, degenerate=True),
        ]
    out: list[CandidateSolution] = []
    for n in range(math.ceil(fmin - 1e-12), math.floor(f0) + 1):
        if n < 1 or n > env.n_max:
            continue
        left = _roots_on(F, 0.0, sm, n)
        if left is None:
            continue
        right = float(s_star(left, env))
        # the pairing is exact; cross-check it against the right branch
        if abs(F(right) - n) > 1e-8:
            raise ConsistencyError(f"s* pairing failed: F({right}) = {F(right)} != {n}")
        out.append(_make(CandidateKind.TYPE1, env, left, n, right))
        out.append(_make(CandidateKind.TYPE1, env, right, n, left))
    return out


def solve_type2(env: ModelParams) -> list[CandidateSolution]:
    """Solutions (s, n) of G(s) = n; G decreases strictly on (0, pi)."""
    _require_small(env)
    G = lambda x: float(big_G(x, env))
    grid = np.linspace(0.0, math.pi, 257)
    gv = np.asarray(big_G(grid, env))
    if np.any(np.diff(gv) >= 0):
        raise ConsistencyError("G is not strictly decreasing on the sampling grid")
    g0, gpi = float(gv[0]), float(gv[-1])
    out: list[CandidateSolution] = []
    if is_integer_ratio(env):
        m = round(env.ratio)
        s_mid = _roots_on(G, 0.0, math.pi, m)
        out.append(_make(CandidateKind.TYPE2, env, math.pi, m - 1, math.pi, degenerate=True))
        out.append(_make(CandidateKind.TYPE2, env, s_mid, m, s_mid))
        return out
    for n in range(math.ceil(gpi), math.floor(g0) + 1):
        if n < 1 or n > env.n_max:
            continue
        s = _roots_on(G, 0.0, math.pi, n)
        if s is None:
            continue
        out.append(_make(CandidateKind.TYPE2, env, s, n, s))
    if len(out) != 2:
        raise ConsistencyError(f"expected two TYPE2 solutions, found {len(out)}")
    return out


def two_switch_competitor_time(alpha: float) -> float:
    """Total time of the two-switch symmetric pole-to-pole extremal (alpha >= pi/4)."""
    return TWO_PI + 2.0 * math.asin(1.0 / (2.0 * math.sin(alpha)))


def v_vec(s, env: ModelParams):
    """Vectorized v on the admissible domain, without domain checks.

    For alpha >= pi/4 the formula is continued through [pi, t3], where
    numerator and denominator are both negative; the value tends to 2 pi
    at t1 and t3.
    """
    s = np.asarray(s, dtype=float)
    den = _v_den(s, env)
    num = np.sin(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = math.pi + 2.0 * np.arctan(num / den)
    out = np.where(den == 0.0, TWO_PI, out)
    if env.is_large:
        near = (np.abs(s - env.t1) <= 1e-12) | (np.abs(s - env.t3) <= 1e-12)
        out = np.where(near, TWO_PI, out)
    return _ret(out)
