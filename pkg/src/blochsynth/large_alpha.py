"""Time-optimal synthesis from the north pole for alpha >= pi/4.

The sphere is cut by sixteen arcs into eight open regions.  Writing n+ and
n- for the unit axes of the +1 and -1 bangs, the arcs of the "+" family lie
on four curves:

* the +1 circle through P_N, {y . n+ = cos a}: P_N A+, A+ D+ and D+ B+;
* the -1 circle through A+, B+ and P_S, {y . n- = -cos a}: A+ B+ and B+ P_S;
* the equator between A+ and B+ (split at O+): the singular arcs;
* the meridian y2 = 0 below D+: D+ P_S.

The "-" family is the image under the half-turn about z, which also swaps
the sign of the control.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ConsistencyError, DomainError
from .extremals import Extremal, bang_bang_extremals, best
from .geometry import (
    LOCUS_TOL,
    NORTH,
    SOUTH,
    TWO_PI,
    ModelParams,
    Trajectory,
    bang,
    bang_axis,
    compact,
    endpoint,
    flip,
    gamma,
    mirror,
    named_points,
    rotate,
    rotation_angle,
    schedule_time,
    simulate,
    singular,
    unit,
)
from .small_alpha import local_optimality_test, switching_curve_point
from .synthmath import v_vec

HIT_TOL = 1e-7
TIE_TOL = 1e-9


def _require_large(env: ModelParams) -> None:
    if not env.is_large:
        raise DomainError(f"alpha must be at least pi/4 (alpha={env.alpha})")


# ---------------------------------------------------------------------------
# regions


class Region(str, enum.Enum):
    POLE_N = "PoleN"
    POLE_S = "PoleS"
    POINT_A_P = "PointA+"
    POINT_A_M = "PointA-"
    POINT_B_P = "PointB+"
    POINT_B_M = "PointB-"
    POINT_O_P = "PointO+"
    POINT_O_M = "PointO-"
    POINT_D_P = "PointD+"
    POINT_D_M = "PointD-"
    ARC_PNA_P = "ArcPNA+"
    ARC_PNA_M = "ArcPNA-"
    ARC_AB_P = "ArcAB+"
    ARC_AB_M = "ArcAB-"
    ARC_AO_P = "ArcAO+"
    ARC_AO_M = "ArcAO-"
    ARC_OB_P = "ArcOB+"
    ARC_OB_M = "ArcOB-"
    ARC_AD_P = "ArcAD+"
    ARC_AD_M = "ArcAD-"
    ARC_DB_P = "ArcDB+"
    ARC_DB_M = "ArcDB-"
    ARC_BPS_P = "ArcBPS+"
    ARC_BPS_M = "ArcBPS-"
    ARC_DPS_P = "ArcDPS+"
    ARC_DPS_M = "ArcDPS-"
    OMEGA1_P = "Omega1+"
    OMEGA1_M = "Omega1-"
    OMEGA2_P = "Omega2+"
    OMEGA2_M = "Omega2-"
    OMEGA3_P = "Omega3+"
    OMEGA3_M = "Omega3-"
    OMEGAN_P = "OmegaN+"
    OMEGAN_M = "OmegaN-"

    @property
    def base(self) -> str:
        return self.value.rstrip("+-")

    @property
    def sign(self) -> int:
        if self.value.endswith("+"):
            return 1
        if self.value.endswith("-"):
            return -1
        return 0

    @classmethod
    def of(cls, base: str, sign: int) -> "Region":
        return cls(base + ("+" if sign > 0 else "-"))


def _axes(env: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    return unit(bang_axis(env, 1)), unit(bang_axis(env, -1))


def gamma_parameter(env: ModelParams, y: np.ndarray) -> float:
    """Time t in [0, 2pi) with gamma+(t) = y, for y on the +1 circle through P_N."""
    s, c = env.sin, env.cos
    return math.atan2(-y[1] / s, (y[2] - c * c) / (s * s)) % TWO_PI


def _longitude(y: np.ndarray) -> float:
    return math.atan2(y[1], y[0])


def _phi_b(env: ModelParams) -> float:
    """Longitude of B+ (A+ sits at minus this value)."""
    return math.acos(min(1.0, env.cos / env.sin))


def _arc_plus(z: np.ndarray, env: ModelParams, tol: float) -> str | None:
    """Arc of the '+' family containing z, or None."""
    npl, nmi = _axes(env)
    c = env.cos
    if abs(float(z @ npl) - c) <= tol:
        if z[2] > tol and z[1] < -tol:
            return "ArcPNA"
        if z[2] < -tol and z[1] < -tol:
            return "ArcAD"
        if z[2] < -tol and z[1] > tol:
            return "ArcDB"
    if abs(float(z @ nmi) + c) <= tol:
        if z[2] > tol:
            return "ArcAB"
        if z[2] < -tol and z[1] > tol:
            return "ArcBPS"
    if abs(z[2]) <= tol and z[0] > 0:
        phi = _longitude(z)
        pb = _phi_b(env)
        if -pb < phi < 0:
            return "ArcAO"
        if 0 < phi < pb:
            return "ArcOB"
    if abs(z[1]) <= tol and z[0] > 0 and z[2] < math.cos(2 * env.alpha) - tol:
        return "ArcDPS"
    return None


def _open_plus(z: np.ndarray, env: ModelParams) -> str | None:
    npl, nmi = _axes(env)
    c = env.cos
    if z[2] > 0 and z @ nmi < -c:
        return "Omega2"
    if z[2] < 0 and z @ npl > c:
        return "Omega3"
    if z[1] > 0 and z @ npl < c and z @ nmi < -c:
        return "OmegaN"
    return None


def _omega1_sign(y: np.ndarray, env: ModelParams) -> int:
    """Side of the big cut separating Omega1+ (which contains (0,1,0)) from Omega1-."""
    if y[2] < 0:
        return 1 if y[1] > 0 else -1
    if y[2] == 0:
        phi = _longitude(y)
        pb = _phi_b(env)
        return 1 if pb < phi < math.pi - pb else -1
    # north: compare with the point of P_N A+ at the same height
    s, c = env.sin, env.cos
    ct = min(1.0, max(-1.0, (y[2] - c * c) / (s * s)))
    p = gamma(env, 1, math.acos(ct))
    return 1 if p[0] * y[1] - p[1] * y[0] > 0 else -1


def classify(y, env: ModelParams, tol: float = LOCUS_TOL) -> Region:
    """Region tag of a point; named points first, then arcs, then open regions."""
    _require_large(env)
    y = np.asarray(y, dtype=float)
    y = y / np.linalg.norm(y)
    pts = named_points(env)
    for name, tag in (("PN", Region.POLE_N), ("PS", Region.POLE_S)):
        if np.linalg.norm(y - pts[name]) <= tol:
            return tag
    for letter in "OABD":
        for sg in "+-":
            key = letter + sg
            if key in pts and np.linalg.norm(y - pts[key]) <= tol:
                return Region("Point" + key)
    for sign in (1, -1):
        z = y if sign > 0 else mirror(y)
        base = _arc_plus(z, env, tol)
        if base is not None:
            return Region.of(base, sign)
    for sign in (1, -1):
        z = y if sign > 0 else mirror(y)
        base = _open_plus(z, env)
        if base is not None:
            return Region.of(base, sign)
    return Region.of("Omega1", _omega1_sign(y, env))


# ---------------------------------------------------------------------------
# optimal trajectories


@dataclass(frozen=True)
class SynthesisAnswer:
    trajectories: list
    case_tag: str
    on_cut_locus: bool
    region: Region
    total_time: float

    @property
    def schedules(self) -> list:
        return [tr.schedule for tr in self.trajectories]


def singular_bound(env: ModelParams) -> float:
    """Longest optimal singular arc, from A+ to O+."""
    return _phi_b(env) / env.cos


def _equator(phi: float) -> np.ndarray:
    return np.array([math.cos(phi), math.sin(phi), 0.0])


def _check_singular(env: ModelParams, s: float) -> None:
    if s < -1e-12 or s > singular_bound(env) + 1e-9:
        raise ConsistencyError(f"singular duration {s} outside [0, {singular_bound(env)}]")


def _singular_plus(z: np.ndarray, env: ModelParams, last: int | None) -> list[tuple]:
    """B_t1 S_s [B_t] schedules ('+' orientation) ending at z."""
    npl, nmi = _axes(env)
    c, s_ = env.cos, env.sin
    pb = _phi_b(env)
    t1 = env.t1
    if last is None:  # on A+O+: stop on the equator
        phi = _longitude(z)
        sig = (phi + pb) / c
        _check_singular(env, sig)
        return [(bang(1, t1), singular(max(sig, 0.0)))]
    if last == 0:  # on O+B+: leave at the mirrored longitude with either bang
        phi0 = -_longitude(z)
        sig = (phi0 + pb) / c
        _check_singular(env, sig)
        e0 = _equator(phi0)
        out = []
        for sg, ax in ((1, npl), (-1, nmi)):
            t = rotation_angle(ax, e0, z)
            out.append((bang(1, t1), singular(sig), bang(sg, t)))
        return out
    ax = npl if last > 0 else nmi
    # the bang circle about ax through z meets the A+O+ arc at longitude phi0
    cphi = float(z @ ax) / (s_ * (1.0 if last > 0 else -1.0))
    phi0 = -math.acos(min(1.0, max(-1.0, cphi)))
    sig = (phi0 + pb) / c
    _check_singular(env, sig)
    t = rotation_angle(ax, _equator(phi0), z)
    return [(bang(1, t1), singular(sig), bang(last, t))]


def _two_bang_plus(z: np.ndarray, env: ModelParams) -> tuple:
    """B_t (+1) B_t' (-1) with t in [0, t1) ending at z (Omega1+ and D-P_S)."""
    npl, nmi = _axes(env)
    c, s_ = env.cos, env.sin
    ct = (float(z @ nmi) / c - math.cos(2 * env.alpha)) / (2 * s_ * s_)
    t = math.acos(min(1.0, max(-1.0, ct)))
    if t >= env.t1 + 1e-12:
        raise ConsistencyError(f"first switch {t} beyond t1 = {env.t1}")
    t2 = rotation_angle(nmi, gamma(env, 1, t), z)
    return (bang(1, t), bang(-1, t2))


def _bang_bang_in_north_region(z: np.ndarray, env: ModelParams) -> list[Extremal]:
    """Fastest bang-bang extremals with at most two switchings (used in Omega_N)."""
    t1, t3 = env.t1, env.t3
    ext = bang_bang_extremals(
        env,
        z,
        [(0.0, t1), (math.pi, t3)],
        lambda s: np.asarray(v_vec(s, env)),
        2,
        grid_points=512,
    )
    return best(ext, TIE_TOL)


def _answer_plus(base: str, z: np.ndarray, env: ModelParams) -> tuple[str, list[tuple]]:
    """Synthesis case and schedules for a '+'-family tag at point z."""
    _, nmi = _axes(env)
    t1, t2, t3 = env.t1, env.t2, env.t3
    A = named_points(env)["A+"]
    if base == "ArcPNA":
        return "T1", [(bang(1, gamma_parameter(env, z)),)]
    if base == "PointA":
        return "T1", [(bang(1, t1),)]
    if base == "ArcAB":
        return "T2", [(bang(1, t1), bang(-1, rotation_angle(nmi, A, z)))]
    if base in ("ArcAO", "PointO"):
        return "T3", _singular_plus(z, env, None)
    if base == "ArcOB":
        return "T4", _singular_plus(z, env, 0)
    if base in ("ArcAD", "PointD"):
        return "T5", [(bang(1, gamma_parameter(env, z) if base == "ArcAD" else math.pi),)]
    if base == "ArcDB":
        return "T6", [(bang(1, gamma_parameter(env, z)),)]
    if base in ("ArcBPS", "PointB"):
        t = t2 if base == "PointB" else rotation_angle(nmi, A, z)
        return "T7", [(bang(1, t1), bang(-1, t)), compact((bang(1, t3), bang(-1, t - t2)))]
    if base in ("Omega1", "ArcDPS"):
        return "T8", [_two_bang_plus(z, env)]
    if base == "Omega2":
        return "T9", _singular_plus(z, env, -1)
    if base == "Omega3":
        return "T10", _singular_plus(z, env, 1)
    if base == "OmegaN":
        return "T12", [e.schedule for e in _bang_bang_in_north_region(z, env)]
    raise ConsistencyError(f"no synthesis case for {base}")


def _trajectories(env: ModelParams, schedules: list[tuple], y: np.ndarray, samples: int) -> list[Trajectory]:
    out = []
    for sched in schedules:
        sched = compact(sched, 0.0)
        miss = float(np.linalg.norm(endpoint(env, sched) - y))
        if miss > HIT_TOL:
            raise ConsistencyError(f"schedule {sched} misses the target by {miss:.3e}")
        out.append(simulate(env, sched, NORTH, samples))
    times = [tr.total_time for tr in out]
    if max(times) - min(times) > TIE_TOL:
        raise ConsistencyError(f"optimal trajectories disagree on the time: {times}")
    return out


def pole_schedules(env: ModelParams) -> list[tuple]:
    """Optimal controls from P_N to P_S: one switch on the equator."""
    t1, t3 = env.t1, env.t3
    out = [(bang(1, t1), bang(-1, t3)), (bang(1, t3), bang(-1, t1))]
    out += [flip(s) for s in out]
    uniq, seen = [], set()
    for s in out:
        key = tuple((a.control, round(a.duration, 12)) for a in s)
        if key not in seen:
            seen.add(key)
            uniq.append(s)
    return uniq


def optimal_to(y, env: ModelParams, samples_per_arc: int = 16) -> SynthesisAnswer:
    """All time-optimal trajectories from P_N to ``y``."""
    _require_large(env)
    y = np.asarray(y, dtype=float)
    y = y / np.linalg.norm(y)
    region = classify(y, env)
    if region == Region.POLE_N:
        trs = [simulate(env, (), NORTH, samples_per_arc)]
        return SynthesisAnswer(trs, "T0", False, region, 0.0)
    if region == Region.POLE_S:
        trs = _trajectories(env, pole_schedules(env), SOUTH, samples_per_arc)
        return SynthesisAnswer(trs, "T11", True, region, trs[0].total_time)
    base, sign = region.base, region.sign
    if base == "ArcDPS":
        # the meridian below D- is reached like Omega1+ (and vice versa)
        sign = -sign
    z = y if sign > 0 else mirror(y)
    case, scheds = _answer_plus(base, z, env)
    if sign < 0:
        scheds = [flip(s) for s in scheds]
        case = case + "'"
    trs = _trajectories(env, scheds, y, samples_per_arc)
    return SynthesisAnswer(trs, case, len(trs) > 1, region, trs[0].total_time)


def optimal_time(y, env: ModelParams) -> float:
    return optimal_to(y, env, samples_per_arc=1).total_time


def singular_strategy(y, env: ModelParams, samples_per_arc: int = 16) -> list[Trajectory]:
    """Optimal trajectories through a singular arc (closure of Omega2 and Omega3)."""
    _require_large(env)
    region = classify(y, env)
    allowed = {"Omega2", "Omega3", "ArcAO", "ArcOB", "ArcAB", "PointO"}
    if region.base not in allowed:
        raise DomainError(f"{region.value} is not reached through a singular arc")
    if math.isclose(env.alpha, math.pi / 4, abs_tol=1e-15):
        raise DomainError("at alpha = pi/4 the singular arcs degenerate to a point")
    z = np.asarray(y, dtype=float) if region.sign >= 0 else mirror(y)
    if region.base == "ArcAB":
        scheds = _singular_plus(z, env, -1)
    else:
        _, scheds = _answer_plus(region.base, z, env)
    if region.sign < 0:
        scheds = [flip(s) for s in scheds]
    return _trajectories(env, scheds, np.asarray(y, dtype=float), samples_per_arc)


# ---------------------------------------------------------------------------
# bifurcation at D+


BIFURCATION_ALPHA = math.asin(2.0 ** -0.25)


def xi2_slope_at_zero(alpha: float) -> float:
    """Derivative at s = 0 of the determinant pairing the curve tangent with X-."""
    s, c = math.sin(alpha), math.cos(alpha)
    return 4.0 * c * s * s * (1.0 - 2.0 * s**4)


@dataclass(frozen=True)
class Bifurcation:
    case: str
    alpha: float
    threshold: float
    s_loss: float | None
    curve: np.ndarray
    start: np.ndarray
    tangent_cosine: float


def d_point_bifurcation(env: ModelParams, samples: int = 200) -> Bifurcation:
    """Behaviour of the first switching curve C1+(s) = e^{v X+} e^{s X-} P_N near D+.

    Case1: the curve is locally optimal near D+ until ``s_loss``.
    Case2: it is not, and an overlap curve starts at D+.
    """
    _require_large(env)
    D = named_points(env)["D+"]
    npl, _ = _axes(env)
    # tangent of the curve at D+ against the +1 bang direction there
    p0, d0 = switching_curve_point(1, 1, 1e-7, env)
    x_plus = np.cross(npl, D)
    cosang = float(abs(d0 @ x_plus) / (np.linalg.norm(d0) * np.linalg.norm(x_plus)))
    if env.alpha >= BIFURCATION_ALPHA:
        return Bifurcation("Case2", env.alpha, BIFURCATION_ALPHA, None, D[None, :], D, cosang)

    def xi2(s: float) -> float:
        p, d = switching_curve_point(1, 1, s, env)
        return local_optimality_test(p, d, env).xi_minus

    grid = np.linspace(0.0, env.t1, 2001)[1:]
    vals = np.array([xi2(float(s)) for s in grid])
    neg = np.nonzero(vals <= 0)[0]
    if len(neg) == 0:
        s_loss = env.t1
    else:
        i = int(neg[0])
        s_loss = brentq(xi2, float(grid[i - 1]), float(grid[i]), xtol=1e-14) if i > 0 else float(grid[0])
    ss = np.linspace(0.0, s_loss, samples)
    curve = np.array([switching_curve_point(1, 1, float(s), env)[0] for s in ss])
    start = switching_curve_point(1, 1, s_loss, env)[0]
    return Bifurcation("Case1", env.alpha, BIFURCATION_ALPHA, float(s_loss), curve, start, cosang)


# ---------------------------------------------------------------------------
# cut locus in Omega_N+


def _one_switch_time(env: ModelParams, z: np.ndarray, sign: int, lo: float, hi: float) -> float:
    """Fastest B_s B_t (first control ``sign``, s in [lo, hi]) reaching z; inf if none."""
    npl, nmi = _axes(env)
    ax2 = nmi if sign > 0 else npl
    c, s_ = env.cos, env.sin
    ct = (float(z @ ax2) / c - math.cos(2 * env.alpha)) / (2 * s_ * s_)
    if abs(ct) > 1.0 + 1e-12:
        return math.inf
    a = math.acos(min(1.0, max(-1.0, ct)))
    best_t = math.inf
    for s in (a, TWO_PI - a):
        if not (lo - 1e-12 <= s <= hi + 1e-12):
            continue
        p = gamma(env, sign, s)
        t = rotation_angle(ax2, p, z)
        if t <= float(v_vec(s, env)) + 1e-12:
            best_t = min(best_t, s + t)
    return best_t


def _two_switch_time(env: ModelParams, z: np.ndarray, sign: int, lo: float, hi: float, grid_points: int) -> float:
    ext = bang_bang_extremals(
        env, z, [(lo, hi)], lambda s: np.asarray(v_vec(s, env)), 2, signs=(sign,), grid_points=grid_points
    )
    ext = [e for e in ext if e.switches == 2]
    return min((e.total_time for e in ext), default=math.inf)


def family_times(env: ModelParams, z: np.ndarray, grid_points: int = 128) -> tuple[float, float]:
    """Arrival times of the two competing fronts in Omega_N+.

    The first front starts with -1 and switches once at s in (0, t1).  The
    second is the faster of the -1 start switching again on C1+ (which
    merges into the +1 start as its first arc shrinks to zero) and the +1
    start switching once at s in [pi, t3).
    """
    t1, t3 = env.t1, env.t3
    ta = _one_switch_time(env, z, -1, 0.0, t1)
    tb = min(_two_switch_time(env, z, -1, 0.0, t1, grid_points), _one_switch_time(env, z, 1, math.pi, t3))
    return ta, tb


@dataclass(frozen=True)
class CutLocus:
    points: np.ndarray
    time_gaps: np.ndarray
    start: np.ndarray
    case: str
    unbracketed: int = 0


def _slice_bounds(env: ModelParams, h: float) -> tuple[float, float] | None:
    """Longitude interval of Omega_N+ at height h."""
    s, c = env.sin, env.cos
    r = math.sqrt(max(0.0, 1.0 - h * h))
    if r == 0.0:
        return None
    hi_x = c * (1.0 + h) / (s * r)
    if hi_x > 1.0:
        return None
    phi_hi = math.acos(hi_x)
    if h <= math.cos(2 * env.alpha):
        phi_lo = 0.0
    else:
        lo_x = c * (1.0 - h) / (s * r)
        if lo_x > 1.0:
            return None
        phi_lo = math.acos(lo_x)
    if phi_hi <= phi_lo:
        return None
    return phi_lo, phi_hi


def cut_locus_trace(env: ModelParams, n_lines: int = 120, probes: int = 16, gap_tol: float = 1e-8) -> CutLocus:
    """Trace the overlap curve in Omega_N+ by root finding on horizontal slices."""
    _require_large(env)
    bif = d_point_bifurcation(env, samples=8)
    start = bif.start
    h_top = float(start[2])
    hs = np.linspace(h_top, -1.0, n_lines + 2)[1:-1]
    pts, gaps = [start], [0.0]
    missed = 0
    for h in hs:
        bounds = _slice_bounds(env, float(h))
        if bounds is None:
            missed += 1
            continue
        lo, hi = bounds
        r = math.sqrt(1.0 - h * h)

        def point(phi: float) -> np.ndarray:
            return np.array([r * math.cos(phi), r * math.sin(phi), h])

        def diff(phi: float) -> float:
            ta, tb = family_times(env, point(phi))
            if math.isinf(ta) and math.isinf(tb):
                return math.nan
            if math.isinf(ta):
                return 1e3
            if math.isinf(tb):
                return -1e3
            return ta - tb

        eps = 1e-9 * (hi - lo)
        grid = np.linspace(lo + eps, hi - eps, probes)
        vals = [diff(float(p)) for p in grid]
        brackets = [
            (i, abs(vals[i]) < 1e3 and abs(vals[i + 1]) < 1e3)
            for i in range(probes - 1)
            if not (math.isnan(vals[i]) or math.isnan(vals[i + 1])) and vals[i] * vals[i + 1] <= 0
        ]
        # genuine crossings first; a jump where one family ceases to exist is not a cut point
        brackets.sort(key=lambda b: not b[1])
        root = None
        for i, _ in brackets:
            x = float(grid[i]) if vals[i] == 0.0 else brentq(diff, float(grid[i]), float(grid[i + 1]), xtol=1e-15)
            ta, tb = family_times(env, point(x))
            if abs(ta - tb) < gap_tol:
                root = x
                break
        if root is None:
            missed += 1
            continue
        pts.append(point(root))
        gaps.append(abs(ta - tb))
    if len(pts) == 1:
        raise ConsistencyError(
            f"no slice bracketed an equal-time point; increase probes (now {probes}) or n_lines (now {n_lines})"
        )
    pts.append(SOUTH.copy())
    gaps.append(0.0)
    return CutLocus(np.array(pts), np.array(gaps), start, bif.case, missed)


# ---------------------------------------------------------------------------
# whole-sphere coverage time


COVERAGE_ALPHA_MIN = math.atan(math.sqrt(2.0))  # arccot(sqrt(2)/2)


def coverage_profile(alpha: float, beta: float) -> float:
    """Arrival time at the point of O+B+ at longitude ``beta``."""
    c = math.cos(alpha)
    cot = c / math.sin(alpha)
    tb2 = math.tan(beta) ** 2
    return (
        math.pi
        - math.acos(cot * cot)
        + math.acos(cot) / c
        - beta / c
        + math.acos((c * c - tb2) / (c * c + tb2))
    )


@dataclass(frozen=True)
class Coverage:
    T: float
    last_points: tuple
    beta_bar: float
    profile_max: float


def coverage_time(env: ModelParams) -> Coverage:
    """Time after which every point of the sphere has been reached."""
    a = env.alpha
    if a <= COVERAGE_ALPHA_MIN:
        raise DomainError(
            f"closed form valid only for alpha > arccot(sqrt(2)/2) = {COVERAGE_ALPHA_MIN:.6f}; "
            "below it the maximiser leaves the singular-arc range"
        )
    c = math.cos(a)
    cot = c / math.sin(a)
    T = math.pi / (2 * c) + math.pi - 2 * math.asin(cot) / c + 2 * math.asin(cot * cot)
    bb = math.asin(cot)
    last = np.array([math.sqrt(1 - cot * cot), cot, 0.0])
    return Coverage(T, (last, -last), bb, coverage_profile(a, bb))
