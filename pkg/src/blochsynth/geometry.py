"""Bloch-sphere kinematics of the single-control spin-1/2 system.

All times are in normalized units (the field strength factor is one).  With
``u`` the control, the state ``y`` on the unit sphere evolves by

    dy/dt = (u sin(alpha), 0, cos(alpha)) x y,

so every constant control is a rigid rotation.  The drift (u = 0) turns
about the z axis at speed cos(alpha); the bangs u = +1 and u = -1 turn about
(sin(alpha), 0, cos(alpha)) and (-sin(alpha), 0, cos(alpha)) at unit speed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError

HALF_PI = 0.5 * math.pi
QUARTER_PI = 0.25 * math.pi
TWO_PI = 2.0 * math.pi

# Coordinate tolerance used for every "lies on a locus" test.
LOCUS_TOL = 1e-9

NORTH = np.array([0.0, 0.0, 1.0])
SOUTH = np.array([0.0, 0.0, -1.0])


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class ModelParams:
    """Control-bound angle and the constants derived from it.

    Build from the angle directly, or from the raw energy gap ``E`` and
    field bound ``M`` with :meth:`from_energy_bound`.
    """

    alpha: float
    energy: float | None = None
    bound: float | None = None

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (0.0 < a < HALF_PI) or not math.isfinite(a):
            raise DomainError(f"alpha must lie in (0, pi/2), got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)
        if (self.energy is None) != (self.bound is None):
            raise DomainError("energy and bound must be given together")

    @classmethod
    def from_energy_bound(cls, energy: float, bound: float) -> "ModelParams":
        if not (energy > 0 and bound > 0):
            raise DomainError("energy and bound must both be positive")
        return cls(math.atan2(bound, energy), float(energy), float(bound))

    @property
    def sin(self) -> float:
        return math.sin(self.alpha)

    @property
    def cos(self) -> float:
        return math.cos(self.alpha)

    @property
    def cot2(self) -> float:
        return 1.0 / math.tan(self.alpha) ** 2

    @property
    def k(self) -> float | None:
        """Time-scale factor 2*sqrt(M^2 + E^2); None without raw inputs."""
        if self.energy is None:
            return None
        return 2.0 * math.hypot(self.bound, self.energy)

    def raw_time(self, t: float) -> float | None:
        k = self.k
        return None if k is None else t / k

    @property
    def is_large(self) -> bool:
        """True in the regime alpha >= pi/4."""
        return self.alpha >= QUARTER_PI

    def _require_large(self) -> None:
        if not self.is_large:
            raise DomainError(f"defined only for alpha >= pi/4 (alpha={self.alpha})")

    @property
    def _acos_cot2(self) -> float:
        self._require_large()
        # cot^2(pi/4) evaluates to 1 + 2e-16 in floating point
        return math.acos(min(1.0, self.cot2))

    @property
    def t1(self) -> float:
        """First equator crossing of the +1 bang from the north pole."""
        return math.pi - self._acos_cot2

    @property
    def t2(self) -> float:
        return 2.0 * self._acos_cot2

    @property
    def t3(self) -> float:
        return self.t1 + self.t2

    @property
    def ratio(self) -> float:
        """pi / (2 alpha)."""
        return math.pi / (2.0 * self.alpha)

    @property
    def m(self) -> int:
        return math.floor(self.ratio)

    @property
    def n_max(self) -> int:
        """Upper bound on the number of switchings of an optimal trajectory."""
        return self.m + 1

    @property
    def remainder(self) -> float:
        return self.ratio - self.m


# ---------------------------------------------------------------------------
# rotations


def unit(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def as_point(y: Sequence[float] | np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Validate a Bloch vector and return it renormalized as a float array."""
    p = np.asarray(y, dtype=float).reshape(-1)
    if p.shape != (3,):
        raise DomainError(f"a Bloch point has three coordinates, got shape {p.shape}")
    n = float(np.linalg.norm(p))
    if not math.isfinite(n) or abs(n - 1.0) > tol:
        raise DomainError(f"point is not on the unit sphere (|y| = {n})")
    return p / n


def cross_matrix(a: np.ndarray) -> np.ndarray:
    return np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])


def rotation_matrix(axis: np.ndarray, angle: float) -> np.ndarray:
    """Rodrigues matrix of the right-handed rotation by ``angle`` about ``axis``."""
    K = cross_matrix(unit(axis))
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


def rotate(axis: np.ndarray, angle, y: np.ndarray) -> np.ndarray:
    """Rotate point(s) ``y`` about unit ``axis`` by ``angle`` (broadcasting)."""
    k = np.asarray(axis, dtype=float)
    y = np.asarray(y, dtype=float)
    ang = np.asarray(angle, dtype=float)[..., None]
    c, s = np.cos(ang), np.sin(ang)
    kdy = np.sum(k * y, axis=-1, keepdims=True)
    return y * c + np.cross(k, y) * s + k * kdy * (1.0 - c)


def rotation_angle(axis: np.ndarray, p: np.ndarray, q: np.ndarray) -> float:
    """Angle in [0, 2pi) that rotates ``p`` onto ``q``'s circle position about ``axis``.

    ``p`` and ``q`` are assumed to lie on the same circle around ``axis``;
    only their components orthogonal to the axis are used.
    """
    k = unit(axis)
    pp = p - k * np.dot(k, p)
    qq = q - k * np.dot(k, q)
    ang = math.atan2(float(np.dot(k, np.cross(pp, qq))), float(np.dot(pp, qq)))
    return ang % TWO_PI


def mirror(y: np.ndarray) -> np.ndarray:
    """Half-turn about the z axis; it exchanges the roles of u and -u."""
    y = np.asarray(y, dtype=float)
    return y * np.array([-1.0, -1.0, 1.0])


# ---------------------------------------------------------------------------
# vector fields and flows


class FieldTag(str, enum.Enum):
    XPLUS = "Xplus"
    XMINUS = "Xminus"
    DRIFT = "Drift"
    OTHER = "Control"


@dataclass(frozen=True)
class Generator:
    """Constant-control field seen as a rotation: unit axis and angular speed."""

    tag: FieldTag
    axis: np.ndarray = field(compare=False)
    angular_speed: float
    control: float = 0.0

    @property
    def period(self) -> float:
        return TWO_PI / self.angular_speed


def control_axis(params: ModelParams, u: float) -> np.ndarray:
    """Unnormalized rotation vector (u sin(alpha), 0, cos(alpha))."""
    return np.array([u * params.sin, 0.0, params.cos])


def generator(params: ModelParams, u: float) -> Generator:
    w = control_axis(params, u)
    speed = float(np.linalg.norm(w))
    if u == 1:
        tag = FieldTag.XPLUS
    elif u == -1:
        tag = FieldTag.XMINUS
    elif u == 0:
        tag = FieldTag.DRIFT
    else:
        tag = FieldTag.OTHER
    return Generator(tag, w / speed, speed, float(u))


def bang_axis(params: ModelParams, sign: int) -> np.ndarray:
    """Unit axis of the bang with control ``sign`` (speed one)."""
    return control_axis(params, sign)


def velocity(params: ModelParams, u: float, y: np.ndarray) -> np.ndarray:
    return np.cross(control_axis(params, u), y)


def drift_field(params: ModelParams, y: np.ndarray) -> np.ndarray:
    """Drift part: cos(alpha) * (-y2, y1, 0)."""
    y = np.asarray(y, dtype=float)
    return params.cos * np.array([-y[1], y[0], 0.0])


def control_field(params: ModelParams, y: np.ndarray) -> np.ndarray:
    """Controlled part: sin(alpha) * (0, -y3, y2)."""
    y = np.asarray(y, dtype=float)
    return params.sin * np.array([0.0, -y[2], y[1]])


def lie_bracket(params: ModelParams, y: np.ndarray) -> np.ndarray:
    """[F, G] = DG.F - DF.G for the drift F and control field G."""
    y = np.asarray(y, dtype=float)
    sc = params.sin * params.cos
    return sc * np.array([-y[2], 0.0, y[0]])


def flow(g: Generator, t: float, y0: np.ndarray) -> np.ndarray:
    """Exact flow of a constant-control field; negative ``t`` flows backward."""
    y = rotate(g.axis, g.angular_speed * t, y0)
    return y / np.linalg.norm(y, axis=-1, keepdims=True)


# ---------------------------------------------------------------------------
# schedules and trajectories


@dataclass(frozen=True)
class Arc:
    """One piece of a control: a bang (control +-1) or a singular arc (control 0)."""

    control: int
    duration: float

    def __post_init__(self) -> None:
        if self.control not in (-1, 0, 1):
            raise DomainError(f"arc control must be -1, 0 or +1, got {self.control}")

    @property
    def is_bang(self) -> bool:
        return self.control != 0

    def label(self) -> str:
        return "S" if self.control == 0 else ("+" if self.control > 0 else "-")


def bang(sign: int, duration: float) -> Arc:
    return Arc(1 if sign > 0 else -1, float(duration))


def singular(duration: float) -> Arc:
    return Arc(0, float(duration))


ControlSchedule = tuple  # tuple[Arc, ...]


def schedule_time(schedule: Sequence[Arc]) -> float:
    return float(math.fsum(a.duration for a in schedule))


def flip(schedule: Sequence[Arc]) -> tuple:
    """Negate every control (the u -> -u symmetry)."""
    return tuple(Arc(-a.control, a.duration) for a in schedule)


def compact(schedule: Sequence[Arc], tol: float = 1e-12) -> tuple:
    """Drop zero-length arcs and merge neighbours with equal control."""
    out: list[Arc] = []
    for a in schedule:
        if a.duration <= tol:
            continue
        if out and out[-1].control == a.control:
            out[-1] = Arc(a.control, out[-1].duration + a.duration)
        else:
            out.append(a)
    return tuple(out)


def switch_count(schedule: Sequence[Arc]) -> int:
    return max(len(compact(schedule)) - 1, 0)


@dataclass(frozen=True)
class Trajectory:
    schedule: tuple
    start: np.ndarray = field(compare=False)
    times: np.ndarray = field(compare=False)
    points: np.ndarray = field(compare=False)
    controls: np.ndarray = field(compare=False)
    total_time: float = 0.0

    @property
    def endpoint(self) -> np.ndarray:
        return self.points[-1]


def endpoint(params: ModelParams, schedule: Sequence[Arc], y0: np.ndarray = NORTH) -> np.ndarray:
    y = np.asarray(y0, dtype=float)
    for a in schedule:
        if a.duration < 0:
            raise DomainError("arc durations must be non-negative")
        y = flow(generator(params, a.control), a.duration, y)
    return y


def simulate(
    params: ModelParams,
    schedule: Sequence[Arc],
    y0: np.ndarray = NORTH,
    samples_per_arc: int = 32,
) -> Trajectory:
    """Sample the piecewise-rotation trajectory of ``schedule`` from ``y0``."""
    y = as_point(y0)
    schedule = tuple(schedule)
    times = [0.0]
    points = [y]
    controls = [schedule[0].control if schedule else 0]
    t0 = 0.0
    for a in schedule:
        if a.duration < 0:
            raise DomainError("arc durations must be non-negative")
        g = generator(params, a.control)
        n = max(int(samples_per_arc), 1)
        taus = np.linspace(0.0, a.duration, n + 1)[1:]
        seg = flow(g, taus, np.broadcast_to(y, (n, 3)))
        times.extend((t0 + taus).tolist())
        points.extend(seg)
        controls.extend([a.control] * n)
        t0 += a.duration
        # restart from the exact endpoint so arcs compose without drift
        y = flow(g, a.duration, y)
        points[-1] = y
    total = schedule_time(schedule)
    return Trajectory(
        schedule,
        np.asarray(y0, dtype=float),
        np.asarray(times),
        np.asarray(points),
        np.asarray(controls, dtype=int),
        total,
    )


# ---------------------------------------------------------------------------
# Hopf projection


def hopf_project(psi: Sequence[complex], tol: float = 1e-12) -> np.ndarray:
    """Map a normalized two-level state to its Bloch vector."""
    p1, p2 = complex(psi[0]), complex(psi[1])
    norm2 = abs(p1) ** 2 + abs(p2) ** 2
    if abs(norm2 - 1.0) > tol:
        raise DomainError(f"state is not normalized (|psi|^2 = {norm2})")
    w = p1.conjugate() * p2
    return np.array([-2.0 * w.real, 2.0 * w.imag, abs(p1) ** 2 - abs(p2) ** 2])


# ---------------------------------------------------------------------------
# loci of the two-dimensional synthesis theory


class Loci(NamedTuple):
    delta_a: float
    delta_b: float
    f_s: float
    f_s_infinite: bool


def loci(params: ModelParams, y: np.ndarray) -> Loci:
    """Collinearity function, singular-locus function and their ratio.

    ``delta_a`` vanishes where drift and control field are parallel (y2 = 0),
    ``delta_b`` where the control field is parallel to the bracket (y3 = 0).
    At y2 = 0 the ratio is returned as a signed infinity with the flag set.
    """
    y = np.asarray(y, dtype=float)
    F, G = drift_field(params, y), control_field(params, y)
    da = float(np.dot(y, np.cross(F, G)))
    db = float(np.dot(y, np.cross(G, lie_bracket(params, y))))
    if abs(y[1]) <= LOCUS_TOL:
        num = params.sin * y[2]
        return Loci(da, db, math.copysign(math.inf, num) if num != 0 else math.inf, True)
    return Loci(da, db, params.sin * float(y[2]) / float(y[1]), False)


class SwitchDirection(str, enum.Enum):
    MINUS_TO_PLUS = "MinusToPlus"
    PLUS_TO_MINUS = "PlusToMinus"
    ON_LOCUS = "OnLocus"


def switch_direction(params: ModelParams, y: np.ndarray) -> SwitchDirection:
    """Which bang-to-bang switching a locally optimal trajectory may perform at ``y``."""
    y = np.asarray(y, dtype=float)
    if abs(y[1]) <= LOCUS_TOL or abs(y[2]) <= LOCUS_TOL:
        return SwitchDirection.ON_LOCUS
    fs = loci(params, y).f_s
    return SwitchDirection.MINUS_TO_PLUS if fs > 0 else SwitchDirection.PLUS_TO_MINUS


def singular_control(params: ModelParams, y: np.ndarray) -> float:
    """Feedback keeping a trajectory on the singular locus (the equator).

    Evaluates -grad(dB).F / grad(dB).G with the ambient gradient of dB,
    which is constant here.  At y2 = 0 the quotient is 0/0 and the
    continuous extension 0 is returned.
    """
    y = np.asarray(y, dtype=float)
    if abs(y[2]) >= LOCUS_TOL:
        raise DomainError(f"point is off the singular locus (y3 = {y[2]})")
    grad = np.array([0.0, 0.0, -params.sin**2 * params.cos])
    num = -float(np.dot(grad, drift_field(params, y)))
    den = float(np.dot(grad, control_field(params, y)))
    if abs(den) <= 1e-14:
        return 0.0
    phi = num / den
    if abs(phi) >= 1e-10:
        raise AssertionError(f"singular feedback should vanish, got {phi}")
    return phi


# ---------------------------------------------------------------------------
# special curves and points


def gamma(params: ModelParams, sign: int, t):
    """Closed form of the bang trajectory from the north pole, gamma^sign(t)."""
    t = np.asarray(t, dtype=float)
    s, c = params.sin, params.cos
    ct, st = np.cos(t), np.sin(t)
    y = np.stack([s * c * (1.0 - ct), -s * st, c * c + s * s * ct], axis=-1)
    return y if sign > 0 else mirror(y)


def named_points(params: ModelParams) -> dict[str, np.ndarray]:
    """P_N, P_S, O+-, and for alpha >= pi/4 also A+-, B+-, D+-."""
    pts = {
        "PN": NORTH.copy(),
        "PS": SOUTH.copy(),
        "O+": np.array([1.0, 0.0, 0.0]),
        "O-": np.array([-1.0, 0.0, 0.0]),
    }
    if params.is_large:
        cot = min(1.0, math.cos(params.alpha) / math.sin(params.alpha))
        h = params.sin * math.sqrt(max(0.0, 1.0 - cot**4))
        s2a, c2a = math.sin(2 * params.alpha), math.cos(2 * params.alpha)
        plus = {
            "A+": np.array([cot, -h, 0.0]),
            "B+": np.array([cot, h, 0.0]),
            "D+": np.array([s2a, 0.0, c2a]),
        }
        for name, p in plus.items():
            pts[name] = p
            pts[name[0] + "-"] = mirror(p)
    return pts
