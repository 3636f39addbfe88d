"""Brute-force minimum-time references, independent of the closed-form synthesis.

Two instruments:

``schedule_search``
    enumerates Pontryagin extremals.  Interior switching times come from the
    zeros of the switching function (the adjoint rotates with the state), not
    from any closed-form duration formula.  A singular family (first bang to
    the equator, drift, final bang) is scanned as well.

``min_time_grid``
    propagates a front of exactly-simulated particles with controls from a
    finite set and time step ``dt``.  Particles entering a cell that was
    already visited earlier are discarded.  Each icosphere node records the
    first arrival in its Voronoi cell together with the particle position
    (the witness), so every recorded time is achieved by an admissible control.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.spatial import cKDTree

from .errors import ConsistencyError, DomainError
from .geometry import (
    NORTH,
    TWO_PI,
    ModelParams,
    Trajectory,
    bang,
    compact,
    control_axis,
    endpoint,
    rotate,
    rotation_angle,
    rotation_matrix,
    simulate,
    singular,
    unit,
)

E1 = np.array([1.0, 0.0, 0.0])
_NO_SCORE = np.iinfo(np.int64).max


# ---------------------------------------------------------------------------
# extremal enumeration


def _next_zero(axis: np.ndarray, m: np.ndarray, backward: bool = False) -> np.ndarray:
    """First t > 0 where e1 . R(axis, +-t) m vanishes, given e1 . m = 0.

    With b = e1.(k x m) and d = (k.m)(k.e1) the switching function is
    2 sin(t/2) (b cos(t/2) + d sin(t/2)), up to the direction of time.
    """
    k = axis
    b = np.cross(k, m) @ E1
    if backward:
        b = -b
    d = (m @ k) * (k @ E1)
    half = np.arctan2(-b, d)  # a zero of b cos + d sin, modulo pi
    half = np.where(half <= 1e-15, half + math.pi, half)
    half = np.where(half > math.pi, half - math.pi, half)
    return 2.0 * half


def _pmp_chain(env: ModelParams, sign: int, s: np.ndarray, n: int) -> tuple[np.ndarray, list, np.ndarray, np.ndarray]:
    """Follow extremals with first bang ``s`` through n switchings.

    Returns the point at the n-th switching, the list of interior
    durations, the admissible length of the last arc and a validity mask
    (the switching function must keep its sign on the first arc).
    """
    ax = unit(control_axis(env, sign))
    y = rotate(ax, s, np.broadcast_to(NORTH, s.shape + (3,)))
    m = np.cross(y, E1)
    valid = _next_zero(ax, m, backward=True) >= s - 1e-9
    durs = []
    sg = sign
    for _ in range(n - 1):
        sg = -sg
        ax = unit(control_axis(env, sg))
        w = _next_zero(ax, m)
        y = rotate(ax, w, y)
        m = rotate(ax, w, m)
        durs.append(w)
    sg = -sg
    last_max = _next_zero(unit(control_axis(env, sg)), m)
    return y, durs, last_max, valid


@dataclass(frozen=True)
class SearchResult:
    trajectory: Trajectory | None
    total_time: float
    family: str
    candidates: int

    @property
    def schedule(self) -> tuple:
        return () if self.trajectory is None else self.trajectory.schedule


def _roots(fun, grid: np.ndarray, vals: np.ndarray) -> list[float]:
    """Bracket sign changes of ``vals`` on ``grid`` and polish them with Brent."""
    ok = np.isfinite(vals[:-1]) & np.isfinite(vals[1:])
    exact = np.nonzero(ok & (vals[:-1] == 0.0))[0]
    change = np.nonzero(ok & (vals[:-1] * vals[1:] < 0.0))[0]
    out = [float(grid[i]) for i in exact]
    for i in change:
        try:
            out.append(brentq(fun, float(grid[i]), float(grid[i + 1]), xtol=1e-15, maxiter=200))
        except ValueError:
            pass
    return out


def _equator_hit_time(env: ModelParams, sign: int) -> float | None:
    """First time the bang from P_N reaches the equator (numerical root)."""
    ax = unit(control_axis(env, sign))
    grid = np.linspace(0.0, math.pi, 4097)[1:]
    vals = rotate(ax, grid, np.broadcast_to(NORTH, grid.shape + (3,)))[:, 2]
    idx = np.nonzero(vals <= 0)[0]
    if len(idx) == 0:
        return None
    i = int(idx[0])
    if vals[i] == 0.0:
        return float(grid[i])
    return brentq(lambda t: float(rotate(ax, t, NORTH)[2]), float(grid[i - 1]), float(grid[i]), xtol=1e-15)


def schedule_search(
    env: ModelParams,
    target,
    max_switches: int | None = None,
    s_grid: int = 2000,
    include_singular: bool = True,
    hit_tol: float = 1e-8,
) -> SearchResult:
    """Fastest extremal in the enumerated families that reaches ``target``."""
    if s_grid < 1000:
        raise DomainError("s_grid needs at least 1000 points")
    y = np.asarray(target, dtype=float)
    y = y / np.linalg.norm(y)
    if max_switches is None:
        max_switches = env.n_max + 1
    found: list[tuple[float, tuple, str]] = []
    if np.linalg.norm(y - NORTH) < 1e-12:
        return SearchResult(simulate(env, (), NORTH, 1), 0.0, "empty", 1)

    def record(sched: tuple, fam: str) -> None:
        if np.linalg.norm(endpoint(env, sched) - y) <= hit_tol:
            found.append((float(math.fsum(a.duration for a in sched)), sched, fam))

    grid = np.linspace(1e-9, TWO_PI - 1e-9, s_grid)
    for sign in (1, -1):
        ax = unit(control_axis(env, sign))
        t = rotation_angle(ax, NORTH, y)
        record((bang(sign, t),), "B")
        for n in range(1, max_switches + 1):
            last_sign = sign * (-1) ** n
            lax = unit(control_axis(env, last_sign))
            level = float(lax @ y)
            pts, _, _, valid = _pmp_chain(env, sign, grid, n)
            vals = np.where(valid, pts @ lax - level, np.nan)

            def g(s: float, n=n) -> float:
                p, _, _, _ = _pmp_chain(env, sign, np.array([s]), n)
                return float(p[0] @ lax - level)

            for s in _roots(g, grid, vals):
                p, durs, lmax, ok = _pmp_chain(env, sign, np.array([s]), n)
                if not ok[0]:
                    continue
                tl = rotation_angle(lax, p[0], y)
                if tl > float(lmax[0]) + 1e-9:
                    continue
                seq = [s] + [float(d[0]) for d in durs] + [tl]
                sched = tuple(bang(sign * (-1) ** i, d) for i, d in enumerate(seq))
                record(sched, f"B^{n + 1}")
    if include_singular and env.is_large:
        for sign in (1, -1):
            te = _equator_hit_time(env, sign)
            if te is None:
                continue
            start = rotate(unit(control_axis(env, sign)), te, NORTH)
            phi0 = math.atan2(start[1], start[0])
            c = env.cos
            sig_grid = np.linspace(0.0, TWO_PI / c, s_grid)
            # stopping on the equator
            if abs(y[2]) < 1e-12:
                sig = ((math.atan2(y[1], y[0]) - phi0) % TWO_PI) / c
                record((bang(sign, te), singular(sig)), "BS")
            for last in (1, -1):
                lax = unit(control_axis(env, last))
                level = float(lax @ y)
                eq = np.stack([np.cos(phi0 + c * sig_grid), np.sin(phi0 + c * sig_grid), 0 * sig_grid], -1)
                vals = eq @ lax - level
                g = lambda sg, lax=lax, level=level: float(
                    np.array([math.cos(phi0 + c * sg), math.sin(phi0 + c * sg), 0.0]) @ lax - level
                )
                for sg in _roots(g, sig_grid, vals):
                    e0 = np.array([math.cos(phi0 + c * sg), math.sin(phi0 + c * sg), 0.0])
                    tl = rotation_angle(lax, e0, y)
                    record((bang(sign, te), singular(sg), bang(last, tl)), "BSB")
    if not found:
        return SearchResult(None, math.inf, "none", 0)
    found.sort(key=lambda r: (r[0], len(r[1])))
    tbest, sched, fam = found[0]
    return SearchResult(simulate(env, compact(sched, 0.0), NORTH, 8), tbest, fam, len(found))


def fibonacci_sphere(n: int) -> np.ndarray:
    """Nearly uniform points on the sphere (golden-angle spiral)."""
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    ph = math.pi * (1.0 + math.sqrt(5.0)) * i
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(ph), r * np.sin(ph), z], axis=1)


@dataclass(frozen=True)
class SphereMax:
    time: float
    point: np.ndarray
    scan_time: float
    scan_point: np.ndarray


def max_time_over_sphere(
    env: ModelParams, n_scan: int = 2000, refine: int = 6, s_grid: int = 1000
) -> SphereMax:
    """Largest ``schedule_search`` time over the sphere.

    A golden-spiral scan is followed by Nelder-Mead refinement in
    (polar, azimuth) angles from the ``refine`` best scan points.
    """
    pts = fibonacci_sphere(n_scan)
    vals = np.array([schedule_search(env, p, s_grid=s_grid).total_time for p in pts])
    order = np.argsort(-vals)[:refine]

    def to_point(x: np.ndarray) -> np.ndarray:
        th, ph = x
        return np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])

    def neg(x: np.ndarray) -> float:
        return -schedule_search(env, to_point(x), s_grid=s_grid).total_time

    best_t, best_p = float(vals[order[0]]), pts[order[0]]
    for k in order:
        p = pts[k]
        x0 = np.array([math.acos(np.clip(p[2], -1, 1)), math.atan2(p[1], p[0])])
        res = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 2000})
        if -res.fun > best_t:
            best_t, best_p = float(-res.fun), to_point(res.x)
    return SphereMax(best_t, best_p, float(vals[order[0]]), pts[order[0]])


# ---------------------------------------------------------------------------
# icosphere


def icosphere(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertices and triangles of the subdivided icosahedron."""
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    v = [np.array(p, dtype=float) / np.linalg.norm(p) for p in verts]
    f = list(faces)
    for _ in range(level):
        cache: dict[tuple[int, int], int] = {}

        def mid(i: int, j: int) -> int:
            key = (min(i, j), max(i, j))
            if key not in cache:
                p = v[i] + v[j]
                v.append(p / np.linalg.norm(p))
                cache[key] = len(v) - 1
            return cache[key]

        nf = []
        for a, b, c in f:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            nf += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        f = nf
    return np.array(v), np.array(f, dtype=np.int64)


def mesh_spacing(vertices: np.ndarray, faces: np.ndarray) -> float:
    """Longest great-circle edge length of the mesh."""
    e = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    d = np.einsum("ij,ij->i", vertices[e[:, 0]], vertices[e[:, 1]])
    return float(np.arccos(np.clip(d, -1.0, 1.0)).max())


# ---------------------------------------------------------------------------
# front propagation


def _cube_bins(p: np.ndarray, n: int, offsets: bool = False):
    """Cell index of points (shape (3, N)) on a cube map with n x n cells per face.

    With ``offsets`` also return the squared distance of each point from
    its cell centre in cell units.
    """
    x, y, z = p
    ax, ay, az = np.abs(x), np.abs(y), np.abs(z)
    fx = (ax >= ay) & (ax >= az)
    fy = ~fx & (ay >= az)
    major = np.where(fx, x, np.where(fy, y, z))
    inv = 0.5 * n / np.abs(major)
    u = (np.where(fx, y, np.where(fy, z, x)) * inv) + 0.5 * n
    w = (np.where(fx, z, np.where(fy, x, y)) * inv) + 0.5 * n
    iu = np.minimum(u.astype(np.int64), n - 1)
    iw = np.minimum(w.astype(np.int64), n - 1)
    face = np.where(fx, 0, np.where(fy, 2, 4)) + (major < 0)
    cell = (face * n + iu) * n + iw
    if not offsets:
        return cell
    return cell, (u - iu - 0.5) ** 2 + (w - iw - 0.5) ** 2


@dataclass
class FrontGrid:
    nodes: np.ndarray
    value: np.ndarray
    witness: np.ndarray
    dt: float
    controls: tuple
    level: int
    mesh_h: float
    steps: int
    converged: bool
    history: list = field(default_factory=list, repr=False)
    _tree: cKDTree | None = field(default=None, repr=False)

    @property
    def error_bound(self) -> float:
        return self.dt + 2.0 * self.mesh_h

    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self.nodes)
        return self._tree

    def nearest(self, y) -> int:
        return int(self.tree().query(np.asarray(y, dtype=float))[1])

    def value_at(self, y) -> float:
        return float(self.value[self.nearest(y)])

    def witness_at(self, y) -> np.ndarray:
        return self.witness[self.nearest(y)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "z", "value"])
        for p, val in zip(self.nodes, self.value):
            w.writerow([f"{p[0]:.12f}", f"{p[1]:.12f}", f"{p[2]:.12f}", f"{val:.9f}"])
        return buf.getvalue()


def min_time_grid(
    env: ModelParams,
    level: int = 5,
    dt: float = 0.005,
    controls: Sequence[float] = (-1.0, 0.0, 1.0),
    max_time: float | None = None,
    bin_factor: float = 0.8,
    max_stall: int = 64,
    window: int = 3,
) -> FrontGrid:
    """First-arrival times on an icosphere from a front of exact particles.

    Every step rotates each live particle by each control for ``dt``.  A
    child survives if its cube-map cell was first visited at most
    ``window`` steps ago, or if it is still in its parent's cell (slow
    motion close to a rotation axis, at most ``max_stall`` steps).  Each
    cell keeps one particle per step, preferring few switchings and long
    constant-control runs, so exact bang and singular arcs are not broken
    up by competing neighbours.  Cell width is ``bin_factor * dt`` times
    the slowest relevant speed.
    """
    if level < 3:
        raise DomainError("mesh level must be at least 3")
    if not (0 < dt <= 0.01):
        raise DomainError("dt must lie in (0, 0.01]")
    nodes, faces = icosphere(level)
    h = mesh_spacing(nodes, faces)
    tree = cKDTree(nodes)
    # slowest motion of interest: the drift, and bangs along the circles through P_N
    slow = min(env.sin, env.cos)
    nb = int(math.ceil(2.0 / (bin_factor * dt * slow)))
    first_step = np.full(6 * nb * nb, -1, dtype=np.int32)
    best = np.full(6 * nb * nb, _NO_SCORE, dtype=np.int64)
    value = np.full(len(nodes), np.inf)
    witness = np.zeros_like(nodes)
    if max_time is None:
        max_time = math.pi**2 / (2 * env.alpha) + 4 * math.pi if env.alpha < math.pi / 4 else 4 * math.pi / env.cos

    rots = []
    for u in controls:
        w = control_axis(env, float(u))
        speed = float(np.linalg.norm(w))
        rots.append(rotation_matrix(w / speed, speed * dt))
    rots = np.stack(rots)  # (k, 3, 3)

    pts = NORTH[:, None].copy()  # coordinates by rows
    bins = _cube_bins(pts, nb)
    stall = np.zeros(1, dtype=np.int64)
    last_u = np.full(1, -1, dtype=np.int64)  # no control applied yet
    nsw = np.zeros(1, dtype=np.int64)
    run = np.zeros(1, dtype=np.int64)
    first_step[bins] = 0
    _, idx = tree.query(pts.T)
    value[idx] = 0.0
    witness[idx] = pts.T
    t = 0.0
    step = 0
    history = []
    nctl = len(rots)
    while pts.shape[1] and t < max_time:
        step += 1
        t = step * dt
        n = pts.shape[1]
        kids = np.matmul(rots, pts).transpose(1, 0, 2).reshape(3, -1)
        if step % 256 == 0:
            kids /= np.sqrt((kids * kids).sum(axis=0))
        ku = np.repeat(np.arange(nctl), n)
        plast = np.tile(last_u, nctl)
        cont = plast == ku
        knsw = np.tile(nsw, nctl) + ((~cont) & (plast >= 0))
        krun = np.where(cont, np.tile(run, nctl) + 1, 1)
        pstall = np.tile(stall, nctl)
        kb, off = _cube_bins(kids, nb, offsets=True)
        same = (kb == np.tile(bins, nctl)) & (pstall < max_stall)
        fs = first_step[kb]
        fresh = (fs < 0) | ((step - fs <= window) & (fs > 0))
        keep = np.nonzero(fresh | same)[0]
        # one particle per cell and step: fewest switchings, then longest
        # current arc, then closest to the cell centre
        score = (
            (np.minimum(knsw[keep], 63) * 4096 + (4095 - np.minimum(krun[keep], 4095))) * 256
            + np.minimum(off[keep] * 512, 255).astype(np.int64)
        ) * (1 << 24) + np.arange(len(keep))
        cells = kb[keep]
        np.minimum.at(best, cells, score)
        sel = keep[best[cells] == score]
        best[cells] = _NO_SCORE
        is_new = fs[sel] < 0
        pts, bins, last_u, nsw, run = kids[:, sel], kb[sel], ku[sel], knsw[sel], krun[sel]
        stall = np.where(same[sel], pstall[sel] + 1, 0)
        newc = bins[is_new]
        first_step[newc] = step
        if len(newc):
            newp = pts[:, is_new].T
            _, nid = tree.query(newp)
            unset = ~np.isfinite(value[nid])
            if np.any(unset):
                nid_u, first_u = np.unique(nid[unset], return_index=True)
                value[nid_u] = t
                witness[nid_u] = newp[unset][first_u]
        history.append(pts.shape[1])
    converged = bool(np.all(np.isfinite(value)))
    grid = FrontGrid(nodes, value, witness, dt, tuple(float(u) for u in controls), level, h, step, converged, history)
    if not converged:
        missing = int((~np.isfinite(value)).sum())
        raise ConsistencyError(
            f"front propagation stopped at t={t:.3f} after {step} steps with {missing} unreached nodes"
        )
    return grid
