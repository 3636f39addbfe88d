"""Independent numerical references shared by the test modules."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.linalg import expm

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def rk4_schedule(alpha: float, schedule, y0=(0.0, 0.0, 1.0), h: float = 1e-3) -> np.ndarray:
    """Integrate dy/dt = (u sin a, 0, cos a) x y with classical RK4."""
    s, c = math.sin(alpha), math.cos(alpha)
    y = np.asarray(y0, dtype=float)
    for arc in schedule:
        w = np.array([arc.control * s, 0.0, c])
        n = max(1, math.ceil(arc.duration / h))
        dt = arc.duration / n
        f = lambda z: np.cross(w, z)
        for _ in range(n):
            k1 = f(y)
            k2 = f(y + 0.5 * dt * k1)
            k3 = f(y + 0.5 * dt * k2)
            k4 = f(y + dt * k3)
            y = y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def schrodinger_schedule(alpha: float, schedule, psi0=(1.0, 0.0)) -> np.ndarray:
    """Propagate i psi' = H psi with H = (-cos a sz + u sin a sx)/2 by matrix exponentials."""
    psi = np.asarray(psi0, dtype=complex)
    for arc in schedule:
        H = 0.5 * (-math.cos(alpha) * SIGMA_Z + arc.control * math.sin(alpha) * SIGMA_X)
        psi = expm(-1j * H * arc.duration) @ psi
    return psi


def bloch_of(psi: np.ndarray) -> np.ndarray:
    """Bloch vector with the orientation matching the model's Hopf projection."""
    p1, p2 = psi
    w = np.conj(p1) * p2
    return np.array([-2 * w.real, 2 * w.imag, abs(p1) ** 2 - abs(p2) ** 2])


def random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.normal(size=(n, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
