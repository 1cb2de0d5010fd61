"""Shared oracles for the test suite.

These helpers are deliberately independent of the package internals:
random physical covariances are built from thermal diagonals conjugated
by random symplectics, and the unconditional equation of motion has its
own fixed-step integrator for cross-checking the algebraic solvers.
"""

import numpy as np
import pytest


def omega_oracle(n: int) -> np.ndarray:
    """Symplectic form built independently of the package."""
    j = np.array([[0.0, 1.0], [-1.0, 0.0]])
    out = np.zeros((2 * n, 2 * n))
    for i in range(n):
        out[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = j
    return out


def random_symplectic(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random symplectic S = exp(Omega R) with R symmetric."""
    import scipy.linalg

    r = rng.normal(scale=0.4, size=(2 * n, 2 * n))
    r = 0.5 * (r + r.T)
    s = scipy.linalg.expm(omega_oracle(n) @ r)
    omega = omega_oracle(n)
    assert np.allclose(s @ omega @ s.T, omega, atol=1e-10)
    return s


def random_local_symplectic(rng: np.random.Generator) -> np.ndarray:
    """Block-diagonal two-mode symplectic (one 2x2 block per mode)."""
    blocks = [random_symplectic(rng, 1) for _ in range(2)]
    out = np.zeros((4, 4))
    out[:2, :2] = blocks[0]
    out[2:, 2:] = blocks[1]
    return out


def random_two_mode_physical(rng: np.random.Generator) -> np.ndarray:
    """Random physical 4x4 covariance: thermal diagonal conjugated by a
    random symplectic, so the symplectic spectrum is known >= 1."""
    nu = 1.0 + rng.exponential(scale=1.0, size=2)
    diag = np.diag(np.repeat(nu, 2))
    s = random_symplectic(rng, 2)
    return s @ diag @ s.T


def integrate_unconditional(a: np.ndarray, d: np.ndarray, t_end: float,
                            dt: float = 1e-3) -> np.ndarray:
    """Fixed-step RK4 integration of sigma' = A sigma + sigma A^T + D
    from vacuum; the independent oracle for the Lyapunov solver."""
    def f(s):
        return a @ s + s @ a.T + d

    s = np.eye(a.shape[0])
    steps = int(round(t_end / dt))
    for _ in range(steps):
        k1 = f(s)
        k2 = f(s + 0.5 * dt * k1)
        k3 = f(s + 0.5 * dt * k2)
        k4 = f(s + dt * k3)
        s = s + dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        s = 0.5 * (s + s.T)
    return s


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
