import math

import numpy as np
import pytest

from ckfahrs.sensors import NoiseConfig
from ckfahrs.sim import Profile, Scenario, simulate


def random_spd(rng, n, floor=0.1):
    A = rng.standard_normal((n, n))
    return A @ A.T + floor * np.eye(n)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def short_low_dynamic():
    s = Scenario(name="short", duration=20.0, profile=Profile.LOW_DYNAMIC, seed=7)
    imu, truth = simulate(s)
    return s, imu, truth


@pytest.fixture(scope="session")
def static_clean():
    s = Scenario(name="still", duration=5.0, profile=Profile.STATIC, noise=NoiseConfig.noiseless(),
                 initial_yaw=math.radians(45.0))
    imu, truth = simulate(s)
    return s, imu, truth


class LinearSystem:
    """Constant-velocity tracker in 2-D: state (px, py, vx, vy), positions observed."""

    def __init__(self, dt=0.1, q=0.05, r=0.5):
        self.F = np.eye(4)
        self.F[0, 2] = self.F[1, 3] = dt
        G = np.array([[0.5 * dt * dt, 0], [0, 0.5 * dt * dt], [dt, 0], [0, dt]])
        self.Q = q * G @ G.T + 1e-6 * np.eye(4)
        self.H = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]])
        self.R = r * np.eye(2)
        self.dt = dt

    def f(self, X, u, dt):
        return X @ self.F.T

    def h(self, X):
        return X @ self.H.T

    def simulate(self, n, seed):
        rng = np.random.default_rng(seed)
        x = np.array([0.0, 0.0, 1.0, -0.5])
        zs = []
        for _ in range(n):
            x = self.F @ x + rng.multivariate_normal(np.zeros(4), self.Q)
            zs.append(self.H @ x + rng.multivariate_normal(np.zeros(2), self.R))
        return np.array(zs)

    def kalman(self, x, P, zs):
        """Textbook Kalman filter, the closed-form reference."""
        out = []
        for z in zs:
            x = self.F @ x
            P = self.F @ P @ self.F.T + self.Q
            S = self.H @ P @ self.H.T + self.R
            K = P @ self.H.T @ np.linalg.inv(S)
            x = x + K @ (z - self.H @ x)
            P = P - K @ S @ K.T
            out.append(x)
        return np.array(out), P


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
