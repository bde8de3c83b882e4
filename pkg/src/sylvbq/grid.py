"""Uniform square grids, scheme parameters and the scalar scheme coefficients."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError


@dataclass(frozen=True)
class GridSpec:
    """Square domain ``[L0, L1]^2`` with ``J`` subintervals per axis and time step ``l``."""

    L0: float
    L1: float
    J: int
    h: float
    t0: float
    l: float
    N_steps: int

    @property
    def order(self) -> int:
        return self.J + 1

    def nodes(self) -> np.ndarray:
        """Node coordinates ``x_j = L0 + j h``, with the last node pinned to ``L1``."""
        x = self.L0 + self.h * np.arange(self.J + 1)
        x[-1] = self.L1
        return x

    def node(self, j: int) -> float:
        if j == self.J:
            return float(self.L1)
        return self.L0 + j * self.h

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """``(X, Y)`` with ``X[j, m] = x_j`` and ``Y[j, m] = y_m``."""
        x = self.nodes()
        return np.meshgrid(x, x, indexing="ij")

    def time(self, n: int) -> float:
        return self.t0 + n * self.l

    @property
    def T(self) -> float:
        return self.time(self.N_steps)


def build_grid(L0, L1, J, t0, l, N_steps) -> GridSpec:
    if not L1 > L0:
        raise ConfigError(f"need L1 > L0, got L0={L0}, L1={L1}")
    if int(J) != J or J < 2:
        raise ConfigError(f"J must be an integer >= 2 (an interior node is required), got {J}")
    if not l > 0:
        raise ConfigError(f"time step l must be positive, got {l}")
    if int(N_steps) != N_steps or N_steps < 0:
        raise ConfigError(f"N_steps must be a non-negative integer, got {N_steps}")
    J = int(J)
    return GridSpec(float(L0), float(L1), J, (L1 - L0) / J, float(t0), float(l), int(N_steps))


def grid_for_interval(L0, L1, J, l, t0=0.0, T=1.0) -> GridSpec:
    """Grid whose step count covers ``[t0, T]`` with step ``l`` (rounded to the nearest integer)."""
    if not l > 0:
        raise ConfigError(f"time step l must be positive, got {l}")
    return build_grid(L0, L1, J, t0, l, int(round((T - t0) / l)))


@dataclass(frozen=True)
class SchemeParams:
    alpha: float = 0.25
    q: float = 0.01

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.q)):
            raise ConfigError("alpha and q must be finite")


@dataclass(frozen=True)
class CoefficientSet:
    """Scalars of the scheme. ``h``, ``l``, ``alpha`` and ``q`` are carried along for convenience."""

    sigma: float
    delta: float
    a1: float
    a2: float
    b1: float
    b2: float
    c1: float
    c2: float
    omega: float
    omega1: float
    omega1bar: float
    omega2: float
    h: float
    l: float
    alpha: float
    q: float


def compute_coefficients(grid: GridSpec, params: SchemeParams) -> CoefficientSet:
    alpha, q, h, l = params.alpha, params.q, grid.h, grid.l
    sigma = l * l / (h * h)
    delta = q / (h * h)
    a1 = 0.5 + 2.0 * alpha * sigma
    a2 = -alpha * sigma
    b1 = 1.0 - 2.0 * (1.0 - 2.0 * alpha) * sigma
    b2 = (1.0 - 2.0 * alpha) * sigma
    c1 = (1.0 - 2.0 * alpha) * delta
    c2 = alpha * delta
    omega = 2.0 * a2 * c2
    omega1 = a1 + 6.0 * omega
    return CoefficientSet(
        sigma=sigma, delta=delta,
        a1=a1, a2=a2, b1=b1, b2=b2, c1=c1, c2=c2,
        omega=omega, omega1=omega1, omega1bar=omega1 + omega, omega2=a2 - 4.0 * omega,
        h=h, l=l, alpha=alpha, q=q,
    )


@dataclass(frozen=True)
class ScalingReport:
    l: float
    h_power: float
    ratio: float
    satisfied: bool


def step_scaling_report(grid: GridSpec, s: float = 1.0) -> ScalingReport:
    """Compare ``l`` against ``h**(2+s)``. Advisory only: nothing refuses to run on ``False``."""
    if not s > 0:
        raise ConfigError(f"s must be positive, got {s}")
    hp = grid.h ** (2.0 + s)
    ratio = grid.l / hp
    # ratio is computed from rounded quantities; accept the exact boundary case
    return ScalingReport(grid.l, hp, ratio, bool(grid.l <= hp or np.isclose(ratio, 1.0, rtol=1e-12, atol=0)))
