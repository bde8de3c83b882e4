"""The two benchmark problems with closed-form solutions, and a residual diagnostic.

Each case carries the source term exactly as published (``g``) and, separately,
the source obtained by substituting its exact solution into
``u_tt = Δu + (q u_xx + u^2)_xx + g`` for a given ``q`` (``manufactured_g``).
For the published ``q = 0.01`` the two differ; ``residual_check`` measures by
how much.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import ConfigError

SOURCES = ("printed", "manufactured", "none")


@dataclass(frozen=True)
class ManufacturedCase:
    name: str
    domain: tuple[float, float]
    scalar_kind: str
    exact_u: Callable
    phi: Callable
    g: Callable
    u_xx: Callable
    manufactured_g: Callable | None = None
    t0: float = 0.0
    T: float = 1.0
    # published (J, l, Er, RelEr) rows
    reference: tuple = field(default=(), compare=False)

    @property
    def dtype(self):
        return np.complex128 if self.scalar_kind == "complex" else np.float64

    def v_exact(self, x, y, t, q):
        """Auxiliary unknown ``v = q u_xx + u^2`` in closed form."""
        u = self.exact_u(x, y, t)
        return q * self.u_xx(x, y, t) + u * u

    def source(self, kind="printed", q=0.01):
        """Source callable ``(x, y, t) -> g`` or ``None`` for a homogeneous problem."""
        if kind == "printed":
            return self.g
        if kind == "manufactured":
            if self.manufactured_g is None:
                raise ConfigError(f"case {self.name!r} has no manufactured source")
            return lambda x, y, t: self.manufactured_g(x, y, t, q)
        if kind == "none":
            return None
        raise ConfigError(f"unknown source kind {kind!r}; expected one of {SOURCES}")


# -- polynomial-exponential case on [-1, 1]^2 ---------------------------------

def _ex1_u(x, y, t):
    return ((x * x - 1) ** 4 + (y * y - 1) ** 2) * np.exp(-t)


def _ex1_phi(x, y, t0=0.0):
    return -_ex1_u(x, y, t0)


def _ex1_uxx(x, y, t):
    return 8 * (x * x - 1) ** 2 * (7 * x * x - 1) * np.exp(-t) + 0 * y


def _ex1_source(x, y, t, q):
    x2, y2 = x * x, y * y
    first = (x2 - 1) ** 2 * (x2 * x2 - 58 * x2 + 9) - q * 48 * (35 * x2 * x2 - 30 * x2 + 3) + y2 * y2 - 14 * y2 + 5
    second = 16 * (x2 - 1) ** 2 * ((x2 - 1) ** 4 * (15 * x2 - 1) + (y2 - 1) ** 2 * (7 * x2 - 1))
    return first * np.exp(-t) - second * np.exp(-2 * t)


def _ex1_g(x, y, t):
    # as published; its u_xxxx term carries coefficient 1 rather than q
    return _ex1_source(x, y, t, 1.0)


def example1() -> ManufacturedCase:
    return ManufacturedCase(
        name="example1",
        domain=(-1.0, 1.0),
        scalar_kind="real",
        exact_u=_ex1_u,
        phi=_ex1_phi,
        g=_ex1_g,
        u_xx=_ex1_uxx,
        manufactured_g=_ex1_source,
        reference=(
            (10, 1 / 100, 4.0e-3, 0.1317),
            (16, 1 / 120, 3.3e-3, 0.1323),
            (20, 1 / 200, 2.0e-3, 0.1335),
            (24, 1 / 220, 1.8e-3, 0.1337),
            (30, 1 / 280, 1.4e-3, 0.1340),
            (40, 1 / 400, 9.8e-4, 0.1344),
            (50, 1 / 500, 7.8e-4, 0.1346),
        ),
    )


# -- two-particle interaction case on [-2π, 2π]^2, complex valued ---------------

def _psi2(z):
    return np.cos(z / 2) ** 2


def _theta(t):
    return np.exp(-1j * t)


def _ex2_u(x, y, t):
    return 2 * _psi2(x) * _psi2(y) * _theta(t)


def _ex2_phi(x, y, t0=0.0):
    # du/dt = -i u
    return -2j * _psi2(x) * _psi2(y) * _theta(t0)


def _ex2_uxx(x, y, t):
    return 2 * (-np.cos(x) / 2) * _psi2(y) * _theta(t)


def _ex2_g(x, y, t):
    u = _ex2_u(x, y, t)
    return (4 - 6 * _psi2(y)) * u * u - _psi2(x) * u


def _ex2_source(x, y, t, q):
    th = _theta(t)
    cx, cy = _psi2(x), _psi2(y)
    u = 2 * cx * cy * th
    lap = 2 * th * (-np.cos(x) / 2 * cy - cx * np.cos(y) / 2)
    uxxxx = 2 * th * (np.cos(x) / 2) * cy
    # (psi^4)'' = -(cos x + cos 2x) / 2
    u2xx = 4 * th * th * cy * cy * (-(np.cos(x) + np.cos(2 * x)) / 2)
    return -u - lap - q * uxxxx - u2xx


def example2() -> ManufacturedCase:
    return ManufacturedCase(
        name="example2",
        domain=(-2 * np.pi, 2 * np.pi),
        scalar_kind="complex",
        exact_u=_ex2_u,
        phi=_ex2_phi,
        g=_ex2_g,
        u_xx=_ex2_uxx,
        manufactured_g=_ex2_source,
        reference=(
            (10, 1 / 100, 4.6e-3, 0.2311),
            (16, 1 / 120, 4.4e-3, 0.2372),
            (20, 1 / 200, 2.4e-3, 0.2506),
            (24, 1 / 220, 2.3e-3, 0.2671),
            (30, 1 / 280, 2.0e-3, 0.3074),
            (40, 1 / 400, 1.4e-3, 0.3592),
            (50, 1 / 500, 7.6e-4, 0.2355),
        ),
    )


CASES = {"example1": example1, "example2": example2}


def get_case(name: str) -> ManufacturedCase:
    try:
        return CASES[name]()
    except KeyError:
        raise ConfigError(f"unknown case {name!r}; expected one of {sorted(CASES)}") from None


def residual_check(case, h, l, t, q=0.01, source="printed", samples=41) -> float:
    """Max-norm of ``u_tt - Δu - (q u_xx + u^2)_xx - g`` with every derivative differenced.

    The exact solution is evaluated at ``x ± h``, ``t ± l`` directly (no grid,
    no ghost nodes), so the value tends to zero like ``O(h^2 + l^2)`` when the
    source really manufactures the solution and plateaus otherwise.
    """
    if not (h > 0 and l > 0):
        raise ConfigError("h and l must be positive")
    u = case.exact_u
    g = case.source(source, q) if hasattr(case, "source") else case.g
    L0, L1 = case.domain
    s = np.linspace(L0, L1, samples)
    X, Y = np.meshgrid(s, s, indexing="ij")

    def d2x(f, x, y):
        return (f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / (h * h)

    def v(x, y):
        return q * d2x(lambda a, b: u(a, b, t), x, y) + u(x, y, t) ** 2

    utt = (u(X, Y, t + l) - 2 * u(X, Y, t) + u(X, Y, t - l)) / (l * l)
    lap = d2x(lambda a, b: u(a, b, t), X, Y) + (u(X, Y + h, t) - 2 * u(X, Y, t) + u(X, Y - h, t)) / (h * h)
    res = utt - lap - d2x(v, X, Y)
    if g is not None:
        res = res - g(X, Y, t)
    return float(np.max(np.abs(res)))
