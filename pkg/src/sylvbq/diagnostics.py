"""Stability diagnostics: quadratic-inequality discriminants and a small-data probe."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .exceptions import BlowUpError, ConfigError, SolverError
from .grid import CoefficientSet, SchemeParams, build_grid
from .metrics import frobenius
from .problems import get_case
from .stepper import ProblemSetup, RunConfig, discrete_v, run


def _root(disc, lin, quad):
    """Larger root ``(sqrt(disc) - lin) / (2 quad)`` (may be negative); ``None`` without a real root."""
    if disc < 0:
        return None
    return (math.sqrt(disc) - lin) / (2.0 * quad)


@dataclass(frozen=True)
class StabilityDiagnostics:
    l: float
    h: float
    norm_phi: float
    epsilon: float
    # first-step U bound: 8 eta^2 + (19 + 8 l |phi|) eta + 3 l |phi| + 4 l^2 |phi|^2 - eps < 0
    Delta1: float
    eta1: float | None
    Delta1_closed: float
    # first-step V bound: A eta^2 + (B + 16 |c2|) eta + C - eps <= 0
    Acoef: float
    Bcoef: float
    Ccoef: float
    Delta2: float
    eta1_prime: float | None
    Delta2_asymptotic: float
    Delta2_leading: float
    Delta2_printed: float

    @property
    def eta0(self):
        # admissible only when both thresholds are positive
        roots = [r for r in (self.eta1, self.eta1_prime) if r is not None and r > 0]
        return min(roots) if len(roots) == 2 else None

    @property
    def Delta1_limit(self):
        return 361.0 + 32.0 * self.epsilon


def discriminant_diagnostics(l, h, norm_phi, epsilon, coeffs: CoefficientSet | None = None,
                             alpha=0.25, q=0.01) -> StabilityDiagnostics:
    """Evaluate both first-step discriminants and their small-``h`` forms.

    ``Delta1_closed`` is the simplified polynomial ``361 + 32 eps + 416 l - 256 l^2``,
    which coincides with ``Delta1`` only for ``norm_phi = 2``. ``Delta2_asymptotic``
    is the leading-order form ``16/h^4 (1 + 20a + |1-2a|)^2 + 128 a |q| eps / h^2``
    with the actual ``alpha, q``; it is the true leading order only for ``q = 1``.
    ``Delta2_leading`` keeps ``q`` inside the square,
    ``16/h^4 (1 + (20a + |1-2a|) |q|)^2 + 128 a |q| eps / h^2``, and tracks
    ``Delta2`` for any ``q``. ``Delta2_printed`` is ``676/h^4 + 8 eps/h^2``.
    Negative discriminants are reported (root ``None``), never raised.
    """
    if not h > 0:
        raise ConfigError(f"h must be positive, got {h}")
    # l = 0 is allowed as the limiting case
    if not l >= 0:
        raise ConfigError(f"l must be non-negative, got {l}")
    if norm_phi < 0 or epsilon < 0:
        raise ConfigError("norm_phi and epsilon must be non-negative")
    if coeffs is not None:
        alpha, q = coeffs.alpha, coeffs.q
    c1 = (1 - 2 * alpha) * q / (h * h)
    c2 = alpha * q / (h * h)
    lp = l * norm_phi

    lin1 = 19 + 8 * lp
    d1 = lin1 ** 2 - 32 * (3 * lp + 4 * lp * lp - epsilon)
    A = 3 + 32 * abs(c2)
    B = 4 * (abs(c1) + 8 * abs(c2) * (2 + lp) + lp + 1 / (h * h))
    C = 2 * (1 + 8 * abs(c2)) * lp * lp + 4 * l * (4 * abs(c2) + 1 / (h * h)) * norm_phi
    lin2 = B + 16 * abs(c2)
    d2 = lin2 ** 2 - 4 * A * (C - epsilon)
    return StabilityDiagnostics(
        l=l, h=h, norm_phi=norm_phi, epsilon=epsilon,
        Delta1=d1, eta1=_root(d1, lin1, 8.0),
        Delta1_closed=361 + 32 * epsilon + 416 * l - 256 * l * l,
        Acoef=A, Bcoef=B, Ccoef=C,
        Delta2=d2, eta1_prime=_root(d2, lin2, A),
        Delta2_asymptotic=16 / h ** 4 * (1 + 20 * alpha + abs(1 - 2 * alpha)) ** 2 + 128 * alpha * abs(q) * epsilon / h ** 2,
        Delta2_leading=16 / h ** 4 * (1 + (20 * alpha + abs(1 - 2 * alpha)) * abs(q)) ** 2
        + 128 * alpha * abs(q) * epsilon / h ** 2,
        Delta2_printed=676 / h ** 4 + 8 * epsilon / h ** 2,
    )


def pair_norm(U, V) -> float:
    """``|(U, V)|``: Frobenius norm of the stacked pair."""
    return math.hypot(frobenius(U), frobenius(V))


@dataclass
class ProbeRecord:
    eta: float
    epsilon: float
    steps: int
    max_norm: float
    bounded: bool
    blow_up_step: int | None
    first_exceed_step: int | None
    scale: float
    norms: list


def _scaled_setup(eta, J, l, steps, params, case_name="example1"):
    case = get_case(case_name)
    grid = build_grid(*case.domain, J, case.t0, l, steps)
    X, Y = grid.mesh()
    shape = np.asarray(case.exact_u(X, Y, grid.t0), dtype=case.dtype)
    phi_shape = np.asarray(case.phi(X, Y, grid.t0), dtype=case.dtype)

    def norm_at(s):
        U0 = s * shape
        return pair_norm(U0, discrete_v(U0, params.q, grid.h))

    if eta == 0:
        s = 0.0
    else:
        hi = 1.0
        while norm_at(hi) < eta:
            hi *= 2.0
        s = brentq(lambda s: norm_at(s) - eta, 0.0, hi, xtol=1e-15, rtol=1e-14)
    U0 = s * shape
    return s, ProblemSetup(grid, params, U0, s * phi_shape, discrete_v(U0, params.q, grid.h), None, None, "probe")


def stability_probe(eta, steps, J=10, l=1 / 100, epsilon=1.0, params=SchemeParams(), config=None) -> ProbeRecord:
    """Homogeneous run from small data with ``|(U^0, V^0)| = eta``.

    The initial profile is the first benchmark's solution shape (with its
    velocity), rescaled; ``U^1`` comes from the Taylor start. Blow-up or solver
    failure is reported through ``blow_up_step``.
    """
    if eta < 0:
        raise ConfigError(f"eta must be non-negative, got {eta}")
    config = config or RunConfig(init_mode="taylor")
    s, setup = _scaled_setup(eta, J, l, steps, params)
    blow = None
    try:
        res = run(setup, config)
    except (BlowUpError, SolverError) as exc:
        res = exc.partial
        blow = exc.step
    norms = [(n, math.hypot(u, v)) for n, u, v in res.norms]
    mx = max(v for _, v in norms) if norms else 0.0
    exceed = next((n for n, v in norms if v > epsilon), None)
    return ProbeRecord(eta, epsilon, steps, mx, blow is None and mx <= epsilon, blow, exceed, s, norms)
