"""Time marching of the coupled ``(U, V)`` system.

Each step solves ``W U^{n+1} + U^{n+1} A^T = C`` for the new field, with

    C = B~ U^n + U^n B^T + b2 R V^n - (W U^{n-1} + U^{n-1} A^T) - a2 R (F^{n-1} + F^n) + l^2 G^n

and then recovers ``V^{n+1}`` explicitly. ``F = U∘U`` (algebraic square, also
for complex fields). Neumann conditions are built into the matrices.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .exceptions import BlowUpError, ConfigError, SolverError
from .grid import CoefficientSet, GridSpec, SchemeParams, compute_coefficients
from .matrices import SchemeMatrices, apply_pair, build_scheme_matrices, laplacian, second_difference_x
from .metrics import ErrorReport, frobenius
from .sylvester import SylvesterSolver

DEFAULT_GUARD = 1e12


@dataclass(frozen=True)
class ProblemSetup:
    grid: GridSpec
    params: SchemeParams
    u0: np.ndarray
    phi: np.ndarray
    v0: np.ndarray
    source: Callable | None = None
    exact: Callable | None = None
    name: str = "custom"

    def __post_init__(self):
        n = self.grid.order
        for label in ("u0", "phi", "v0"):
            if np.shape(getattr(self, label)) != (n, n):
                raise ConfigError(f"{label} must have shape {(n, n)}, got {np.shape(getattr(self, label))}")

    @property
    def dtype(self):
        return np.result_type(self.u0, self.phi, self.v0)

    def sample_source(self, t):
        if self.source is None:
            return None
        X, Y = self.grid.mesh()
        return np.broadcast_to(np.asarray(self.source(X, Y, t), dtype=self.dtype), X.shape).copy()

    def sample_exact(self, t):
        X, Y = self.grid.mesh()
        return np.broadcast_to(np.asarray(self.exact(X, Y, t), dtype=self.dtype), X.shape).copy()


def discrete_v(U, q, h):
    """``q D_x^2 U + U∘U`` with the reflected-ghost second difference."""
    return q * second_difference_x(U) / (h * h) + U * U


def setup_from_case(case, grid: GridSpec, params: SchemeParams, source="printed") -> ProblemSetup:
    X, Y = grid.mesh()
    dt = case.dtype
    u0 = np.asarray(case.exact_u(X, Y, grid.t0), dtype=dt)
    phi = np.asarray(case.phi(X, Y, grid.t0), dtype=dt)
    return ProblemSetup(
        grid=grid,
        params=params,
        u0=u0,
        phi=phi,
        v0=discrete_v(u0, params.q, grid.h),
        source=case.source(source, params.q),
        exact=case.exact_u,
        name=case.name,
    )


@dataclass(frozen=True)
class StepState:
    """Sliding window ``(U^{n-1}, U^n, V^{n-1}, V^n)``; ``F`` is always recomputed from ``U``."""

    n: int
    U_prev: np.ndarray
    U_curr: np.ndarray
    V_prev: np.ndarray
    V_curr: np.ndarray
    last_solve: object = field(default=None, compare=False)

    @property
    def F_prev(self):
        return self.U_prev * self.U_prev

    @property
    def F_curr(self):
        return self.U_curr * self.U_curr


def initialize(setup: ProblemSetup, mode="exact") -> StepState:
    """State at ``n = 1``.

    ``exact`` samples ``U^0, U^1`` from the exact solution; ``taylor`` builds
    ``U^1`` from ``u0``, ``phi`` and the PDE at ``t0`` to second order in ``l``.
    """
    g, q, h, l = setup.grid, setup.params.q, setup.grid.h, setup.grid.l
    if mode == "exact":
        if setup.exact is None:
            raise ConfigError("exact initialization needs an exact solution")
        U0 = setup.sample_exact(g.t0)
        U1 = setup.sample_exact(g.t0 + l)
        V0 = discrete_v(U0, q, h)
    elif mode == "taylor":
        U0 = np.array(setup.u0, dtype=setup.dtype)
        V0 = np.array(setup.v0, dtype=setup.dtype)
        utt = (laplacian(U0) + second_difference_x(V0)) / (h * h)
        G0 = setup.sample_source(g.t0)
        if G0 is not None:
            utt = utt + G0
        U1 = U0 + l * setup.phi + 0.5 * l * l * utt
    else:
        raise ConfigError(f"unknown init mode {mode!r}; expected 'exact' or 'taylor'")
    return StepState(1, U0, U1, V0, discrete_v(U1, q, h))


def assemble_rhs(state: StepState, mats: SchemeMatrices, coeffs: CoefficientSet, G_n=None):
    """Right-hand side of the reduced equation for ``U^{n+1}``."""
    C = (
        apply_pair(mats.Btilde, mats.B, state.U_curr)
        + coeffs.b2 * (mats.R @ state.V_curr)
        - apply_pair(mats.W, mats.A, state.U_prev)
        - coeffs.a2 * (mats.R @ (state.F_prev + state.F_curr))
    )
    if G_n is not None:
        C = C + coeffs.l ** 2 * G_n
    return C


def assemble_rhs_coupled(state: StepState, mats: SchemeMatrices, coeffs: CoefficientSet, G_n=None):
    """Same right-hand side reached through the coupled two-equation form.

    Returns ``(C, S)`` with ``V^{n+1} = 2 c2 R U^{n+1} + S``: the first equation
    is built as printed and ``V^{n+1}`` is eliminated numerically.
    """
    R = mats.R
    rhs1 = (
        apply_pair(mats.B, mats.B, state.U_curr)
        - apply_pair(mats.A, mats.A, state.U_prev)
        + R @ (coeffs.b2 * state.V_curr - coeffs.a2 * state.V_prev)
    )
    if G_n is not None:
        rhs1 = rhs1 + coeffs.l ** 2 * G_n
    S = 2.0 * (R @ (coeffs.c1 * state.U_curr + coeffs.c2 * state.U_prev)) - state.V_prev + state.F_prev + state.F_curr
    # L_A(U) + a2 R (2 c2 R U + S) = rhs1  <=>  W U + U A^T = rhs1 - a2 R S
    return rhs1 - coeffs.a2 * (R @ S), S


def advance(state: StepState, mats, coeffs, solver, G_n=None, guard=DEFAULT_GUARD, form="reduced", warm_start=True):
    """One step ``n -> n+1``."""
    if form == "reduced":
        C = assemble_rhs(state, mats, coeffs, G_n)
    elif form == "coupled":
        C, _ = assemble_rhs_coupled(state, mats, coeffs, G_n)
    else:
        raise ConfigError(f"unknown form {form!r}")
    try:
        rep = solver(mats.W, mats.A, C, x0=state.U_curr if warm_start else None)
    except SolverError as exc:
        exc.step = state.n + 1
        raise
    U_next = rep.X
    norm = frobenius(U_next)
    if not np.isfinite(norm) or (guard is not None and norm > guard):
        raise BlowUpError(state.n + 1, norm)
    R = mats.R
    V_next = (
        2.0 * coeffs.c2 * (R @ U_next)
        + 2.0 * (R @ (coeffs.c1 * state.U_curr + coeffs.c2 * state.U_prev))
        - state.V_prev
        + state.F_prev
        + state.F_curr
    )
    return StepState(state.n + 1, state.U_curr, U_next, state.V_curr, V_next, rep)


@dataclass(frozen=True)
class RunConfig:
    init_mode: str = "exact"
    solver: str = "auto"
    tol: float = 1e-12
    max_iters: int = 200
    guard: float | None = DEFAULT_GUARD
    form: str = "reduced"
    warm_start: bool = True
    keep_fields: bool = False


@dataclass
class RunResult:
    setup: ProblemSetup
    final: StepState | None
    report: ErrorReport | None
    iterations_total: int
    methods: Counter
    runtime_ms: float
    fields: list = field(default_factory=list)
    norms: list = field(default_factory=list)


def prepare(setup: ProblemSetup):
    coeffs = compute_coefficients(setup.grid, setup.params)
    return coeffs, build_scheme_matrices(coeffs, setup.grid.order)


def run(setup: ProblemSetup, config: RunConfig = RunConfig(), solver=None) -> RunResult:
    """March ``n = 1 .. N_steps``, tracking errors when an exact solution is known.

    Failures propagate with the failing step index; the partial result is
    attached to the exception as ``exc.partial``.
    """
    t_start = time.perf_counter()
    grid = setup.grid
    coeffs, mats = prepare(setup)
    if solver is None:
        solver = SylvesterSolver(config.solver, config.tol, config.max_iters)
    has_exact = setup.exact is not None
    steps, errs, unorms, fields, norms = [], [], [], [], []
    iters, methods = 0, Counter()

    def record(n, U, V):
        norms.append((n, frobenius(U), frobenius(V)))
        if config.keep_fields:
            fields.append((n, U, V))
        if has_exact:
            u = setup.sample_exact(grid.time(n))
            steps.append(n)
            errs.append(frobenius(U - u))
            unorms.append(frobenius(u))

    def result(state):
        report = None
        if has_exact:
            method = "+".join(sorted(methods)) if methods else None
            report = ErrorReport.from_steps(
                steps, errs, unorms,
                runtime_ms=1e3 * (time.perf_counter() - t_start),
                solver_iters_total=iters, method=method,
            )
        return RunResult(setup, state, report, iters, methods, 1e3 * (time.perf_counter() - t_start), fields, norms)

    if grid.N_steps == 0:
        U0 = setup.sample_exact(grid.t0) if (config.init_mode == "exact" and has_exact) else np.asarray(setup.u0)
        record(0, U0, discrete_v(U0, setup.params.q, grid.h))
        return result(None)

    state = initialize(setup, config.init_mode)
    record(0, state.U_prev, state.V_prev)
    record(1, state.U_curr, state.V_curr)
    try:
        while state.n < grid.N_steps:
            state = advance(
                state, mats, coeffs, solver,
                G_n=setup.sample_source(grid.time(state.n)),
                guard=config.guard, form=config.form, warm_start=config.warm_start,
            )
            iters += state.last_solve.iterations
            methods[state.last_solve.method] += 1
            record(state.n, state.U_curr, state.V_curr)
    except (SolverError, BlowUpError) as exc:
        exc.partial = result(state)
        raise
    return result(state)


def with_steps(setup: ProblemSetup, N_steps: int) -> ProblemSetup:
    return replace(setup, grid=replace(setup.grid, N_steps=int(N_steps)))
