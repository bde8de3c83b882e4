"""Solvers for the generalized Sylvester equation ``P X + X Q^T = C``.

Three back-ends share one residual contract:

* ``fixed_point`` -- defect iteration ``X <- X + (C - P X - X Q^T)``, valid when
  the operator is within ``kappa < 1`` of the identity;
* ``schur`` -- Bartels-Stewart: real Schur forms of ``P`` and ``Q^T`` followed by
  quasi-triangular back-substitution;
* ``kron_direct`` -- dense LU on ``I (x) P + Q (x) I``; an oracle for small orders.

Operands are always real. A complex right-hand side is solved as two real
problems (real and imaginary parts).
"""
from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .exceptions import ConvergenceError, NotContractiveError, SingularOperatorError, SolverError
from .matrices import apply_pair

RESIDUAL_FLOOR = 1e-30
PIVOT_FLOOR = 1e-300
KRON_MAX_ORDER = 32
METHODS = ("fixed_point", "schur", "kron_direct")


@dataclass
class SylvesterProblem:
    P: object
    Q: object
    C: np.ndarray
    tol: float = 1e-12
    max_iters: int = 200

    def __post_init__(self):
        C = np.asarray(self.C)
        n = C.shape[0] if C.ndim == 2 else -1
        if C.ndim != 2 or C.shape != (n, n) or self.P.shape != (n, n) or self.Q.shape != (n, n):
            raise ValueError(
                f"P, Q, C must be conformable squares, got {self.P.shape}, {self.Q.shape}, {C.shape}"
            )
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        self.C = C


@dataclass
class SolveReport:
    X: np.ndarray
    residual: float
    iterations: int
    method: str
    contraction: float | None = None
    history: list = field(default_factory=list)
    min_pivot: float | None = None


def relative_residual(P, Q, X, C) -> float:
    r = np.linalg.norm(apply_pair(P, Q, X) - C)
    return float(r / max(np.linalg.norm(C), RESIDUAL_FLOOR))


def contraction_factor(P, Q, norm="fro") -> float:
    """``|P - I/2| + |Q - I/2|``, a certified bound on ``|L_{P,Q} - I|``."""
    half = 0.5 * np.eye(P.shape[0])
    ord_ = "fro" if norm == "fro" else 2
    return float(np.linalg.norm(np.asarray(P) - half, ord_) + np.linalg.norm(np.asarray(Q) - half, ord_))


def _split_complex(backend, prob, **kw):
    if not np.iscomplexobj(prob.C):
        return backend(prob, **kw)
    x0 = kw.pop("x0", None)
    re = backend(
        SylvesterProblem(prob.P, prob.Q, prob.C.real.copy(), prob.tol, prob.max_iters),
        x0=None if x0 is None else np.real(x0), **kw,
    )
    im = backend(
        SylvesterProblem(prob.P, prob.Q, prob.C.imag.copy(), prob.tol, prob.max_iters),
        x0=None if x0 is None else np.imag(x0), **kw,
    )
    X = re.X + 1j * im.X
    pivots = [p for p in (re.min_pivot, im.min_pivot) if p is not None]
    return SolveReport(
        X=X,
        residual=relative_residual(prob.P, prob.Q, X, prob.C),
        iterations=re.iterations + im.iterations,
        method=re.method,
        contraction=re.contraction,
        history=re.history + im.history,
        min_pivot=min(pivots) if pivots else None,
    )


def _fixed_point(prob, x0=None, kappa=None):
    if kappa is None:
        kappa = contraction_factor(prob.P, prob.Q)
    if not kappa < 1.0:
        raise NotContractiveError(
            f"contraction bound kappa = {kappa:.3g} >= 1: not in the near-identity regime; use schur"
        )
    C = prob.C
    cnorm = max(np.linalg.norm(C), RESIDUAL_FLOOR)
    X = np.zeros_like(C) if x0 is None else np.array(x0, dtype=C.dtype)
    D = C - apply_pair(prob.P, prob.Q, X)
    history = []
    for k in range(1, prob.max_iters + 1):
        X += D
        D = C - apply_pair(prob.P, prob.Q, X)
        r = float(np.linalg.norm(D) / cnorm)
        history.append(r)
        if r <= prob.tol:
            return SolveReport(X, r, k, "fixed_point", kappa, history)
        if not np.isfinite(r):
            break
    raise ConvergenceError(
        f"fixed point did not reach tol={prob.tol:g} in {prob.max_iters} iterations "
        f"(residual {history[-1]:.3e}, kappa {kappa:.3g})"
    )


def solve_fixed_point(prob: SylvesterProblem, x0=None) -> SolveReport:
    """Defect iteration started from ``x0`` (zero by default).

    Raises :class:`NotContractiveError` when the Frobenius contraction bound is
    not below one, :class:`ConvergenceError` after ``max_iters`` steps.
    """
    kappa = contraction_factor(prob.P, prob.Q)
    return _split_complex(_fixed_point, prob, x0=x0, kappa=kappa)


def _blocks(T):
    """Diagonal block boundaries ``[(i0, i1), ...]`` of a real quasi-triangular matrix."""
    n = T.shape[0]
    out, i = [], 0
    while i < n:
        if i + 1 < n and T[i + 1, i] != 0.0:
            out.append((i, i + 2))
            i += 2
        else:
            out.append((i, i + 1))
            i += 1
    return out


@dataclass(frozen=True)
class _SchurFactors:
    Zp: np.ndarray
    Tp: np.ndarray
    p_blocks: list
    Zq: np.ndarray
    Tq: np.ndarray
    q_blocks: list


class _SchurCache:
    """Schur factorizations keyed by operand contents; safe for concurrent readers."""

    def __init__(self, maxsize=32):
        self._data = {}
        self._lock = threading.Lock()
        self.maxsize = maxsize

    def get(self, P, Q) -> _SchurFactors:
        P = np.ascontiguousarray(P, dtype=float)
        Q = np.ascontiguousarray(Q, dtype=float)
        key = (P.shape, P.tobytes(), Q.tobytes())
        with self._lock:
            hit = self._data.get(key)
        if hit is not None:
            return hit
        Tp, Zp = sla.schur(P, output="real")
        Tq, Zq = sla.schur(Q.T, output="real")
        f = _SchurFactors(Zp, Tp, _blocks(Tp), Zq, Tq, _blocks(Tq))
        with self._lock:
            if len(self._data) >= self.maxsize:
                self._data.pop(next(iter(self._data)))
            self._data[key] = f
        return f

    def clear(self):
        with self._lock:
            self._data.clear()


schur_cache = _SchurCache()


def _small_sylvester(T, S, rhs, floor):
    # T z + z S = rhs with T, S of size 1 or 2
    t, s = T.shape[0], S.shape[0]
    K = np.kron(np.eye(s), T) + np.kron(S.T, np.eye(t))
    lu, piv = sla.lu_factor(K, check_finite=False)
    pivot = float(np.min(np.abs(np.diag(lu))))
    if pivot < floor:
        raise SingularOperatorError(f"back-substitution pivot {pivot:.3e} below floor {floor:.3e}")
    z = sla.lu_solve((lu, piv), rhs.reshape(-1, order="F"), check_finite=False)
    return z.reshape((t, s), order="F"), pivot


def _quasi_triangular_solve(f: _SchurFactors, F, floor):
    """Solve ``Tp Y + Y Tq = F`` column block by column block."""
    Tp, Tq = f.Tp, f.Tq
    n = Tp.shape[0]
    Y = np.zeros_like(F)
    p_triangular = len(f.p_blocks) == n
    diag_p = np.diag(Tp)
    min_pivot = np.inf
    for k0, k1 in f.q_blocks:
        rhs = F[:, k0:k1] - Y[:, :k0] @ Tq[:k0, k0:k1]
        S = Tq[k0:k1, k0:k1]
        if k1 - k0 == 1 and p_triangular:
            pivots = np.abs(diag_p + S[0, 0])
            pivot = float(pivots.min())
            if pivot < floor:
                raise SingularOperatorError(f"back-substitution pivot {pivot:.3e} below floor {floor:.3e}")
            min_pivot = min(min_pivot, pivot)
            Y[:, k0] = sla.solve_triangular(Tp + S[0, 0] * np.eye(n), rhs[:, 0], check_finite=False)
            continue
        Z = np.zeros((n, k1 - k0))
        for i0, i1 in reversed(f.p_blocks):
            r = rhs[i0:i1] - Tp[i0:i1, i1:] @ Z[i1:]
            Z[i0:i1], pivot = _small_sylvester(Tp[i0:i1, i0:i1], S, r, floor)
            min_pivot = min(min_pivot, pivot)
        Y[:, k0:k1] = Z
    return Y, min_pivot


def _schur(prob, x0=None, cache=None):
    P, Q, C = np.asarray(prob.P, dtype=float), np.asarray(prob.Q, dtype=float), prob.C
    f = (cache or schur_cache).get(P, Q)
    floor = PIVOT_FLOOR * max(1.0, np.linalg.norm(P), np.linalg.norm(Q))
    X = np.zeros_like(C)
    rhs = C
    total_pivot = np.inf
    # one pass of iterative refinement is allowed before the contract is declared broken
    for sweep in range(2):
        Y, pivot = _quasi_triangular_solve(f, f.Zp.T @ rhs @ f.Zq, floor)
        total_pivot = min(total_pivot, pivot)
        X = X + f.Zp @ Y @ f.Zq.T
        res = relative_residual(prob.P, prob.Q, X, C)
        if res <= prob.tol:
            return SolveReport(X, res, sweep + 1, "schur", None, [res], total_pivot)
        rhs = C - apply_pair(prob.P, prob.Q, X)
    raise SolverError(f"schur solve residual {res:.3e} exceeds tol {prob.tol:g} (ill-conditioned operator)")


def solve_schur(prob: SylvesterProblem, cache=None) -> SolveReport:
    """Bartels-Stewart solve. Factorizations are reused across calls with equal operands."""
    return _split_complex(_schur, prob, cache=cache)


def kron_matrix(P, Q) -> np.ndarray:
    """``I (x) P + Q (x) I``: the matrix of ``X -> P X + X Q^T`` acting on column-major ``vec(X)``."""
    n = P.shape[0]
    eye = np.eye(n)
    return np.kron(eye, np.asarray(P, dtype=float)) + np.kron(np.asarray(Q, dtype=float), eye)


def _kron_direct(prob, x0=None):
    n = prob.C.shape[0]
    if n > KRON_MAX_ORDER:
        raise SolverError(f"kron_direct refuses order {n} > {KRON_MAX_ORDER}")
    M = kron_matrix(prob.P, prob.Q)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(M, check_finite=False)
    pivot = float(np.min(np.abs(np.diag(lu))))
    floor = PIVOT_FLOOR * max(1.0, np.linalg.norm(M))
    if not pivot >= floor:
        raise SingularOperatorError(f"I(x)P + Q(x)I is singular (min pivot {pivot:.3e})")
    x = sla.lu_solve((lu, piv), prob.C.reshape(-1, order="F"), check_finite=False)
    X = x.reshape((n, n), order="F")
    res = relative_residual(prob.P, prob.Q, X, prob.C)
    if res > prob.tol:
        raise SolverError(f"kron_direct residual {res:.3e} exceeds tol {prob.tol:g}")
    return SolveReport(X, res, 1, "kron_direct", None, [res], pivot)


def solve_kron_direct(prob: SylvesterProblem) -> SolveReport:
    """Dense oracle; refuses orders above 32."""
    return _split_complex(_kron_direct, prob)


class SylvesterSolver:
    """Callable ``solver(P, Q, C, x0=None) -> SolveReport`` with a back-end policy.

    ``method="auto"`` picks ``fixed_point`` when the contraction bound is below
    ``switch`` and ``schur`` otherwise.
    """

    def __init__(self, method="auto", tol=1e-12, max_iters=200, switch=0.9, cache=None):
        if method not in METHODS + ("auto",):
            raise ValueError(f"unknown solver method {method!r}")
        self.method = method
        self.tol = tol
        self.max_iters = max_iters
        self.switch = switch
        self.cache = cache or schur_cache

    def select(self, P, Q) -> str:
        if self.method != "auto":
            return self.method
        return "fixed_point" if contraction_factor(P, Q) < self.switch else "schur"

    def __call__(self, P, Q, C, x0=None) -> SolveReport:
        prob = SylvesterProblem(P, Q, C, self.tol, self.max_iters)
        method = self.select(P, Q)
        if method == "fixed_point":
            return solve_fixed_point(prob, x0=x0)
        if method == "schur":
            return solve_schur(prob, cache=self.cache)
        return solve_kron_direct(prob)
