"""Lexicographically flattened form of the scheme: one banded linear system per step.

Grid node ``(j, m)`` maps to ``k = j (J+1) + m`` (row-major). With this
ordering ``P X + X Q^T`` becomes ``(P (x) I + I (x) Q) vec(X)``, within-block
neighbours (offset 1) are y-couplings and block neighbours (offset ``J+1``)
are x-couplings.

Two constructions are provided. ``kron`` derives the flat matrices from the
small ones; ``rules`` fills them entry by entry from index rules (diagonal
``2a1``, near off-diagonals cut at block seams, far off-diagonals doubled in
the first and last block). :func:`flat_discrepancy` compares the two.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import lapack

from .exceptions import ConfigError, SingularOperatorError
from .grid import CoefficientSet
from .matrices import build_banded


@dataclass(frozen=True)
class FlatIndexMap:
    J: int

    @property
    def N(self) -> int:
        return self.J * (self.J + 2)

    def k(self, j, m) -> int:
        return j * (self.J + 1) + m

    def jm(self, k) -> tuple[int, int]:
        return divmod(k, self.J + 1)

    @property
    def Lambda(self) -> frozenset:
        # {n J + n - 1} within [1, N]: last node of each block (m = J)
        return frozenset(n * (self.J + 1) - 1 for n in range(1, self.J + 2) if 1 <= n * (self.J + 1) - 1 <= self.N)

    @property
    def Lambda_tilde(self) -> frozenset:
        # {n (J + 1)} within [1, N]: first node of each block after the first (m = 0)
        return frozenset(n * (self.J + 1) for n in range(1, self.J + 1) if n * (self.J + 1) <= self.N)

    @property
    def Theta(self) -> frozenset:
        return self.Lambda | self.Lambda_tilde


def flatten(X) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"flatten needs a square field, got shape {X.shape}")
    return X.reshape(-1).copy()


def unflatten(v, J=None) -> np.ndarray:
    v = np.asarray(v)
    n = int(round(np.sqrt(v.size)))
    if J is not None and n != J + 1:
        raise ValueError(f"vector of length {v.size} does not match J={J} (need {(J + 1) ** 2})")
    if n * n != v.size:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    return v.reshape(n, n).copy()


@dataclass(frozen=True)
class FlatMatrices:
    A_flat: sp.csr_matrix
    B_flat: sp.csr_matrix
    R_flat: sp.csr_matrix
    J: int
    form: str


def _kron_flat(coeffs, J):
    n = J + 1
    eye = sp.identity(n, format="csr")
    A = sp.csr_matrix(build_banded(coeffs.a1, coeffs.a2, n).dense)
    B = sp.csr_matrix(build_banded(coeffs.b1, coeffs.b2, n).dense)
    R = sp.csr_matrix(build_banded(-2.0, 1.0, n).dense)
    return (
        (sp.kron(A, eye) + sp.kron(eye, A)).tocsr(),
        (sp.kron(B, eye) + sp.kron(eye, B)).tocsr(),
        sp.kron(R, eye).tocsr(),
    )


def _rules_two_direction(diag, off, J, strict):
    """``diag`` on the diagonal, ``off`` couplings in both directions.

    Explicit rules: near super-diagonal ``off`` off the seams and zero on the
    last node of a block; near sub-diagonal ``off`` off the seams and zero on
    the first node of a block; ``2 off`` at (0, 1) and (N, N-1); far couplings
    ``2 off`` out of the first block and into the last one, ``off`` otherwise.
    The seam rows of interior blocks are not covered by any rule. With
    ``strict`` they stay zero; otherwise the (0, 1) / (N, N-1) doubling is
    applied to every block.
    """
    idx = FlatIndexMap(J)
    N, s = idx.N, J + 1
    M = sp.lil_matrix((N + 1, N + 1))
    for k in range(N + 1):
        M[k, k] = diag
    for k in range(N):
        m = k % s
        if m == J:
            continue
        if m == 0:
            if k == 0 or not strict:
                M[k, k + 1] = 2 * off
        else:
            M[k, k + 1] = off
    for k in range(1, N + 1):
        m = k % s
        if m == 0:
            continue
        if m == J:
            if k == N or not strict:
                M[k, k - 1] = 2 * off
        else:
            M[k, k - 1] = off
    for k in range(N + 1):
        if k <= J:
            M[k, k + s] = 2 * off
        elif k <= N - J - 1:
            M[k, k + s] = off
            M[k, k - s] = off
        else:
            M[k, k - s] = 2 * off
    return M.tocsr()


def _rules_R(J):
    N, s = FlatIndexMap(J).N, J + 1
    M = sp.lil_matrix((N + 1, N + 1))
    for k in range(N + 1):
        M[k, k] = -2.0
        if k <= J:
            M[k, k + s] = 2.0
        elif k <= N - J - 1:
            M[k, k + s] = 1.0
            M[k, k - s] = 1.0
        else:
            M[k, k - s] = 2.0
    return M.tocsr()


def build_flat_matrices(coeffs: CoefficientSet, J: int, form="kron", strict=False) -> FlatMatrices:
    if J < 2:
        raise ConfigError(f"J must be >= 2, got {J}")
    if form == "kron":
        A, B, R = _kron_flat(coeffs, J)
    elif form == "rules":
        A = _rules_two_direction(2 * coeffs.a1, coeffs.a2, J, strict)
        B = _rules_two_direction(2 * coeffs.b1, coeffs.b2, J, strict)
        R = _rules_R(J)
    else:
        raise ConfigError(f"unknown flat form {form!r}")
    return FlatMatrices(A, B, R, J, form)


def flat_discrepancy(a: FlatMatrices, b: FlatMatrices, atol=0.0) -> dict:
    """Offending ``(row, col)`` indices per matrix where ``a`` and ``b`` differ."""
    out = {}
    for name in ("A_flat", "B_flat", "R_flat"):
        D = (getattr(a, name) - getattr(b, name)).tocoo()
        bad = np.abs(D.data) > atol
        out[name] = sorted(zip(D.row[bad].tolist(), D.col[bad].tolist()))
    return out


@dataclass(frozen=True)
class FlatState:
    n: int
    u_prev: np.ndarray
    u_curr: np.ndarray
    v_prev: np.ndarray
    v_curr: np.ndarray


class FlatStepper:
    """Advances the flattened system.

    ``method="banded"`` factors ``Ã + 2 a2 c2 R̃^2`` once with LAPACK's banded
    LU (bandwidth ``2(J+1)``) and reuses it; ``method="dense"`` performs a full
    dense LU solve on every step, the classical cost profile.
    """

    def __init__(self, coeffs: CoefficientSet, J: int, method="banded", form="kron"):
        if method not in ("banded", "dense"):
            raise ConfigError(f"unknown flat method {method!r}")
        self.coeffs, self.J, self.method = coeffs, J, method
        self.mats = build_flat_matrices(coeffs, J, form)
        A, B, R = self.mats.A_flat, self.mats.B_flat, self.mats.R_flat
        R2 = (R @ R).tocsr()
        self.R = R
        self.W = (A + 2 * coeffs.a2 * coeffs.c2 * R2).tocsr()
        self.Bt = (B - 2 * coeffs.a2 * coeffs.c1 * R2).tocsr()
        self.bw = 2 * (J + 1)
        if method == "banded":
            self._factor_banded()
        else:
            self.W_dense = self.W.toarray()

    def _factor_banded(self):
        kl = ku = self.bw
        n = self.W.shape[0]
        ab = np.zeros((2 * kl + ku + 1, n))
        W = self.W.tocoo()
        ab[kl + ku + W.row - W.col, W.col] = W.data
        lu, piv, info = lapack.dgbtrf(ab, kl, ku)
        if info != 0:
            raise SingularOperatorError(f"banded LU failed (info={info})")
        self._lu, self._piv = lu, piv

    def solve(self, rhs):
        if np.iscomplexobj(rhs):
            return self.solve(rhs.real) + 1j * self.solve(rhs.imag)
        if self.method == "dense":
            return np.linalg.solve(self.W_dense, rhs)
        x, info = lapack.dgbtrs(self._lu, self.bw, self.bw, rhs, self._piv)
        if info != 0:
            raise SingularOperatorError(f"banded solve failed (info={info})")
        return x

    def rhs(self, s: FlatState, G_flat=None):
        c = self.coeffs
        f = s.u_prev * s.u_prev + s.u_curr * s.u_curr
        r = self.Bt @ s.u_curr + c.b2 * (self.R @ s.v_curr) - self.W @ s.u_prev - c.a2 * (self.R @ f)
        if G_flat is not None:
            r = r + c.l ** 2 * G_flat
        return r

    def step(self, s: FlatState, G_flat=None) -> FlatState:
        c = self.coeffs
        u_next = self.solve(self.rhs(s, G_flat))
        f = s.u_prev * s.u_prev + s.u_curr * s.u_curr
        v_next = 2 * c.c2 * (self.R @ u_next) + 2 * (self.R @ (c.c1 * s.u_curr + c.c2 * s.u_prev)) - s.v_prev + f
        return FlatState(s.n + 1, s.u_curr, u_next, s.v_curr, v_next)


def step_flat(state_flat: FlatState, stepper: FlatStepper, G_n_flat=None) -> FlatState:
    return stepper.step(state_flat, G_n_flat)


def run_flat(setup, method="banded", init_mode="exact", form="kron", guard=None):
    """March ``setup`` on the flattened system; returns ``[(n, U^n), ...]`` as square fields."""
    from .stepper import initialize  # local: stepper imports nothing from here
    from .grid import compute_coefficients

    grid = setup.grid
    coeffs = compute_coefficients(grid, setup.params)
    stepper = FlatStepper(coeffs, grid.J, method, form)
    if grid.N_steps == 0:
        return [(0, np.asarray(setup.sample_exact(grid.t0) if init_mode == "exact" else setup.u0))]
    st0 = initialize(setup, init_mode)
    s = FlatState(1, flatten(st0.U_prev), flatten(st0.U_curr), flatten(st0.V_prev), flatten(st0.V_curr))
    out = [(0, st0.U_prev), (1, st0.U_curr)]
    while s.n < grid.N_steps:
        G = setup.sample_source(grid.time(s.n))
        s = stepper.step(s, None if G is None else flatten(G))
        if guard is not None and not np.linalg.norm(s.u_curr) <= guard:
            from .exceptions import BlowUpError
            raise BlowUpError(s.n, float(np.linalg.norm(s.u_curr)))
        out.append((s.n, unflatten(s.u_curr)))
    return out
