"""Structured scheme matrices and the two-operand Sylvester map ``X -> P X + X Q^T``.

All scheme matrices are stored by diagonals (bandwidth at most two). Products
with a field cost O(bandwidth * n^2) and never form a dense copy; ``dense`` is
kept for the oracle path and for factorizations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import CoefficientSet

Field = np.ndarray


class BandedMatrix:
    """Square matrix stored as its nonzero diagonals.

    Supports ``M @ X`` and ``X @ M`` for 2-D arrays, ``M.T`` and ``np.asarray(M)``.
    """

    # ndarray binary operators defer to our __rmatmul__
    __array_ufunc__ = None

    def __init__(self, dense, bandwidth=None):
        dense = np.array(dense, dtype=float)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ValueError(f"banded matrix must be square, got shape {dense.shape}")
        n = dense.shape[0]
        if bandwidth is None:
            rows, cols = np.nonzero(dense)
            bandwidth = int(np.max(np.abs(rows - cols))) if rows.size else 0
        self.n = n
        self.bandwidth = int(bandwidth)
        self.dense = dense
        self.dense.setflags(write=False)
        self._T = None
        self._diags = []
        for k in range(-self.bandwidth, self.bandwidth + 1):
            d = np.diagonal(dense, k).copy()
            if np.any(d):
                self._diags.append((k, d))

    @property
    def shape(self):
        return (self.n, self.n)

    def __array__(self, dtype=None, copy=None):
        return self.dense if dtype is None else self.dense.astype(dtype)

    @property
    def T(self) -> BandedMatrix:
        if self._T is None:
            self._T = BandedMatrix(self.dense.T, self.bandwidth)
            self._T._T = self
        return self._T

    def diagonal(self, k=0) -> np.ndarray:
        return np.diagonal(self.dense, k)

    def _left(self, X):
        out = np.zeros(X.shape, dtype=np.result_type(X.dtype, float))
        for k, d in self._diags:
            if k >= 0:
                out[: self.n - k] += d[:, None] * X[k:]
            else:
                out[-k:] += d[:, None] * X[: self.n + k]
        return out

    def __matmul__(self, other):
        if isinstance(other, BandedMatrix):
            return BandedMatrix(self.dense @ other.dense, min(self.bandwidth + other.bandwidth, self.n - 1))
        other = np.asarray(other)
        if other.shape[0] != self.n:
            raise ValueError(f"dimension mismatch: {self.shape} @ {other.shape}")
        if other.ndim == 1:
            return self._left(other[:, None])[:, 0]
        return self._left(other)

    def __rmatmul__(self, other):
        # X @ M == (M^T @ X^T)^T
        other = np.asarray(other)
        if other.shape[-1] != self.n:
            raise ValueError(f"dimension mismatch: {other.shape} @ {self.shape}")
        return self.T._left(other.T).T

    def __repr__(self):
        return f"BandedMatrix(n={self.n}, bandwidth={self.bandwidth})"


def build_banded(diag, off, order) -> BandedMatrix:
    """Tridiagonal ``(off, diag, off)`` with entries (0,1) and (n-1,n-2) doubled.

    The doubling is the ghost-node reflection ``U_{-1} = U_1`` of the
    homogeneous Neumann condition.
    """
    if order < 3:
        raise ValueError(f"order must be >= 3, got {order}")
    M = np.diag(np.full(order, float(diag)))
    idx = np.arange(order - 1)
    M[idx, idx + 1] = off
    M[idx + 1, idx] = off
    M[0, 1] = 2.0 * off
    M[-1, -2] = 2.0 * off
    return BandedMatrix(M, 1)


@dataclass(frozen=True)
class SchemeMatrices:
    A: BandedMatrix
    B: BandedMatrix
    R: BandedMatrix
    W: BandedMatrix
    Btilde: BandedMatrix

    @property
    def order(self) -> int:
        return self.A.n


def w_stencil(coeffs: CoefficientSet, order: int) -> np.ndarray:
    """W written entry by entry from its closed-form pentadiagonal stencil."""
    n = order
    w, w1, w1b, w2 = coeffs.omega, coeffs.omega1, coeffs.omega1bar, coeffs.omega2
    M = np.zeros((n, n))
    for i in range(n):
        M[i, i] = w1
        for k, val in ((1, w2), (2, w)):
            if i + k < n:
                M[i, i + k] = val
            if i - k >= 0:
                M[i, i - k] = val
    M[1, 1] = M[n - 2, n - 2] = w1b
    M[0, 1] = M[n - 1, n - 2] = 2.0 * w2
    M[0, 2] = M[n - 1, n - 3] = 2.0 * w
    return M


def build_scheme_matrices(coeffs: CoefficientSet, order: int) -> SchemeMatrices:
    A = build_banded(coeffs.a1, coeffs.a2, order)
    B = build_banded(coeffs.b1, coeffs.b2, order)
    R = build_banded(-2.0, 1.0, order)
    R2 = R.dense @ R.dense
    W = A.dense + 2.0 * coeffs.a2 * coeffs.c2 * R2
    Bt = B.dense - 2.0 * coeffs.a2 * coeffs.c1 * R2
    if order >= 6:
        ref = w_stencil(coeffs, order)
        scale = max(1.0, float(np.max(np.abs(ref))))
        if not np.allclose(W, ref, rtol=0.0, atol=64 * np.finfo(float).eps * scale):
            raise AssertionError("W = A + 2 a2 c2 R^2 disagrees with its pentadiagonal stencil")
    return SchemeMatrices(A, B, R, BandedMatrix(W, 2), BandedMatrix(Bt, 2))


def apply_pair(P, Q, X) -> Field:
    """``P X + X Q^T``."""
    X = np.asarray(X)
    n = X.shape[0]
    if X.ndim != 2 or X.shape[1] != n or P.shape != (n, n) or Q.shape != (n, n):
        raise ValueError(f"apply_pair needs conformable squares, got P{P.shape}, Q{Q.shape}, X{X.shape}")
    return P @ X + X @ Q.T


def second_difference_x(X) -> Field:
    """Undivided second difference along the first (x) index with reflected ghosts."""
    return build_banded(-2.0, 1.0, X.shape[0]) @ X


def laplacian(X) -> Field:
    """Undivided five-point Laplacian with reflected ghosts on all four sides."""
    R = build_banded(-2.0, 1.0, X.shape[0])
    return R @ X + X @ R.T


def _norm(M, norm):
    M = np.asarray(M)
    if norm == "fro":
        return float(np.linalg.norm(M, "fro"))
    if norm == 2:
        return float(np.linalg.norm(M, 2))
    raise ValueError(f"unknown norm {norm!r}")


def operator_identity_gap(coeffs: CoefficientSet, order: int, norm=2) -> float:
    """Bound ``|W - I/2| + |A - I/2|`` on the distance of ``X -> W X + X A^T`` to the identity.

    The default spectral norm is the operator norm induced on fields by the
    Frobenius norm, so the sum bounds ``|L_{W,A} - I|`` in that sense.
    ``norm="fro"`` gives the looser Frobenius version of the same bound.
    """
    m = build_scheme_matrices(coeffs, order)
    half = 0.5 * np.eye(order)
    return _norm(m.W.dense - half, norm) + _norm(m.A.dense - half, norm)
