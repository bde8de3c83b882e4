import numpy as np
import pytest
import sympy

from sylvbq.grid import SchemeParams, build_grid, compute_coefficients
from sylvbq.matrices import (BandedMatrix, apply_pair, build_banded, build_scheme_matrices, laplacian,
                             operator_identity_gap, second_difference_x, w_stencil)


def _coeffs(J=10, l=0.01, alpha=0.25, q=0.01):
    return compute_coefficients(build_grid(-1, 1, J, 0, l, 1), SchemeParams(alpha, q))


def test_build_banded_corner_doubling():
    M = build_banded(-2.0, 1.0, 5).dense
    assert M[0, 1] == 2.0 and M[-1, -2] == 2.0
    assert M[1, 0] == 1.0 and M[1, 2] == 1.0
    np.testing.assert_array_equal(M.sum(axis=1), 0.0)
    with pytest.raises(ValueError):
        build_banded(1, 1, 2)


def test_banded_products_match_dense(rng):
    D = build_banded(3.0, -1.5, 7).dense
    B = BandedMatrix(D)
    X = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
    np.testing.assert_allclose(B @ X, D @ X, atol=1e-14)
    np.testing.assert_allclose(X @ B, X @ D, atol=1e-14)
    np.testing.assert_allclose(X @ B.T, X @ D.T, atol=1e-14)
    np.testing.assert_allclose((B @ B).dense, D @ D, atol=1e-14)
    np.testing.assert_allclose(B @ X[:, 0], D @ X[:, 0], atol=1e-14)
    with pytest.raises(ValueError):
        B @ np.ones((6, 6))


def test_row_sums():
    c = _coeffs()
    m = build_scheme_matrices(c, 11)
    for M, s in ((m.A, 0.5), (m.B, 1.0), (m.R, 0.0), (m.W, 0.5), (m.Btilde, 1.0)):
        np.testing.assert_allclose(M.dense.sum(axis=1), s, atol=1e-13)


def test_w_stencil_symbolic_identity():
    # A + 2 a2 c2 R^2 written with the omega shorthands, in exact arithmetic
    a1, a2, c2 = sympy.symbols("a1 a2 c2")
    n = 7

    def tri(d, o):
        M = sympy.zeros(n, n)
        for i in range(n):
            M[i, i] = d
            if i + 1 < n:
                M[i, i + 1] = o
                M[i + 1, i] = o
        M[0, 1] = 2 * o
        M[n - 1, n - 2] = 2 * o
        return M

    R = tri(-2, 1)
    W = tri(a1, a2) + 2 * a2 * c2 * R * R
    om = 2 * a2 * c2
    om1, om2 = a1 + 6 * om, a2 - 4 * om
    assert sympy.expand(W[0, 0] - om1) == 0
    assert sympy.expand(W[0, 1] - 2 * om2) == 0 and sympy.expand(W[0, 2] - 2 * om) == 0
    assert sympy.expand(W[1, 0] - om2) == 0 and sympy.expand(W[1, 1] - (om1 + om)) == 0
    assert sympy.expand(W[1, 3] - om) == 0
    assert [sympy.expand(W[3, k]) for k in range(7)] == [sympy.expand(v) for v in (0, om, om2, om1, om2, om, 0)]
    # mirrored at the far end
    for i in range(n):
        for k in range(n):
            assert sympy.expand(W[i, k] - W[n - 1 - i, n - 1 - k]) == 0


@pytest.mark.parametrize("l", [0.01, 1 / 400, 0.037])
def test_w_matches_closed_form(l):
    c = _coeffs(J=6, l=l)
    m = build_scheme_matrices(c, 7)
    S = w_stencil(c, 7)
    assert np.max(np.abs(m.W.dense - S)) <= 4 * np.finfo(float).eps * np.max(np.abs(S))


def test_w_closed_form_bitwise_at_table_parameters():
    c = _coeffs(J=6, l=0.01)
    np.testing.assert_array_equal(build_scheme_matrices(c, 7).W.dense, w_stencil(c, 7))


def test_apply_pair_and_shape_check(rng):
    P, Q, X = (rng.standard_normal((4, 4)) for _ in range(3))
    np.testing.assert_allclose(apply_pair(P, Q, X), P @ X + X @ Q.T)
    with pytest.raises(ValueError):
        apply_pair(P, Q, np.ones((3, 3)))


def test_differences_annihilate_constants_and_reflect():
    X = np.full((5, 5), 2.0)
    np.testing.assert_array_equal(second_difference_x(X), 0.0)
    np.testing.assert_array_equal(laplacian(X), 0.0)
    Y = np.outer(np.arange(5.0) ** 2, np.ones(5))
    D = second_difference_x(Y)
    np.testing.assert_allclose(D[1:-1], 2.0)
    assert D[0, 0] == 2 * (Y[1, 0] - Y[0, 0])


def test_identity_gap_decreases_with_h():
    gaps = [operator_identity_gap(_coeffs(J=J, l=(2 / J) ** 3), J + 1) for J in (20, 40)]
    assert gaps[1] < gaps[0]
    assert operator_identity_gap(_coeffs(), 11, "fro") >= operator_identity_gap(_coeffs(), 11, 2)
