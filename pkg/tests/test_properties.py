import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sylvbq.flat import build_flat_matrices, flatten, unflatten
from sylvbq.grid import SchemeParams, build_grid, compute_coefficients
from sylvbq.io import format_field, parse_field
from sylvbq.matrices import BandedMatrix, apply_pair, build_scheme_matrices
from sylvbq.sylvester import SylvesterProblem, relative_residual, solve_fixed_point, solve_schur

finite = st.floats(-1e3, 1e3, allow_nan=False)
orders = st.integers(3, 8)


@given(alpha=st.floats(0.0, 1.0), l=st.floats(1e-4, 0.5), J=st.integers(2, 40))
def test_coefficient_row_sum_identities(alpha, l, J):
    c = compute_coefficients(build_grid(-1, 1, J, 0, l, 1), SchemeParams(alpha, 0.01))
    assert abs(c.a1 + 2 * c.a2 - 0.5) <= 1e-12 * max(1, abs(c.a2))
    assert abs(c.b1 + 2 * c.b2 - 1.0) <= 1e-12 * max(1, abs(c.b2))


@given(st.data(), orders)
def test_banded_matches_dense(data, n):
    bw = data.draw(st.integers(0, n - 1))
    D = data.draw(arrays(float, (n, n), elements=finite))
    D[np.abs(np.subtract.outer(np.arange(n), np.arange(n))) > bw] = 0
    X = data.draw(arrays(float, (n, n), elements=finite))
    B = BandedMatrix(D)
    np.testing.assert_allclose(B @ X, D @ X, rtol=1e-12, atol=1e-9)
    np.testing.assert_allclose(X @ B.T, X @ D.T, rtol=1e-12, atol=1e-9)


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32 - 1), orders)
def test_near_identity_solvers_meet_residual_contract(seed, n):
    rng = np.random.default_rng(seed)
    P = 0.5 * np.eye(n) + 0.3 * rng.standard_normal((n, n)) / n
    Q = 0.5 * np.eye(n) + 0.3 * rng.standard_normal((n, n)) / n
    C = rng.standard_normal((n, n))
    for solve in (solve_fixed_point, solve_schur):
        X = solve(SylvesterProblem(P, Q, C)).X
        assert relative_residual(P, Q, X, C) <= 1e-12


@given(st.data(), orders)
def test_apply_pair_is_linear(data, n):
    P, Q, X, Y = (data.draw(arrays(float, (n, n), elements=st.floats(-10, 10))) for _ in range(4))
    a = data.draw(st.floats(-5, 5))
    lhs = apply_pair(P, Q, a * X + Y)
    np.testing.assert_allclose(lhs, a * apply_pair(P, Q, X) + apply_pair(P, Q, Y), atol=1e-9)


@given(st.data(), st.integers(2, 6))
def test_flat_operator_equals_matrix_operator(data, J):
    X = data.draw(arrays(float, (J + 1, J + 1), elements=st.floats(-10, 10)))
    l = data.draw(st.floats(1e-3, 0.2))
    c = compute_coefficients(build_grid(-1, 1, J, 0, l, 1), SchemeParams())
    m = build_scheme_matrices(c, J + 1)
    f = build_flat_matrices(c, J)
    np.testing.assert_allclose(unflatten(f.A_flat @ flatten(X)), apply_pair(m.A, m.A, X), atol=1e-10)
    np.testing.assert_allclose(unflatten(f.R_flat @ flatten(X)), m.R @ X, atol=1e-10)


@given(arrays(complex, (3, 3), elements=st.complex_numbers(max_magnitude=1e12, allow_nan=False)),
       st.floats(0, 10))
def test_snapshot_roundtrip(U, t):
    J, t2, V = parse_field(format_field(U, t))
    assert J == 2 and t2 == t
    np.testing.assert_array_equal(V.astype(complex), U)
