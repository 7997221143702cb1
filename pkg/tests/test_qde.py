"""Matrix qDE: system matrices, Levelt and topological solutions, residuals,
and the scalar equation."""

import cmath
import random
from fractions import Fraction

import numpy as np
import pytest

from projqde.cohomology import cohom_vars, vandermonde
from projqde.qde import (
    ScalarSeries,
    a_series_coefficients,
    a_series_symbolic,
    coefficient_matrix,
    levelt_series,
    ode_residual,
    scalar_qde_residual,
    system_matrices,
    topological_series,
)
from projqde.ring import LaurentMatrix, LaurentPoly, RationalFn, sym_poly

Z3 = (0.1, 0.37 + 0.05j, -0.42)
Z2 = (0.0, 0.37)


def test_system_matrices_rank2():
    a0, a1 = system_matrices(2, (0.3, 0.7))
    assert np.allclose(a0, [[0, 1], [0, 0]])
    assert np.allclose(a1, [[0, -0.21], [1, 1.0]])


def test_a1_eigenvalues_and_diagonalization():
    n = 3
    a0, a1 = system_matrices(n, Z3)
    ev = sorted(np.linalg.eigvals(a1), key=lambda w: (w.real, w.imag))
    want = sorted(Z3, key=lambda w: (complex(w).real, complex(w).imag))
    assert np.allclose(ev, want, atol=1e-10)
    d, dinv = vandermonde(n, Z3)
    assert np.allclose(d @ a1 @ dinv, np.diag(np.array(Z3, dtype=complex)), atol=1e-10)


def test_a1_char_poly_symbolic():
    n = 3
    _, a1 = system_matrices(n)
    vs = ("LAM",) + cohom_vars(n)
    lam = LaurentPoly.variable(vs, "LAM")
    lifted = a1.map(lambda p: p.with_vars(vs))
    lam_eye = LaurentMatrix.identity(n, vs).map(lambda p: p * lam)
    char = (lam_eye - lifted).det()
    want = LaurentPoly.one(vs)
    for i in range(1, n + 1):
        want = want * (lam - LaurentPoly.variable(vs, f"z{i}"))
    assert char == want


def test_levelt_recursion_exact_substitution():
    # entrywise recursion check against the defining relation, rank 3, exact z
    n = 3
    z = (Fraction(0), Fraction(1, 3), Fraction(5, 7))
    sol = levelt_series(n, z, 6)
    from projqde.qde import _exact_vandermonde

    d, dinv = _exact_vandermonde([Fraction(w) for w in z])
    m = [[dinv[n - 1][j] for j in range(n)] for _ in range(n)]
    gs = sol.exact_coeffs
    for k in range(6):
        gk, gk1 = gs[k], gs[k + 1]
        for i in range(n):
            for j in range(n):
                mg = sum(m[i][l] * gk[l][j] for l in range(n))
                # [Z, G_{k+1}] - (k+1) G_{k+1} + M G_k = 0
                assert (z[i] - z[j]) * gk1[i][j] - (k + 1) * gk1[i][j] + mg == 0


def test_levelt_g0_is_identity():
    sol = levelt_series(2, Z2, 5)
    assert np.allclose(sol.series.coeffs[0], np.eye(2))


def test_levelt_monodromy():
    n, order = 3, 40
    sol = levelt_series(n, Z3, order)
    q = 0.2
    lq = cmath.log(q)
    y0 = sol.matrix(q, lq)
    y1 = sol.matrix(q, lq + 2j * cmath.pi)
    assert np.allclose(y1, y0 @ sol.monodromy(), atol=1e-10)


@pytest.mark.parametrize("z,n", [(Z2, 2), (Z3, 3)])
def test_ode_residual_levelt_and_topological(z, n):
    order = 30
    lev = levelt_series(n, z, order)
    top = topological_series(n, z, order)
    for q in (0.3, 0.3j, -0.25):
        assert ode_residual(lev, q, n, z) < 1e-10
        assert ode_residual(top, q, n, z) < 1e-10


def test_topological_equals_levelt_times_vandermonde():
    rng = random.Random(3)
    for n, z in ((2, Z2), (3, Z3)):
        top = topological_series(n, z, 35)
        for _ in range(3):
            q = 0.3 * cmath.exp(2j * cmath.pi * rng.random())
            lhs = top.matrix(q)
            rhs = top.matrix_via_levelt(q)
            assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(lhs)


def test_topological_leading_form():
    # Y_top = Phi(q) q^{A1} with Phi(q) = 1 + q D^{-1} G_1 D + O(q^2)
    n = 3
    top = topological_series(n, Z3, 40)
    q = 1e-4
    d, dinv = vandermonde(n, Z3)
    qa1 = dinv @ np.diag(np.exp(np.array(Z3, dtype=complex) * cmath.log(q))) @ d
    phi = top.matrix(q) @ np.linalg.inv(qa1)
    phi1 = dinv @ np.asarray(top.levelt.series.coeffs[1]) @ d
    assert np.allclose(phi, np.eye(n) + q * phi1, atol=1e-7)


def test_a_series_first_coefficient():
    n = 3
    for j in (1, 2, 3):
        c = a_series_coefficients(n, Z3, 2, j)
        want = 1.0
        for i in range(n):
            want /= Z3[j - 1] - Z3[i] + 1
        assert abs(c[1] - want) < 1e-14


def test_corrupted_series_fails_residual():
    n, z, order = 2, Z2, 25
    sol = levelt_series(n, z, order)
    coeffs = [np.array(c) for c in sol.series.coeffs]
    coeffs[3] = coeffs[3] + 0.01
    from projqde.qde import MatrixSeries

    sol.series = MatrixSeries("q", tuple(coeffs), order)
    assert ode_residual(sol, 0.3, n, z) > 1e-6


def test_scalar_qde_symbolic_rank2():
    n, order = 2, 6
    z = [LaurentPoly.variable(cohom_vars(n), f"z{i + 1}") for i in range(n)]
    phi = a_series_symbolic(n, 1, order)
    res = scalar_qde_residual(phi, n, z)
    # the last coefficient is truncation garbage (the q*phi shift), so drop it
    assert all(c.is_zero() for c in res.coeffs[:-1])


def test_scalar_qde_numeric_rank3():
    n, order = 3, 25
    from projqde.qde import a_series_coefficients

    for j in (1, 2, 3):
        coeffs = a_series_coefficients(n, Z3, order, j)
        phi = ScalarSeries(complex(Z3[j - 1]), [complex(c) for c in coeffs], order)
        res = scalar_qde_residual(phi, n, [complex(w) for w in Z3])
        assert all(abs(c) < 1e-12 for c in res.coeffs[:-1])


def test_scalar_qde_zero_parameters_reduce():
    # at z = 0 the operator is theta^n - q: check on the explicit solution
    # sum q^d / (d!)^n
    n, order = 3, 20
    coeffs = [1.0]
    for d in range(1, order + 1):
        coeffs.append(coeffs[-1] / d**n)
    phi = ScalarSeries(0.0, coeffs, order)
    res = scalar_qde_residual(phi, n, [0.0] * n)
    assert all(abs(c) < 1e-14 for c in res.coeffs[:-1])


def test_scalar_qde_negative_control():
    n, order = 2, 6
    phi = ScalarSeries(0.0, [1.0] + [0.0] * order, order)
    res = scalar_qde_residual(phi, n, [complex(w) for w in Z2])
    assert not res.is_zero(tol=1e-10)
