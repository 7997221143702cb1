"""The matrix quantum differential equation dY/dq = (A0 + A1(z)/q) Y and its
two distinguished fundamental solutions at the regular singular point q = 0:
the Levelt solution D^{-1}(1 + sum G_k q^k) q^diag(z) and the
topological-enumerative solution built from the scalar series a_j.

Coefficient recursions run over a generic scalar field, so the same code
produces exact (rational z) and numeric (complex z) series.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .ring import LaurentMatrix, LaurentPoly, RationalFn, sym_poly
from .cohomology import cohom_vars, eta_gram, vandermonde


@dataclass(frozen=True)
class BranchContext:
    """Bookkeeping for powers q^M = exp(M log q) on the universal cover.

    phi parametrizes the ray through s = r e^{-2 pi i phi}, q = s^n; a full
    counterclockwise turn of q decreases phi by 1/n.
    """

    phi: float = 0.0

    def s_value(self, r: float) -> complex:
        return r * cmath.exp(-2j * cmath.pi * self.phi)

    def log_s(self, r: float) -> complex:
        return math.log(r) - 2j * cmath.pi * self.phi

    def q_value(self, r: float, n: int) -> complex:
        return self.s_value(r) ** n

    def log_q(self, r: float, n: int) -> complex:
        return n * self.log_s(r)


def principal_log(q: complex) -> complex:
    return cmath.log(q)


@dataclass(frozen=True)
class MatrixSeries:
    """Truncated matrix-valued power series in the named variable."""

    variable: str
    coeffs: tuple
    order: int
    branch: BranchContext | None = None

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("need exactly order+1 coefficients")

    def value(self, t: complex) -> np.ndarray:
        acc = np.zeros_like(np.asarray(self.coeffs[0], dtype=complex))
        for k in range(self.order, -1, -1):
            acc = acc * t + np.asarray(self.coeffs[k], dtype=complex)
        return acc


# -- the equation ---------------------------------------------------------------------


def system_matrices(n: int, z: Sequence[complex] | None = None):
    """A0 (single 1 in the upper-right corner) and the companion-type A1(z)
    whose eigenvalues are z_1..z_n."""
    if z is None:
        vs = cohom_vars(n)
        zero = LaurentPoly.zero(vs)
        one = LaurentPoly.one(vs)
        a0 = [[zero] * n for _ in range(n)]
        a0[0][n - 1] = one
        a1 = [[zero] * n for _ in range(n)]
        for i in range(1, n):
            a1[i][i - 1] = one
        for i in range(n):
            s = sym_poly("elementary", n - i, n, prefix="z")
            if (n - i - 1) % 2 == 1:
                s = -s
            a1[i][n - 1] = a1[i][n - 1] + s
        return LaurentMatrix(a0), LaurentMatrix(a1)
    z = [complex(w) for w in z]
    a0 = np.zeros((n, n), dtype=complex)
    a0[0, n - 1] = 1.0
    a1 = np.zeros((n, n), dtype=complex)
    for i in range(1, n):
        a1[i, i - 1] = 1.0
    for i in range(n):
        vals = {f"Z{j + 1}": z[j] for j in range(n)}
        a1[i, n - 1] += (-1) ** (n - i - 1) * sym_poly("elementary", n - i, n).eval(vals)
    return a0, a1


def coefficient_matrix(n: int, z: Sequence[complex], q: complex) -> np.ndarray:
    a0, a1 = system_matrices(n, z)
    return a0 + a1 / q


# -- generic-field helpers -------------------------------------------------------------


def elementary_symmetric(vals: Sequence, k: int):
    if k == 0:
        return 1
    acc = None
    for subset in combinations(vals, k):
        term = subset[0]
        for v in subset[1:]:
            term = term * v
        acc = term if acc is None else acc + term
    return acc if acc is not None else 0


def _exact_vandermonde(z: Sequence[Fraction]):
    n = len(z)
    d = [[z[j] ** a for a in range(n)] for j in range(n)]
    dinv = []
    for alpha in range(n):
        row = []
        for j in range(n):
            others = [z[m] for m in range(n) if m != j]
            k = n - 1 - alpha
            e = elementary_symmetric(others, k)
            den = Fraction(1)
            for m in range(n):
                if m != j:
                    den *= z[j] - z[m]
            row.append(Fraction((-1) ** k) * e / den)
        dinv.append(row)
    return d, dinv


def _levelt_coefficients(n: int, z: Sequence, order: int):
    """G_1..G_order of the Levelt gauge, over Fractions or complex numbers.

    Recursion: (G_{k+1})_{ij} = -(M G_k)_{ij} / (z_i - z_j - (k+1)) with
    M = D A0 D^{-1}, which is the rank-one matrix with rows equal to the last
    row of D^{-1}."""
    exact = all(isinstance(w, (int, Fraction)) for w in z)
    if exact:
        z = [Fraction(w) for w in z]
        _, dinv = _exact_vandermonde(z)
        m = [[dinv[n - 1][j] for j in range(n)] for _ in range(n)]
        gk = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
        coeffs = [gk]
        for k in range(order):
            mg = [
                [sum(m[i][l] * gk[l][j] for l in range(n)) for j in range(n)]
                for i in range(n)
            ]
            gk = [
                [-mg[i][j] / (z[i] - z[j] - (k + 1)) for j in range(n)]
                for i in range(n)
            ]
            coeffs.append(gk)
        return coeffs
    zc = [complex(w) for w in z]
    _, dinv = vandermonde(n, zc)
    m = np.tile(dinv[n - 1, :], (n, 1))
    denom = np.empty((n, n), dtype=complex)
    gk = np.eye(n, dtype=complex)
    coeffs = [gk]
    for k in range(order):
        for i in range(n):
            for j in range(n):
                denom[i, j] = zc[i] - zc[j] - (k + 1)
        gk = -(m @ gk) / denom
        coeffs.append(gk)
    return coeffs


class LeveltSolution:
    """Fundamental solution D^{-1}(1 + sum_k G_k q^k) q^diag(z)."""

    def __init__(self, n: int, z: Sequence, order: int):
        self.n = n
        self.z = tuple(z)
        self.order = order
        self.exact_coeffs = None
        coeffs = _levelt_coefficients(n, z, order)
        if isinstance(coeffs[0], list):
            self.exact_coeffs = coeffs
            coeffs = [np.array([[complex(x) for x in row] for row in g]) for g in coeffs]
        self.series = MatrixSeries("q", tuple(coeffs), order)
        zc = [complex(w) for w in z]
        self.d, self.dinv = vandermonde(n, zc)
        self.zc = np.array(zc)

    def gauge(self, q: complex) -> np.ndarray:
        return self.series.value(q)

    def matrix(self, q: complex, log_q: complex | None = None) -> np.ndarray:
        lq = principal_log(q) if log_q is None else log_q
        qz = np.diag(np.exp(self.zc * lq))
        return self.dinv @ self.gauge(q) @ qz

    def derivative(self, q: complex, log_q: complex | None = None) -> np.ndarray:
        lq = principal_log(q) if log_q is None else log_q
        qz = np.diag(np.exp(self.zc * lq))
        s = self.gauge(q)
        ds = sum(
            k * np.asarray(self.series.coeffs[k]) * q ** (k - 1)
            for k in range(1, self.order + 1)
        )
        return self.dinv @ (ds @ qz + s @ np.diag(self.zc / q) @ qz)

    def monodromy(self) -> np.ndarray:
        """Matrix of the q = 0 monodromy operator wrt this solution."""
        return np.diag(np.exp(2j * np.pi * self.zc))


def levelt_series(n: int, z: Sequence, order: int) -> LeveltSolution:
    return LeveltSolution(n, z, order)


# -- topological-enumerative solution ---------------------------------------------------


def a_series_coefficients(n: int, z: Sequence, order: int, j: int):
    """Coefficients c_d of the scalar series a_j = q^{z_j}(1 + sum c_d q^d),
    c_d = 1 / prod_i prod_{m<=d} (z_j - z_i + m), over a generic field."""
    exact = all(isinstance(w, (int, Fraction)) for w in z)
    if exact:
        z = [Fraction(w) for w in z]
        one = Fraction(1)
    else:
        z = [complex(w) for w in z]
        one = 1.0 + 0j
    coeffs = [one]
    c = one
    for d in range(1, order + 1):
        for i in range(len(z)):
            c = c / (z[j - 1] - z[i] + d)
        coeffs.append(c)
    return coeffs


class TopologicalSolution:
    """The solution whose columns are the images of the x-power basis under the
    small-locus restriction of the enumerative morphism; built from the scalar
    series a_j and equal to the Levelt solution times the Vandermonde matrix."""

    def __init__(self, n: int, z: Sequence, order: int):
        self.n = n
        self.z = tuple(z)
        self.order = order
        self.levelt = LeveltSolution(n, z, order)
        self.zc = self.levelt.zc
        self.a_coeffs = [
            np.array([complex(c) for c in a_series_coefficients(n, z, order, j)])
            for j in range(1, n + 1)
        ]
        self.eta = eta_gram(n, [complex(w) for w in z])
        self.eta_inv = np.linalg.inv(self.eta)

    def _theta_powers(self, q: complex, lq: complex) -> np.ndarray:
        """hat{Y}[h][j] = (q d/dq)^h a_{j+1}(q)."""
        n = self.n
        out = np.zeros((n, n), dtype=complex)
        ds = np.arange(self.order + 1)
        for j in range(n):
            expo = self.zc[j] + ds
            vals = self.a_coeffs[j] * np.exp(expo * lq)
            for h in range(n):
                out[h, j] = np.sum(vals)
                vals = vals * expo
        return out

    def matrix(self, q: complex, log_q: complex | None = None) -> np.ndarray:
        lq = principal_log(q) if log_q is None else log_q
        yhat = self._theta_powers(q, lq) @ self.levelt.dinv.T
        return self.eta_inv @ yhat @ self.eta

    def matrix_via_levelt(self, q: complex, log_q: complex | None = None) -> np.ndarray:
        return self.levelt.matrix(q, log_q) @ self.levelt.d

    def derivative(self, q: complex, log_q: complex | None = None) -> np.ndarray:
        lq = principal_log(q) if log_q is None else log_q
        n = self.n
        out = np.zeros((n, n), dtype=complex)
        ds = np.arange(self.order + 1)
        for j in range(n):
            expo = self.zc[j] + ds
            vals = self.a_coeffs[j] * np.exp(expo * lq) * expo / q
            for h in range(n):
                out[h, j] = np.sum(vals)
                vals = vals * expo
        yhat = out @ self.levelt.dinv.T
        return self.eta_inv @ yhat @ self.eta


def topological_series(n: int, z: Sequence, order: int) -> TopologicalSolution:
    return TopologicalSolution(n, z, order)


def ode_residual(solution, q: complex, n: int, z: Sequence, log_q: complex | None = None) -> float:
    """Relative operator-norm residual of dY/dq = A(q) Y for an evaluator with
    matrix/derivative methods."""
    if q == 0:
        raise ValueError("residual undefined at q = 0")
    y = solution.matrix(q, log_q)
    dy = solution.derivative(q, log_q)
    a = coefficient_matrix(n, z, q)
    return float(np.linalg.norm(dy - a @ y, 2) / np.linalg.norm(y, 2))


# -- scalar equation --------------------------------------------------------------------


class ScalarSeries:
    """Truncated series q^{expo} sum_d c_d q^d with field-generic coefficients."""

    def __init__(self, expo, coeffs: Sequence, order: int):
        coeffs = list(coeffs)
        if len(coeffs) != order + 1:
            raise ValueError("need order+1 coefficients")
        self.expo = expo
        self.coeffs = coeffs
        self.order = order

    def theta(self) -> "ScalarSeries":
        """Apply q d/dq: multiply c_d by (expo + d)."""
        return ScalarSeries(
            self.expo, [c * (self.expo + d) for d, c in enumerate(self.coeffs)], self.order
        )

    def theta_power(self, k: int) -> "ScalarSeries":
        out = self
        for _ in range(k):
            out = out.theta()
        return out

    def shift_by_q(self) -> "ScalarSeries":
        """Multiply by q (drop the coefficient beyond the truncation order)."""
        return ScalarSeries(self.expo, [0 * self.coeffs[0]] + self.coeffs[:-1], self.order)

    def scale(self, c) -> "ScalarSeries":
        return ScalarSeries(self.expo, [x * c for x in self.coeffs], self.order)

    def __sub__(self, other: "ScalarSeries") -> "ScalarSeries":
        return ScalarSeries(
            self.expo, [a - b for a, b in zip(self.coeffs, other.coeffs)], self.order
        )

    def __add__(self, other: "ScalarSeries") -> "ScalarSeries":
        return ScalarSeries(
            self.expo, [a + b for a, b in zip(self.coeffs, other.coeffs)], self.order
        )

    def is_zero(self, tol: float = 0.0) -> bool:
        for c in self.coeffs:
            if isinstance(c, (RationalFn, LaurentPoly)):
                if not c.is_zero():
                    return False
            elif isinstance(c, Fraction) or isinstance(c, int):
                if c != 0:
                    return False
            else:
                if abs(c) > tol:
                    return False
        return True


def a_series_symbolic(n: int, j: int, order: int) -> ScalarSeries:
    """The scalar series a_j with rational-function coefficients in symbolic z."""
    vs = cohom_vars(n)
    zpol = [LaurentPoly.variable(vs, f"z{i + 1}") for i in range(n)]
    one = RationalFn(LaurentPoly.one(vs))
    coeffs = [one]
    c = one
    for d in range(1, order + 1):
        for i in range(n):
            c = c / RationalFn(zpol[j - 1] - zpol[i] + LaurentPoly.constant(vs, d))
        coeffs.append(c)
    return ScalarSeries(RationalFn(zpol[j - 1]), coeffs, order)


def scalar_qde_residual(phi: ScalarSeries, n: int, z: Sequence) -> ScalarSeries:
    """Residual of the scalar equation
    theta^n phi - (q + (-1)^{n-1} s_n(z)) phi - sum_j (-1)^{n-j-1} s_{n-j}(z)
    theta^j phi; zero iff phi solves it to the truncation order."""
    res = phi.theta_power(n)
    res = res - phi.shift_by_q()
    sn = elementary_symmetric(list(z), n)
    res = res - phi.scale(sn if (n - 1) % 2 == 0 else -sn)
    for j in range(1, n):
        s = elementary_symmetric(list(z), n - j)
        sign = 1 if (n - j - 1) % 2 == 0 else -1
        res = res - phi.theta_power(j).scale(sign * s)
    return res
