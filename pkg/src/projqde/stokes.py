"""Irregular-singularity analysis at q = infinity.

After the shearing transformation and the substitution q = s^n, the joint
differential/difference system acquires a diagonalizable leading term with
eigenvalues n zeta^m.  This module computes the shearing coefficients, the
diagonalizing root-of-unity matrix, the formal gauge reduction with its
recursive coefficients, the diagonal normal form of the shift operators, and
the Stokes sectors/bases/matrices.  Stokes matrices are obtained algebraically
from the identification of Stokes bases with the rescaled sorted bases of the
K-theory algebra; the divergent-series asymptotics serve only as a loose
numeric sanity check.

Exact statements at roots of unity are proved by adjoining a formal root of
unity W and reducing modulo its cyclotomic polynomial.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cohomology import NumericContext, cohom_vars, eta_gram
from .ktheory import (
    ExceptionalBasis,
    braid_act,
    braid_constants,
    canonical_spectrum_poly,
    gram_matrix,
    structured_basis,
)
from .qde import BranchContext, elementary_symmetric, system_matrices
from .qkz import qkz_operator_symbolic
from .ring import (
    LaurentMatrix,
    LaurentPoly,
    reduce_root_of_unity,
    sym_poly,
    zvars,
)

W = "W"  # the adjoined root of unity, of order 2n unless stated otherwise


# -- Stokes sectors ------------------------------------------------------------------


@dataclass(frozen=True)
class SectorId:
    """A maximal Stokes sector: kind 'Vprime' is (k/n - 1/2 - 1/2n, k/n) in the
    angular coordinate phi, kind 'Vdprime' the complementary family shifted by
    1/2n; each spans n+1 consecutive Stokes rays phi = j/2n."""

    kind: str
    k: int

    def __post_init__(self):
        if self.kind not in ("Vprime", "Vdprime"):
            raise ValueError("kind must be 'Vprime' or 'Vdprime'")

    def phi_range(self, n: int) -> tuple[float, float]:
        if self.kind == "Vprime":
            return (self.k / n - 0.5 - 0.5 / n, self.k / n)
        return (self.k / n - 0.5 - 1.0 / n, self.k / n - 0.5 / n)

    def rotate_half(self, n: int) -> "SectorId":
        """Image under s -> e^{i pi} s (phi decreases by 1/2)."""
        if n % 2 == 0:
            return SectorId(self.kind, self.k - n // 2)
        if self.kind == "Vprime":
            return SectorId("Vdprime", self.k - (n - 1) // 2)
        return SectorId("Vprime", self.k - (n + 1) // 2)

    def basis_kind(self) -> str:
        return "Qpt" if self.kind == "Vprime" else "Qppt"


# -- shearing -----------------------------------------------------------------------


def shear_coeffs(n: int) -> list[LaurentMatrix]:
    """Coefficients B_0..B_n of the sheared system dT/ds = (B_0 + B_1/s + ...)T:
    B_0 cyclic with entries n, B_1 = diag(0..n-2, n-1+n s_1(z)), B_j a single
    entry (-1)^{j+1} n s_j(z) at row n+1-j of the last column."""
    vs = cohom_vars(n)
    zero = LaurentPoly.zero(vs)
    b0 = [[zero] * n for _ in range(n)]
    b0[0][n - 1] = LaurentPoly.constant(vs, n)
    for i in range(1, n):
        b0[i][i - 1] = LaurentPoly.constant(vs, n)
    out = [LaurentMatrix(b0)]
    b1 = [[zero] * n for _ in range(n)]
    for i in range(n):
        b1[i][i] = LaurentPoly.constant(vs, i)
    b1[n - 1][n - 1] = b1[n - 1][n - 1] + sym_poly("elementary", 1, n, prefix="z") * n
    out.append(LaurentMatrix(b1))
    for j in range(2, n + 1):
        bj = [[zero] * n for _ in range(n)]
        s = sym_poly("elementary", j, n, prefix="z") * n
        if (j + 1) % 2 == 1:
            s = -s
        bj[n - j][n - 1] = s
        out.append(LaurentMatrix(bj))
    return out


def shear_consistency_residual(n: int) -> LaurentMatrix:
    """B(s,z) - n s^{n-1} (H^{-1} A(s^n) H - H^{-1} dH/dq), symbolically; zero
    iff the printed coefficients match the shearing transformation."""
    vs = ("s",) + cohom_vars(n)
    s = LaurentPoly.variable(vs, "s")
    coeffs = [m.map(lambda p: p.with_vars(vs)) for m in shear_coeffs(n)]
    lhs = coeffs[0]
    for j in range(1, n + 1):
        lhs = lhs + coeffs[j].map(lambda p: p * s ** (-j))
    a0, a1 = system_matrices(n)
    a0 = a0.map(lambda p: p.with_vars(vs))
    a1 = a1.map(lambda p: p.with_vars(vs) * s ** (-n))
    a = a0 + a1
    # H = diag(s^{-(alpha-1)}): conjugation scales entry (a,b) by s^{a-b};
    # -n s^{n-1} H^{-1} dH/dq = diag(alpha-1)/s.
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(a[i, j] * s ** (i - j) * n * s ** (n - 1))
        rows.append(row)
    rhs = LaurentMatrix(rows)
    diag = LaurentMatrix.identity(n, vs).entries
    diag = [list(r) for r in diag]
    for i in range(n):
        diag[i][i] = LaurentPoly.constant(vs, i) * s**-1
    rhs = rhs + LaurentMatrix(diag)
    return lhs - rhs


# -- the diagonalizing matrix -----------------------------------------------------------


def e_matrix(n: int):
    """Numeric (E, E^{-1}) with E_{i,alpha} = exp((i-1)(2 alpha - 1) i pi/n)/sqrt n."""
    e = np.array(
        [
            [cmath.exp(1j * cmath.pi * (i * (2 * a + 1)) / n) / math.sqrt(n) for a in range(n)]
            for i in range(n)
        ]
    )
    einv = np.array(
        [
            [cmath.exp(1j * cmath.pi * (i * (-2 * a - 1)) / n) / math.sqrt(n) for i in range(n)]
            for a in range(n)
        ]
    )
    if not np.allclose(e @ einv, np.eye(n), atol=1e-13):
        raise ArithmeticError("root-of-unity matrix inverse check failed")
    return e, einv


def e_matrix_exact(n: int, extra_vars: Sequence[str] = ()):
    """(sqrt n E, sqrt n E^{-1}) as matrices of powers of the order-2n root W;
    conjugation by E is (1/n) (sqrt n E) M (sqrt n E^{-1})."""
    vs = (W,) + tuple(extra_vars)
    e = LaurentMatrix(
        [
            [LaurentPoly.variable(vs, W, (i * (2 * a + 1)) % (2 * n)) for a in range(n)]
            for i in range(n)
        ]
    )
    einv = LaurentMatrix(
        [
            [LaurentPoly.variable(vs, W, (i * (-2 * a - 1)) % (2 * n)) for i in range(n)]
            for a in range(n)
        ]
    )
    return e, einv


def _reduce_w(m: LaurentMatrix, order: int) -> LaurentMatrix:
    return m.map(lambda p: reduce_root_of_unity(p, W, order))


def e_matrix_identities(n: int) -> dict:
    """Exact checks: E E^{-1} = 1, E B_0 E^{-1} = diag(n zeta^m),
    (E^{-1})^T eta_cl E^{-1} = 1, and diag(E B_1 E^{-1}) = (s_1 + (n-1)/2) 1."""
    vs = (W,) + cohom_vars(n)
    e, einv = e_matrix_exact(n, cohom_vars(n))
    ninv = Fraction(1, n)
    prod = _reduce_w((e * einv).map(lambda p: p * ninv), 2 * n)
    ok_inv = prod == LaurentMatrix.identity(n, vs)

    bs = shear_coeffs(n)
    b0 = bs[0].map(lambda p: p.with_vars(vs))
    conj0 = _reduce_w((e * b0 * einv).map(lambda p: p * ninv), 2 * n)
    want0 = [[LaurentPoly.zero(vs) for _ in range(n)] for _ in range(n)]
    for m in range(n):
        want0[m][m] = LaurentPoly.variable(vs, W, (2 * m) % (2 * n)) * n
    ok_b0 = conj0 == _reduce_w(LaurentMatrix(want0), 2 * n)

    eta = [[LaurentPoly.constant(vs, 1 if a + b == n - 1 else 0) for b in range(n)] for a in range(n)]
    etam = LaurentMatrix(eta)
    prod2 = _reduce_w((einv.transpose() * etam * einv).map(lambda p: p * ninv), 2 * n)
    ok_eta = prod2 == LaurentMatrix.identity(n, vs)

    b1 = bs[1].map(lambda p: p.with_vars(vs))
    conj1 = _reduce_w((e * b1 * einv).map(lambda p: p * ninv), 2 * n)
    lam = sym_poly("elementary", 1, n, prefix="z").with_vars(vs) + LaurentPoly.constant(
        vs, Fraction(n - 1, 2)
    )
    ok_b1 = all(conj1[m, m] == reduce_root_of_unity(lam, W, 2 * n) for m in range(n))
    return {"inverse": ok_inv, "diagonalizes": ok_b0, "orthonormal": ok_eta, "level": ok_b1}


# -- formal reduction ---------------------------------------------------------------------


@dataclass
class FormalSolution:
    """Formal gauge data at infinity: scalar exponent (s_1(z) + (n-1)/2),
    eigenvalues u_m = n zeta^m, diagonal normalization, and gauge coefficients."""

    n: int
    level: object
    u: list
    cdiag: object
    coeffs: list


def formal_reduce_exact_rank2(order: int) -> FormalSolution:
    """Exact formal reduction for n = 2 over (W, z1, z2), W of order 4 (W = i).

    Alternating recursion: the off-diagonal part of F_{k+1} and the diagonal
    part of F_k are read from the coefficient of s^{-(k+1)} in
    F' + F Lambda/s + F U = (sum_j hat A_j s^{-j}) F.
    """
    n = 2
    vs = (W,) + cohom_vars(n)
    e, einv = e_matrix_exact(n, cohom_vars(n))
    half = Fraction(1, 2)
    bs = [m.map(lambda p: p.with_vars(vs)) for m in shear_coeffs(n)]
    ahat = [_reduce_w((e * b * einv).map(lambda p: p * half), 4) for b in bs]
    u = [Fraction(2), Fraction(-2)]
    lam = sym_poly("elementary", 1, n, prefix="z").with_vars(vs) + LaurentPoly.constant(vs, half)
    zero = LaurentPoly.zero(vs)

    coeffs: list[list[list[LaurentPoly]]] = [
        [[LaurentPoly.one(vs), zero], [zero, LaurentPoly.one(vs)]]
    ]
    # F_1 off-diagonal from [F_1, U] = hat A_1 - Lambda
    f1 = [[zero, zero], [zero, zero]]
    for a in range(n):
        for b in range(n):
            if a != b:
                f1[a][b] = ahat[1][a, b] * Fraction(1, int(u[b] - u[a]))
    coeffs.append(f1)

    def ahat_at(j):
        if j <= n:
            return ahat[j]
        return LaurentMatrix.zero(n, n, vs)

    for k in range(1, order):
        fk = coeffs[k]
        # diagonal of F_k from the s^{-(k+1)} equation
        for a in range(n):
            acc = ahat_at(k + 1)[a, a]
            od = ahat[1]
            for g in range(n):
                if g != a:
                    acc = acc + od[a, g] * fk[g][a]
            for j in range(2, k + 1):
                aj = ahat_at(j)
                fl = coeffs[k + 1 - j]
                for g in range(n):
                    acc = acc + aj[a, g] * fl[g][a]
            fk[a][a] = reduce_root_of_unity(acc * Fraction(-1, k), W, 4)
        coeffs[k] = [[reduce_root_of_unity(p, W, 4) for p in row] for row in fk]
        # off-diagonal of F_{k+1}
        fk = coeffs[k]
        fnext = [[zero, zero], [zero, zero]]
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                acc = ahat_at(k + 1)[a, b] + fk[a][b] * k - fk[a][b] * lam
                for j in range(1, k + 1):
                    aj = ahat_at(j)
                    fl = coeffs[k + 1 - j]
                    for g in range(n):
                        acc = acc + aj[a, g] * fl[g][b]
                fnext[a][b] = reduce_root_of_unity(
                    acc * Fraction(1, int(u[b] - u[a])), W, 4
                )
        coeffs.append(fnext)
    mats = [LaurentMatrix(c) for c in coeffs]
    return FormalSolution(n, lam, u, LaurentMatrix.identity(n, vs), mats)


def gauge_substitution_residual_orders(sol: FormalSolution, order: int) -> list[bool]:
    """Verify F' + F Lambda/s + F U - (sum hat A_j s^{-j}) F order by order in
    1/s, which is the gauge substitution conjugated back by the exact
    diagonalization identities; returns truth per order 1..order."""
    n = sol.n
    vs = sol.coeffs[0].vars
    svars = ("s",) + vs
    s = LaurentPoly.variable(svars, "s")
    f = LaurentMatrix.zero(n, n, svars)
    for k, fk in enumerate(sol.coeffs):
        f = f + fk.map(lambda p: p.with_vars(svars) * s**-k)
    fprime = f.map(lambda p: _s_derivative(p, "s"))
    lam = sol.level.with_vars(svars)
    umat = LaurentMatrix.zero(n, n, svars)
    rows = [list(r) for r in umat.entries]
    for m in range(n):
        rows[m][m] = LaurentPoly.constant(svars, sol.u[m])
    umat = LaurentMatrix(rows)
    e, einv = e_matrix_exact(n, cohom_vars(n))
    half = Fraction(1, n)
    ahat_total = LaurentMatrix.zero(n, n, svars)
    for j, b in enumerate(shear_coeffs(n)):
        bb = b.map(lambda p: p.with_vars(vs))
        aj = _reduce_w((e * bb * einv).map(lambda p: p * half), 2 * n)
        ahat_total = ahat_total + aj.map(lambda p: p.with_vars(svars) * s**-j)
    res = fprime + f.map(lambda p: p * lam * s**-1) + f * umat - ahat_total * f
    out = []
    for k in range(1, order + 1):
        ok = True
        for i in range(n):
            for j in range(n):
                c = res[i, j].coefficient("s", -k)
                if not reduce_root_of_unity(c.with_vars(vs), W, 2 * n).is_zero():
                    ok = False
        out.append(ok)
    return out


def _s_derivative(p: LaurentPoly, name: str) -> LaurentPoly:
    i = p.vars.index(name)
    terms = {}
    for e, c in p.terms.items():
        k = e[i]
        if k == 0:
            continue
        ne = list(e)
        ne[i] = k - 1
        terms[tuple(ne)] = c * k
    return LaurentPoly(p.vars, terms)


def formal_reduce_numeric(n: int, z: Sequence[complex], order: int) -> FormalSolution:
    """Numeric formal reduction for any rank (same recursion, complex field)."""
    e, einv = e_matrix(n)
    zc = [complex(w) for w in z]
    vals = {f"z{i + 1}": zc[i] for i in range(n)}
    ahat = []
    for b in shear_coeffs(n):
        bn = np.array([[b[i, j].eval(vals) for j in range(n)] for i in range(n)])
        ahat.append(e @ bn @ einv)
    u = n * np.exp(2j * np.pi * np.arange(n) / n)
    lam = sum(zc) + (n - 1) / 2
    coeffs = [np.eye(n, dtype=complex)]
    f1 = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            if a != b:
                f1[a, b] = ahat[1][a, b] / (u[b] - u[a])
    coeffs.append(f1)

    def ahat_at(j):
        return ahat[j] if j < len(ahat) else np.zeros((n, n), dtype=complex)

    for k in range(1, order):
        fk = coeffs[k]
        for a in range(n):
            acc = ahat_at(k + 1)[a, a]
            for g in range(n):
                if g != a:
                    acc += ahat[1][a, g] * fk[g, a]
            for j in range(2, k + 1):
                acc += (ahat_at(j) @ coeffs[k + 1 - j])[a, a]
            fk[a, a] = -acc / k
        fnext = np.zeros((n, n), dtype=complex)
        rhs = ahat_at(k + 1) + k * fk - fk * lam
        for j in range(1, k + 1):
            rhs = rhs + ahat_at(j) @ coeffs[k + 1 - j]
        for a in range(n):
            for b in range(n):
                if a != b:
                    fnext[a, b] = rhs[a, b] / (u[b] - u[a])
        coeffs.append(fnext)
    return FormalSolution(n, lam, list(u), np.eye(n, dtype=complex), coeffs)


# -- diagonal normal form of the shift operators ---------------------------------------------


def qkz_normal_form(j: int, n: int) -> LaurentMatrix:
    """Residue at s = 0 of E H(s)^{-1} K_j(s^n, z) H(s) E^{-1}, exactly, as a
    matrix over (W, z1..zn); equals diag(zeta^{-m}) = diag(W^{-2m})."""
    kx = qkz_operator_symbolic(j, n, basis="x")
    svars = ("s",) + cohom_vars(n)
    rows = []
    for a in range(n):
        row = []
        for b in range(n):
            p = kx[a, b]
            terms = {}
            qi = p.vars.index("q")
            for e, c in p.terms.items():
                ne = (e[qi] * n,) + e[1:]
                terms[ne] = c
            row.append(LaurentPoly(svars, terms) * LaurentPoly.variable(svars, "s", a - b))
        rows.append(row)
    res = [[rows[a][b].coefficient("s", -1) for b in range(n)] for a in range(n)]
    wz = (W,) + cohom_vars(n)
    resm = LaurentMatrix([[p.with_vars(wz) for p in row] for row in res])
    e, einv = e_matrix_exact(n, cohom_vars(n))
    return _reduce_w((e * resm * einv).map(lambda p: p * Fraction(1, n)), 2 * n)


def qkz_normal_form_expected(n: int) -> LaurentMatrix:
    wz = (W,) + cohom_vars(n)
    rows = [[LaurentPoly.zero(wz) for _ in range(n)] for _ in range(n)]
    for m in range(n):
        rows[m][m] = LaurentPoly.variable(wz, W, (-2 * m) % (2 * n))
    return _reduce_w(LaurentMatrix(rows), 2 * n)


# -- Stokes bases and matrices -----------------------------------------------------------


def stokes_basis(sector: SectorId, n: int) -> ExceptionalBasis:
    """The rescaled sorted basis attached to the sector, with eigenvalue tags."""
    return structured_basis(sector.basis_kind(), sector.k, n)


def stokes_normalization(sector: SectorId, ctx: NumericContext) -> np.ndarray:
    """Diagonal normalization (indexed by eigenvalue tag m) of the sector's
    Stokes fundamental solution:
    (2 pi)^{(n-1)/2} e^{-i pi(n-1)/2} e^{m pi i/n} (zeta^m)^{s_1(z)+(n-1)/2}."""
    n = ctx.n
    lam = sum(ctx.z) + (n - 1) / 2
    out = np.zeros(n, dtype=complex)
    for m in range(n):
        arg = 2 * math.pi * m / n
        if arg > math.pi:
            arg -= 2 * math.pi
        out[m] = (
            (2 * math.pi) ** ((n - 1) / 2)
            * cmath.exp(-1j * cmath.pi * (n - 1) / 2)
            * cmath.exp(1j * cmath.pi * m / n)
            * cmath.exp(lam * 1j * arg)
        )
    return out


def _columns_by_tag(basis: ExceptionalBasis, tag_order: Sequence[int]) -> LaurentMatrix:
    mat = basis.coordinate_matrix()
    pos = {t: i for i, t in enumerate(basis.eigen_tags)}
    cols = [pos[t] for t in tag_order]
    return LaurentMatrix(
        [[mat[i, c] for c in cols] for i in range(basis.n)]
    )


def stokes_matrices(sector: SectorId, n: int) -> tuple[LaurentMatrix, LaurentMatrix]:
    """S1, S2 in lexicographic order, as exact coordinate matrices expressing
    the half-turn (and full-turn) Stokes bases in terms of the sector's basis.
    Entries are Laurent polynomials in the exponentiated parameters (written in
    the Z variables).  Upper/lower unitriangularity is asserted."""
    eps0 = stokes_basis(sector, n)
    eps1 = stokes_basis(sector.rotate_half(n), n)
    eps2 = stokes_basis(sector.rotate_half(n).rotate_half(n), n)
    tag_order = list(reversed(eps0.eigen_tags))
    a0 = _columns_by_tag(eps0, tag_order)
    a1 = _columns_by_tag(eps1, tag_order)
    a2 = _columns_by_tag(eps2, tag_order)
    a0_inv = a0.inverse()
    s1 = a0_inv * a1
    s2 = a1.inverse() * a2
    if not s1.is_upper_unitriangular():
        raise ArithmeticError("first Stokes matrix is not upper unitriangular (ordering bug)")
    if not s2.is_lower_unitriangular():
        raise ArithmeticError("second Stokes matrix is not lower unitriangular (ordering bug)")
    return s1, s2


def half_turn_is_left_dual(sector: SectorId, n: int) -> bool:
    """The Stokes basis on e^{i pi} V equals the half-twist image of the basis
    on V, elementwise."""
    eps0 = stokes_basis(sector, n)
    eps1 = stokes_basis(sector.rotate_half(n), n)
    beta = braid_constants("beta", n)
    return braid_act(beta, eps0).elements == eps1.elements


def gram_stokes_check(sector: SectorId, n: int) -> dict:
    """The central identities: S1 = J (G^dag)^{-1} J and S2 = J G J for the
    Gram matrix G of the sector's exceptional basis, plus S2 = (S1^dag)^{-1}
    and the characteristic-polynomial constraint on S1^dag S1^{-1}."""
    s1, s2 = stokes_matrices(sector, n)
    eps0 = stokes_basis(sector, n)
    g = gram_matrix(eps0)
    vs = zvars(n)
    j = LaurentMatrix(
        [
            [LaurentPoly.constant(vs, 1 if a + b == n - 1 else 0) for b in range(n)]
            for a in range(n)
        ]
    )
    ok_s1 = s1 == j * g.dagger().inverse() * j
    ok_s2 = s2 == j * g * j
    ok_pair = s2 == s1.dagger().inverse()
    char = _char_poly_via_dagger(s1, n)
    ok_char = (char - canonical_spectrum_poly(n)).is_zero()
    mono = _formal_monodromy_char_residual(s1, s2, n)
    return {
        "sector": sector,
        "stokes_is_dual_gram": ok_s1,
        "stokes_is_gram": ok_s2,
        "dagger_pair": ok_pair,
        "char_poly": ok_char,
        "formal_monodromy": mono.is_zero(),
        "s1": s1,
        "s2": s2,
        "gram": g,
    }


def _char_poly_via_dagger(s1: LaurentMatrix, n: int) -> LaurentPoly:
    from .ktheory import canonical_char_poly

    return canonical_char_poly(s1, n)


def _formal_monodromy_char_residual(s1: LaurentMatrix, s2: LaurentMatrix, n: int) -> LaurentPoly:
    """det(lambda - (-1)^{n-1} s_n(Z) (S1 S2)^{-1}) - prod_j (lambda - Z_j^n):
    the n-th power of the regular-point monodromy seen at infinity."""
    vs = ("LAM",) + zvars(n)
    lam = LaurentPoly.variable(vs, "LAM")
    prod = (s1 * s2).inverse().map(lambda p: p.with_vars(vs))
    sign = 1 if (n - 1) % 2 == 0 else -1
    sn = sym_poly("elementary", n, n).with_vars(vs) * sign
    m = prod.map(lambda p: p * sn)
    lam_eye = LaurentMatrix.identity(n, vs).map(lambda p: p * lam)
    char = (lam_eye - m).det()
    want = LaurentPoly.one(vs)
    for i in range(1, n + 1):
        want = want * (lam - LaurentPoly.variable(vs, f"Z{i}", n))
    return char - want


# -- roots of unity --------------------------------------------------------------------------


def root_of_unity_point(n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(m, n) for m in range(n))


def scalar_collapse_residual(n: int) -> LaurentPoly:
    """Difference, as a polynomial in a formal eigenvalue variable, between the
    rescaled scalar symbol at the distinguished root-of-unity point and the
    falling factorial: zero iff the scalar equation collapses to
    phi^{(n)} = n^n phi after q = s^n."""
    vs = ("a",)
    a = LaurentPoly.variable(vs, "a")
    zo = root_of_unity_point(n)
    lhs = a**n * Fraction(1, n**n)
    for j in range(1, n):
        s = elementary_symmetric(list(zo), n - j)
        sign = 1 if (n - j) % 2 == 0 else -1
        lhs = lhs + a**j * (Fraction(sign) * s * Fraction(1, n**j))
    sn = elementary_symmetric(list(zo), n)
    sign = 1 if (n - 1) % 2 == 0 else -1
    lhs = lhs - LaurentPoly.constant(vs, Fraction(sign) * sn)
    falling = LaurentPoly.one(vs)
    for i in range(n):
        falling = falling * (a - i)
    return lhs - falling * Fraction(1, n**n)


def stirling_value_checks(n: int) -> bool:
    """s_k(0, 1/n, .., (n-1)/n) = [n, n-k]/n^k and the analogous complete-sum
    identity with second-kind numbers."""
    from .ring import stirling

    zo = root_of_unity_point(n)
    for k in range(1, n + 1):
        if elementary_symmetric(list(zo), k) != Fraction(stirling("first", n, n - k), n**k):
            return False
    for k in range(1, 5):
        p = sym_poly("complete", k, n)
        for i in range(1, n + 1):
            p = p.specialize(f"Z{i}", zo[i - 1])
        if p.constant_value() != Fraction(stirling("second", n + k - 1, n - 1), n**k):
            return False
    return True


def specialize_to_unity_roots(p: LaurentPoly, n: int) -> LaurentPoly:
    """Substitute Z_m -> V^{m-1} with V a formal primitive n-th root of unity
    and reduce; the result lives in (V,) and is zero iff p vanishes there."""
    vs = ("V",) + zvars(n)
    q = p.with_vars(vs)
    for m in range(1, n + 1):
        e = [0] * (n + 1)
        e[0] = m - 1
        q = q.substitute_monomial(f"Z{m}", 1, tuple(e))
    q = q.drop_vars(zvars(n))
    return reduce_root_of_unity(q, "V", n)


def stokes_trivial_at_unity(sector: SectorId, n: int) -> bool:
    """Both Stokes matrices specialize to the identity at the distinguished
    root-of-unity parameters, exactly."""
    s1, s2 = stokes_matrices(sector, n)
    for s in (s1, s2):
        for a in range(n):
            for b in range(n):
                want = 1 if a == b else 0
                d = specialize_to_unity_roots(s[a, b], n) - want
                if not d.is_zero():
                    return False
    return True


def gram_orthonormal_at_unity(n: int) -> bool:
    """The Gram matrix of the consecutive line-bundle basis specializes to the
    identity (orthonormality of exceptional bases at the degenerate point)."""
    from .ktheory import beilinson_basis

    g = gram_matrix(beilinson_basis(n))
    for a in range(n):
        for b in range(n):
            want = 1 if a == b else 0
            if not (specialize_to_unity_roots(g[a, b], n) - want).is_zero():
                return False
    return True


def partition_basis_values(n: int, s: complex, order: int = 120) -> np.ndarray:
    """g_m(s) = sum_k (n s)^{m+kn}/(m+kn)! for m = 0..n-1."""
    out = np.zeros(n, dtype=complex)
    for m in range(n):
        term = (n * s) ** m / math.factorial(m)
        total = term
        for k in range(1, order):
            for j in range(m + (k - 1) * n + 1, m + k * n + 1):
                term = term * (n * s) / j
            total += term
        out[m] = total
    return out


def roots_of_unity_suite(n: int, sectors: Sequence[SectorId] | None = None) -> dict:
    """The degeneration report: scalar collapse, Stirling identities, exact
    Stokes triviality, orthonormality, monodromy order, eigenbasis property,
    and the partition of the exponential."""
    report = {
        "n": n,
        "scalar_collapse": scalar_collapse_residual(n).is_zero(),
        "stirling_values": stirling_value_checks(n),
    }
    if sectors is None:
        sectors = [SectorId("Vprime", 0), SectorId("Vdprime", 0)]
    report["stokes_trivial"] = all(stokes_trivial_at_unity(s, n) for s in sectors)
    report["orthonormal_gram"] = gram_orthonormal_at_unity(n)
    zo = [complex(w) for w in root_of_unity_point(n)]
    m0 = np.diag([cmath.exp(2j * cmath.pi * w) for w in zo])
    report["monodromy_order"] = bool(
        np.allclose(np.linalg.matrix_power(m0, n), np.eye(n), atol=1e-12)
        and not any(
            np.allclose(np.linalg.matrix_power(m0, k), np.eye(n), atol=1e-12)
            for k in range(1, n)
        )
    )
    # shifted lattice point: same exponentials, same monodromy
    zshift = [zo[0] + 1] + zo[1:]
    m1 = np.diag([cmath.exp(2j * cmath.pi * w) for w in zshift])
    report["monodromy_order_shifted"] = bool(np.allclose(m1, m0, atol=1e-12))
    s = 0.83 + 0.21j
    zeta = cmath.exp(2j * cmath.pi / n)
    g0 = partition_basis_values(n, s)
    g1 = partition_basis_values(n, zeta * s)
    dev = max(
        abs(g1[m] - zeta**m * g0[m]) / max(abs(g0[m]), 1e-30) for m in range(n)
    )
    report["eigenbasis_deviation"] = float(dev)
    report["partition_deviation"] = float(abs(np.sum(g0) - cmath.exp(n * s)))
    # away from the degenerate locus at least one off-diagonal entry survives
    s1, _ = stokes_matrices(SectorId("Vprime", 0), n)
    report["nontrivial_generically"] = any(
        not s1[a, b].is_zero() for a in range(n) for b in range(n) if a != b
    )
    return report


# -- bridge to the isomonodromic system at zero parameters -------------------------------------


def antisymmetric_v_exact(n: int) -> bool:
    """V = E mu E^{-1} with mu = diag(0..n-1) - (n-1)/2 satisfies V^T + V = 0,
    exactly over the adjoined root of unity."""
    e, einv = e_matrix_exact(n)
    vs = e.vars
    mu = [[LaurentPoly.zero(vs) for _ in range(n)] for _ in range(n)]
    for a in range(n):
        mu[a][a] = LaurentPoly.constant(vs, Fraction(2 * a - (n - 1), 2))
    v = _reduce_w((e * LaurentMatrix(mu) * einv).map(lambda p: p * Fraction(1, n)), 2 * n)
    return (v + v.transpose()) == LaurentMatrix.zero(n, n, vs)


def dubrovin_bridge(n: int, lam_samples: Sequence[float] = (1.4, 2.1)) -> dict:
    """Integrate the zero-parameter reduced system dT/ds = (B0 + B1(0)/s) T and
    verify that lambda^{-(n-1)/2} E T(lambda) solves dY/dlambda = (U + V/lambda) Y,
    with V antisymmetric; derivative by a five-point stencil on the RK4 grid."""
    e, _ = e_matrix(n)
    b0 = np.zeros((n, n), dtype=complex)
    b0[0, n - 1] = n
    for i in range(1, n):
        b0[i, i - 1] = n
    b1 = np.diag(np.arange(n, dtype=complex))
    mu = b1 - (n - 1) / 2 * np.eye(n)
    u = np.diag(n * np.exp(2j * np.pi * np.arange(n) / n))
    v = e @ mu @ np.linalg.inv(e)
    antisym = float(np.max(np.abs(v + v.T)))

    h = 1e-3
    s0, s1 = 1.0, 2.5
    steps = int(round((s1 - s0) / h))
    ts = [np.eye(n, dtype=complex)]
    t = ts[0]
    s = s0

    def rhs(s, t):
        return (b0 + b1 / s) @ t

    for _ in range(steps):
        k1 = rhs(s, t)
        k2 = rhs(s + h / 2, t + h / 2 * k1)
        k3 = rhs(s + h / 2, t + h / 2 * k2)
        k4 = rhs(s + h, t + h * k3)
        t = t + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s += h
        ts.append(t)

    def y_at(idx):
        lam = s0 + idx * h
        return lam ** (-(n - 1) / 2) * (e @ ts[idx])

    worst = 0.0
    for lam in lam_samples:
        idx = int(round((lam - s0) / h))
        lam = s0 + idx * h
        dy = (-y_at(idx + 2) + 8 * y_at(idx + 1) - 8 * y_at(idx - 1) + y_at(idx - 2)) / (12 * h)
        y = y_at(idx)
        res = dy - (u + v / lam) @ y
        worst = max(worst, float(np.linalg.norm(res) / np.linalg.norm(y)))
    return {"n": n, "antisymmetry": antisym, "residual": worst}
