"""Equivariant cohomology of P^{n-1} at the level needed for solution theory.

Classes are stored by their restrictions at the n torus-fixed points (the
idempotent basis), where the cup product is componentwise.  The x-power basis
is reached through the Vandermonde matrix of the equivariant parameters.  On
top: the Poincare pairing, the graded Chern character, the Gamma classes, and
the K-theory-to-cohomology comparison morphism together with its matrix.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .ring import LaurentPoly, RationalFn, sym_poly, zvars
from .ktheory import KClass


def cohom_vars(n: int) -> tuple[str, ...]:
    return zvars(n, prefix="z")


@dataclass(frozen=True)
class NumericContext:
    """Numeric equivariant parameters with a guard against resonances.

    Pairwise differences z_i - z_j must stay away from the integers (within
    omega_tol), else Gamma factors blow up and the Vandermonde degenerates.
    precision is "double" or a number of bits for the mpmath Gamma path.
    """

    z: tuple[complex, ...]
    omega_tol: float = 1e-9
    precision: int | str = "double"

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(complex(w) for w in self.z))
        self.require_omega()

    @property
    def n(self) -> int:
        return len(self.z)

    def require_omega(self) -> None:
        for i in range(self.n):
            for j in range(self.n):
                if i == j:
                    continue
                d = self.z[i] - self.z[j]
                if abs(d.imag) < self.omega_tol and abs(d.real - round(d.real)) < self.omega_tol:
                    raise ValueError(
                        f"parameters outside the resonance-free domain: z{i + 1}-z{j + 1}={d}"
                    )

    def shift(self, i: int, step: int = -1) -> "NumericContext":
        """Context with z_i shifted by an integer step (default the qKZ shift -1)."""
        z = list(self.z)
        z[i - 1] += step
        return NumericContext(z, self.omega_tol, self.precision)

    def gamma(self, w: complex) -> complex:
        return _gamma(w, self.precision)


def _gamma(w: complex, precision) -> complex:
    if precision == "double":
        from scipy.special import gamma as _sgamma

        return complex(_sgamma(complex(w)))
    import mpmath

    with mpmath.workprec(int(precision)):
        return complex(mpmath.gamma(mpmath.mpc(w)))


class CohClass:
    """Cohomology class stored by fixed-point restrictions (idempotent basis).

    Restriction entries may be exact (LaurentPoly/RationalFn/Fraction) or
    complex numbers; the product is componentwise.
    """

    __slots__ = ("n", "restrictions")

    def __init__(self, n: int, restrictions):
        restrictions = tuple(restrictions)
        if len(restrictions) != n:
            raise ValueError(f"need {n} fixed-point restrictions")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "restrictions", restrictions)

    def __setattr__(self, name, value):
        raise AttributeError("CohClass is immutable")

    def __add__(self, other: "CohClass") -> "CohClass":
        return CohClass(self.n, [a + b for a, b in zip(self.restrictions, other.restrictions)])

    def __sub__(self, other: "CohClass") -> "CohClass":
        return CohClass(self.n, [a - b for a, b in zip(self.restrictions, other.restrictions)])

    def __mul__(self, other) -> "CohClass":
        if isinstance(other, CohClass):
            return CohClass(
                self.n, [a * b for a, b in zip(self.restrictions, other.restrictions)]
            )
        return CohClass(self.n, [a * other for a in self.restrictions])

    __rmul__ = __mul__

    def to_vector(self) -> np.ndarray:
        return np.array([complex(r) for r in self.restrictions], dtype=complex)

    def x_coords(self, ctx: "NumericContext") -> np.ndarray:
        """Coordinates in the basis 1, x, .., x^{n-1}."""
        _, dinv = vandermonde(self.n, ctx.z)
        return dinv @ self.to_vector()

    def to_json(self) -> dict:
        out = []
        for r in self.restrictions:
            if isinstance(r, LaurentPoly):
                out.append(r.to_json())
            elif isinstance(r, (int, Fraction)):
                out.append({"num": str(Fraction(r).numerator), "den": str(Fraction(r).denominator)})
            else:
                c = complex(r)
                out.append([repr(c.real), repr(c.imag)])
        return {"basis": "delta", "restrictions": out}

    def __str__(self) -> str:
        return "(" + ", ".join(str(r) for r in self.restrictions) + ")"

    __repr__ = __str__


# -- bases and the Vandermonde matrix ------------------------------------------------


def vandermonde(n: int, z: Sequence[complex] | None = None):
    """The base-change matrix D (rows: fixed points, columns: x-powers) and its
    closed-form inverse.  Numeric for given z, exact rational functions in
    symbolic mode (z=None); D @ D^{-1} = 1 is asserted either way."""
    if z is not None:
        z = [complex(w) for w in z]
        d = np.array([[z[j] ** a for a in range(n)] for j in range(n)], dtype=complex)
        dinv = np.empty((n, n), dtype=complex)
        for alpha in range(n):
            for j in range(n):
                dinv[alpha, j] = _vinv_entry_numeric(n, alpha, j, z)
        if not np.allclose(d @ dinv, np.eye(n), atol=1e-9):
            raise ArithmeticError("Vandermonde inverse check failed (parameters too close?)")
        return d, dinv
    vs = cohom_vars(n)
    zpol = [LaurentPoly.variable(vs, f"z{j + 1}") for j in range(n)]
    d = [[RationalFn(zpol[j] ** a) for a in range(n)] for j in range(n)]
    dinv = [[_vinv_entry_symbolic(n, alpha, j, zpol) for j in range(n)] for alpha in range(n)]
    prod = _rf_matmul(d, dinv)
    for i in range(n):
        for j in range(n):
            want = RationalFn(LaurentPoly.constant(vs, 1 if i == j else 0))
            if not (prod[i][j] - want).is_zero():
                raise ArithmeticError("symbolic Vandermonde inverse check failed")
    return d, dinv


def _sym_without(n: int, k: int, j: int, zpol):
    """Elementary symmetric polynomial of degree k in the z's without z_{j+1}."""
    from itertools import combinations

    vs = zpol[0].vars
    acc = LaurentPoly.zero(vs)
    idx = [i for i in range(n) if i != j]
    for subset in combinations(idx, k):
        term = LaurentPoly.one(vs)
        for i in subset:
            term = term * zpol[i]
        acc = acc + term
    return acc


def _vinv_entry_symbolic(n, alpha, j, zpol):
    # (D^{-1})_{alpha j} = (-1)^{n-1-alpha} e_{n-1-alpha}(z without z_j) / prod_{m!=j}(z_j - z_m)
    num = _sym_without(n, n - 1 - alpha, j, zpol)
    if (n - 1 - alpha) % 2 == 1:
        num = -num
    den = LaurentPoly.one(zpol[0].vars)
    for m in range(n):
        if m != j:
            den = den * (zpol[j] - zpol[m])
    return RationalFn(num, den)


def _vinv_entry_numeric(n, alpha, j, z):
    from itertools import combinations

    others = [z[m] for m in range(n) if m != j]
    k = n - 1 - alpha
    e = sum(math.prod(c) for c in combinations(others, k)) if k > 0 else 1.0
    den = math.prod(z[j] - z[m] for m in range(n) if m != j)
    return (-1) ** k * e / den


def _rf_matmul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = a[i][0] * b[0][j]
            for k in range(1, inner):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def g_basis_matrix(n: int, z: Sequence[complex] | None = None):
    """Columns express the nested-product basis g_j = prod_{a>j}(x - z_a) in
    x-power coordinates; g_n = 1."""
    if z is None:
        vs = cohom_vars(n)
        zpol = [LaurentPoly.variable(vs, f"z{j + 1}") for j in range(n)]
        cols = []
        for j in range(1, n + 1):
            coeffs = [LaurentPoly.zero(vs) for _ in range(n)]
            coeffs[0] = LaurentPoly.one(vs)
            deg = 0
            for a in range(j + 1, n + 1):
                new = [LaurentPoly.zero(vs) for _ in range(n)]
                for d in range(deg + 1):
                    new[d + 1] = new[d + 1] + coeffs[d]
                    new[d] = new[d] - coeffs[d] * zpol[a - 1]
                coeffs = new
                deg += 1
            cols.append(coeffs)
        from .ring import LaurentMatrix

        return LaurentMatrix([[cols[j][alpha] for j in range(n)] for alpha in range(n)])
    z = [complex(w) for w in z]
    out = np.zeros((n, n), dtype=complex)
    for j in range(1, n + 1):
        poly = np.array([1.0 + 0j])
        for a in range(j + 1, n + 1):
            poly = np.convolve(poly, np.array([-z[a - 1], 1.0 + 0j]))
        out[: len(poly), j - 1] = poly
    return out


def delta_to_g(n: int, z: Sequence[complex], vec: np.ndarray) -> np.ndarray:
    """Convert fixed-point restrictions to g-basis coordinates."""
    _, dinv = vandermonde(n, z)
    g = g_basis_matrix(n, z)
    return np.linalg.solve(g, dinv @ np.asarray(vec, dtype=complex))


# -- Poincare pairing -----------------------------------------------------------------


def eta_gram(n: int, z: Sequence[complex] | None = None):
    """Gram matrix of the Poincare pairing in the x-power basis: zero under the
    antidiagonal, ones on it, complete symmetric functions above."""
    if z is None:
        vs = cohom_vars(n)
        rows = []
        for a in range(n):
            row = []
            for b in range(n):
                if a + b < n - 1:
                    row.append(LaurentPoly.zero(vs))
                elif a + b == n - 1:
                    row.append(LaurentPoly.one(vs))
                else:
                    row.append(sym_poly("complete", a + b - n + 1, n, prefix="z"))
            rows.append(row)
        from .ring import LaurentMatrix

        return LaurentMatrix(rows)
    z = [complex(w) for w in z]
    out = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            if a + b == n - 1:
                out[a, b] = 1.0
            elif a + b > n - 1:
                vals = {f"Z{i + 1}": z[i] for i in range(n)}
                out[a, b] = sym_poly("complete", a + b - n + 1, n).eval(vals)
    return out


def eta_pair(u: CohClass, v: CohClass, z: Sequence) -> complex | RationalFn:
    """Poincare pairing via the fixed-point sum with weights 1/prod(z_i - z_j)."""
    n = u.n
    total = None
    for i in range(n):
        w = None
        for j in range(n):
            if j == i:
                continue
            f = z[i] - z[j]
            w = f if w is None else w * f
        term = u.restrictions[i] * v.restrictions[i] * _invert(w)
        total = term if total is None else total + term
    return total


def _invert(w):
    if isinstance(w, LaurentPoly):
        return RationalFn(LaurentPoly.one(w.vars), w)
    if isinstance(w, RationalFn):
        return RationalFn(w.den, w.num)
    if isinstance(w, Fraction):
        return Fraction(1) / w
    return 1.0 / w


# -- characteristic classes ------------------------------------------------------------


def chern_character(f: KClass, ctx: NumericContext | None = None) -> CohClass:
    """Graded Chern character by fixed-point restriction: substitute
    X -> exp(2 pi i z_I) and Z_a -> exp(2 pi i z_a) at the point I.

    Without a context the substitution X -> Z_I is performed symbolically, so
    the restrictions are Laurent polynomials in the exponentiated parameters.
    """
    n = f.n
    if ctx is None:
        lf = f.to_laurent()
        res = []
        for i in range(1, n + 1):
            e = [0] * (n + 1)
            e[lf.vars.index(f"Z{i}")] = 1
            res.append(lf.substitute_monomial("X", 1, tuple(e)).drop_vars(["X"]))
        return CohClass(n, res)
    az = [cmath.exp(2j * cmath.pi * w) for w in ctx.z]
    lf = f.to_laurent()
    res = []
    for i in range(n):
        vals = {f"Z{a + 1}": az[a] for a in range(n)}
        vals["X"] = az[i]
        res.append(lf.eval(vals))
    return CohClass(n, res)


def gamma_class(sign: str, ctx: NumericContext) -> CohClass:
    """Gamma class of the tangent bundle: restriction at the point I is
    prod_{a != I} Gamma(1 +- (z_a - z_I))."""
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    s = 1 if sign == "+" else -1
    n = ctx.n
    res = []
    for i in range(n):
        acc = 1.0 + 0j
        for a in range(n):
            if a == i:
                continue
            acc *= ctx.gamma(1 + s * (ctx.z[a] - ctx.z[i]))
        res.append(acc)
    return CohClass(n, res)


def first_chern_class(ctx: NumericContext) -> CohClass:
    """Equivariant first Chern class of the tangent bundle: restriction
    sum_i z_i - n z_I."""
    total = sum(ctx.z)
    return CohClass(ctx.n, [total - ctx.n * w for w in ctx.z])


def b_morphism(f: KClass, ctx: NumericContext) -> CohClass:
    """Comparison morphism from K-theory to cohomology: the Gamma class times
    exp(pi i c_1) times the graded Chern character."""
    gp = gamma_class("+", ctx)
    c1 = first_chern_class(ctx)
    expc1 = CohClass(ctx.n, [cmath.exp(1j * cmath.pi * complex(r)) for r in c1.restrictions])
    return gp * expc1 * chern_character(f, ctx)


def connection_matrix(ctx: NumericContext) -> np.ndarray:
    """Matrix of the comparison morphism from the idempotent basis to the
    x-power basis: D^{-1} diag(exp(pi i(sum z - n z_j)) prod Gamma(1+z_a-z_j))."""
    n = ctx.n
    _, dinv = vandermonde(n, ctx.z)
    total = sum(ctx.z)
    diag = np.zeros(n, dtype=complex)
    for j in range(n):
        acc = cmath.exp(1j * cmath.pi * (total - n * ctx.z[j]))
        for a in range(n):
            if a != j:
                acc *= ctx.gamma(1 + ctx.z[a] - ctx.z[j])
        diag[j] = acc
    return dinv @ np.diag(diag)
