"""Equivariant K-theory algebra of P^{n-1} and its exceptional-basis calculus.

The algebra is C[X^{±1}, Z_1^{±1}..Z_n^{±1}] / (prod_j (X - Z_j)), with X the
class of the tautological line bundle O(-1).  Classes are kept in the normal
form of the monomial basis X^0..X^{n-1} over Laurent coefficients in Z; X is a
unit in the quotient because X^{-1} = (-1)^{n-1} s_n(Z)^{-1} (X^{n-1} - s_1
X^{n-2} + ...).

On top of the algebra: the sesquilinear Euler pairing chi, Gram matrices,
left/right mutations, the braid-group action on exceptional bases, dual bases,
the canonical (Serre) operator, Diophantine constraints on Gram matrices, and
the named solution bases built from line bundles and exterior powers of the
tangent bundle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .ring import (
    LaurentMatrix,
    LaurentPoly,
    RationalFn,
    sym_poly,
    unit_pow,
    zvars,
)


def xz_vars(n: int) -> tuple[str, ...]:
    return ("X",) + zvars(n)


@lru_cache(maxsize=None)
def _x_power_normal_form(n: int, m: int) -> tuple[LaurentPoly, ...]:
    """Coordinates of X^m in the basis X^0..X^{n-1}, as Laurent polys in Z."""
    vs = zvars(n)
    if 0 <= m < n:
        return tuple(
            LaurentPoly.one(vs) if j == m else LaurentPoly.zero(vs) for j in range(n)
        )
    if m >= n:
        # X^n = sum_{k=1..n} (-1)^{k-1} s_k X^{n-k}
        acc = [LaurentPoly.zero(vs) for _ in range(n)]
        for k in range(1, n + 1):
            s = sym_poly("elementary", k, n)
            if k % 2 == 0:
                s = -s
            lower = _x_power_normal_form(n, m - k)
            for j in range(n):
                acc[j] = acc[j] + s * lower[j]
        return tuple(acc)
    # m < 0: X^{-1} = (-1)^{n-1} s_n^{-1} sum_{k=0..n-1} (-1)^k s_k X^{n-1-k}
    sn_inv = LaurentPoly.monomial(vs, (-1,) * n)
    sign = 1 if (n - 1) % 2 == 0 else -1
    acc = [LaurentPoly.zero(vs) for _ in range(n)]
    for k in range(n):
        s = sym_poly("elementary", k, n) * (sign * (-1) ** k)
        upper = _x_power_normal_form(n, m + n - k)
        for j in range(n):
            acc[j] = acc[j] + s * sn_inv * upper[j]
    return tuple(acc)


@lru_cache(maxsize=None)
def _o_power_coords(n: int, i: int) -> tuple[LaurentPoly, ...]:
    """Coordinates of the class of O(i) in the basis O(0)..O(n-1).

    Uses the twisted defining relation sum_k (-1)^k s_k(Z) [O(m-n+k)] = 0,
    whose coefficients stay small; this keeps the Euler pairing fast even when
    the X-power coordinates of a class are large.
    """
    vs = zvars(n)
    if 0 <= i < n:
        return tuple(
            LaurentPoly.one(vs) if j == i else LaurentPoly.zero(vs) for j in range(n)
        )
    acc = [LaurentPoly.zero(vs) for _ in range(n)]
    if i >= n:
        # [O(i)] = (-1)^{n+1} s_n^{-1} sum_{k=0..n-1} (-1)^k s_k [O(i-n+k)]
        sn_inv = LaurentPoly.monomial(vs, (-1,) * n)
        for k in range(n):
            s = sym_poly("elementary", k, n) * sn_inv
            if (k + n + 1) % 2 == 1:
                s = -s
            lower = _o_power_coords(n, i - n + k)
            for j in range(n):
                acc[j] = acc[j] + s * lower[j]
        return tuple(acc)
    # i < 0: [O(i)] = -sum_{k=1..n} (-1)^k s_k [O(i+k)]
    for k in range(1, n + 1):
        s = sym_poly("elementary", k, n)
        if k % 2 == 0:
            s = -s
        upper = _o_power_coords(n, i + k)
        for j in range(n):
            acc[j] = acc[j] + s * upper[j]
    return tuple(acc)


class KClass:
    """Element of the equivariant K-theory algebra in normal form.

    The stored coordinates are with respect to the monomial basis X^0..X^{n-1}.
    Coordinates in the line-bundle basis O(0)..O(n-1) are derived lazily and
    carried through linear operations; the pairing works on those.
    """

    __slots__ = ("n", "coeffs", "_ocoords")

    def __init__(self, n: int, coeffs, _ocoords=None):
        coeffs = tuple(coeffs)
        if len(coeffs) != n:
            raise ValueError(f"need {n} coordinates, got {len(coeffs)}")
        vs = zvars(n)
        for c in coeffs:
            if c.vars != vs:
                raise ValueError("KClass coordinates must live in Z1..Zn")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_ocoords", tuple(_ocoords) if _ocoords is not None else None)

    def __setattr__(self, name, value):
        raise AttributeError("KClass is immutable")

    @classmethod
    def zero(cls, n: int) -> "KClass":
        z = LaurentPoly.zero(zvars(n))
        return cls(n, [z] * n, [z] * n)

    @classmethod
    def x_power(cls, n: int, m: int) -> "KClass":
        """Normal form of X^m, i.e. the class of O(-m)."""
        return cls(n, _x_power_normal_form(n, m), _o_power_coords(n, -m))

    @classmethod
    def line_bundle(cls, n: int, i: int) -> "KClass":
        """Class of O(i) = X^{-i}."""
        return cls.x_power(n, -i)

    def o_coords(self) -> tuple[LaurentPoly, ...]:
        """Coordinates in the basis O(0)..O(n-1) (cached)."""
        if self._ocoords is not None:
            return self._ocoords
        n = self.n
        acc = [LaurentPoly.zero(zvars(n)) for _ in range(n)]
        for j, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            base = _o_power_coords(n, -j)
            for a in range(n):
                acc[a] = acc[a] + c * base[a]
        object.__setattr__(self, "_ocoords", tuple(acc))
        return self._ocoords

    def _check(self, other: "KClass") -> None:
        if self.n != other.n:
            raise ValueError("rank mismatch")

    def __add__(self, other: "KClass") -> "KClass":
        self._check(other)
        oc = None
        if self._ocoords is not None and other._ocoords is not None:
            oc = [a + b for a, b in zip(self._ocoords, other._ocoords)]
        return KClass(self.n, [a + b for a, b in zip(self.coeffs, other.coeffs)], oc)

    def __sub__(self, other: "KClass") -> "KClass":
        self._check(other)
        oc = None
        if self._ocoords is not None and other._ocoords is not None:
            oc = [a - b for a, b in zip(self._ocoords, other._ocoords)]
        return KClass(self.n, [a - b for a, b in zip(self.coeffs, other.coeffs)], oc)

    def __neg__(self) -> "KClass":
        oc = None if self._ocoords is None else [-a for a in self._ocoords]
        return KClass(self.n, [-a for a in self.coeffs], oc)

    def scale(self, rho) -> "KClass":
        """Multiply by a scalar from the representation ring (Laurent in Z)."""
        oc = None if self._ocoords is None else [c * rho for c in self._ocoords]
        return KClass(self.n, [c * rho for c in self.coeffs], oc)

    def __eq__(self, other) -> bool:
        if not isinstance(other, KClass):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    __hash__ = None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def to_laurent(self) -> LaurentPoly:
        vs = xz_vars(self.n)
        acc = LaurentPoly.zero(vs)
        x = LaurentPoly.variable(vs, "X")
        for j, c in enumerate(self.coeffs):
            acc = acc + c.with_vars(vs) * x**j
        return acc

    def mul_class(self, other: "KClass") -> "KClass":
        self._check(other)
        return kclass_from_laurent(self.to_laurent() * other.to_laurent(), self.n)

    def twist(self, m: int) -> "KClass":
        """Multiply by X^m (tensor with O(-m))."""
        acc = KClass.zero(self.n)
        for j, c in enumerate(self.coeffs):
            acc = acc + KClass.x_power(self.n, j + m).scale(c)
        return acc

    def to_json(self) -> dict:
        return {"n": self.n, "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "KClass":
        return cls(data["n"], [LaurentPoly.from_json(c) for c in data["coeffs"]])

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coeffs) + ")"

    __repr__ = __str__


def kclass_from_laurent(f: LaurentPoly, n: int) -> KClass:
    """Reduce a Laurent polynomial in (X, Z1..Zn) to K-theory normal form."""
    if f.vars != xz_vars(n):
        f = f.with_vars(xz_vars(n))
    acc = [LaurentPoly.zero(zvars(n)) for _ in range(n)]
    oacc = [LaurentPoly.zero(zvars(n)) for _ in range(n)]
    for m, coeff in f.as_series("X").items():
        nf = _x_power_normal_form(n, m)
        oc = _o_power_coords(n, -m)
        for j in range(n):
            acc[j] = acc[j] + coeff * nf[j]
            oacc[j] = oacc[j] + coeff * oc[j]
    return KClass(n, acc, oacc)


def canonical_class(n: int) -> KClass:
    """Class of the equivariant canonical sheaf: X^n / prod_j Z_j."""
    sn_inv = LaurentPoly.monomial(zvars(n), (-1,) * n)
    return KClass.x_power(n, n).scale(sn_inv)


def serre_twist(e: KClass) -> KClass:
    """Canonical operator on classes: tensor by the canonical sheaf and shift,
    i.e. multiply by (-1)^{n-1} X^n / prod Z_j."""
    n = e.n
    sign = 1 if (n - 1) % 2 == 0 else -1
    return e.twist(n).scale(LaurentPoly.monomial(zvars(n), (-1,) * n, sign))


# -- Euler pairing -----------------------------------------------------------------


@lru_cache(maxsize=None)
def _chi_x_power_table(i: int, j: int, n: int) -> LaurentPoly:
    """chi(X^i, X^j) = chi([O(-i)], [O(-j)]) in closed form."""
    vs = zvars(n)
    if i >= j:
        return sym_poly("complete", i - j, n).dual()
    if i > j - n:
        return LaurentPoly.zero(vs)
    s = sym_poly("complete", j - i - n, n) * sym_poly("elementary", n, n)
    return s if (n - 1) % 2 == 0 else -s


def chi_pair(f: KClass, g: KClass, cross_check: bool = False) -> LaurentPoly:
    """Equivariant Euler pairing chi(f, g), sesquilinear over the Laurent ring
    (dual on the first slot).  Computed in the line-bundle basis, where
    chi(O(a), O(b)) is m_{b-a}(Z^{-1}) for a <= b and zero otherwise.  With
    cross_check the fixed-point localization formula is evaluated as a
    rational function and compared."""
    f._check(g)
    n = f.n
    fo = f.o_coords()
    go = g.o_coords()
    acc = LaurentPoly.zero(zvars(n))
    for a in range(n):
        if fo[a].is_zero():
            continue
        fad = fo[a].dual()
        for b in range(a, n):
            if go[b].is_zero():
                continue
            acc = acc + fad * go[b] * sym_poly("complete", b - a, n).dual()
    if cross_check:
        loc = chi_via_localization(f, g)
        if not (loc - RationalFn(acc)).is_zero():
            raise ArithmeticError("localization cross-check failed for chi pairing")
    return acc


def chi_via_localization(f: KClass, g: KClass) -> RationalFn:
    """Fixed-point localization formula for the pairing:
    sum_a f(Z_a^{-1}, Z^{-1}) g(Z_a, Z) / prod_{j != a} (1 - Z_a/Z_j)."""
    f._check(g)
    n = f.n
    vs = xz_vars(n)
    zv = zvars(n)
    fl = f.to_laurent().dual()
    gl = g.to_laurent()
    total = RationalFn(LaurentPoly.zero(zv))
    for a in range(1, n + 1):
        e = [0] * (n + 1)
        e[vs.index(f"Z{a}")] = 1
        fa = fl.substitute_monomial("X", 1, tuple(e)).drop_vars(["X"])
        ga = gl.substitute_monomial("X", 1, tuple(e)).drop_vars(["X"])
        den = LaurentPoly.one(zv)
        za = LaurentPoly.variable(zv, f"Z{a}")
        for j in range(1, n + 1):
            if j == a:
                continue
            zj_inv = LaurentPoly.variable(zv, f"Z{j}", -1)
            den = den * (LaurentPoly.one(zv) - za * zj_inv)
        total = total + RationalFn(fa * ga, den)
    return total


def a_pair(f: KClass, g: KClass) -> LaurentPoly:
    """The opposite-order pairing A(f, g) = chi(g, f)^*."""
    return chi_pair(g, f).dual()


# -- exceptional bases --------------------------------------------------------------


class ExceptionalBasis:
    """Ordered exceptional basis with object labels and optional eigenvalue tags."""

    __slots__ = ("elements", "labels", "eigen_tags")

    def __init__(self, elements, labels=None, eigen_tags=None, verify: bool = True):
        elements = tuple(elements)
        n = elements[0].n
        if len(elements) != n:
            raise ValueError(f"an exceptional basis of rank {n} needs {n} elements")
        if labels is None:
            labels = tuple(f"e{i + 1}" for i in range(n))
        labels = tuple(labels)
        if len(labels) != n:
            raise ValueError("one label per element")
        if eigen_tags is not None:
            eigen_tags = tuple(eigen_tags)
            if sorted(eigen_tags) != list(range(n)):
                raise ValueError("eigen tags must be a permutation of 0..n-1")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "eigen_tags", eigen_tags)
        if verify and not self.is_exceptional():
            raise ValueError("basis is not exceptional (Gram not unitriangular)")

    def __setattr__(self, name, value):
        raise AttributeError("ExceptionalBasis is immutable")

    @property
    def n(self) -> int:
        return self.elements[0].n

    def is_exceptional(self) -> bool:
        n = self.n
        one = LaurentPoly.one(zvars(n))
        for i, ei in enumerate(self.elements):
            if chi_pair(ei, ei) != one:
                return False
            for j in range(i + 1, n):
                if not chi_pair(self.elements[j], ei).is_zero():
                    return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExceptionalBasis):
            return NotImplemented
        return self.elements == other.elements

    __hash__ = None

    def with_tags(self, tags) -> "ExceptionalBasis":
        return ExceptionalBasis(self.elements, self.labels, tags, verify=False)

    def coordinate_matrix(self) -> LaurentMatrix:
        """Columns are the X^j-coordinates of the basis elements."""
        return LaurentMatrix(
            [[e.coeffs[j] for e in self.elements] for j in range(self.n)]
        )

    def to_json(self) -> dict:
        return {
            "elements": [e.to_json() for e in self.elements],
            "labels": list(self.labels),
            "eigen_tags": list(self.eigen_tags) if self.eigen_tags is not None else None,
        }

    def __str__(self) -> str:
        return "(" + ", ".join(self.labels) + ")"

    __repr__ = __str__


def beilinson_basis(n: int) -> ExceptionalBasis:
    """(O(0), O(1), ..., O(n-1))."""
    return ExceptionalBasis(
        [KClass.line_bundle(n, i) for i in range(n)],
        [f"O({i})" for i in range(n)],
        verify=False,
    )


def gram_matrix(basis: ExceptionalBasis) -> LaurentMatrix:
    els = basis.elements
    return LaurentMatrix([[chi_pair(ei, ej) for ej in els] for ei in els])


def mutate(side: str, e: KClass, f: KClass) -> KClass:
    """Left mutation f - chi(e,f) e or right mutation f - chi(f,e)^* e."""
    if chi_pair(e, e) != LaurentPoly.one(zvars(e.n)):
        raise ValueError("mutation pivot is not exceptional (chi(e,e) != 1)")
    if side == "left":
        return f - e.scale(chi_pair(e, f))
    if side == "right":
        return f - e.scale(chi_pair(f, e).dual())
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


# -- braid words and the braid action -----------------------------------------------


@dataclass(frozen=True)
class BraidWord:
    """Word in the braid group generators; letter i means tau_i, -i its inverse."""

    letters: tuple[int, ...]

    def __post_init__(self):
        for t in self.letters:
            if t == 0:
                raise ValueError("letter 0 is not a generator")

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return BraidWord(self.letters + other.letters)

    def inverse(self) -> "BraidWord":
        return BraidWord(tuple(-t for t in reversed(self.letters)))

    def __pow__(self, k: int) -> "BraidWord":
        base = self if k >= 0 else self.inverse()
        return BraidWord(base.letters * abs(k))

    def free_reduce(self) -> "BraidWord":
        out: list[int] = []
        for t in self.letters:
            if out and out[-1] == -t:
                out.pop()
            else:
                out.append(t)
        return BraidWord(tuple(out))

    def to_json(self) -> list[int]:
        return list(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return "".join(f"t{t}" if t > 0 else f"t{-t}'" for t in self.letters)


def _move_right(basis: ExceptionalBasis, i: int) -> ExceptionalBasis:
    """Collection move at slot i (1-based): (.., e_i, e_{i+1}, ..) ->
    (.., e_{i+1}, R_{e_{i+1}} e_i, ..)."""
    els = list(basis.elements)
    labs = list(basis.labels)
    e, f = els[i - 1], els[i]
    els[i - 1], els[i] = f, mutate("right", f, e)
    labs[i - 1], labs[i] = labs[i], f"R({labs[i - 1]}|{labs[i]})"
    return ExceptionalBasis(els, labs, verify=False)


def _move_left(basis: ExceptionalBasis, i: int) -> ExceptionalBasis:
    """Inverse collection move: (.., e_i, e_{i+1}, ..) -> (.., L_{e_i} e_{i+1}, e_i, ..)."""
    els = list(basis.elements)
    labs = list(basis.labels)
    e, f = els[i - 1], els[i]
    els[i - 1], els[i] = mutate("left", e, f), e
    labs[i - 1], labs[i] = f"L({labs[i]}|{labs[i - 1]})", labs[i - 1]
    return ExceptionalBasis(els, labs, verify=False)


def braid_act(word: BraidWord, basis: ExceptionalBasis, verify: bool = True) -> ExceptionalBasis:
    """Left action of a braid word: generator tau_i acts as the slot move at
    n - i, inverse letters as the inverse move.  Letters apply right to left."""
    n = basis.n
    out = basis
    for t in reversed(word.letters):
        i = n - abs(t)
        if not 1 <= i <= n - 1:
            raise ValueError(f"generator index {abs(t)} out of range for rank {n}")
        out = _move_right(out, i) if t > 0 else _move_left(out, i)
    out = ExceptionalBasis(out.elements, out.labels, verify=False)
    if verify and not out.is_exceptional():
        raise ArithmeticError("braid action produced a non-exceptional basis")
    return out


def braid_constants(name: str, n: int) -> BraidWord:
    """The named braid words: Coxeter element, the sorting braids, the
    half-twist, and the alternating odd/even products."""
    if n < 2:
        raise ValueError("rank must be at least 2")
    if name == "C":
        return BraidWord(tuple(range(1, n)))
    if name == "beta":
        letters: list[int] = []
        for r in range(1, n):
            letters.extend(range(r, 0, -1))
        return BraidWord(tuple(letters))
    if name == "gamma":
        if n == 2:
            return BraidWord(())
        ell = n - 1 if n % 2 == 1 else n - 2
        letters = []
        for k in range(ell, 1, -2):
            letters.extend(range(k, n))
        return BraidWord(tuple(letters))
    if name == "delta_odd":
        top = n - 2 if n % 2 == 1 else n - 1
        return BraidWord(tuple(range(1, top + 1, 2)))
    if name == "delta_even":
        top = n - 1 if n % 2 == 1 else n - 2
        return BraidWord(tuple(range(2, top + 1, 2)))
    if name in ("sigma_odd", "sigma_even"):
        first = "delta_odd" if name == "sigma_odd" else "delta_even"
        second = "delta_even" if name == "sigma_odd" else "delta_odd"
        word = BraidWord(())
        for r in range(n):
            word = word * braid_constants(first if r % 2 == 0 else second, n)
        return word
    raise ValueError(f"unknown braid constant {name!r}")


def dual_basis(side: str, basis: ExceptionalBasis) -> ExceptionalBasis:
    """Left dual (half-twist image) or right dual (its inverse image)."""
    beta = braid_constants("beta", basis.n)
    if side == "left":
        return braid_act(beta, basis)
    if side == "right":
        return braid_act(beta.inverse(), basis)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


# -- canonical operator and Diophantine constraints ----------------------------------


def canonical_matrix(gram: LaurentMatrix) -> LaurentMatrix:
    """Matrix of the canonical (Serre) operator wrt the basis: G^{-1} G†."""
    return gram.inverse() * gram.dagger()


LAMBDA = "LAM"


def _lambda_context(n: int) -> tuple[str, ...]:
    return (LAMBDA,) + zvars(n)


def canonical_char_poly(gram: LaurentMatrix, n: int) -> LaurentPoly:
    """det(lambda - G^{-1} G†) as a Laurent polynomial in (LAM, Z1..Zn),
    computed as det(lambda G - G†) / det G."""
    vs = _lambda_context(n)
    lam = LaurentPoly.variable(vs, LAMBDA)
    lifted = gram.map(lambda p: p.with_vars(vs))
    lifted_dag = gram.dagger().map(lambda p: p.with_vars(vs))
    m = lifted.map(lambda p: p * lam) - lifted_dag
    det = m.det()
    dg = gram.det()
    c, e = dg.as_unit_monomial()
    inv = LaurentPoly.monomial(vs, (0,) + tuple(-x for x in e), Fraction(1) / c)
    return det * inv


def canonical_spectrum_poly(n: int) -> LaurentPoly:
    """prod_i (lambda - (-1)^{n-1} Z_i^n / s_n(Z)) expanded via symmetric
    functions: sum_j (-1)^j lambda^{n-j} s_j(eigenvalues)."""
    vs = _lambda_context(n)
    acc = LaurentPoly.zero(vs)
    sign = 1 if (n - 1) % 2 == 0 else -1
    for j in range(n + 1):
        ej = sym_poly("elementary", j, n)
        ejn = LaurentPoly(
            zvars(n), {tuple(x * n for x in e): c for e, c in ej.terms.items()}
        ).with_vars(vs)
        snj = LaurentPoly.monomial(vs, (0,) + (-j,) * n)
        coeff = ejn * snj * (sign**j)
        lam_pow = LaurentPoly.variable(vs, LAMBDA, n - j)
        term = coeff * lam_pow
        acc = acc + (term if j % 2 == 0 else -term)
    return acc


def dioph_residual(gram: LaurentMatrix, n: int) -> LaurentPoly:
    """Difference between the canonical-operator characteristic polynomial and
    its forced symmetric-function form; identically zero on Gram matrices of
    bases of the K-theory algebra."""
    if gram.rows != n or gram.cols != n:
        raise ValueError("Gram matrix size does not match rank")
    return canonical_char_poly(gram, n) - canonical_spectrum_poly(n)


def _power_sum(n: int, j: int) -> LaurentPoly:
    """e_j(Z_1^n, ..., Z_n^n) as a Laurent polynomial."""
    ej = sym_poly("elementary", j, n)
    return LaurentPoly(zvars(n), {tuple(x * n for x in e): c for e, c in ej.terms.items()})


def markov_residuals_rank3(gram: LaurentMatrix) -> list[LaurentPoly]:
    """The two constraints on the unitriangular entries (a, b, c) of a rank-3
    Gram matrix, normalized so a solution gives residual zero."""
    if gram.rows != 3 or not gram.is_upper_unitriangular():
        raise ValueError("need a 3x3 unitriangular Gram matrix")
    n = 3
    vs = zvars(n)
    a, b, c = gram[0, 1], gram[0, 2], gram[1, 2]
    ad, bd, cd = a.dual(), b.dual(), c.dual()
    sn_inv = LaurentPoly.monomial(vs, (-1,) * n)
    lhs1 = a * ad + b * bd + c * cd - a * bd * c
    rhs1 = LaurentPoly.constant(vs, 3) - _power_sum(n, 1) * sn_inv
    lhs2 = a * ad + b * bd + c * cd - ad * b * cd
    rhs2 = LaurentPoly.constant(vs, 3) - _power_sum(n, 2) * sn_inv * sn_inv
    return [lhs1 - rhs1, lhs2 - rhs2]


def markov_residuals_rank4(gram: LaurentMatrix) -> list[LaurentPoly]:
    """The three constraints on the six unitriangular entries of a rank-4 Gram
    matrix (coefficients of the canonical characteristic polynomial)."""
    if gram.rows != 4 or not gram.is_upper_unitriangular():
        raise ValueError("need a 4x4 unitriangular Gram matrix")
    n = 4
    vs = zvars(n)
    a, b, c = gram[0, 1], gram[0, 2], gram[0, 3]
    d, e, f = gram[1, 2], gram[1, 3], gram[2, 3]
    ad, bd, cd, dd, ed, fd = (p.dual() for p in (a, b, c, d, e, f))
    sn_inv = LaurentPoly.monomial(vs, (-1,) * n)
    norm2 = a * ad + b * bd + c * cd + d * dd + e * ed + f * fd

    # e_3(Z^4)/s_n(Z)^3 equals sum_i prod_{j!=i} Z_j / Z_i^3
    lhs1 = norm2 - ad * b * dd - ad * c * ed - bd * c * fd - dd * e * fd + ad * c * dd * fd
    rhs1 = LaurentPoly.constant(vs, 4) + _power_sum(n, 3) * LaurentPoly.monomial(
        vs, (-3,) * n
    )

    lhs2 = (
        -2 * norm2
        + a * bd * d + ad * b * dd + a * cd * e + ad * c * ed
        + bd * c * fd + b * cd * f + d * ed * f + dd * e * fd
        - a * bd * e * fd - ad * b * ed * f - b * cd * dd * e - bd * c * d * ed
        + a * ad * f * fd + b * bd * e * ed + c * cd * d * dd
    )
    rhs2 = LaurentPoly.constant(vs, -6) + _power_sum(n, 2) * LaurentPoly.monomial(
        vs, (-2,) * n
    )

    lhs3 = norm2 - a * bd * d - a * cd * e - b * cd * f - d * ed * f + a * cd * d * f
    rhs3 = LaurentPoly.constant(vs, 4) + _power_sum(n, 1) * sn_inv
    return [lhs1 - rhs1, lhs2 - rhs2, lhs3 - rhs3]


# -- tangent-bundle classes and named solution bases ----------------------------------


def exterior_tangent_class(h: int, twist: int, n: int) -> KClass:
    """Class of (Lambda^h T) tensor O(-twist): sum_j (-1)^{h-j} s_j(Z) X^{twist-j}."""
    if not 0 <= h <= n - 1:
        raise ValueError(f"exterior power {h} out of range 0..{n - 1}")
    acc = KClass.zero(n)
    for j in range(h + 1):
        s = sym_poly("elementary", j, n)
        if (h - j) % 2 == 1:
            s = -s
        acc = acc + KClass.x_power(n, twist - j).scale(s)
    return acc


def _psi_class(m: int, ell: int, n: int) -> KClass:
    """Class of the solution labelled (m, ell): X^m - s_1 X^{m-1} + ... +
    (-1)^{m-ell} s_{m-ell} X^ell.  Equals (-1)^{m-ell} [Lambda^{m-ell}T(-m)]."""
    h = m - ell
    if not 0 <= h <= n:
        raise ValueError("need 0 <= m - ell <= n")
    acc = KClass.zero(n)
    for j in range(h + 1):
        s = sym_poly("elementary", j, n)
        if j % 2 == 1:
            s = -s
        acc = acc + KClass.x_power(n, m - j).scale(s)
    return acc


def _psi_label(m: int, ell: int) -> str:
    h = m - ell
    if h == 0:
        return f"O({-m})"
    return f"Λ^{h} T({-m})[{-h}]"


def _structured_slots(kind: str, k: int, n: int) -> list[tuple[int, int]]:
    """(m, ell) per position 1..n for the named bases."""
    if kind == "Q":
        return [(k + n - p, k + n - p) for p in range(1, n + 1)]
    slots: dict[int, tuple[int, int]] = {}
    if n % 2 == 1:
        h = (n - 1) // 2
        if kind == "Qp":
            for t in range(h + 1):
                slots[2 * h + 1 - 2 * t] = (k + t, k + t)
            for t in range(h):
                slots[2 * h - 2 * t] = (k + 2 * h - t, k + 1 + t)
        elif kind == "Qpp":
            for t in range(h):
                slots[2 * h - 2 * t] = (k + t, k + t)
            slots[1] = (k + h, k + h)
            for t in range(h):
                slots[2 * h + 1 - 2 * t] = (k + 2 * h - t, k + t)
        else:
            raise ValueError(f"unknown kind {kind!r}")
    else:
        h = n // 2
        if kind == "Qp":
            for t in range(h):
                slots[2 * h - 2 * t] = (k + t, k + t)
            slots[1] = (k + h, k + h)
            for t in range(h - 1):
                slots[2 * h - 1 - 2 * t] = (k + 2 * h - 1 - t, k + 1 + t)
        elif kind == "Qpp":
            for t in range(h):
                slots[2 * h - 1 - 2 * t] = (k + t, k + t)
            for t in range(h):
                slots[2 * h - 2 * t] = (k + 2 * h - 1 - t, k + t)
        else:
            raise ValueError(f"unknown kind {kind!r}")
    return [slots[p] for p in range(1, n + 1)]


def structured_basis(kind: str, k: int, n: int) -> ExceptionalBasis:
    """The named solution bases, as exceptional bases of the K-theory algebra.

    Kinds: 'Q' (consecutive line bundles), 'Qp' and 'Qpp' (the sorted bases of
    line bundles and exterior tangent powers), and 'Qpt'/'Qppt' (the same with
    the determinant-character rescaling that normalizes asymptotics).
    """
    if n < 2:
        raise ValueError("rank must be at least 2")
    tilde = kind in ("Qpt", "Qppt")
    base_kind = {"Qpt": "Qp", "Qppt": "Qpp"}.get(kind, kind)
    slots = _structured_slots(base_kind, k, n)
    vs = zvars(n)
    elements = []
    labels = []
    tags = []
    for m, ell in slots:
        cls = _psi_class(m, ell, n)
        label = _psi_label(m, ell)
        if tilde:
            a = -(m // n)
            if a != 0:
                sign = 1 if (n + 1) % 2 == 0 else -1
                factor = unit_pow(LaurentPoly.monomial(vs, (1,) * n, sign), a)
                cls = cls.scale(factor)
                label = f"{label} ⊗ det^{a}"
        elements.append(cls)
        labels.append(label)
        tags.append(m % n)
    return ExceptionalBasis(elements, labels, tags, verify=False)
