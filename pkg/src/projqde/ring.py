"""Exact arithmetic layer: multivariate Laurent polynomials over the rationals.

Everything downstream that claims an identity "exactly" reduces to arithmetic
in this module: Laurent polynomials with arbitrary-precision rational
coefficients, rational functions compared by cross-multiplication, matrices
over the Laurent ring, elementary/complete symmetric functions, Stirling
numbers, and exact evaluation at roots of unity via cyclotomic reduction.

Values are immutable after construction and every operation is pure.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence


def zvars(n: int, prefix: str = "Z") -> tuple[str, ...]:
    """Variable context Z1..Zn (or another prefix)."""
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


def _coerce(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


def _norm_coeff(c):
    """Exact coefficients are stored as int when possible, Fraction otherwise;
    plain integer arithmetic is an order of magnitude faster."""
    if type(c) is int:
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return int(c)
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


def _pow_coeff(c, k: int):
    if k >= 0:
        return c**k
    return _norm_coeff(Fraction(c) ** k)


class LaurentPoly:
    """Multivariate Laurent polynomial with exact rational coefficients.

    Terms are a map from integer exponent vectors (one slot per variable,
    negative allowed) to nonzero Fractions.  Zero coefficients are pruned at
    construction, so structural equality is canonical equality.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple[int, ...], Fraction | int]):
        vs = tuple(vars)
        if len(set(vs)) != len(vs):
            raise ValueError(f"duplicate variable names in {vs}")
        tm: dict[tuple[int, ...], Fraction | int] = {}
        for exps, c in terms.items():
            e = tuple(exps)
            if len(e) != len(vs):
                raise ValueError(f"exponent vector {e} has wrong length for vars {vs}")
            c = _norm_coeff(c)
            if c != 0:
                s = tm.get(e, 0) + c
                if s == 0:
                    tm.pop(e, None)
                else:
                    tm[e] = s
        object.__setattr__(self, "vars", vs)
        object.__setattr__(self, "terms", tm)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    @classmethod
    def _raw(cls, vars: tuple[str, ...], terms: dict) -> "LaurentPoly":
        """Internal fast path: terms must already be normalized (no zeros,
        int/Fraction coefficients, exponent tuples of the right length)."""
        self = object.__new__(cls)
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "terms", terms)
        return self

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, vars: Sequence[str]) -> "LaurentPoly":
        return cls(vars, {})

    @classmethod
    def constant(cls, vars: Sequence[str], c) -> "LaurentPoly":
        return cls(vars, {(0,) * len(tuple(vars)): _coerce(c)})

    @classmethod
    def one(cls, vars: Sequence[str]) -> "LaurentPoly":
        return cls.constant(vars, 1)

    @classmethod
    def variable(cls, vars: Sequence[str], name: str, power: int = 1) -> "LaurentPoly":
        vs = tuple(vars)
        if name not in vs:
            raise ValueError(f"{name!r} not in variable context {vs}")
        e = [0] * len(vs)
        e[vs.index(name)] = power
        return cls(vs, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, vars: Sequence[str], exps: Sequence[int], c=1) -> "LaurentPoly":
        return cls(vars, {tuple(exps): _coerce(c)})

    # -- helpers -------------------------------------------------------------

    def _check_context(self, other: "LaurentPoly") -> None:
        if self.vars != other.vars:
            raise ValueError(f"variable-context mismatch: {self.vars} vs {other.vars}")

    def _as_poly(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check_context(other)
            return other
        return LaurentPoly.constant(self.vars, other)

    # -- ring operations -----------------------------------------------------

    def __add__(self, other) -> "LaurentPoly":
        other = self._as_poly(other)
        tm = dict(self.terms)
        for e, c in other.terms.items():
            s = tm.get(e, 0) + c
            if s == 0:
                tm.pop(e, None)
            else:
                tm[e] = s
        return LaurentPoly._raw(self.vars, tm)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-self._as_poly(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return (-self) + other

    def __mul__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            c = _norm_coeff(other)
            if c == 0:
                return LaurentPoly.zero(self.vars)
            return LaurentPoly._raw(
                self.vars, {e: _norm_coeff(v * c) for e, v in self.terms.items()}
            )
        self._check_context(other)
        tm: dict[tuple[int, ...], Fraction | int] = {}
        get = tm.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(map(int.__add__, e1, e2))
                s = get(e, 0) + c1 * c2
                if s == 0:
                    tm.pop(e, None)
                else:
                    tm[e] = s
        return LaurentPoly._raw(self.vars, tm)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        if k < 0:
            return unit_pow(self, k)
        result = LaurentPoly.one(self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.constant(self.vars, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    __hash__ = None  # mutable dict inside; identity-free equality only

    # -- predicates and views --------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(x == 0 for x in e) for e in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ValueError(f"not a constant: {self}")
        return Fraction(next(iter(self.terms.values())))

    def is_unit_monomial(self) -> bool:
        return len(self.terms) == 1

    def as_unit_monomial(self) -> tuple[Fraction, tuple[int, ...]]:
        """Return (coefficient, exponents); raises unless exactly one term."""
        if len(self.terms) != 1:
            raise ValueError(f"not a monomial: {self}")
        e, c = next(iter(self.terms.items()))
        return Fraction(c), e

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items())

    # -- structural operations ---------------------------------------------------

    def dual(self) -> "LaurentPoly":
        """The involution v -> v^{-1} on every variable (negate exponents)."""
        return LaurentPoly._raw(
            self.vars, {tuple(-x for x in e): c for e, c in self.terms.items()}
        )

    def with_vars(self, vars: Sequence[str]) -> "LaurentPoly":
        """Embed into a larger variable context (superset of current vars)."""
        vs = tuple(vars)
        pos = []
        for v in self.vars:
            if v not in vs:
                raise ValueError(f"target context {vs} does not contain {v!r}")
            pos.append(vs.index(v))
        tm = {}
        for e, c in self.terms.items():
            ne = [0] * len(vs)
            for p, x in zip(pos, e):
                ne[p] = x
            tm[tuple(ne)] = c
        return LaurentPoly(vs, tm)

    def rename_vars(self, mapping: Mapping[str, str]) -> "LaurentPoly":
        return LaurentPoly(tuple(mapping.get(v, v) for v in self.vars), self.terms)

    def drop_vars(self, names: Iterable[str]) -> "LaurentPoly":
        """Remove variables that appear with exponent 0 in every term."""
        drop = set(names)
        keep = [i for i, v in enumerate(self.vars) if v not in drop]
        for e in self.terms:
            for i, v in enumerate(self.vars):
                if v in drop and e[i] != 0:
                    raise ValueError(f"{v!r} occurs with nonzero exponent; cannot drop")
        return LaurentPoly(
            tuple(self.vars[i] for i in keep),
            {tuple(e[i] for i in keep): c for e, c in self.terms.items()},
        )

    def substitute_monomial(self, name: str, coeff, exps: Sequence[int]) -> "LaurentPoly":
        """Substitute variable `name` by coeff * (monomial in self.vars).

        The monomial's slot for `name` itself must be zero.  Negative powers of
        the substituted variable are fine because a (nonzero) monomial is a unit.
        """
        vs = self.vars
        i = vs.index(name)
        exps = tuple(exps)
        if len(exps) != len(vs) or exps[i] != 0:
            raise ValueError("substitution monomial must live in the same context with 0 in its own slot")
        coeff = _norm_coeff(coeff)
        if coeff == 0:
            raise ValueError("substitution by zero is not a unit")
        tm: dict[tuple[int, ...], Fraction | int] = {}
        for e, c in self.terms.items():
            k = e[i]
            ne = list(e)
            ne[i] = 0
            for j, x in enumerate(exps):
                ne[j] += k * x
            ne = tuple(ne)
            s = tm.get(ne, 0) + c * _pow_coeff(coeff, k)
            if s == 0:
                tm.pop(ne, None)
            else:
                tm[ne] = s
        return LaurentPoly._raw(vs, tm)

    def specialize(self, name: str, value) -> "LaurentPoly":
        """Substitute an exact rational value for one variable (exponent 0 result slot kept)."""
        value = _norm_coeff(value)
        i = self.vars.index(name)
        tm: dict[tuple[int, ...], Fraction | int] = {}
        for e, c in self.terms.items():
            k = e[i]
            if value == 0:
                if k < 0:
                    raise ZeroDivisionError("negative power at zero")
                factor = 1 if k == 0 else 0
            else:
                factor = _pow_coeff(value, k)
            if factor == 0:
                continue
            ne = list(e)
            ne[i] = 0
            ne = tuple(ne)
            s = tm.get(ne, 0) + c * factor
            if s == 0:
                tm.pop(ne, None)
            else:
                tm[ne] = s
        return LaurentPoly._raw(self.vars, tm)

    def eval(self, values: Mapping[str, complex]) -> complex:
        """Numeric evaluation; every variable must be assigned a nonzero value
        if it occurs with a negative exponent."""
        vals = [values[v] for v in self.vars]
        total = 0j
        for e, c in self.terms.items():
            term = complex(c)
            for v, k in zip(vals, e):
                if k:
                    term *= v**k
            total += term
        return total

    def as_series(self, name: str) -> dict[int, "LaurentPoly"]:
        """View as a Laurent series in one variable: degree -> coefficient poly
        in the remaining variables."""
        i = self.vars.index(name)
        rest = tuple(v for v in self.vars if v != name)
        out: dict[int, dict[tuple[int, ...], Fraction]] = {}
        for e, c in self.terms.items():
            k = e[i]
            re = tuple(x for j, x in enumerate(e) if j != i)
            out.setdefault(k, {})[re] = c
        return {k: LaurentPoly(rest, tm) for k, tm in sorted(out.items())}

    def degree(self, name: str) -> int | None:
        i = self.vars.index(name)
        if not self.terms:
            return None
        return max(e[i] for e in self.terms)

    def valuation(self, name: str) -> int | None:
        i = self.vars.index(name)
        if not self.terms:
            return None
        return min(e[i] for e in self.terms)

    def coefficient(self, name: str, power: int) -> "LaurentPoly":
        """Coefficient of name**power, as a poly in the remaining variables."""
        return self.as_series(name).get(
            power, LaurentPoly.zero(tuple(v for v in self.vars if v != name))
        )

    # -- serialization and display --------------------------------------------

    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "terms": [
                {
                    "exp": list(e),
                    "num": str(Fraction(c).numerator),
                    "den": str(Fraction(c).denominator),
                }
                for e, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LaurentPoly":
        return cls(
            tuple(data["vars"]),
            {tuple(t["exp"]): Fraction(int(t["num"]), int(t["den"])) for t in data["terms"]},
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = [f"{v}^{k}" if k != 1 else v for v, k in zip(self.vars, e) if k != 0]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(str(c) + "*" + "*".join(factors))
        out = " + ".join(parts)
        return out.replace("+ -", "- ")

    __repr__ = __str__


def unit_pow(p: LaurentPoly, k: int) -> LaurentPoly:
    """p**k for negative k, valid only when p is a single-term unit monomial."""
    c, e = p.as_unit_monomial()
    return LaurentPoly.monomial(p.vars, tuple(x * k for x in e), _pow_coeff(c, k))


def lp_mul(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Exact product (zero terms pruned); requires a shared variable context."""
    return f * g


def lp_dual(f: LaurentPoly) -> LaurentPoly:
    """Exponent-negating involution f(v) -> f(v^{-1})."""
    return f.dual()


# -- symmetric functions and Stirling numbers ----------------------------------


@lru_cache(maxsize=None)
def sym_poly(kind: str, k: int, n: int, prefix: str = "Z") -> LaurentPoly:
    """Elementary (s_k) or complete (m_k) symmetric function in n variables.

    s_0 = m_0 = 1; elementary requires k <= n.
    """
    vs = zvars(n, prefix)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if kind == "elementary":
        if k > n:
            raise ValueError(f"elementary symmetric function needs k <= n, got k={k}, n={n}")
        terms = {}
        from itertools import combinations

        for subset in combinations(range(n), k):
            e = [0] * n
            for i in subset:
                e[i] = 1
            terms[tuple(e)] = Fraction(1)
        return LaurentPoly(vs, terms)
    if kind == "complete":
        terms = {}
        for e in _compositions(k, n):
            terms[e] = Fraction(1)
        return LaurentPoly(vs, terms)
    raise ValueError(f"unknown kind {kind!r} (use 'elementary' or 'complete')")


def _compositions(k: int, n: int) -> Iterable[tuple[int, ...]]:
    if n == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _compositions(k - first, n - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def stirling(kind: str, n: int, k: int) -> int:
    """Stirling numbers by their defining recursions.

    first (unsigned):  [n+1,k] = n[n,k] + [n,k-1]
    second:            {n+1,k} = k{n,k} + {n,k-1}
    with [0,0] = {0,0} = 1 and zero for n=0<k or k=0<n.
    """
    if n < 0 or k < 0:
        return 0
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0:
        return 0
    if kind == "first":
        return (n - 1) * stirling("first", n - 1, k) + stirling("first", n - 1, k - 1)
    if kind == "second":
        return k * stirling("second", n - 1, k) + stirling("second", n - 1, k - 1)
    raise ValueError(f"unknown kind {kind!r} (use 'first' or 'second')")


# -- rational functions ----------------------------------------------------------


class RationalFn:
    """Quotient of Laurent polynomials; equality by cross-multiplication.

    No multivariate gcd is attempted.  The only normalization is division by
    the denominator when it is a unit monomial, which keeps intermediate sizes
    bounded in the places this class is used.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        if den is None:
            den = LaurentPoly.one(num.vars)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        num._check_context(den)
        if den.is_unit_monomial():
            c, e = den.as_unit_monomial()
            inv = LaurentPoly.monomial(den.vars, tuple(-x for x in e), Fraction(1) / c)
            num = num * inv
            den = LaurentPoly.one(num.vars)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFn is immutable")

    @classmethod
    def of(cls, p) -> "RationalFn":
        if isinstance(p, RationalFn):
            return p
        return cls(p)

    def _pair(self, other) -> "RationalFn":
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, LaurentPoly):
            return RationalFn(other)
        return RationalFn(LaurentPoly.constant(self.num.vars, other))

    def __add__(self, other) -> "RationalFn":
        o = self._pair(other)
        return RationalFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den)

    def __sub__(self, other) -> "RationalFn":
        return self + (-self._pair(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other) -> "RationalFn":
        o = self._pair(other)
        return RationalFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFn":
        o = self._pair(other)
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFn(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._pair(other) / self

    def __eq__(self, other) -> bool:
        o = self._pair(other)
        return (self.num * o.den - o.num * self.den).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def eval(self, values: Mapping[str, complex]) -> complex:
        return self.num.eval(values) / self.den.eval(values)

    def dual(self) -> "RationalFn":
        return RationalFn(self.num.dual(), self.den.dual())

    def __str__(self) -> str:
        if self.den.is_constant() and self.den.constant_value() == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


# -- matrices over the Laurent ring -----------------------------------------------


class LaurentMatrix:
    """Rectangular matrix with LaurentPoly entries over one variable context."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[LaurentPoly]]):
        rows = len(entries)
        if rows == 0:
            raise ValueError("empty matrix")
        cols = len(entries[0])
        ctx = entries[0][0].vars
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged matrix")
            for p in row:
                if p.vars != ctx:
                    raise ValueError("matrix entries in mixed variable contexts")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", tuple(tuple(row) for row in entries))

    def __setattr__(self, name, value):
        raise AttributeError("LaurentMatrix is immutable")

    @property
    def vars(self) -> tuple[str, ...]:
        return self.entries[0][0].vars

    @classmethod
    def identity(cls, n: int, vars: Sequence[str]) -> "LaurentMatrix":
        one = LaurentPoly.one(vars)
        zero = LaurentPoly.zero(vars)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int, vars: Sequence[str]) -> "LaurentMatrix":
        z = LaurentPoly.zero(vars)
        return cls([[z for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def from_rows(cls, rows) -> "LaurentMatrix":
        return cls(rows)

    def __getitem__(self, ij: tuple[int, int]) -> LaurentPoly:
        i, j = ij
        return self.entries[i][j]

    def __add__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        self._shape_check(other)
        return LaurentMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)]
        )

    def __sub__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        self._shape_check(other)
        return LaurentMatrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)]
        )

    def __neg__(self) -> "LaurentMatrix":
        return self.map(lambda p: -p)

    def _shape_check(self, other: "LaurentMatrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix shape mismatch")

    def __mul__(self, other):
        if isinstance(other, LaurentMatrix):
            if self.cols != other.rows:
                raise ValueError("matrix shape mismatch in product")
            z = LaurentPoly.zero(self.vars)
            out = []
            for i in range(self.rows):
                row = []
                for j in range(other.cols):
                    acc = z
                    for k in range(self.cols):
                        a = self.entries[i][k]
                        b = other.entries[k][j]
                        if a.is_zero() or b.is_zero():
                            continue
                        acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return LaurentMatrix(out)
        return self.map(lambda p: p * other)

    def __rmul__(self, other):
        return self.map(lambda p: p * other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return self.entries == other.entries

    __hash__ = None

    def map(self, fn: Callable[[LaurentPoly], LaurentPoly]) -> "LaurentMatrix":
        return LaurentMatrix([[fn(p) for p in row] for row in self.entries])

    def transpose(self) -> "LaurentMatrix":
        return LaurentMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    def dagger(self) -> "LaurentMatrix":
        """Transpose composed with the entrywise duality involution."""
        if self.rows != self.cols:
            raise ValueError("dagger needs a square matrix")
        return LaurentMatrix(
            [[self.entries[j][i].dual() for j in range(self.rows)] for i in range(self.cols)]
        )

    def is_upper_unitriangular(self) -> bool:
        return self._unitriangular(lower=False)

    def is_lower_unitriangular(self) -> bool:
        return self._unitriangular(lower=True)

    def _unitriangular(self, lower: bool) -> bool:
        if self.rows != self.cols:
            return False
        one = LaurentPoly.one(self.vars)
        for i in range(self.rows):
            if self.entries[i][i] != one:
                return False
            for j in range(self.cols):
                below = i > j
                if (below != lower) and i != j and not self.entries[i][j].is_zero():
                    return False
        return True

    def det(self) -> LaurentPoly:
        """Determinant by Laplace expansion with column-subset memoization."""
        if self.rows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        zero = LaurentPoly.zero(self.vars)
        cache: dict[tuple[int, ...], LaurentPoly] = {(): LaurentPoly.one(self.vars)}

        def minor(cols: tuple[int, ...]) -> LaurentPoly:
            if cols in cache:
                return cache[cols]
            row = n - len(cols)
            acc = zero
            for pos, c in enumerate(cols):
                a = self.entries[row][c]
                if a.is_zero():
                    continue
                sub = minor(cols[:pos] + cols[pos + 1 :])
                term = a * sub
                acc = acc + term if pos % 2 == 0 else acc - term
            cache[cols] = acc
            return acc

        return minor(tuple(range(n)))

    def inverse(self) -> "LaurentMatrix":
        """Exact inverse over the Laurent ring.

        Unitriangular matrices are inverted by a Neumann series; otherwise the
        determinant must be a unit monomial and the adjugate is used.
        """
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        if self.is_upper_unitriangular() or self.is_lower_unitriangular():
            # (1 + N)^{-1} = sum_k (-N)^k with N strictly triangular, N^n = 0.
            ident = LaurentMatrix.identity(n, self.vars)
            neg_nil = (self - ident).map(lambda p: -p)
            acc = ident
            term = ident
            for _ in range(n - 1):
                term = term * neg_nil
                acc = acc + term
            return acc
        d = self.det()
        if not d.is_unit_monomial():
            raise ValueError("matrix is not invertible over the Laurent ring (det not a unit)")
        c, e = d.as_unit_monomial()
        dinv = LaurentPoly.monomial(self.vars, tuple(-x for x in e), Fraction(1) / c)
        adj = []
        for i in range(n):
            row = []
            for j in range(n):
                sub = [
                    [self.entries[r][s] for s in range(n) if s != i]
                    for r in range(n)
                    if r != j
                ]
                cof = LaurentMatrix(sub).det() if n > 1 else LaurentPoly.one(self.vars)
                if (i + j) % 2 == 1:
                    cof = -cof
                row.append(cof * dinv)
            adj.append(row)
        return LaurentMatrix(adj)

    def __str__(self) -> str:
        return "[" + ",\n ".join("[" + ", ".join(map(str, row)) + "]" for row in self.entries) + "]"

    __repr__ = __str__


def mat_dagger(a: LaurentMatrix) -> LaurentMatrix:
    """Transpose composed with entrywise duality; an involution and an
    antihomomorphism for products."""
    return a.dagger()


# -- cyclotomic reduction (exact arithmetic at roots of unity) ---------------------


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients (ascending) of the m-th cyclotomic polynomial, exactly."""
    if m < 1:
        raise ValueError("order must be positive")
    # x^m - 1 divided by the product of Phi_d over proper divisors d of m.
    num = [0] * (m + 1)
    num[0] = -1
    num[m] = 1
    for d in range(1, m):
        if m % d == 0:
            num = _intpoly_exact_div(num, list(cyclotomic_polynomial(d)))
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(num)


def _intpoly_exact_div(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1] // den[-1]
        out[k] = c
        for i, d in enumerate(den):
            num[k + i] -= c * d
    if any(num[: len(den) - 1]):
        raise ArithmeticError("non-exact integer polynomial division")
    return out


def reduce_root_of_unity(p: LaurentPoly, name: str, order: int) -> LaurentPoly:
    """Canonical form of p given that variable `name` is a primitive
    `order`-th root of unity: exponents mod order, then reduction modulo the
    cyclotomic polynomial.  Zero output iff p vanishes at the root."""
    i = p.vars.index(name)
    tm: dict[tuple[int, ...], Fraction] = {}
    for e, c in p.terms.items():
        ne = list(e)
        ne[i] = e[i] % order
        ne = tuple(ne)
        s = tm.get(ne, Fraction(0)) + c
        if s == 0:
            tm.pop(ne, None)
        else:
            tm[ne] = s
    phi = cyclotomic_polynomial(order)
    deg = len(phi) - 1
    # Polynomial remainder in `name` with the other variables as coefficients.
    groups: dict[tuple[int, ...], dict[int, Fraction]] = {}
    for e, c in tm.items():
        rest = e[:i] + e[i + 1 :]
        groups.setdefault(rest, {})[e[i]] = c
    out: dict[tuple[int, ...], Fraction] = {}
    for rest, coeffs in groups.items():
        top = max(coeffs)
        work = [coeffs.get(k, Fraction(0)) for k in range(top + 1)]
        for k in range(len(work) - 1, deg - 1, -1):
            c = work[k]
            if c == 0:
                continue
            work[k] = Fraction(0)
            for j in range(deg):
                work[k - deg + j] -= c * phi[j]
        for k, c in enumerate(work):
            if c != 0:
                e = rest[:i] + (k,) + rest[i:]
                out[e] = c
    return LaurentPoly(p.vars, out)


def vanishes_at_root_of_unity(p: LaurentPoly, name: str, order: int) -> bool:
    return reduce_root_of_unity(p, name, order).is_zero()
