"""Exact polynomial and truncated power-series arithmetic.

Every canonical computation in this package runs over arbitrary-precision
rationals (`fractions.Fraction`).  Three value types live here:

* ``XPoly``   dense univariate polynomials with Fraction coefficients,
* ``XYPoly``  sparse bivariate polynomials (used by the addition identities),
* ``TSeries`` truncated formal power series of a fixed order N whose
  coefficients may be Fractions, ``XPoly`` values, or mpmath floats.

Series arithmetic never consults coefficients beyond the truncation order,
so two pipelines that share an order are comparable coefficient by
coefficient with no tolerance.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence


class NonInvertibleSeries(ArithmeticError):
    """Raised when a series has no multiplicative inverse (constant term not a unit)."""


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and 'a/b' strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


# ---------------------------------------------------------------------------
# univariate polynomials
# ---------------------------------------------------------------------------

class XPoly:
    """Dense polynomial in one variable over Fraction.

    Coefficients are stored lowest degree first with no trailing zeros;
    the zero polynomial stores an empty tuple and reports degree -1.
    Instances are immutable and hashable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("XPoly is immutable")

    @classmethod
    def const(cls, c) -> "XPoly":
        return cls((c,))

    @classmethod
    def x(cls) -> "XPoly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = XPoly.const(other)
        if not isinstance(other, XPoly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return XPoly(self.coeff(i) + other.coeff(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return XPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, XPoly) else XPoly.const(-as_fraction(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return XPoly(c * other for c in self.coeffs)
        if not isinstance(other, XPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return XPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return XPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = as_fraction(scalar)
        return XPoly(c / s for c in self.coeffs)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = XPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = XPoly.const(other)
        if not isinstance(other, XPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, value):
        """Evaluate by Horner's rule; `value` may be a scalar, XPoly or XYPoly."""
        if not self.coeffs:
            return Fraction(0)
        result = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            result = result * value + c
        return result

    def derivative(self) -> "XPoly":
        return XPoly(i * c for i, c in enumerate(self.coeffs) if i >= 1)

    def scale_arg(self, z) -> "XPoly":
        """Substitute x -> z*x for a scalar z."""
        z = as_fraction(z)
        zp = Fraction(1)
        out = []
        for c in self.coeffs:
            out.append(c * zp)
            zp *= z
        return XPoly(out)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*x" if c != 1 else "x")
            else:
                parts.append(f"{c}*x^{i}" if c != 1 else f"x^{i}")
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# bivariate polynomials
# ---------------------------------------------------------------------------

class XYPoly:
    """Sparse polynomial in two variables over Fraction.

    Stored as a mapping (deg_x, deg_y) -> coefficient with no zero entries.
    Used to state the two-variable addition identities exactly.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for key, c in dict(terms or {}).items():
            c = as_fraction(c)
            if c:
                clean[(int(key[0]), int(key[1]))] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("XYPoly is immutable")

    @classmethod
    def const(cls, c) -> "XYPoly":
        return cls({(0, 0): c})

    @classmethod
    def x(cls) -> "XYPoly":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "XYPoly":
        return cls({(0, 1): 1})

    @classmethod
    def from_x_poly(cls, p: XPoly) -> "XYPoly":
        return cls({(i, 0): c for i, c in enumerate(p.coeffs)})

    @classmethod
    def from_y_poly(cls, p: XPoly) -> "XYPoly":
        return cls({(0, i): c for i, c in enumerate(p.coeffs)})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = XYPoly.const(other)
        if not isinstance(other, XYPoly):
            return NotImplemented
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, Fraction(0)) + c
        return XYPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return XYPoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = XYPoly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            o = as_fraction(other)
            return XYPoly({k: c * o for k, c in self.terms.items()})
        if not isinstance(other, XYPoly):
            return NotImplemented
        out: dict = {}
        for (i, j), a in self.terms.items():
            for (k, l), b in other.terms.items():
                key = (i + k, j + l)
                out[key] = out.get(key, Fraction(0)) + a * b
        return XYPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = XYPoly.const(other)
        if not isinstance(other, XYPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def substitute_y(self, value) -> XPoly:
        """Evaluate the y variable at a scalar, returning a polynomial in x."""
        value = as_fraction(value)
        out: dict = {}
        for (i, j), c in self.terms.items():
            out[i] = out.get(i, Fraction(0)) + c * value**j
        deg = max(out) if out else -1
        return XPoly(out.get(i, Fraction(0)) for i in range(deg + 1))

    def __repr__(self):
        if not self.terms:
            return "0"
        def mono(i, j):
            s = []
            if i:
                s.append("x" if i == 1 else f"x^{i}")
            if j:
                s.append("y" if j == 1 else f"y^{j}")
            return "*".join(s)
        parts = []
        for (i, j) in sorted(self.terms):
            c = self.terms[(i, j)]
            m = mono(i, j)
            parts.append(f"{c}*{m}" if m else str(c))
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# generalized binomial coefficients
# ---------------------------------------------------------------------------

def gen_binomial(v, n: int):
    """Generalized binomial coefficient v(v-1)...(v-n+1)/n!.

    `v` may be a Fraction (result Fraction) or an XPoly (result XPoly of
    degree n).  n must be nonnegative.
    """
    if n < 0:
        raise ValueError("binomial order must be nonnegative")
    if isinstance(v, (int, str)):
        v = as_fraction(v)
    result = XPoly.const(1) if isinstance(v, XPoly) else Fraction(1)
    for i in range(n):
        result = result * (v - i)
    return result / math.factorial(n)


def falling_factorial(v, n: int):
    """Classical falling factorial v(v-1)...(v-n+1); scalar or XPoly argument."""
    return gen_binomial(v, n) * math.factorial(n)


# ---------------------------------------------------------------------------
# truncated power series
# ---------------------------------------------------------------------------

def _unit_inverse(c):
    """Multiplicative inverse of a coefficient-ring unit, or raise."""
    if isinstance(c, XPoly):
        if c.degree != 0:
            raise NonInvertibleSeries("constant term is not a unit of the coefficient ring")
        return XPoly.const(Fraction(1) / c.coeff(0))
    if isinstance(c, int):
        c = Fraction(c)
    if c == 0:
        raise NonInvertibleSeries("series has zero constant term")
    return 1 / c


class TSeries:
    """Formal power series truncated at a fixed order N (terms t^0 .. t^N).

    Coefficients may be Fractions, XPoly values, or mpmath floats; binary
    operations require both operands to share the order.  All arithmetic
    ignores coefficients beyond index N, so results are exact modulo t^{N+1}.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Sequence, order: int | None = None):
        cs = [Fraction(c) if isinstance(c, int) else c for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("series order must be nonnegative")
        if len(cs) < order + 1:
            cs.extend([Fraction(0)] * (order + 1 - len(cs)))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(cs[: order + 1]))

    def __setattr__(self, name, value):
        raise AttributeError("TSeries is immutable")

    @classmethod
    def const(cls, c, order: int) -> "TSeries":
        return cls([c], order)

    @classmethod
    def one(cls, order: int) -> "TSeries":
        return cls([Fraction(1)], order)

    @classmethod
    def x(cls, order: int) -> "TSeries":
        return cls([Fraction(0), Fraction(1)], order)

    def coeff(self, k: int):
        return self.coeffs[k]

    def _check(self, other: "TSeries"):
        if self.order != other.order:
            raise ValueError(f"series order mismatch: {self.order} != {other.order}")

    def __add__(self, other):
        if isinstance(other, TSeries):
            self._check(other)
            return TSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)
        cs = list(self.coeffs)
        cs[0] = cs[0] + other
        return TSeries(cs, self.order)

    __radd__ = __add__

    def __neg__(self):
        return TSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        if isinstance(other, TSeries):
            self._check(other)
            return TSeries([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TSeries):
            return TSeries([c * other for c in self.coeffs], self.order)
        self._check(other)
        n = self.order
        out = []
        for k in range(n + 1):
            acc = self.coeffs[0] * other.coeffs[k]
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * other.coeffs[k - i]
            out.append(acc)
        return TSeries(out, n)

    def __rmul__(self, other):
        return TSeries([other * c for c in self.coeffs], self.order)

    def __eq__(self, other):
        if not isinstance(other, TSeries):
            return NotImplemented
        if self.order != other.order:
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def map(self, fn) -> "TSeries":
        return TSeries([fn(c) for c in self.coeffs], self.order)

    def lift(self) -> "TSeries":
        """Promote scalar coefficients to constant XPoly values."""
        return self.map(lambda c: c if isinstance(c, XPoly) else XPoly.const(c))

    def reciprocal(self) -> "TSeries":
        """Inverse series: self * result == 1 through order N."""
        inv0 = _unit_inverse(self.coeffs[0])
        out = [inv0]
        for n in range(1, self.order + 1):
            acc = self.coeffs[1] * out[n - 1]
            for k in range(2, n + 1):
                acc = acc + self.coeffs[k] * out[n - k]
            out.append(-(inv0 * acc))
        return TSeries(out, self.order)

    def log1(self) -> "TSeries":
        """log of a series with constant term 1 (zero constant term result).

        Solves a * (log a)' = a' coefficient by coefficient, so the whole
        computation stays in the coefficient ring.
        """
        if not self.coeffs[0] == 1:
            raise ValueError("log requires constant term 1")
        out = [Fraction(0) * self.coeffs[0]]
        for n in range(1, self.order + 1):
            acc = n * self.coeffs[n]
            for k in range(1, n):
                acc = acc - (n - k) * (self.coeffs[k] * out[n - k])
            out.append(acc / n)
        return TSeries(out, self.order)

    def exp(self) -> "TSeries":
        """exp of a series with zero constant term (solves f' = u' f)."""
        if not self.coeffs[0] == 0:
            raise ValueError("exp requires zero constant term")
        out = [self.coeffs[0] + 1]
        for n in range(1, self.order + 1):
            acc = self.coeffs[1] * out[n - 1]
            for k in range(2, n + 1):
                acc = acc + k * (self.coeffs[k] * out[n - k])
            out.append(acc / n)
        return TSeries(out, self.order)

    def fracpow(self, e) -> "TSeries":
        """self**e for rational e, via exp(e * log(self)); constant term must be 1."""
        if not self.coeffs[0] == 1:
            raise ValueError("fractional power requires constant term 1")
        e = as_fraction(e)
        return (self.log1() * e).exp()

    def compose(self, inner: "TSeries") -> "TSeries":
        """self(inner(t)) truncated at the shared order; inner(0) must be 0."""
        self._check(inner)
        if not inner.coeffs[0] == 0:
            raise ValueError("composition requires inner constant term 0")
        result = TSeries.const(self.coeffs[self.order], self.order)
        for k in range(self.order - 1, -1, -1):
            result = result * inner + self.coeffs[k]
        return result

    def derivative_list(self):
        """Derivatives at 0: [k! * coeff_k for k = 0..N]."""
        return [math.factorial(k) * c for k, c in enumerate(self.coeffs)]

    def __repr__(self):
        shown = ", ".join(repr(c) for c in self.coeffs[: min(self.order, 6) + 1])
        return f"TSeries(order={self.order}, [{shown}{', ...' if self.order > 6 else ''}])"


# ---------------------------------------------------------------------------
# stock series
# ---------------------------------------------------------------------------

def exp_series(order: int) -> TSeries:
    """Taylor series of e^t."""
    return TSeries([Fraction(1, math.factorial(k)) for k in range(order + 1)], order)


def expm1_series(order: int) -> TSeries:
    """Taylor series of e^t - 1 (zero constant term)."""
    return TSeries([Fraction(0)] + [Fraction(1, math.factorial(k)) for k in range(1, order + 1)], order)


def log1p_scaled_series(c, order: int) -> TSeries:
    """Taylor series of log(1 + c*t) for rational c."""
    c = as_fraction(c)
    out = [Fraction(0)]
    for k in range(1, order + 1):
        out.append(Fraction((-1) ** (k + 1), k) * c**k)
    return TSeries(out, order)


def geometric_series(c, order: int) -> TSeries:
    """Taylor series of 1/(1 - c*t)."""
    c = as_fraction(c)
    return TSeries([c**k for k in range(order + 1)], order)
