"""Exact combinatorial kernels.

Stirling numbers of both kinds, partial Bell polynomials, ordered integer
compositions, degenerate falling factorials, and the named coefficient
families that drive the polynomial identities: eta (log-quotient Taylor
numbers), kappa (its inverse series), epsilon (coefficients of
((1+t)/(1+qt))^x), the bracket factorials [y]_n, varpi / varrho
(composition sums for the two basis changes), and the two variants of the
scaling weights rho.

The canonical definition of every coefficient family is its generating
series; closed composition forms are evaluated separately so the audit can
compare them.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .series import (
    TSeries,
    XPoly,
    as_fraction,
    expm1_series,
    falling_factorial,
    gen_binomial,
    log1p_scaled_series,
)

_DEFAULT_ORDER = 16


# ---------------------------------------------------------------------------
# Stirling numbers (triangular tables, grown on demand)
# ---------------------------------------------------------------------------

_S2_ROWS: list[tuple[int, ...]] = [(1,)]
_C1_ROWS: list[tuple[int, ...]] = [(1,)]
_TABLE_LOCK = threading.Lock()  # extension must look sequential to concurrent callers


def _stirling2_row(n: int) -> tuple[int, ...]:
    if len(_S2_ROWS) <= n:
        with _TABLE_LOCK:
            while len(_S2_ROWS) <= n:
                m = len(_S2_ROWS)
                prev = _S2_ROWS[m - 1]
                row = [0] * (m + 1)
                for k in range(1, m + 1):
                    row[k] = (prev[k - 1] if k - 1 < m else 0) + k * (prev[k] if k < m else 0)
                _S2_ROWS.append(tuple(row))
    return _S2_ROWS[n]


def _stirling1_unsigned_row(n: int) -> tuple[int, ...]:
    if len(_C1_ROWS) <= n:
        with _TABLE_LOCK:
            while len(_C1_ROWS) <= n:
                m = len(_C1_ROWS)
                prev = _C1_ROWS[m - 1]
                row = [0] * (m + 1)
                for k in range(1, m + 1):
                    row[k] = (prev[k - 1] if k - 1 < m else 0) + (m - 1) * (prev[k] if k < m else 0)
                _C1_ROWS.append(tuple(row))
    return _C1_ROWS[n]


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind S(n, k): set partitions of n into k blocks.

    Generating function: (e^z - 1)^k = k! sum_{n>=k} S(n,k) z^n/n!.
    """
    if n < 0 or k < 0:
        raise ValueError("Stirling arguments must be nonnegative")
    if k > n:
        return 0
    return _stirling2_row(n)[k]


def stirling1_unsigned(n: int, k: int) -> int:
    """Unsigned Stirling number of the first kind c(n,k) = |s(n,k)|."""
    if n < 0 or k < 0:
        raise ValueError("Stirling arguments must be nonnegative")
    if k > n:
        return 0
    return _stirling1_unsigned_row(n)[k]


def stirling1(n: int, k: int) -> int:
    """Signed Stirling number of the first kind s(n, k).

    Convention: log(1+z)^k = k! sum_{n>=k} s(n,k) z^n/n!, equivalently
    x(x-1)...(x-n+1) = sum_k s(n,k) x^k.
    """
    c = stirling1_unsigned(n, k)
    return c if (n - k) % 2 == 0 else -c


# ---------------------------------------------------------------------------
# compositions and partial Bell polynomials
# ---------------------------------------------------------------------------

def compositions(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """Ordered m-tuples of positive integers summing to n, lexicographic by first part.

    Yields exactly binom(n-1, m-1) tuples; empty for m > n (not an error),
    and for m == 0 only n == 0 produces the empty tuple.
    """
    if n < 0 or m < 0:
        raise ValueError("compositions requires nonnegative arguments")
    if m == 0:
        if n == 0:
            yield ()
        return
    if m > n:
        return
    if m == 1:
        yield (n,)
        return
    for first in range(1, n - m + 2):
        for rest in compositions(n - first, m - 1):
            yield (first,) + rest


def _bell_multiplicities(n: int, k: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """Multiplicity patterns ((part, count), ...) with sum(count)=k, sum(part*count)=n."""

    def rec(remaining_n, remaining_k, max_part):
        if remaining_k == 0:
            if remaining_n == 0:
                yield ()
            return
        # parts are at least 1, so remaining_n >= remaining_k must hold
        for part in range(min(max_part, remaining_n - remaining_k + 1), 0, -1):
            for count in range(1, remaining_n // part + 1):
                if count > remaining_k:
                    break
                for rest in rec(remaining_n - part * count, remaining_k - count, part - 1):
                    yield ((part, count),) + rest

    yield from rec(n, k, n - k + 1 if k else 0)


def bell_partial(n: int, k: int, xs: Sequence):
    """Partial Bell polynomial B_{n,k}(x_1, ..., x_{n-k+1}).

    Sum over nonnegative multiplicities (i_1, ..., i_{n-k+1}) with
    sum i_j = k and sum j*i_j = n of
    n!/(i_1!...i_{n-k+1}!) * prod (x_j/j!)^{i_j}.
    Arguments may be Fractions, XPoly values or mpmath floats.
    """
    if not 0 <= k <= n:
        raise ValueError("bell_partial requires 0 <= k <= n")
    if k == 0:
        return Fraction(1) if n == 0 else Fraction(0)
    if len(xs) < n - k + 1:
        raise ValueError(f"bell_partial needs {n - k + 1} arguments, got {len(xs)}")
    nfact = math.factorial(n)
    total = None
    for pattern in _bell_multiplicities(n, k):
        weight = Fraction(nfact)
        term = None
        for part, count in pattern:
            weight /= math.factorial(count) * math.factorial(part) ** count
            for _ in range(count):
                term = xs[part - 1] if term is None else term * xs[part - 1]
        term = weight if term is None else weight * term
        total = term if total is None else total + term
    return Fraction(0) if total is None else total


def faa_derivative(outer_derivs: Sequence, inner_derivs: Sequence, n: int):
    """n-th derivative of a composition phi(psi(t)) at a point.

    outer_derivs[k] = phi^{(k)} evaluated at psi(t0); inner_derivs[j] =
    psi^{(j)}(t0) for j >= 1 (index 0 is ignored).  Returns
    sum_{k=0}^{n} outer_derivs[k] * B_{n,k}(psi', psi'', ...).
    """
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    if len(outer_derivs) < n + 1:
        raise ValueError("need outer derivatives through order n")
    if n >= 1 and len(inner_derivs) < n + 1:
        raise ValueError("need inner derivatives through order n")
    total = None
    for k in range(n + 1):
        b = bell_partial(n, k, inner_derivs[1:])
        term = outer_derivs[k] * b
        total = term if total is None else total + term
    return total


# ---------------------------------------------------------------------------
# degenerate falling factorial
# ---------------------------------------------------------------------------

def deg_falling(beta, k: int, lam) -> Fraction:
    """Degenerate falling factorial (beta)_{k,lam} = prod_{j<k} (beta - j*lam); 1 at k=0."""
    if k < 0:
        raise ValueError("index must be nonnegative")
    beta, lam = as_fraction(beta), as_fraction(lam)
    out = Fraction(1)
    for j in range(k):
        out *= beta - j * lam
    return out


# ---------------------------------------------------------------------------
# generating series for the coefficient families
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def theta_series(q: Fraction, order: int) -> TSeries:
    """Taylor series of log((1+z)/(1+qz))."""
    return log1p_scaled_series(1, order) - log1p_scaled_series(q, order)


@lru_cache(maxsize=None)
def zeta_series(q: Fraction, order: int) -> TSeries:
    """Taylor series of (e^z - 1)/(1 - q e^z), the inverse of theta.

    Written as w/(p - q*w) with w = e^z - 1 and p = 1 - q so the constant
    term of the denominator is the unit p.
    """
    q = as_fraction(q)
    p = 1 - q
    w = expm1_series(order)
    denom = TSeries.one(order) - (q / p) * w
    return (w * denom.reciprocal()) * (Fraction(1) / p)


@lru_cache(maxsize=None)
def omega_power_series(q: Fraction, order: int) -> TSeries:
    """Series of ((1+t)/(1+qt))^x with XPoly coefficients (exact in x).

    Computed as the Cauchy product of (1+t)^x and (1+qt)^{-x}, whose
    coefficients are generalized binomials in x.
    """
    q = as_fraction(q)
    x = XPoly.x()
    a = TSeries([gen_binomial(x, n) for n in range(order + 1)], order)
    b = TSeries([gen_binomial(-x, n) * q**n for n in range(order + 1)], order)
    return a * b


def eta(k: int, q) -> Fraction:
    """Taylor numbers of log((1+z)/(1+qz)): eta_0 = 0 and for k >= 1
    eta_k = (-1)^{k+1} (k-1)! (1 - q^k)."""
    if k < 0:
        raise ValueError("index must be nonnegative")
    q = as_fraction(q)
    if k == 0:
        return Fraction(0)
    return Fraction((-1) ** (k + 1) * math.factorial(k - 1)) * (1 - q**k)


def kappa(k: int, q) -> Fraction:
    """Taylor numbers of (e^z - 1)/(1 - q e^z): kappa_k = k! [z^k] zeta(z)."""
    if k < 0:
        raise ValueError("index must be nonnegative")
    q = as_fraction(q)
    series = zeta_series(q, max(k, _DEFAULT_ORDER))
    return math.factorial(k) * series.coeff(k)


def epsilon(k: int, q) -> XPoly:
    """Coefficient of t^k in ((1+t)/(1+qt))^x, as an exact polynomial in x."""
    if k < 0:
        raise ValueError("index must be nonnegative")
    q = as_fraction(q)
    c = omega_power_series(q, max(k, _DEFAULT_ORDER)).coeff(k)
    return c if isinstance(c, XPoly) else XPoly.const(c)


def epsilon_closed(k: int, q, variant: str = "derived") -> XPoly:
    """Closed binomial forms for epsilon_k, kept for auditing.

    variant="derived": sum_j (-1)^j binom(x, k-j) binom(x+j-1, j) q^j,
    which matches the series definition.
    variant="printed": the alternate form with binom(x+j-1, k-j) in place
    of binom(x+j-1, j); evaluated so the audit can report its residual.
    """
    if variant not in ("derived", "printed"):
        raise ValueError(f"unknown epsilon variant {variant!r}")
    q = as_fraction(q)
    x = XPoly.x()
    total = XPoly()
    for j in range(k + 1):
        second = gen_binomial(x + (j - 1), j if variant == "derived" else k - j)
        total = total + Fraction((-1) ** j) * q**j * gen_binomial(x, k - j) * second
    return total


def bracket_y(n: int, q) -> XPoly:
    """Bracket factorial [y]_n = sum_k binom(n,k) q^k (y)_{n-k} (-y)_k.

    Returned as a polynomial in the translation variable; equals
    n! [z^n] exp(y * log((1+z)/(1+qz))).
    """
    if n < 0:
        raise ValueError("index must be nonnegative")
    q = as_fraction(q)
    y = XPoly.x()
    total = XPoly()
    for k in range(n + 1):
        total = total + (
            math.comb(n, k) * q**k * falling_factorial(y, n - k) * falling_factorial(-y, k)
        )
    return total


# ---------------------------------------------------------------------------
# composition-sum coefficient families
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def varpi(m: int, n: int, q) -> Fraction:
    """Basis-change weight from the Appell companions to the main family.

    varpi(m, n) = sum over compositions i_1+...+i_m = n of
    (-1)^{n+m} n! prod (1 - q^{i_j}) / i_j, with varpi(0,0) = 1 and
    varpi(0,n) = 0 for n >= 1.  Equals n! [z^n] theta(z)^m.
    """
    if m < 0 or n < 0 or m > n:
        raise ValueError("varpi requires 0 <= m <= n")
    q = as_fraction(q)
    if m == 0:
        return Fraction(1 if n == 0 else 0)
    sign = Fraction((-1) ** (n + m) * math.factorial(n))
    total = Fraction(0)
    for comp in compositions(n, m):
        prod = Fraction(1)
        for i in comp:
            prod *= (1 - q**i) / i
        total += prod
    return sign * total


@lru_cache(maxsize=None)
def varrho(m: int, k: int, q) -> Fraction:
    """Basis-change weight from the main family back to the companions.

    varrho(m, k) = sum over compositions i_1+...+i_m = k of
    k!/(i_1!...i_m!) prod kappa_{i_j}, with varrho(0,0) = 1 and
    varrho(0,k) = 0 for k >= 1.  Equals k! [z^k] zeta(z)^m.
    """
    if m < 0 or k < 0 or m > k:
        raise ValueError("varrho requires 0 <= m <= k")
    q = as_fraction(q)
    if m == 0:
        return Fraction(1 if k == 0 else 0)
    kfact = math.factorial(k)
    total = Fraction(0)
    for comp in compositions(k, m):
        prod = Fraction(1)
        for i in comp:
            prod *= kappa(i, q) / math.factorial(i)
        total += prod
    return kfact * total


@lru_cache(maxsize=None)
def rho_scaling(m: int, k: int, q, r, variant: str = "corrected") -> Fraction:
    """Scaling-expansion weight rho(m, k), in the literal and corrected variants.

    Both share the composition sum T = k! * sum over l_1+...+l_m = k of
    prod 1/l_i.  The corrected variant (-1)^{k+m} q^k r^m T equals
    k! [t^k] (r log(1+qt))^m and is what the scaling identity requires;
    the literal variant (-1)^{k+m} q^m T is kept for the audit.
    """
    if variant not in ("literal", "corrected"):
        raise ValueError(f"unknown rho variant {variant!r}")
    if m < 0 or k < 0 or m > k:
        raise ValueError("rho requires 0 <= m <= k")
    q, r = as_fraction(q), as_fraction(r)
    if m == 0:
        return Fraction(1 if k == 0 else 0)
    total = Fraction(0)
    for comp in compositions(k, m):
        prod = Fraction(1)
        for l in comp:
            prod /= l
        total += prod
    total *= math.factorial(k) * Fraction((-1) ** (k + m))
    if variant == "corrected":
        return total * q**k * r**m
    return total * q**m
