"""The degenerate Krawtchouk polynomial family K_n and its Appell companion P_n.

The canonical definitions are generating series:

    sum_n K_n(x) t^n / n!  =  ((1+t)/(1+qt))^x / (1 + lam*r*log(1+qt))^(beta/lam)
    sum_n P_n(x) z^n / n!  =  e^(x z) / L(z),

with L the measure's Laplace transform.  P is an Appell sequence
(P_n' = n P_{n-1}); K is the same sequence pushed through the substitution
z = theta(t), which makes it Sheffer in x: its derivative rule picks up
the theta coefficients (see test_polys).  Every other construction here
(coefficient recurrence, composition sums, Stirling expansions, partial
Bell polynomial formulas) is an independent route to the same members,
and the test suite holds all routes to exact rational equality.  Routes
suffixed "literal" evaluate alternate printed forms whose residuals the
audit reports; they are not expected to match.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .combinat import (
    bell_partial,
    bracket_y,
    deg_falling,
    epsilon,
    faa_derivative,
    omega_power_series,
    stirling1,
    stirling2,
    theta_series,
    varpi,
    varrho,
)
from .measure import Params, deg_exp_series, exact_moments, laplace_series
from .series import TSeries, XPoly, XYPoly, as_fraction, log1p_scaled_series

K_ROUTES = (
    "series",
    "epsilon",
    "from-p",
    "bell-corrected",
    "bell-literal",
    "stirling-oracle",
    "stirling-literal",
)
P_ROUTES = ("p-series", "p-bell", "p-from-k", "p-stirling2")


@dataclass(frozen=True)
class PolyFamily:
    """A finite Appell-style family: members[n] has degree n, members[0] == 1."""

    params: Params | None
    n_max: int
    members: tuple[XPoly, ...]
    route: str

    def __post_init__(self):
        if len(self.members) != self.n_max + 1:
            raise ValueError("family must provide members 0..n_max")
        if not self.route.endswith("literal"):
            if self.members[0] != 1:
                raise ValueError(f"route {self.route}: member 0 must be 1")
            for n, m in enumerate(self.members):
                if m.degree != n:
                    raise ValueError(f"route {self.route}: member {n} has degree {m.degree}")

    def __getitem__(self, n: int) -> XPoly:
        return self.members[n]


@dataclass(frozen=True)
class CoeffTable:
    """Derivative data behind the coefficient recurrence.

    xi[m]  the m-th derivative at 0 of r*log(1+qt),
    mu[k]  the k-th derivative at 0 of (1+lam*r*log(1+qt))^(beta/lam),
    c[n]   the normalized inverse coefficients with c[0] = 1.
    """

    xi: tuple[Fraction, ...]
    mu: tuple[Fraction, ...]
    c: tuple[Fraction, ...]


# ---------------------------------------------------------------------------
# coefficient data
# ---------------------------------------------------------------------------

def xi_series(params: Params, order: int) -> TSeries:
    """Series of r*log(1+qt)."""
    return params.r * log1p_scaled_series(params.q, order)


def xi_derivs(n_max: int, params: Params) -> list[Fraction]:
    """Derivatives at 0 of r*log(1+qt): value r (-1)^(m-1) (m-1)! q^m for m >= 1."""
    out = [Fraction(0)]
    for m in range(1, n_max + 1):
        out.append(params.r * Fraction((-1) ** (m - 1) * math.factorial(m - 1)) * params.q**m)
    return out


def deg_exp_xi_series(params: Params, order: int) -> TSeries:
    """Series of (1 + lam*r*log(1+qt))^(beta/lam), the generating denominator."""
    return deg_exp_series(xi_series(params, order), params)


def mu_coeffs(n_max: int, params: Params) -> list[Fraction]:
    """Derivatives mu_k at 0 of the generating denominator, via the
    composition-derivative formula with outer derivatives (beta)_{j,lam}."""
    outer = [deg_falling(params.beta, j, params.lam) for j in range(n_max + 1)]
    inner = xi_derivs(n_max, params)
    return [faa_derivative(outer, inner, k) for k in range(n_max + 1)]


def c_coeffs(n_max: int, params: Params) -> list[Fraction]:
    """Normalized coefficients of the reciprocal denominator.

    c_0 = 1 and c_n = -sum_{i=1}^{n} binom(n,i) r^{-i} mu_i c_{n-i};
    equivalently n! r^{-n} times the n-th coefficient of the reciprocal
    series (the dual route checked by the tests).
    """
    if params.r == 0:
        raise ValueError("r must be nonzero")
    mu = mu_coeffs(n_max, params)
    c = [Fraction(1)]
    for n in range(1, n_max + 1):
        acc = Fraction(0)
        for i in range(1, n + 1):
            acc += math.comb(n, i) * params.r**-i * mu[i] * c[n - i]
        c.append(-acc)
    return c


def coeff_table(n_max: int, params: Params) -> CoeffTable:
    return CoeffTable(
        xi=tuple(xi_derivs(n_max, params)),
        mu=tuple(mu_coeffs(n_max, params)),
        c=tuple(c_coeffs(n_max, params)),
    )


def _as_xpoly(c) -> XPoly:
    return c if isinstance(c, XPoly) else XPoly.const(c)


# ---------------------------------------------------------------------------
# the K family, five ways
# ---------------------------------------------------------------------------

def _series_order(n_max: int, order: int | None) -> int:
    """Truncation order with family headroom: defaults to n_max + 2."""
    if order is None:
        return n_max + 2
    if order < n_max + 2:
        raise ValueError("series order must be at least n_max + 2")
    return order


@lru_cache(maxsize=None)
def K_series(params: Params, n_max: int, order: int | None = None) -> PolyFamily:
    """Canonical route: n! times the t^n coefficient of the generating series."""
    order = _series_order(n_max, order)
    psi = omega_power_series(params.q, order) * deg_exp_xi_series(params, order).reciprocal()
    members = tuple(_as_xpoly(math.factorial(n) * psi.coeff(n)) for n in range(n_max + 1))
    return PolyFamily(params, n_max, members, "series")


@lru_cache(maxsize=None)
def K_epsilon(params: Params, n_max: int) -> PolyFamily:
    """Assembly from the coefficient recurrence:
    K_n = sum_k n!/(n-k)! r^(n-k) c_{n-k} epsilon_k(x)."""
    c = c_coeffs(n_max, params)
    members = []
    for n in range(n_max + 1):
        acc = XPoly()
        for k in range(n + 1):
            w = Fraction(math.factorial(n), math.factorial(n - k)) * params.r ** (n - k) * c[n - k]
            acc = acc + w * epsilon(k, params.q)
        members.append(acc)
    return PolyFamily(params, n_max, tuple(members), "epsilon")


@lru_cache(maxsize=None)
def K_from_P(params: Params, n_max: int) -> PolyFamily:
    """Basis change from the Appell companions: K_n = sum_m varpi(m,n)/m! P_m."""
    p_fam = P_series(params, n_max)
    members = []
    for n in range(n_max + 1):
        acc = XPoly()
        for m in range(n + 1):
            acc = acc + (varpi(m, n, params.q) / math.factorial(m)) * p_fam[m]
        members.append(acc)
    return PolyFamily(params, n_max, tuple(members), "from-p")


@lru_cache(maxsize=None)
def K_bell(params: Params, n_max: int, variant: str = "corrected") -> PolyFamily:
    """Partial-Bell-polynomial route through the values at 0 and the
    bracket factorials: K_n = sum_k binom(n,k) A_{n-k} [x]_k with
    A_j = sum_i (-1)^i i! B_{j,i}(args).

    variant="corrected" feeds the denominator derivatives mu_j (the
    arguments the derivation actually produces); variant="literal" feeds
    the measure's moments instead, as the alternate printed form does.
    """
    if variant not in ("corrected", "literal"):
        raise ValueError(f"unknown K_bell variant {variant!r}")
    if variant == "corrected":
        args = mu_coeffs(n_max + 1, params)
    else:
        args = exact_moments(params, n_max + 1)
    consts = []
    for j in range(n_max + 1):
        acc = Fraction(0)
        for i in range(j + 1):
            acc += Fraction((-1) ** i * math.factorial(i)) * bell_partial(j, i, args[1:])
        consts.append(acc)
    members = []
    for n in range(n_max + 1):
        acc = XPoly()
        for k in range(n + 1):
            acc = acc + math.comb(n, k) * consts[n - k] * bracket_y(k, params.q)
        members.append(acc)
    return PolyFamily(params, n_max, tuple(members), f"bell-{variant}")


def stirling_transition(n: int, k: int, q, upper: str = "plus") -> Fraction:
    """Double Stirling sum sum_j (-1)^(k-j) sum_m binom(n,m) s(m,j) s(n-m,k-j) q^(n-m).

    upper="plus" runs the inner sum to n-k+j (the bounds forced by the
    supports of the Stirling numbers, matching n![z^n] theta^k / k!);
    upper="minus" runs it to n-k-j, the alternate printed bound kept for
    the audit.
    """
    if upper not in ("plus", "minus"):
        raise ValueError(f"unknown bound variant {upper!r}")
    q = as_fraction(q)
    total = Fraction(0)
    for j in range(k + 1):
        hi = n - k + j if upper == "plus" else n - k - j
        for m in range(j, hi + 1):
            total += (
                Fraction((-1) ** (k - j))
                * math.comb(n, m)
                * stirling1(m, j)
                * stirling1(n - m, k - j)
                * q ** (n - m)
            )
    return total


@lru_cache(maxsize=None)
def K_stirling(params: Params, n_max: int, variant: str = "oracle") -> PolyFamily:
    """Expansion of K_n over the companions with log-power weights.

    variant="oracle" takes the weight of P_k as n! [z^n] theta(z)^k / k!
    computed by exact series powers (the unambiguous definition);
    variant="literal" evaluates the printed double Stirling sum with its
    printed inner bound n-k-j.  ``stirling_transition(..., "plus")``
    reproduces the oracle weights, which the tests assert.
    """
    if variant not in ("oracle", "literal"):
        raise ValueError(f"unknown K_stirling variant {variant!r}")
    p_fam = P_series(params, n_max)
    if variant == "oracle":
        theta = theta_series(params.q, n_max)
        power = TSeries.one(n_max)
        weights = []  # weights[k][n] = n! [z^n] theta^k / k!
        for k in range(n_max + 1):
            weights.append(
                [math.factorial(n) * power.coeff(n) / math.factorial(k) for n in range(n_max + 1)]
            )
            if k < n_max:
                power = power * theta
        coeff = lambda n, k: weights[k][n]
    else:
        coeff = lambda n, k: stirling_transition(n, k, params.q, "minus")
    members = []
    for n in range(n_max + 1):
        acc = XPoly()
        for k in range(n + 1):
            acc = acc + coeff(n, k) * p_fam[k]
        members.append(acc)
    return PolyFamily(params, n_max, tuple(members), f"stirling-{variant}")


@lru_cache(maxsize=None)
def classical_K(p, r, n_max: int, order: int | None = None) -> PolyFamily:
    """Classical Krawtchouk family: n! [t^n] (1+t)^x (1+qt)^(-x-r); exact for rational r."""
    from .series import gen_binomial

    p, r = as_fraction(p), as_fraction(r)
    q = 1 - p
    order = _series_order(n_max, order)
    x = XPoly.x()
    a = TSeries([gen_binomial(x, n) for n in range(order + 1)], order)
    b = TSeries([gen_binomial(-x - r, n) * q**n for n in range(order + 1)], order)
    prod = a * b
    members = tuple(_as_xpoly(math.factorial(n) * prod.coeff(n)) for n in range(n_max + 1))
    return PolyFamily(None, n_max, members, "classical")


# ---------------------------------------------------------------------------
# the companion Appell family P, four ways
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def P_series(params: Params, n_max: int, order: int | None = None) -> PolyFamily:
    """Canonical route: n! [z^n] of e^(xz) times the reciprocal Laplace series."""
    order = _series_order(n_max, order)
    x = XPoly.x()
    exz = TSeries([x**n / math.factorial(n) for n in range(order + 1)], order)
    series = exz * laplace_series(params, order).reciprocal()
    members = tuple(_as_xpoly(math.factorial(n) * series.coeff(n)) for n in range(n_max + 1))
    return PolyFamily(params, n_max, members, "p-series")


@lru_cache(maxsize=None)
def P_bell(params: Params, n_max: int) -> PolyFamily:
    """Bell-polynomial route: P_n = sum_k binom(n,k) [sum_i (-1)^i i! B_{n-k,i}(M)] x^k,
    with M the exact moment vector."""
    moments = exact_moments(params, n_max + 1)
    consts = []
    for j in range(n_max + 1):
        acc = Fraction(0)
        for i in range(j + 1):
            acc += Fraction((-1) ** i * math.factorial(i)) * bell_partial(j, i, moments[1:])
        consts.append(acc)
    x = XPoly.x()
    members = []
    for n in range(n_max + 1):
        acc = XPoly()
        for k in range(n + 1):
            acc = acc + math.comb(n, k) * consts[n - k] * x**k
        members.append(acc)
    return PolyFamily(params, n_max, tuple(members), "p-bell")


@lru_cache(maxsize=None)
def P_from_K(params: Params, n_max: int) -> PolyFamily:
    """Inverse basis change: P_n = sum_m varrho(m,n)/m! K_m."""
    k_fam = K_series(params, n_max)
    members = []
    for n in range(n_max + 1):
        acc = XPoly()
        for m in range(n + 1):
            acc = acc + (varrho(m, n, params.q) / math.factorial(m)) * k_fam[m]
        members.append(acc)
    return PolyFamily(params, n_max, tuple(members), "p-from-k")


@lru_cache(maxsize=None)
def P_from_K_stirling2(params: Params, n_max: int) -> PolyFamily:
    """Second-kind-Stirling route:
    P_n = sum_{k>=1} [sum_{j=k}^{n} binom(j-1,k-1) q^(j-k)/p^j j! S(n,j)] K_k / k!
    plus the k = 0 term, which the series power zeta^0 = 1 makes delta_{n,0}."""
    k_fam = K_series(params, n_max)
    members = []
    for n in range(n_max + 1):
        acc = XPoly.const(1 if n == 0 else 0)
        for k in range(1, n + 1):
            w = Fraction(0)
            for j in range(k, n + 1):
                w += (
                    math.comb(j - 1, k - 1)
                    * params.q ** (j - k)
                    / params.p**j
                    * math.factorial(j)
                    * stirling2(n, j)
                )
            acc = acc + w / math.factorial(k) * k_fam[k]
        members.append(acc)
    return PolyFamily(params, n_max, tuple(members), "p-stirling2")


# ---------------------------------------------------------------------------
# monomial expansion and addition identities
# ---------------------------------------------------------------------------

def monomial_from_K(n: int, params: Params) -> XPoly:
    """x^n rebuilt from the K family:
    sum_k sum_m binom(n,k) varrho(m,k)/m! K_m(x) M(n-k)."""
    if n < 0:
        raise ValueError("exponent must be nonnegative")
    k_fam = K_series(params, n)
    moments = exact_moments(params, n)
    acc = XPoly()
    for k in range(n + 1):
        for m in range(k + 1):
            acc = acc + (
                math.comb(n, k)
                * (varrho(m, k, params.q) / math.factorial(m))
                * moments[n - k]
            ) * k_fam[m]
    return acc


def addition_P3(n: int, params: Params, variant: str = "corrected") -> XYPoly:
    """Residual of the three-fold addition identity

    K_n(x+y) - sum_{k+l+m=n} n!/(k!l!m!) K_k(x) K_l(y) mu_m.

    The corrected reading pairs the second factor with y; the literal
    variant repeats x there (as the alternate printed form does) and is
    nonzero in general.  Zero residual means the identity holds.
    """
    if variant not in ("corrected", "literal"):
        raise ValueError(f"unknown P3 variant {variant!r}")
    k_fam = K_series(params, n)
    mu = mu_coeffs(n, params)
    lhs = k_fam[n](XYPoly.x() + XYPoly.y())
    lhs = lhs if isinstance(lhs, XYPoly) else XYPoly.const(lhs)
    rhs = XYPoly()
    for k in range(n + 1):
        for l in range(n - k + 1):
            m = n - k - l
            weight = Fraction(math.factorial(n)) / (
                math.factorial(k) * math.factorial(l) * math.factorial(m)
            )
            second = (
                XYPoly.from_y_poly(k_fam[l])
                if variant == "corrected"
                else XYPoly.from_x_poly(k_fam[l])
            )
            rhs = rhs + weight * mu[m] * XYPoly.from_x_poly(k_fam[k]) * second
    return lhs - rhs


def addition_P4(n: int, params: Params) -> XYPoly:
    """Residual of K_n(x+y) - sum_k binom(n,k) K_k(x) [y]_{n-k}; zero when the
    bracket-factorial addition identity holds."""
    k_fam = K_series(params, n)
    lhs = k_fam[n](XYPoly.x() + XYPoly.y())
    lhs = lhs if isinstance(lhs, XYPoly) else XYPoly.const(lhs)
    rhs = XYPoly()
    for k in range(n + 1):
        rhs = rhs + math.comb(n, k) * XYPoly.from_x_poly(k_fam[k]) * XYPoly.from_y_poly(
            bracket_y(n - k, params.q)
        )
    return lhs - rhs


# ---------------------------------------------------------------------------
# route dispatch
# ---------------------------------------------------------------------------

def family(params: Params, n_max: int, route: str, order: int | None = None) -> PolyFamily:
    """Build a family by route name (see K_ROUTES and P_ROUTES).

    `order` is the shared series truncation order; routes that do not
    expand series ignore it (their members are order-free).
    """
    if route == "series":
        return K_series(params, n_max, order)
    if route == "epsilon":
        return K_epsilon(params, n_max)
    if route == "from-p":
        return K_from_P(params, n_max)
    if route == "bell-corrected":
        return K_bell(params, n_max, "corrected")
    if route == "bell-literal":
        return K_bell(params, n_max, "literal")
    if route == "stirling-oracle":
        return K_stirling(params, n_max, "oracle")
    if route == "stirling-literal":
        return K_stirling(params, n_max, "literal")
    if route == "p-series":
        return P_series(params, n_max, order)
    if route == "p-bell":
        return P_bell(params, n_max)
    if route == "p-from-k":
        return P_from_K(params, n_max)
    if route == "p-stirling2":
        return P_from_K_stirling2(params, n_max)
    if route == "classical":
        return classical_K(params.p, params.r, n_max, order)
    raise ValueError(f"unknown route {route!r}")
