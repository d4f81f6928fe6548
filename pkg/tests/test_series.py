"""Polynomial and truncated-series arithmetic."""

import math
import random
from fractions import Fraction as F

import mpmath
import pytest
from mpmath import mp

from degenkraw.combinat import bell_partial, faa_derivative, theta_series, zeta_series
from degenkraw.series import (
    NonInvertibleSeries,
    TSeries,
    XPoly,
    XYPoly,
    exp_series,
    gen_binomial,
    log1p_scaled_series,
)

N = 12


def rand_series(rng, order, lo=-4, hi=4, unit=False, zero_const=False):
    coeffs = [F(rng.randint(lo, hi), rng.randint(1, 5)) for _ in range(order + 1)]
    if unit:
        coeffs[0] = F(1)
    if zero_const:
        coeffs[0] = F(0)
    return TSeries(coeffs, order)


class TestXPoly:
    def test_normalization_and_degree(self):
        assert XPoly((1, 2, 0, 0)).coeffs == (F(1), F(2))
        assert XPoly(()).degree == -1
        assert XPoly((0,)).is_zero()

    def test_ring_ops(self):
        x = XPoly.x()
        p = (x + 1) * (x - 1)
        assert p == XPoly((-1, 0, 1))
        assert p - p == 0
        assert (x**3).derivative() == 3 * x**2
        with pytest.raises(ValueError):
            x**-1

    def test_values_immutable(self):
        p = XPoly((1, 2))
        with pytest.raises(AttributeError):
            p.coeffs = ()
        s = TSeries([1, 2], 4)
        with pytest.raises(AttributeError):
            s.order = 2

    def test_eval_and_substitution(self):
        p = XPoly((1, -2, 3))
        assert p(F(1, 2)) == 1 - 1 + F(3, 4)
        assert p.scale_arg(F(2)) == XPoly((1, -4, 12))
        # substituting another polynomial composes
        assert (XPoly.x() ** 2)(XPoly((1, 1))) == XPoly((1, 2, 1))

    def test_gen_binomial(self):
        x = XPoly.x()
        assert gen_binomial(F(7, 2), 0) == 1
        assert gen_binomial(x, 2) == XPoly((0, F(-1, 2), F(1, 2)))
        with pytest.raises(ValueError):
            gen_binomial(x, -1)

    def test_geometric_pascal_identity(self):
        # binom(-r, n) (-q)^n with r=1 collapses to q^n
        q = F(2, 5)
        for n in range(8):
            assert gen_binomial(F(-1), n) * (-q) ** n == q**n


class TestXYPoly:
    def test_embed_and_multiply(self):
        p = XPoly((1, 2))  # 1 + 2x
        xy = XYPoly.from_x_poly(p) * XYPoly.from_y_poly(p)
        assert xy.terms[(1, 1)] == 4
        assert xy.substitute_y(F(0)) == p

    def test_binomial_expansion(self):
        both = (XYPoly.x() + XYPoly.y()) * (XYPoly.x() + XYPoly.y())
        assert both == XYPoly({(2, 0): 1, (1, 1): 2, (0, 2): 1})


class TestSeriesArithmetic:
    def test_mul_difference_of_squares(self):
        a = TSeries([1, 1], 2)
        b = TSeries([1, -1], 2)
        assert a * b == TSeries([1, 0, -1], 2)

    def test_mul_identity(self):
        rng = random.Random(7)
        a = rand_series(rng, N)
        assert a * TSeries.one(N) == a

    def test_mul_exp_squared(self):
        # coefficients of e^t * e^t are 2^k/k! (expand the Cauchy product by hand)
        e = exp_series(5)
        sq = e * e
        for k in range(6):
            assert sq.coeff(k) == F(2**k, math.factorial(k))

    def test_order_mismatch_rejected(self):
        with pytest.raises(ValueError):
            TSeries.one(3) * TSeries.one(4)

    def test_reciprocal(self):
        assert TSeries.one(N).reciprocal() == TSeries.one(N)
        geo = TSeries([1, 1], 3).reciprocal()
        assert geo == TSeries([1, -1, 1, -1], 3)
        with pytest.raises(NonInvertibleSeries):
            TSeries([0, 1], 3).reciprocal()

    def test_reciprocal_needs_unit_constant_in_poly_ring(self):
        # a series over XPoly with a non-constant leading coefficient has no inverse
        with pytest.raises(NonInvertibleSeries):
            TSeries([XPoly.x(), XPoly.const(1)], 3).reciprocal()

    def test_reciprocal_roundtrip_random(self):
        rng = random.Random(11)
        for _ in range(20):
            a = rand_series(rng, N)
            if a.coeff(0) == 0:
                continue
            assert a * a.reciprocal() == TSeries.one(N)

    def test_reciprocal_of_deg_exp_like_series(self):
        # roundtrip through a composite series at order 12
        from degenkraw.measure import deg_exp_series, Params

        params = Params.make("-1/2", "2", "3/5", "3")
        xi = F(3) * log1p_scaled_series(params.q, 12)
        e = deg_exp_series(xi, params)
        assert e * e.reciprocal() == TSeries.one(12)

    def test_log1(self):
        assert TSeries.one(N).log1() == TSeries([0], N)
        mercator = TSeries([1, 1], 4).log1()
        assert mercator == TSeries([0, 1, F(-1, 2), F(1, 3), F(-1, 4)], 4)
        with pytest.raises(ValueError):
            TSeries([2, 1], 4).log1()

    def test_log_quotient_termwise(self):
        # log(1+t) - log(1+qt) at q=1/2: coefficients (1 - q^k)(-1)^(k+1)/k
        q = F(1, 2)
        diff = TSeries([1, 1], 3).log1() - TSeries([1, q], 3).log1()
        assert diff == TSeries([0, 1 - q, -(1 - q**2) / 2, (1 - q**3) / 3], 3)

    def test_fracpow(self):
        a = TSeries([1, 1], 2)
        assert a.fracpow(0) == TSeries.one(2)
        assert a.fracpow(-1) == a.reciprocal()
        assert a.fracpow(F(1, 2)) == TSeries([1, F(1, 2), F(-1, 8)], 2)
        with pytest.raises(ValueError):
            TSeries([2, 1], 2).fracpow(F(1, 2))

    def test_fracpow_exponent_additivity(self):
        rng = random.Random(13)
        for _ in range(10):
            a = rand_series(rng, 8, unit=True)
            e1 = F(rng.randint(-6, 6), rng.randint(1, 4))
            e2 = F(rng.randint(-6, 6), rng.randint(1, 4))
            assert a.fracpow(e1 + e2) == a.fracpow(e1) * a.fracpow(e2)

    def test_log_of_power_scales(self):
        rng = random.Random(17)
        for _ in range(10):
            a = rand_series(rng, 8, unit=True)
            e = F(rng.randint(-5, 5), rng.randint(1, 3))
            assert a.fracpow(e).log1() == e * a.log1()

    def test_compose_constant_inner(self):
        f = TSeries([3, 1, 4], 5)
        assert f.compose(TSeries([0], 5)) == TSeries([3], 5)
        with pytest.raises(ValueError):
            f.compose(TSeries([1, 1], 5))

    def test_compose_inverse_pair(self):
        q = F(1, 2)
        th, ze = theta_series(q, 10), zeta_series(q, 10)
        assert ze.compose(th) == TSeries.x(10)
        assert th.compose(ze) == TSeries.x(10)

    def test_compose_exp_with_x_theta_matches_product(self):
        # exp(x*theta(t)) must equal the product (1+t)^x (1+qt)^(-x)
        from degenkraw.combinat import omega_power_series

        q = F(2, 5)
        order = 8
        th = theta_series(q, order)
        x_theta = th.map(lambda c: c * XPoly.x())
        composed = exp_series(order).compose(x_theta)
        assert composed == omega_power_series(q, order).lift()

    def test_compose_matches_faa_di_bruno(self):
        rng = random.Random(19)
        for _ in range(5):
            f = rand_series(rng, 10)
            g = rand_series(rng, 10, zero_const=True)
            comp = f.compose(g)
            fk = f.derivative_list()
            gk = g.derivative_list()
            for n in range(11):
                assert math.factorial(n) * comp.coeff(n) == faa_derivative(fk, gk, n)

    def test_compose_coefficient_via_bell(self):
        # coefficient n of f(g) equals (1/n!) sum_k f_k k! B_nk(g-derivatives)
        rng = random.Random(23)
        f = rand_series(rng, 8)
        g = rand_series(rng, 8, zero_const=True)
        comp = f.compose(g)
        gk = g.derivative_list()
        for n in range(9):
            acc = F(0)
            for k in range(n + 1):
                acc += f.coeff(k) * math.factorial(k) * bell_partial(n, k, gk[1:])
            assert comp.coeff(n) == acc / math.factorial(n)


class TestRealPrecision:
    def test_real_reproduces_rationals(self):
        # D-digit arithmetic tracks an exact rational pipeline to 10^-(D-10)
        digits = 60
        rng = random.Random(29)
        with mp.workdps(digits):
            for _ in range(20):
                a = F(rng.randint(-999, 999), rng.randint(1, 999))
                b = F(rng.randint(1, 999), rng.randint(1, 999))
                exact = (a * b + a / b - b) ** 3
                approx = (
                    mpmath.mpmathify(a) * mpmath.mpmathify(b)
                    + mpmath.mpmathify(a) / mpmath.mpmathify(b)
                    - mpmath.mpmathify(b)
                ) ** 3
                if exact:
                    rel = abs(approx - mpmath.mpmathify(exact)) / abs(mpmath.mpmathify(exact))
                    assert rel <= mpmath.mpf(10) ** -(digits - 10)
