"""Combinatorial kernels against brute-force oracles."""

import math
from fractions import Fraction as F

import pytest

from degenkraw.combinat import (
    bell_partial,
    bracket_y,
    compositions,
    deg_falling,
    epsilon,
    epsilon_closed,
    eta,
    kappa,
    rho_scaling,
    stirling1,
    stirling2,
    theta_series,
    varpi,
    varrho,
    zeta_series,
)
from degenkraw.series import TSeries, XPoly, exp_series, falling_factorial, log1p_scaled_series

Q = F(2, 5)


def count_set_partitions(n, k):
    """Brute force: partitions of {0..n-1} into k nonempty blocks."""
    if n == 0:
        return 1 if k == 0 else 0

    def rec(items, blocks):
        if not items:
            return 1 if len(blocks) == k else 0
        if len(blocks) > k:
            return 0
        head, rest = items[0], items[1:]
        total = 0
        for i in range(len(blocks)):
            total += rec(rest, blocks[:i] + [blocks[i] + [head]] + blocks[i + 1 :])
        total += rec(rest, blocks + [[head]])
        return total

    return rec(list(range(1, n)), [[0]])


class TestConcurrentMemoization:
    def test_tables_consistent_under_threads(self):
        # concurrent growth of the shared triangles must look sequential
        import threading

        import degenkraw.combinat as cb

        results = {}

        def worker(tag, fn, n_top):
            results[tag] = [fn(n, k) for n in range(n_top) for k in range(n + 1)]

        threads = [
            threading.Thread(target=worker, args=(f"s2-{i}", stirling2, 60)) for i in range(4)
        ] + [
            threading.Thread(target=worker, args=(f"s1-{i}", stirling1, 60)) for i in range(4)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        seq2 = [count_set_partitions(n, k) for n in range(7) for k in range(n + 1)]
        assert results["s2-0"][: len(seq2)] == seq2
        for i in range(1, 4):
            assert results[f"s2-{i}"] == results["s2-0"]
            assert results[f"s1-{i}"] == results["s1-0"]
        # the shared tables themselves stayed coherent
        assert cb.stirling2(59, 58) == math.comb(59, 2)


class TestStirling:
    def test_second_kind_against_enumeration(self):
        for n in range(7):
            for k in range(n + 2):
                assert stirling2(n, k) == count_set_partitions(n, k)

    def test_second_kind_frozen(self):
        assert stirling2(0, 0) == 1
        assert stirling2(4, 2) == 7  # enumerated: 7 pair partitions of a 4-set
        assert all(stirling2(n, n) == 1 for n in range(10))

    def test_first_kind_from_falling_factorial(self):
        # (x)_n = sum_k s(n,k) x^k
        x = XPoly.x()
        for n in range(9):
            ff = falling_factorial(x, n)
            for k in range(n + 1):
                assert stirling1(n, k) == ff.coeff(k)

    def test_first_kind_frozen(self):
        assert stirling1(2, 1) == -1  # x^2 - x
        assert stirling1(3, 1) == 2  # x^3 - 3x^2 + 2x
        assert all(stirling1(n, n) == 1 for n in range(10))

    def test_first_kind_generating_function(self):
        # log(1+z)^k = k! sum s(n,k) z^n/n! through order 12
        order = 12
        logs = log1p_scaled_series(1, order)
        power = TSeries.one(order)
        for k in range(order + 1):
            for n in range(order + 1):
                expected = F(stirling1(n, k) * math.factorial(k), math.factorial(n))
                assert power.coeff(n) == expected
            power = power * logs

    def test_mutual_inversion(self):
        for n in range(11):
            for m in range(11):
                total = sum(stirling1(n, k) * stirling2(k, m) for k in range(n + 1))
                assert total == (1 if n == m else 0)

    def test_second_kind_inversion_polynomials(self):
        x = XPoly.x()
        for n in range(11):
            acc = XPoly()
            for k in range(n + 1):
                acc = acc + stirling2(n, k) * falling_factorial(x, k)
            assert acc == x**n

    def test_negative_arguments_rejected(self):
        with pytest.raises(ValueError):
            stirling2(-1, 0)
        with pytest.raises(ValueError):
            stirling1(2, -1)


class TestCompositions:
    def test_listing(self):
        assert list(compositions(3, 2)) == [(1, 2), (2, 1)]
        assert list(compositions(4, 4)) == [(1, 1, 1, 1)]

    def test_count_is_binomial(self):
        for n in range(1, 9):
            for m in range(1, n + 1):
                assert len(list(compositions(n, m))) == math.comb(n - 1, m - 1)

    def test_ordering_is_lexicographic(self):
        got = list(compositions(6, 3))
        assert got == sorted(got)
        assert len(got) == math.comb(5, 2) == 10

    def test_every_composition_once(self):
        got = list(compositions(7, 3))
        assert len(set(got)) == len(got)
        assert all(sum(c) == 7 and len(c) == 3 and min(c) >= 1 for c in got)

    def test_more_parts_than_total_is_empty_not_error(self):
        assert list(compositions(2, 5)) == []
        assert list(compositions(3, 0)) == []
        with pytest.raises(ValueError):
            list(compositions(-1, 0))


class TestBell:
    def test_edge_cases(self):
        assert bell_partial(0, 0, []) == 1
        assert bell_partial(5, 0, [1] * 6) == 0
        for n in range(1, 7):
            xs = [F(i + 1, 2) for i in range(n)]
            assert bell_partial(n, 1, xs) == xs[n - 1]

    def test_b32_weight(self):
        # single pattern (i1,i2)=(1,1) with weight 3!/(1!1!(1!)^1(2!)^1) = 3
        x1, x2 = F(5, 3), F(-7, 2)
        assert bell_partial(3, 2, [x1, x2]) == 3 * x1 * x2

    def test_specializes_to_stirling2(self):
        for n in range(11):
            for k in range(n + 1):
                assert bell_partial(n, k, [F(1)] * (n - k + 1)) == stirling2(n, k)

    def test_specializes_to_unsigned_stirling1(self):
        facts = [F(math.factorial(j)) for j in range(12)]
        for n in range(11):
            for k in range(n + 1):
                assert bell_partial(n, k, facts) == abs(stirling1(n, k))

    def test_insufficient_arguments(self):
        with pytest.raises(ValueError):
            bell_partial(4, 2, [F(1)])


class TestDegFalling:
    def test_frozen_values(self):
        assert deg_falling(F(5), 0, F(-1)) == 1
        assert deg_falling(F(2), 2, F(-1)) == 6  # 2 * 3
        assert deg_falling(F(3, 2), 3, F(0)) == F(27, 8)  # lambda=0 gives powers

    def test_matches_series_coefficients(self):
        # (1 + lam z)^(beta/lam) = sum (beta)_{k,lam} z^k / k!
        lam, beta = F(-1, 2), F(2)
        series = TSeries([1, lam], 10).fracpow(beta / lam)
        for k in range(11):
            assert series.coeff(k) == deg_falling(beta, k, lam) / math.factorial(k)


class TestCoefficientFamilies:
    def test_eta_frozen(self):
        assert eta(0, Q) == 0
        assert eta(1, Q) == 1 - Q  # = p
        assert eta(2, Q) == -(1 - Q**2)

    def test_eta_matches_series(self):
        th = theta_series(Q, 10)
        for k in range(11):
            assert eta(k, Q) == math.factorial(k) * th.coeff(k)

    def test_kappa_frozen(self):
        assert kappa(0, Q) == 0
        assert kappa(1, Q) == 1 / (1 - Q)  # zeta'(0) by the quotient rule

    def test_inverse_pair_order_12(self):
        for q in (F(1, 2), Q):
            th, ze = theta_series(q, 12), zeta_series(q, 12)
            assert th.compose(ze) == TSeries.x(12)
            assert ze.compose(th) == TSeries.x(12)

    def test_epsilon_low_orders(self):
        p = 1 - Q
        assert epsilon(0, Q) == 1
        assert epsilon(1, Q) == XPoly((0, p))
        # derivative of omega(t)^x at 0 is x(1-q); second coefficient has
        # leading coefficient p^2/2 in x^2
        assert epsilon(2, Q).coeff(2) == p**2 / 2

    def test_epsilon_at_zero(self):
        for k in range(1, 9):
            assert epsilon(k, Q)(F(0)) == 0

    def test_epsilon_closed_forms(self):
        for k in range(9):
            assert epsilon_closed(k, Q, "derived") == epsilon(k, Q)
        # the variant with inner index k-j disagrees from k=1 on
        assert epsilon_closed(1, Q, "printed") != epsilon(1, Q)

    def test_bracket_frozen(self):
        assert bracket_y(0, Q) == 1
        assert bracket_y(1, Q) == XPoly((0, 1 - Q))  # p*y

    def test_bracket_matches_exponential_series(self):
        # [y]_n = n! [z^n] exp(y theta(z))
        order = 8
        th = theta_series(Q, order)
        y_theta = th.map(lambda c: c * XPoly.x())
        composed = exp_series(order).compose(y_theta)
        for n in range(order + 1):
            got = composed.coeff(n)
            got = got if isinstance(got, XPoly) else XPoly.const(got)
            assert math.factorial(n) * got == bracket_y(n, Q)

    def test_bracket_equals_scaled_epsilon(self):
        for n in range(9):
            assert bracket_y(n, Q) == math.factorial(n) * epsilon(n, Q)

    def test_varpi(self):
        assert varpi(0, 0, Q) == 1
        assert varpi(1, 1, Q) == 1 - Q
        th = theta_series(Q, 8)
        power = TSeries.one(8)
        for m in range(9):
            for n in range(m, 9):
                assert varpi(m, n, Q) == math.factorial(n) * power.coeff(n)
            power = power * th

    def test_varrho(self):
        assert varrho(0, 0, Q) == 1
        for k in range(1, 9):
            assert varrho(1, k, Q) == kappa(k, Q)
        ze = zeta_series(Q, 8)
        power = TSeries.one(8)
        for m in range(9):
            for k in range(m, 9):
                assert varrho(m, k, Q) == math.factorial(k) * power.coeff(k)
            power = power * ze

    def test_rho_scaling(self):
        r = F(3)
        assert rho_scaling(0, 0, Q, r, "literal") == 1
        assert rho_scaling(0, 0, Q, r, "corrected") == 1
        assert rho_scaling(1, 1, Q, r, "corrected") == Q * r  # xi'(0) = r q
        xi = r * log1p_scaled_series(Q, 8)
        power = TSeries.one(8)
        for m in range(9):
            for k in range(m, 9):
                assert rho_scaling(m, k, Q, r, "corrected") == math.factorial(k) * power.coeff(k)
            power = power * xi
        # the literal weights drop the r powers and use q^m
        assert rho_scaling(1, 1, Q, r, "literal") == Q
        assert rho_scaling(1, 2, Q, r, "literal") != rho_scaling(1, 2, Q, r, "corrected")
