"""Single-property verification runners behind the `verify` subcommand.

Each runner returns (passed, detail).  Exact properties compare rationals
with zero tolerance; numeric properties state their tolerance in the
detail string.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
from mpmath import mp

from .config import Config
from .measure import MeasureModel, Params, to_mpf
from .operators import (
    ChaosVector,
    scale_expansion,
    scale_substitution,
    translate,
    translation_series_residuals,
)
from .polys import (
    K_bell,
    K_epsilon,
    K_from_P,
    K_series,
    K_stirling,
    P_bell,
    P_from_K,
    P_from_K_stirling2,
    P_series,
    XPoly,
    addition_P3,
    addition_P4,
    classical_K,
    monomial_from_K,
)

PROPERTIES = (
    "p1",
    "p2",
    "p3",
    "p4",
    "cross",
    "normalization",
    "limit",
    "scaling",
    "translation",
)


def classical_limit_max_error(p, r, lam, n_max: int = 6) -> Fraction:
    """Largest relative coefficient error between the degenerate family at
    (beta=1, lam) and the classical family, through degree n_max; exact."""
    degen = K_series(Params.make(lam, 1, p, r), n_max)
    classic = classical_K(p, r, n_max)
    worst = Fraction(0)
    for n in range(n_max + 1):
        for i in range(n + 1):
            a, b = degen[n].coeff(i), classic[n].coeff(i)
            err = abs(a - b) / abs(b) if b else abs(a)
            worst = max(worst, err)
    return worst


def _verify_p1(config: Config):
    a = K_series(config.params, config.n_max)
    b = K_from_P(config.params, config.n_max)
    return a.members == b.members, f"exact member equality through n={config.n_max}"


def _verify_p2(config: Config):
    for n in range(config.n_max + 1):
        if monomial_from_K(n, config.params) != XPoly([0] * n + [1]):
            return False, f"monomial reconstruction fails at n={n}"
    return True, f"x^n rebuilt exactly for n<={config.n_max}"


def _verify_p3(config: Config, variant: str = "corrected"):
    top = min(8, config.n_max)
    for n in range(top + 1):
        if not addition_P3(n, config.params, variant).is_zero():
            return False, f"variant={variant}: nonzero residual at n={n}"
    return True, f"variant={variant}: zero residual through n={top}"


def _verify_p4(config: Config):
    for n in range(config.n_max + 1):
        if not addition_P4(n, config.params).is_zero():
            return False, f"nonzero residual at n={n}"
    return True, f"zero residual through n={config.n_max}"


def _verify_cross(config: Config):
    params, n_max = config.params, config.n_max
    base = K_series(params, n_max)
    for fam in (
        K_epsilon(params, n_max),
        K_from_P(params, n_max),
        K_bell(params, n_max, "corrected"),
        K_stirling(params, n_max, "oracle"),
    ):
        if fam.members != base.members:
            return False, f"main-family route {fam.route} diverges"
    top = min(8, n_max)
    p_base = P_series(params, top)
    for fam in (P_bell(params, top), P_from_K(params, top), P_from_K_stirling2(params, top)):
        if fam.members != p_base.members:
            return False, f"companion route {fam.route} diverges"
    return True, f"5 main routes (n<={n_max}) and 4 companion routes (n<={top}) agree exactly"


def _verify_normalization(config: Config):
    model = MeasureModel(config.params, config.precision_digits)
    with mp.workdps(config.precision_digits + 10):
        sums, cutoff = model.truncated_moment_sums(8)
        if not (sums[0] <= 1 and 1 - sums[0] < mpmath.mpf(10) ** -20):
            return False, f"mass {mpmath.nstr(sums[0], 25)} outside [1-1e-20, 1]"
        for m in range(9):
            exact = to_mpf(model.moment_exact(m))
            if abs(sums[m] - exact) / max(abs(exact), mp.mpf(1)) >= mpmath.mpf(10) ** -20:
                return False, f"moment oracle gap at m={m}"
    return True, f"mass within 1e-20 of 1 (cutoff {cutoff}); moments m<=8 within 1e-20 relative"


def _verify_limit(config: Config):
    p, r = config.params.p, config.params.r
    errs = [classical_limit_max_error(p, r, Fraction(-1, 10**k)) for k in (4, 5, 6)]
    if errs[2] >= Fraction(1, 10**4):
        return False, f"relative error at lam=-1e-6 is {float(errs[2]):.3e} >= 1e-4"
    for a, b in zip(errs, errs[1:]):
        ratio = a / b
        if not Fraction(9) <= ratio <= Fraction(11):
            return False, f"error ratio {float(ratio):.3f} not linear in lambda"
    return True, (
        "max relative errors "
        + ", ".join(f"{float(e):.3e}" for e in errs)
        + " at lam=-1e-4,-1e-5,-1e-6; decade ratios within [9, 11]"
    )


def _verify_scaling(config: Config, variant: str = "corrected"):
    params = config.params
    zs = (Fraction(2), Fraction(1, 3), Fraction(-1))
    for deg in range(9):
        basis_vec = ChaosVector.make([0] * deg + [1])
        for z in zs:
            if scale_expansion(basis_vec, z, params, variant) != scale_substitution(basis_vec, z, params):
                return False, f"variant={variant}: mismatch at basis degree {deg}, z={z}"
    v = ChaosVector.make([Fraction(3, 7), Fraction(-2), Fraction(5, 3), 0, Fraction(1, 9)])
    for z1, z2 in ((Fraction(2), Fraction(1, 3)), (Fraction(-1), Fraction(5, 2))):
        lhs = scale_substitution(scale_substitution(v, z1, params), z2, params)
        if lhs != scale_substitution(v, z1 * z2, params):
            return False, f"composition law fails at z={z1},{z2}"
    return True, "expansion equals substitution for basis degrees <= 8, z in {2, 1/3, -1}; composition law holds"


def _verify_translation(config: Config):
    params = config.params
    v = ChaosVector.make([Fraction(1, 2), Fraction(2), 0, Fraction(-3, 5), Fraction(7)])
    pairs = ((Fraction(1, 3), Fraction(2, 3)), (Fraction(-1, 2), Fraction(5, 4)))
    for y1, y2 in pairs:
        if translate(translate(v, y1, params), y2, params) != translate(v, y1 + y2, params):
            return False, f"group law fails at y={y1},{y2}"
    resid = translation_series_residuals(params, Fraction(2, 7), 12)
    if not all(rp.is_zero() for rp in resid):
        return False, "kernel multiplication identity fails within order 12"
    return True, "group law exact; e^(yz) kernel action verified through order 12"


def verify_property(config: Config, prop: str, variant: str = "corrected"):
    if prop == "p1":
        return _verify_p1(config)
    if prop == "p2":
        return _verify_p2(config)
    if prop == "p3":
        return _verify_p3(config, variant)
    if prop == "p4":
        return _verify_p4(config)
    if prop == "cross":
        return _verify_cross(config)
    if prop == "normalization":
        return _verify_normalization(config)
    if prop == "limit":
        return _verify_limit(config)
    if prop == "scaling":
        return _verify_scaling(config, variant)
    if prop == "translation":
        return _verify_translation(config)
    raise ValueError(f"unknown property {prop!r}")
