"""Correlation of the protocol and physical success indicators.

In the dimensionless variable ``chi = r_O**alpha / sigma`` the Pearson
correlation of the two Bernoulli indicators is

    rho(chi) = expm1(B - C) / sqrt(expm1(A) * expm1(B))

with the exponents of :mod:`guardzone.single_obs` rewritten as functions
of chi: ``B = a * chi**delta`` and ``C = a * int_I(chi, delta)`` for the
single scale ``a = density * c_n * sigma**delta``. The correlation
vanishes at both extremes and peaks at some ``chi > 1`` solving

    (1 - chi) * exp(B) + (1 + chi) * exp(C) = 2.

Uniqueness of that stationary point is conjectured, not proven, so the
solver scans for every root in its certified bracket and returns the
global maximizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import specfn
from .params import ModelParams, derive
from .single_obs import prior_exponent


@dataclass(frozen=True)
class CorrelationCurve:
    chi_grid: np.ndarray
    rho_values: np.ndarray


class BracketError(RuntimeError):
    """No sign change found for the stationarity equation."""


def _coeff(p: ModelParams) -> tuple[float, float]:
    """(a, delta) with a = density * c_n * sigma**delta."""
    d = derive(p)
    return p.density * d.c_n * d.sigma**d.delta, d.delta


def rho(p: ModelParams, chi: float) -> float:
    """Correlation of the two success indicators at dimensionless chi > 0."""
    if not chi > 0:
        raise ValueError(f"chi must be positive, got {chi}")
    a, delta = _coeff(p)
    A = prior_exponent(p)
    if A <= 0:
        raise ValueError("degenerate scenario: prior exponent is zero")
    B = a * chi**delta
    BmC = a * specfn.power_gap(chi, delta)
    # expm1(B) = exp(B) * (-expm1(-B)); keeping exp(-B/2) outside the
    # square root avoids overflow for large chi, where B is huge but the
    # numerator stays bounded by expm1(a * kappa)
    return math.expm1(BmC) * math.exp(-0.5 * B) / math.sqrt(
        math.expm1(A) * -math.expm1(-B))


def rho_curve(p: ModelParams, chi_grid) -> CorrelationCurve:
    grid = np.asarray(chi_grid, dtype=float)
    return CorrelationCurve(grid, np.array([rho(p, c) for c in grid]))


def f1(p: ModelParams, chi: float) -> float:
    """(1 - chi) * exp(B(chi)); intersects f2 at the maximizing chi."""
    a, delta = _coeff(p)
    return (1.0 - chi) * math.exp(a * chi**delta)


def f2(p: ModelParams, chi: float) -> float:
    """2 - (1 + chi) * exp(C(chi)), concave decreasing."""
    a, delta = _coeff(p)
    C = a * specfn.int_I(chi, delta)
    return 2.0 - (1.0 + chi) * math.exp(C)


def _stationarity(a: float, delta: float, chi: float) -> float:
    """Scaled residual of the stationarity equation.

    Dividing (1-chi)e^B + (1+chi)e^C - 2 by e^C keeps everything bounded:
    B - C <= a*kappa regardless of chi.
    """
    BmC = a * specfn.power_gap(chi, delta)
    C = a * specfn.int_I(chi, delta)
    return (1.0 - chi) * math.exp(BmC) + (1.0 + chi) - 2.0 * math.exp(-C)


def chi_star_from_coeff(a: float, delta: float) -> float:
    """Maximizing chi as a function of the scale a = density*c_n*sigma**delta.

    The bracket [1, chi_hat] is certified: chi_hat solves
    ``B - C = log((1+chi)/(chi-1))`` (monotone increasing vs. monotone
    decreasing), where the scaled residual is strictly negative, while it
    is strictly positive at chi = 1. Additional sign changes inside the
    bracket are scanned for on a log grid; the global maximizer of rho
    among all roots is returned.
    """
    if not a > 0:
        raise ValueError("coefficient a must be positive")

    def g_diff(chi):
        return a * specfn.power_gap(chi, delta) - math.log((chi + 1.0) / (chi - 1.0))

    # expand upper end geometrically until g1 > g2 (always happens since
    # g2 -> 0 and g1 -> a*kappa > 0)
    hi = 2.0
    while g_diff(hi) < 0:
        hi *= 2.0
        if hi > 1e18:
            raise BracketError("failed to bracket chi_hat")
    chi_hat = optimize.brentq(g_diff, 1.0 + 1e-12, hi, xtol=1e-13, rtol=1e-14)

    resid = lambda chi: _stationarity(a, delta, chi)
    grid = np.geomspace(1.0 + 1e-9, chi_hat, 64)
    vals = np.array([resid(c) for c in grid])
    roots = []
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(grid[i])
        elif vals[i] * vals[i + 1] < 0:
            roots.append(optimize.brentq(resid, grid[i], grid[i + 1],
                                         xtol=1e-14, rtol=1e-14))
    if not roots:
        raise BracketError(
            "no stationary point found in the certified bracket "
            f"[1, {chi_hat:g}]")

    def rho_of(chi):
        B = a * chi**delta
        BmC = a * specfn.power_gap(chi, delta)
        return math.expm1(BmC) * math.exp(-0.5 * B) / math.sqrt(-math.expm1(-B))

    return max(roots, key=rho_of)


def chi_star(p: ModelParams) -> float:
    """Dimensionless radius maximizing the indicator correlation."""
    a, delta = _coeff(p)
    return chi_star_from_coeff(a, delta)


def chi_star_low_density_limit(delta: float) -> float:
    """Limit of chi_star as the scale a -> 0: the root of
    ``int_I(chi, delta) = ((chi-1)/(chi+1)) * chi**delta``."""

    def h(chi):
        return specfn.int_I(chi, delta) - (chi - 1.0) / (chi + 1.0) * chi**delta

    hi = 2.0
    while h(hi) > 0:
        hi *= 2.0
        if hi > 1e18:
            raise BracketError("failed to bracket the low-density limit")
    return optimize.brentq(h, 1.0 + 1e-12, hi, xtol=1e-13, rtol=1e-14)
