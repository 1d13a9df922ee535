"""Bayes risk of guard-zone decision rules, the optimal radius, and the ROC.

A decision rule maps the protocol observation (guard zone clear or not)
to a prediction of physical success. The expected cost under a 2x2 cost
matrix is quasi-convex in the radius; its interior minimizer solves a
monotone-vs-monotone crossing equation, which certifies bracketing for
the root finder. Under uniform costs the two conditional risks are the
Type I (false rejection of physical failure) and Type II (false
acceptance) error probabilities traced out as the ROC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import specfn
from .params import ModelParams, chi_of_radius, derive
from .single_obs import (abc_terms, evidence_success, posterior,
                         prior_success)


@dataclass(frozen=True)
class CostMatrix:
    """Costs c_ij of deciding i when hypothesis j holds (j=1: success)."""

    c00: float
    c01: float
    c10: float
    c11: float

    def __post_init__(self):
        if min(self.c00, self.c01, self.c10, self.c11) < 0:
            raise ValueError("cost entries must be nonnegative")

    @classmethod
    def uniform(cls) -> "CostMatrix":
        """Unit cost for errors, zero for correct decisions."""
        return cls(0.0, 1.0, 1.0, 0.0)

    @property
    def gamma(self) -> float:
        """c10 - c00, the extra cost of a false 'success' call."""
        return self.c10 - self.c00

    @property
    def nu(self) -> float:
        """c01 - c11, the extra cost of a false 'failure' call."""
        return self.c01 - self.c11

    def require_regular(self):
        if not (self.gamma > 0 and self.nu > 0):
            raise ValueError(
                "optimization requires wrong decisions to cost more than "
                f"right ones (c10 > c00 and c01 > c11); got {self}")


@dataclass(frozen=True)
class SingleObsRule:
    """Prediction (g0, g1) made on observing a busy / clear guard zone."""

    g0: int
    g1: int

    def __post_init__(self):
        if self.g0 not in (0, 1) or self.g1 not in (0, 1):
            raise ValueError("rule outputs must be 0 or 1")

    @classmethod
    def identity(cls):
        return cls(0, 1)

    @classmethod
    def complement(cls):
        return cls(1, 0)

    @classmethod
    def always(cls, h: int):
        return cls(h, h)


ALL_SINGLE_OBS_RULES = (SingleObsRule(0, 0), SingleObsRule(0, 1),
                        SingleObsRule(1, 0), SingleObsRule(1, 1))


@dataclass(frozen=True)
class RocPoint:
    r_O: float
    p_I: float
    p_II: float
    risk: float


@dataclass(frozen=True)
class OptimalRadius:
    """Result of the risk minimization.

    ``exists`` is False when the interior-optimum condition
    ``log(1 + nu/gamma) > sigma*eta`` fails; the risk then decreases
    toward its boundary value as r_O -> inf and ``r_O`` is ``inf``.
    """

    exists: bool
    r_O: float
    risk: float


def bayes_risk(p: ModelParams, cost: CostMatrix, r_O: float) -> float:
    """Expected cost of the identity rule at guard-zone radius r_O."""
    t = abc_terms(p, r_O)
    return (cost.c00
            + (cost.c01 - cost.c00) * math.exp(-t.A)
            + (cost.c10 - cost.c00) * math.exp(-t.B)
            + (cost.c11 + cost.c00 - cost.c10 - cost.c01) * math.exp(-t.A - t.C))


def _f_left(p: ModelParams, cost: CostMatrix, r_O: float) -> float:
    """log(1 + 1/chi) - log(1 + nu/gamma); decreasing from +inf."""
    d = derive(p)
    chi = chi_of_radius(d, r_O)
    return math.log1p(1.0 / chi) - math.log1p(cost.nu / cost.gamma)


def _f_right(p: ModelParams, r_O: float) -> float:
    """-A + B - C; increasing from -A up to -sigma*eta."""
    d = derive(p)
    chi = chi_of_radius(d, r_O)
    coeff = p.density * d.c_n * d.sigma**d.delta
    return -d.sigma * p.eta - coeff * (d.kappa_delta - specfn.power_gap(chi, d.delta))


def optimal_radius(p: ModelParams, cost: CostMatrix) -> OptimalRadius:
    """Radius minimizing the identity-rule Bayes risk.

    The stationarity condition is the crossing of a decreasing and an
    increasing function of r_O, so once a sign change is bracketed the
    root is unique. Nonexistence (noise too strong relative to the cost
    asymmetry) is returned as a tagged boundary outcome, not raised.
    """
    cost.require_regular()
    d = derive(p)
    if not math.log1p(cost.nu / cost.gamma) > d.sigma * p.eta:
        boundary = cost.c00 + (cost.c01 - cost.c00) * prior_success(p)
        return OptimalRadius(exists=False, r_O=math.inf, risk=boundary)

    def h(r):
        return _f_left(p, cost, r) - _f_right(p, r)

    lo = 1e-6 * p.r_T
    hi = 2.0 * p.r_T
    while h(hi) > 0:
        hi *= 2.0
        if hi > 1e15 * p.r_T:
            raise RuntimeError("failed to bracket the optimal radius")
    r_star = optimize.brentq(h, lo, hi, xtol=1e-14, rtol=1e-15)
    chi = chi_of_radius(d, r_star)
    t = abc_terms(p, r_star)
    risk_min = (cost.c00 + (cost.c01 - cost.c00) * math.exp(-t.A)
                - (cost.c10 - cost.c00) / chi * math.exp(-t.B))
    return OptimalRadius(exists=True, r_O=r_star, risk=risk_min)


def sensitivities(p: ModelParams, cost: CostMatrix) -> tuple[float, float]:
    """(d r*/d density, d r*/d sigma) at the optimal radius, for eta = 0.

    Both are strictly positive: denser networks and stricter SINR
    requirements both push the optimal guard zone outward.
    """
    if p.eta != 0:
        raise ValueError("sensitivities are defined for the noiseless case only")
    opt = optimal_radius(p, cost)
    if not opt.exists:
        raise ValueError("no interior optimum; sensitivities undefined")
    d = derive(p)
    r = opt.r_O
    chi = chi_of_radius(d, r)
    kap = d.kappa_delta
    Ichi = specfn.int_I(chi, d.delta)
    tail = kap + Ichi - chi**d.delta  # = delta * int_chi^inf t^(d-1)/(1+t) dt > 0
    denom = p.alpha * (1.0 + d.c_n * d.delta * p.density * r**p.n)
    d_dlam = d.sigma**d.delta * d.c_n * r * (1.0 + chi) * tail / denom
    bracket = (1.0 + p.density * d.c_n * d.delta * d.sigma**d.delta
               * ((1.0 + chi) * (kap + Ichi) - chi ** (d.delta + 1.0)))
    d_dsig = r * bracket / (d.sigma * denom)
    return d_dlam, d_dsig


def type_errors(p: ModelParams, r_O: float, rule: SingleObsRule) -> tuple[float, float]:
    """(Type I, Type II) error probabilities of ``rule`` at radius r_O.

    Type I: predicting success when the SINR test fails; Type II:
    predicting failure when it succeeds.
    """
    if not r_O > 0:
        raise ValueError(f"r_O must be positive, got {r_O}")
    post = posterior(p, r_O)
    pH = prior_success(p)
    pD = evidence_success(p, r_O)
    p_I = (1.0 - post.p_h1_d1) * pD / (1.0 - pH) * (rule.g1 - rule.g0) + rule.g0
    gbar1, gbar0 = 1 - rule.g1, 1 - rule.g0
    p_II = post.p_h1_d1 * pD / pH * (gbar1 - gbar0) + gbar0
    return min(max(p_I, 0.0), 1.0), min(max(p_II, 0.0), 1.0)


@dataclass(frozen=True)
class OperatingPoints:
    """Named radii on the ROC.

    ``r_DI``: smallest guard zone excluding any single interferer able to
    break the SINR threshold on its own (None when noise alone already
    does). ``r_MM``: radius where protocol and physical success
    probabilities match. ``r_EE``: equal Type I / Type II errors.
    """

    r_DI: float | None
    r_MM: float
    r_EE: float


def operating_points(p: ModelParams) -> OperatingPoints:
    d = derive(p)
    inv = 1.0 / d.sigma - p.eta
    r_di = inv ** (-1.0 / p.alpha) if inv > 0 else None
    r_mm = (d.kappa_delta * d.sigma**d.delta
            + d.sigma * p.eta / (p.density * d.c_n)) ** (1.0 / p.n)

    rule = SingleObsRule.identity()

    def gap(r):
        pi, pii = type_errors(p, r, rule)
        return pi - pii

    lo = 1e-6 * p.r_T
    hi = 2.0 * p.r_T
    # p_I starts at 1 (> p_II); expand until the sign flips
    while gap(hi) > 0:
        hi *= 2.0
        if hi > 1e15 * p.r_T:
            raise RuntimeError("failed to bracket the equal-error radius")
    r_ee = optimize.brentq(gap, lo, hi, xtol=1e-14, rtol=1e-15)
    return OperatingPoints(r_DI=r_di, r_MM=r_mm, r_EE=r_ee)


def roc_curve(p: ModelParams, r_O_grid, rule: SingleObsRule | None = None) -> list[RocPoint]:
    """Evaluate (p_I, p_II, uniform-cost risk) along an increasing grid."""
    grid = np.asarray(r_O_grid, dtype=float)
    if not (np.all(np.diff(grid) > 0) and grid[0] > 0):
        raise ValueError("r_O grid must be strictly increasing and positive")
    rule = rule or SingleObsRule.identity()
    pH = prior_success(p)
    pts = []
    for r in grid:
        p_i, p_ii = type_errors(p, r, rule)
        risk = p_i * (1.0 - pH) + p_ii * pH
        pts.append(RocPoint(r_O=float(r), p_I=p_i, p_II=p_ii, risk=risk))
    return pts
