"""Prior, evidence, and posterior for one protocol observation (Rayleigh fading).

Success under the physical model means the receiver SINR clears the
threshold; success under the protocol model means the guard zone of
radius ``r_O`` around the receiver is free of interferers. Three
nonnegative exponents capture every distribution involved:

    A            -- prior exponent:     P(physical success)  = exp(-A)
    B(r_O)       -- evidence exponent:  P(guard zone clear)  = exp(-B)
    C(r_O)       -- coupling exponent:  P(both)              = exp(-A-C)

so the posterior given a clear guard zone is ``exp(-A + B - C)``. All
probabilities are assembled in log-space and exponentiated once: ``B``
alone overflows ``exp`` for large radii while ``B - C`` stays bounded
by ``density * c_n * kappa * sigma**delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import specfn
from .params import _UNIT_BALL_VOLUME, DerivedParams, ModelParams, chi_of_radius, derive


@dataclass(frozen=True)
class AbcTerms:
    """The three exponents; ``A`` does not depend on the radius."""

    A: float
    B: float
    C: float


@dataclass(frozen=True)
class PosteriorTable:
    """Conditional success probabilities P(physical | protocol) for all
    four (hypothesis, observation) combinations.

    Columns sum to one: ``p_h1_d1 + p_h0_d1 == 1`` and likewise for d=0.
    """

    p_h1_d1: float
    p_h1_d0: float
    p_h0_d1: float
    p_h0_d0: float


def _interference_coeff(p: ModelParams, d: DerivedParams) -> float:
    """density * c_n * sigma**delta, the scale of every exponent."""
    return p.density * d.c_n * d.sigma**d.delta


def prior_exponent(p: ModelParams, d: DerivedParams | None = None) -> float:
    """Exponent A with ``P(physical success) = exp(-A)``."""
    d = d or derive(p)
    return _interference_coeff(p, d) * d.kappa_delta + d.sigma * p.eta


def prior_success(p: ModelParams) -> float:
    """Unconditional probability the reference SINR clears the threshold."""
    return math.exp(-prior_exponent(p))


def evidence_success(p: ModelParams, r_O: float) -> float:
    """Void probability of the guard zone, ``exp(-density * c_n * r_O**n)``."""
    if r_O < 0:
        raise ValueError(f"r_O must be nonnegative, got {r_O}")
    return math.exp(-p.density * _UNIT_BALL_VOLUME[p.n] * r_O**p.n)


def abc_terms(p: ModelParams, r_O: float) -> AbcTerms:
    """Evaluate A, B(r_O), C(r_O) for a positive guard-zone radius."""
    if not r_O > 0:
        raise ValueError(f"r_O must be positive, got {r_O}")
    d = derive(p)
    chi = chi_of_radius(d, r_O)
    coeff = _interference_coeff(p, d)
    return AbcTerms(
        A=coeff * d.kappa_delta + d.sigma * p.eta,
        B=p.density * d.c_n * r_O**p.n,
        C=coeff * specfn.int_I(chi, d.delta),
    )


def _log_posterior_11(p: ModelParams, d: DerivedParams, r_O: float) -> float:
    """log P(physical success | guard zone clear) = -A + B - C.

    Uses ``B - C = coeff * power_gap(chi)`` directly, which is stable for
    arbitrarily large radii (the gap saturates at kappa).
    """
    chi = chi_of_radius(d, r_O)
    coeff = _interference_coeff(p, d)
    gap = specfn.power_gap(chi, d.delta)
    return -d.sigma * p.eta - coeff * (d.kappa_delta - gap)


def posterior(p: ModelParams, r_O: float) -> PosteriorTable:
    """Posterior distribution of physical success given the protocol outcome.

    Rejects ``r_O = 0`` and non-finite radii: conditioning on a failed
    (resp. clear) guard zone is then a null event. The limiting values
    are exposed by :func:`posterior_limit_small` / ``..._large`` instead.
    """
    if not (r_O > 0 and math.isfinite(r_O)):
        raise ValueError(
            f"posterior requires a finite positive r_O, got {r_O}")
    d = derive(p)
    p11 = math.exp(_log_posterior_11(p, d, r_O))
    pH = prior_success(p)
    pD = evidence_success(p, r_O)
    # completeness: p_H(1) = p(1|1) p_D(1) + p(1|0) (1 - p_D(1))
    p10 = (pH - p11 * pD) / (1.0 - pD)
    p10 = min(max(p10, 0.0), 1.0)
    return PosteriorTable(p_h1_d1=p11, p_h1_d0=p10,
                          p_h0_d1=1.0 - p11, p_h0_d0=1.0 - p10)


def posterior_limit_small(p: ModelParams) -> float:
    """Limit of P(success | clear) as r_O -> 0: the unconditional prior."""
    return prior_success(p)


def posterior_limit_large(p: ModelParams) -> float:
    """Limit of P(success | clear) as r_O -> inf: the no-interference
    ceiling ``exp(-sigma*eta)``."""
    d = derive(p)
    return math.exp(-d.sigma * p.eta)


def lt_interference_given_void(p: ModelParams, r_O: float, s: float) -> float:
    """Laplace transform E[exp(-s * I)] of the sum interference seen at the
    receiver, conditioned on an interferer-free ball of radius ``r_O``.

    ``log LT = density*c_n*(r_O**n - kappa*s**delta - s**delta*I(r_O**alpha/s))``.
    At ``s = sigma``, multiplied by ``exp(-sigma*eta)``, this is the
    posterior P(success | clear).
    """
    if s < 0:
        raise ValueError(f"s must be nonnegative, got {s}")
    if r_O < 0:
        raise ValueError(f"r_O must be nonnegative, got {r_O}")
    if s == 0.0:
        return 1.0
    d = derive(p)
    u = r_O**p.alpha / s
    # r_O**n = s**delta * u**delta, so the bracket is
    # -s**delta * (kappa - power_gap(u)), bounded and stable.
    gap = specfn.power_gap(u, d.delta)
    log_lt = -p.density * d.c_n * s**d.delta * (d.kappa_delta - gap)
    return math.exp(log_lt)
