"""Special functions shared by every closed form in the library.

Three primitives cover all analytic expressions downstream:

* ``kappa(delta)`` -- the constant ``pi*delta/sin(pi*delta)``, equal to
  ``Gamma(1+delta)*Gamma(1-delta)``, which scales the unconditional
  interference exponent.
* ``int_I(u, delta)`` -- the increasing function
  ``delta * int_0^u t**delta / (1+t) dt`` appearing in every
  void-conditioned Laplace transform.
* ``gauss_Q(z)`` -- the standard normal CCDF, needed by the Levy-law
  prior and by Monte Carlo confidence intervals.

``power_gap(u, delta) = u**delta - int_I(u, delta)`` is exposed as well
because the difference itself is what the posterior exponent needs:
computing it directly (as ``delta * int_0^u t**(delta-1)/(1+t) dt``)
avoids the catastrophic cancellation that ``u**delta - int_I(u)`` would
suffer for large ``u``, where both terms diverge but the gap stays
below ``kappa(delta)``.
"""

from __future__ import annotations

import math

from scipy import integrate, special

# Above this point the tail series for power_gap converges to machine
# precision in < 20 terms (ratio 1/u per term).
_TAIL_SWITCH = 10.0


def kappa(delta: float) -> float:
    """Evaluate ``pi*delta/sin(pi*delta)`` for ``delta`` in (0, 1).

    Increasing from 1 (at delta -> 0) and diverging as delta -> 1.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0,1), got {delta}")
    return math.pi * delta / math.sin(math.pi * delta)


def power_gap(u: float, delta: float) -> float:
    """Compute ``delta * int_0^u t**(delta-1)/(1+t) dt``.

    Equals ``u**delta - int_I(u, delta)``; increases from 0 to
    ``kappa(delta)`` as u grows. The integrable endpoint singularity is
    removed with the substitution ``v = t**delta``; for large u the
    complement ``kappa - tail`` is used instead, with the tail summed as
    an alternating series in powers of 1/u.
    """
    if u < 0:
        raise ValueError(f"u must be nonnegative, got {u}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0,1), got {delta}")
    if u == 0.0:
        return 0.0
    if u <= _TAIL_SWITCH:
        inv = 1.0 / delta
        val, _ = integrate.quad(lambda v: 1.0 / (1.0 + v**inv), 0.0, u**delta,
                                epsabs=1e-13, epsrel=1e-13, limit=200)
        return val
    return kappa(delta) - _gap_tail(u, delta)


def _gap_tail(u: float, delta: float) -> float:
    """Sum ``delta * int_u^inf t**(delta-1)/(1+t) dt`` for u > 1.

    Expanding 1/(1+t) in powers of 1/t gives the alternating series
    ``delta * sum_k (-1)**k u**(delta-1-k) / (k+1-delta)``.
    """
    total = 0.0
    term_pow = u ** (delta - 1.0)
    for k in range(200):
        term = term_pow / (k + 1.0 - delta)
        total += term if k % 2 == 0 else -term
        if term < 1e-18 * max(abs(total), 1e-300):
            break
        term_pow /= u
    return delta * total


def int_I(u: float, delta: float) -> float:
    """Evaluate ``delta * int_0^u t**delta/(1+t) dt``.

    Nonnegative, strictly increasing in u, with derivative
    ``delta*u**delta/(1+u)`` and ``int_I(0) = 0``.
    """
    if u < 0:
        raise ValueError(f"u must be nonnegative, got {u}")
    return u**delta - power_gap(u, delta)


def gauss_Q(z: float) -> float:
    """Standard normal CCDF, ``P(Z >= z)`` for ``Z ~ N(0,1)``."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def gauss_Q_complex(z: complex) -> complex:
    """Analytic continuation of :func:`gauss_Q` to complex arguments.

    Needed when the no-fading Laplace transform is evaluated off the
    real axis during numerical inversion.
    """
    return 0.5 * special.erfc(z / math.sqrt(2.0))
