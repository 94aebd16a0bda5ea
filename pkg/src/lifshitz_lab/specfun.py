"""Polylogarithms, the exponential integral and Apery's constant.

Only the real arguments that occur in the Casimir asymptotics are supported:
``Li_n(z)`` for ``n`` in 2..5 with ``|z| <= 1`` and ``Ei(x)`` for ``x < 0``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import bernoulli, zeta

EULER_GAMMA = 0.57721566490153286061

POLYLOG_ORDERS = (2, 3, 4, 5)

# |z| at or below this value is summed directly; above it the expansion in
# ln(z) converges faster.
_DIRECT_RADIUS = 0.5
_SERIES_RTOL = 1e-16
_EI_SERIES_LIMIT = 4.0


class DomainError(ValueError):
    """Raised when an argument is outside the supported domain."""


@lru_cache(maxsize=None)
def _zeta_table(n: int, kmax: int = 60) -> tuple[float, ...]:
    """Values zeta(n - k) for k = 0..kmax; the pole entry k = n-1 is NaN."""
    bern = bernoulli(kmax + 2)
    out = []
    for k in range(kmax + 1):
        s = n - k
        if s == 1:
            out.append(math.nan)
        elif s >= 2:
            out.append(float(zeta(s)))
        elif s == 0:
            out.append(-0.5)
        else:
            m = -s
            # zeta(-m) = (-1)^m B_{m+1} / (m+1)
            out.append((-1) ** m * float(bern[m + 1]) / (m + 1))
    return tuple(out)


def _check_order(order: int) -> int:
    if order not in POLYLOG_ORDERS:
        raise DomainError(f"polylog order must be one of {POLYLOG_ORDERS}, got {order!r}")
    return int(order)


def _polylog_direct(n: int, z: float) -> float:
    total = 0.0
    power = 1.0
    k = 1
    while True:
        power *= z
        term = power / k**n
        total += term
        if abs(term) <= _SERIES_RTOL * abs(total) or term == 0.0:
            break
        k += 1
    return total


def _polylog_log_series(n: int, z: float) -> float:
    # Li_n(e^mu) = sum_{k != n-1} zeta(n-k) mu^k/k! + mu^(n-1)/(n-1)! [H_{n-1} - ln(-mu)]
    # valid for |mu| < 2 pi; here 0 < z <= 1 so mu = ln z <= 0.
    mu = math.log(z)
    if mu == 0.0:
        return float(zeta(n))
    table = _zeta_table(n)
    harmonic = sum(1.0 / j for j in range(1, n))
    total = 0.0
    mu_pow = 1.0
    fact = 1.0
    for k in range(len(table)):
        if k > 0:
            mu_pow *= mu
            fact *= k
        if k == n - 1:
            term = mu_pow / fact * (harmonic - math.log(-mu))
        else:
            term = table[k] * mu_pow / fact
        total += term
        # zeta at negative even integers vanishes, so a zero term says nothing
        if k > n and term != 0.0 and abs(term) <= _SERIES_RTOL * abs(total):
            break
    return total


def polylog(order: int, z: float) -> float:
    """Real polylogarithm ``Li_order(z) = sum_k z^k / k^order`` for ``|z| <= 1``.

    Parameters
    ----------
    order : int
        One of 2, 3, 4, 5.
    z : float
        Argument with ``|z| <= 1``.

    Returns
    -------
    float
        Accurate to about 1e-15 absolute over the whole domain.
    """
    n = _check_order(order)
    z = float(z)
    if not abs(z) <= 1.0:
        raise DomainError(f"polylog argument must satisfy |z| <= 1, got {z!r}")
    if z == 0.0:
        return 0.0
    if abs(z) <= _DIRECT_RADIUS:
        return _polylog_direct(n, z)
    if z > 0.0:
        return _polylog_log_series(n, z)
    # Li_n(z) + Li_n(-z) = 2^(1-n) Li_n(z^2), with z^2 and -z both in (0.25, 1]
    z2 = z * z
    li_z2 = _polylog_direct(n, z2) if z2 <= _DIRECT_RADIUS else _polylog_log_series(n, z2)
    return 2.0 ** (1 - n) * li_z2 - _polylog_log_series(n, -z)


def polylog_array(order: int, z) -> np.ndarray:
    """Elementwise :func:`polylog` over an array."""
    z = np.asarray(z, dtype=float)
    flat = [polylog(order, v) for v in z.ravel()]
    return np.asarray(flat, dtype=float).reshape(z.shape)


def _ei_series(x: float) -> float:
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= x / k
        contrib = term / k
        total += contrib
        if abs(contrib) <= _SERIES_RTOL * abs(total):
            break
        k += 1
    return EULER_GAMMA + math.log(-x) + total


def _e1_continued_fraction(t: float) -> float:
    # E1(t) = e^-t / (t + 1 - 1/(t + 3 - 4/(t + 5 - ...))), modified Lentz.
    tiny = 1e-300
    b = t + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-t)


def exp_integral_ei(x: float) -> float:
    """Exponential integral ``Ei(x)`` on the negative real axis.

    Uses the power series for ``|x| <= 4`` and the continued fraction for
    ``E1(-x)`` beyond, with ``Ei(x) = -E1(-x)``.
    """
    x = float(x)
    if not x < 0.0:
        raise DomainError(f"exp_integral_ei requires x < 0, got {x!r}")
    if -x <= _EI_SERIES_LIMIT:
        return _ei_series(x)
    return -_e1_continued_fraction(-x)


def zeta3() -> float:
    """Apery's constant from the central-binomial series.

    ``zeta(3) = 5/2 * sum_k (-1)^(k+1) / (k^3 C(2k, k))``.
    """
    return _zeta3_cached()


@lru_cache(maxsize=1)
def _zeta3_cached() -> float:
    terms = []
    binom = 1.0
    for k in range(1, 40):
        binom = binom * (2 * k) * (2 * k - 1) / (k * k)
        term = (-1) ** (k + 1) / (k**3 * binom)
        terms.append(term)
        if abs(term) < 1e-18:
            break
    return 2.5 * math.fsum(terms)
