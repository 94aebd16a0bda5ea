"""Closed-form asymptotics for the metal-dielectric Casimir interaction.

Ideal metal against a frequency-independent dielectric (correction factor
``psi_dm``, low- and high-temperature expansions), the plasma-metal /
one-oscillator corrections in the small parameters ``eta = delta / 2a`` and
``b = omega_c / omega_1``, and the dc-conductivity terms behind the residual
entropy.

Every expansion warns with :class:`AsymptoticWarning` outside its smallness
domain and still returns a value, so comparison sweeps can probe where an
expansion breaks down.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .geometry import GeometryThermalState
from .reflect import reflection_w
from .specfun import DomainError, polylog, zeta3
from .units import C_LIGHT, HBAR, K_B, omega_c


class AsymptoticWarning(UserWarning):
    """An expansion is evaluated outside its smallness domain."""


class Thermo(NamedTuple):
    free_energy: float
    pressure: float
    entropy: float


class ZeroT(NamedTuple):
    energy: float
    pressure: float


class RealCoefficients(NamedTuple):
    C1: float
    C2: float
    B: float


@dataclass(frozen=True)
class IdealExpansion:
    """Zero-temperature energy and low-temperature coefficients (units of ``hbar c / 32 pi^2 a^3``)."""

    E_a: float
    tau3_coeff: float
    tau4_coeff: float
    K4: float

    @property
    def gamma(self) -> float:
        return 240.0 * self.K4


@dataclass(frozen=True)
class RealMaterialExpansion:
    psi_dm: float
    C1: float
    C2: float
    B: float
    eta: float
    b: float


@dataclass(frozen=True)
class AsymptoticReport:
    """Analytic value next to a numerical reference.

    ``deviation`` is ``(analytic - numeric) / numeric``.
    """

    quantity: str
    analytic: float
    numeric: float
    leading: float | None = None
    subleading: float | None = None

    @property
    def deviation(self) -> float:
        if self.numeric == 0.0:
            return 0.0 if self.analytic == 0.0 else math.inf
        return (self.analytic - self.numeric) / self.numeric


def _check_eps0(eps0: float, strict: bool = False) -> float:
    eps0 = float(eps0)
    if math.isnan(eps0) or eps0 < 1.0 or (strict and eps0 == 1.0):
        bound = "> 1" if strict else ">= 1"
        raise DomainError(f"eps0 must be {bound}, got {eps0!r}")
    return eps0


def _warn(msg: str) -> None:
    warnings.warn(msg, AsymptoticWarning, stacklevel=3)


def _natural(a: float) -> float:
    return HBAR * C_LIGHT / (32.0 * math.pi**2 * a**3)


def _quad01(f) -> float:
    val, _ = integrate.quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def static_r0(eps0: float) -> float:
    """Zero-frequency TM reflection ``(eps0 - 1)/(eps0 + 1)`` of a dielectric."""
    eps0 = _check_eps0(eps0)
    return 1.0 if math.isinf(eps0) else (eps0 - 1.0) / (eps0 + 1.0)


@lru_cache(maxsize=256)
def psi_dm(eps0: float) -> float:
    """Correction factor to the ideal-metal Casimir energy, in ``[0, 1]``.

    ``(45 / pi^4) int_0^1 {Li4[r_tm(w)] + Li4[r_te(w)]} dw`` with ``w = zeta / y``.
    """
    eps0 = _check_eps0(eps0)
    if eps0 == 1.0:
        return 0.0

    def f(w):
        r_tm, r_te = reflection_w(eps0, w)
        return polylog(4, r_tm) + polylog(4, r_te)

    return 45.0 / math.pi**4 * _quad01(f)


def k4(eps0: float) -> float:
    """Coefficient of the ``tau^4`` term: ``(1 - 2 eps0^{3/2} + eps0^{5/2}) / 360``."""
    eps0 = _check_eps0(eps0)
    s = math.sqrt(eps0)
    # (s - 1)(s^4 + s^3 - s^2 - s - 1): exact zero at eps0 = 1, negative for eps0 below ~1.39
    return (s - 1.0) * (s**4 + s**3 - s**2 - s - 1.0) / 360.0 + 0.0


def tau3_coefficient(eps0: float) -> float:
    """``zeta(3) (eps0 - 1)^2 / (16 pi^2 (eps0 + 1))``."""
    eps0 = _check_eps0(eps0)
    return zeta3() * (eps0 - 1.0) ** 2 / (16.0 * math.pi**2 * (eps0 + 1.0))


def ideal_energy(eps0: float, a: float) -> float:
    """Zero-temperature energy per area, ideal metal against constant ``eps0`` (J/m^2)."""
    return -(math.pi**2) / 720.0 * HBAR * C_LIGHT * psi_dm(eps0) / a**3


def ideal_pressure(eps0: float, a: float) -> float:
    return -(math.pi**2) / 240.0 * HBAR * C_LIGHT * psi_dm(eps0) / a**4


def ideal_expansion(eps0: float, a: float) -> IdealExpansion:
    K4 = k4(eps0)
    return IdealExpansion(E_a=ideal_energy(eps0, a), tau3_coeff=tau3_coefficient(eps0), tau4_coeff=-K4, K4=K4)


def _low_t_entropy(eps0: float, a: float, tau: float, k4_eff: float) -> float:
    """Entropy from ``-dF/dT`` of ``-(hbar c / 32 pi^2 a^3)[A tau^3 - k4_eff tau^4]``."""
    if eps0 == 1.0:
        return 0.0
    lead = 3.0 * K_B * zeta3() * (eps0 - 1.0) ** 2 / (128.0 * math.pi**3 * a**2 * (eps0 + 1.0))
    sub = 64.0 * math.pi**2 * (eps0 + 1.0) * k4_eff / (3.0 * zeta3() * (eps0 - 1.0) ** 2)
    return lead * tau**2 * (1.0 - sub * tau)


def ideal_low_t(eps0: float, state: GeometryThermalState) -> Thermo:
    """Low-temperature free energy, pressure and entropy (ideal metal, constant ``eps0``)."""
    eps0 = _check_eps0(eps0)
    a, tau = state.a, state.tau
    if tau >= 1.0 or tau > 0.5:
        _warn(f"low-temperature expansion used at tau = {tau:.3g}")
    u = _natural(a)
    K4 = k4(eps0)
    F = ideal_energy(eps0, a) - u * (tau3_coefficient(eps0) * tau**3 - K4 * tau**4)
    P = ideal_pressure(eps0, a) - u / a * K4 * tau**4
    S = _low_t_entropy(eps0, a, tau, K4)
    return Thermo(F, P, S)


def high_t(eps0: float, state: GeometryThermalState) -> Thermo:
    """Classical limit: only the zero-frequency TM channel survives."""
    eps0 = _check_eps0(eps0)
    if state.tau < 5.0:
        _warn(f"high-temperature limit used at tau = {state.tau:.3g}")
    a, T = state.a, state.T
    li3 = polylog(3, static_r0(eps0))
    F = -K_B * T * li3 / (16.0 * math.pi * a**2)
    P = -K_B * T * li3 / (8.0 * math.pi * a**3)
    S = K_B * li3 / (16.0 * math.pi * a**2)
    return Thermo(F, P, S)


def _coefficient_integrals(eps0: float) -> tuple[float, float, float]:
    em1 = eps0 - 1.0

    def i1(w):
        r_tm, r_te = reflection_w(eps0, w)
        return w * w * polylog(4, r_tm) + polylog(4, r_te)

    def i2(w):
        r_tm, r_te = reflection_w(eps0, w)
        return w**4 * polylog(4, r_tm) + polylog(4, r_te)

    def ib(w):
        r_tm, r_te = reflection_w(eps0, w)
        w2 = w * w
        tm = (2.0 + (eps0 - 2.0) * w2) / (eps0 + 1.0 - w2) * polylog(5, r_tm)
        return w2 / math.sqrt(em1 * w2 + 1.0) * (tm + polylog(5, r_te))

    return _quad01(i1), _quad01(i2), _quad01(ib)


@lru_cache(maxsize=256)
def real_coefficients(eps0: float) -> RealCoefficients:
    """Positive coefficients ``C1``, ``C2`` (metal penetration) and ``B`` (dielectric dispersion).

    Memoized per ``eps0``; concurrent callers may compute the same entry twice.
    """
    eps0 = _check_eps0(eps0, strict=True)
    I1, I2, IB = _coefficient_integrals(eps0)
    norm = math.pi**4 * psi_dm(eps0)
    return RealCoefficients(135.0 * I1 / norm, 270.0 * I2 / norm, 540.0 * IB / norm)


def real_expansion(eps0: float, omega_p: float, omega_1: float, a: float) -> RealMaterialExpansion:
    """Coefficients and small parameters for a plasma metal against a one-oscillator dielectric."""
    c = real_coefficients(eps0)
    eta = C_LIGHT / omega_p / (2.0 * a) if math.isfinite(omega_p) else 0.0
    b = omega_c(a) / omega_1 if math.isfinite(omega_1) else 0.0
    if eta >= 0.5 or b >= 0.5:
        _warn(f"perturbative parameters out of range: eta = {eta:.3g}, b = {b:.3g}")
    return RealMaterialExpansion(psi_dm(eps0), c.C1, c.C2, c.B, eta, b)


def real_zero_t(eps0: float, omega_p: float, omega_1: float, a: float) -> ZeroT:
    """Energy and pressure at T = 0 to second order in ``delta / a`` and ``omega_c / omega_1``.

    ``omega_p = inf`` and ``omega_1 = inf`` recover the ideal-metal, constant-``eps0`` result.
    """
    x = real_expansion(eps0, omega_p, omega_1, a)
    d = 2.0 * x.eta  # delta / a
    b2 = x.b**2
    energy = -(math.pi**2) * HBAR * C_LIGHT / (720.0 * a**3) * x.psi_dm * (1.0 - x.C1 * d + x.C2 * d * d - x.B * b2)
    bracket_p = 1.0 - 4.0 / 3.0 * x.C1 * d + 5.0 / 3.0 * x.C2 * d * d - 5.0 / 3.0 * x.B * b2
    pressure = -(math.pi**2) * HBAR * C_LIGHT / (240.0 * a**4) * x.psi_dm * bracket_p
    return ZeroT(energy, pressure)


def eta_tau4_coefficient(eps0: float) -> float:
    """Coefficient of ``eta tau^4`` in the real-material thermal correction."""
    eps0 = _check_eps0(eps0)
    return (eps0 - 1.0) * (5.0 * eps0 + 11.0) / 960.0


def real_low_t(eps0: float, omega_p: float, omega_1: float, state: GeometryThermalState) -> Thermo:
    """Low-temperature free energy, pressure and entropy for a plasma metal and one-oscillator dielectric.

    The thermal terms depend on the dielectric only through ``eps0``; the metal
    enters the ``tau^4`` term through ``eta``. The pressure keeps the ideal
    ``K4`` term because the ``eta tau^4`` free-energy term is independent of ``a``.
    """
    eps0 = _check_eps0(eps0)
    a, tau = state.a, state.tau
    if tau >= 1.0 or tau > 0.5:
        _warn(f"low-temperature expansion used at tau = {tau:.3g}")
    zt = real_zero_t(eps0, omega_p, omega_1, a)
    eta = C_LIGHT / omega_p / (2.0 * a) if math.isfinite(omega_p) else 0.0
    u = _natural(a)
    K4 = k4(eps0)
    k4_eff = K4 - eta_tau4_coefficient(eps0) * eta
    F = zt.energy - u * (tau3_coefficient(eps0) * tau**3 - k4_eff * tau**4)
    P = zt.pressure - u / a * K4 * tau**4
    S = _low_t_entropy(eps0, a, tau, k4_eff)
    return Thermo(F, P, S)


def dc_residual_entropy(eps0: float, a: float) -> float:
    """Entropy at T -> 0 when the dielectric's dc conductivity is kept (J/(K m^2)), always > 0."""
    eps0 = _check_eps0(eps0)
    if not a > 0.0:
        raise ValueError("separation must be positive")
    return K_B * (zeta3() - polylog(3, static_r0(eps0))) / (16.0 * math.pi * a**2)


def q1_correction(eps0: float, beta_val: float, state: GeometryThermalState) -> float:
    """Leading (linear in ``beta``) dc-conductivity correction to the free energy (J/m^2).

    ``-(k_B T beta / 4 pi a^2 (eps0^2 - 1)) sum_n (r0^n / n^2) [-ln(1 - e^{-n tau}) + n tau / (e^{n tau} - 1)]``.
    For small ``tau`` it behaves as ``+k_B T beta Li2(r0) ln(tau) / (4 pi a^2 (eps0^2 - 1))``.
    """
    eps0 = _check_eps0(eps0, strict=True)
    if not beta_val >= 0.0:
        raise ValueError("beta must be >= 0")
    tau = state.tau
    if not tau > 0.0:
        raise ValueError("q1_correction needs T > 0")
    if tau >= 1.0:
        _warn(f"dc correction expansion used at tau = {tau:.3g}")
    if beta_val == 0.0:
        return 0.0
    r0 = static_r0(eps0)
    terms = []
    power = 1.0
    n = 1
    while True:
        power *= r0
        x = n * tau
        bracket = -math.log(-math.expm1(-x)) + x / math.expm1(x)
        term = power / n**2 * bracket
        terms.append(term)
        if term <= 1e-16 * terms[0] or n > 100_000:
            break
        n += 1
    pref = K_B * state.T * beta_val / (4.0 * math.pi * state.a**2 * (eps0**2 - 1.0))
    return -pref * math.fsum(terms)


def q1_leading(eps0: float, beta_val: float, state: GeometryThermalState) -> float:
    """Small-``tau`` leading term of :func:`q1_correction`, proportional to ``ln tau``."""
    eps0 = _check_eps0(eps0, strict=True)
    r0 = static_r0(eps0)
    return K_B * state.T * beta_val * polylog(2, r0) * math.log(state.tau) / (
        4.0 * math.pi * state.a**2 * (eps0**2 - 1.0)
    )


def report(quantity: str, analytic: float, numeric: float, leading: float | None = None,
           subleading: float | None = None) -> AsymptoticReport:
    return AsymptoticReport(quantity, float(analytic), float(numeric), leading, subleading)


__all__ = [
    "AsymptoticReport",
    "AsymptoticWarning",
    "IdealExpansion",
    "RealCoefficients",
    "RealMaterialExpansion",
    "Thermo",
    "ZeroT",
    "dc_residual_entropy",
    "eta_tau4_coefficient",
    "high_t",
    "ideal_energy",
    "ideal_expansion",
    "ideal_low_t",
    "ideal_pressure",
    "k4",
    "psi_dm",
    "q1_correction",
    "q1_leading",
    "real_coefficients",
    "real_expansion",
    "real_low_t",
    "real_zero_t",
    "report",
    "static_r0",
    "tau3_coefficient",
]
