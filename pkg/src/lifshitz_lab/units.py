"""Physical constants and unit parsing helpers (SI internally)."""

from __future__ import annotations

import math
import re

from scipy import constants as _c

HBAR = _c.hbar
C_LIGHT = _c.c
K_B = _c.k

# Conversion used throughout the comparison with Au/Si parameters.
EV_TO_RADS = 1.519e15

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"

# divisors rather than factors: 300 / 1e9 rounds to the nearest double of 3e-7
_LENGTH_UNITS = {"m": 1.0, "cm": 1e2, "mm": 1e3, "um": 1e6, "µm": 1e6, "nm": 1e9}
_FREQ_UNITS = {"ev": EV_TO_RADS, "rad/s": 1.0, "rads": 1.0}
_TEMP_UNITS = {"k": 1.0}


class UnitError(ValueError):
    """Malformed quantity string."""


def _split(text: str) -> tuple[float, str]:
    m = re.fullmatch(rf"\s*({_NUMBER})\s*([^\s]*)\s*", text)
    if not m:
        raise UnitError(f"cannot parse quantity {text!r}")
    return float(m.group(1)), m.group(2)


def parse_length(text: str) -> float:
    """``'300nm'`` -> 3e-7. A bare number is taken as metres."""
    value, unit = _split(text)
    unit = unit or "m"
    if unit not in _LENGTH_UNITS:
        raise UnitError(f"unknown length unit {unit!r} in {text!r}")
    return value / _LENGTH_UNITS[unit]


def parse_frequency(text: str) -> float:
    """``'9.0eV'`` or ``'1.4e16rad/s'`` -> angular frequency in rad/s.

    A bare number is taken as rad/s.
    """
    value, unit = _split(text)
    unit = (unit or "rad/s").lower()
    if unit not in _FREQ_UNITS:
        raise UnitError(f"unknown frequency unit {unit!r} in {text!r}")
    return value * _FREQ_UNITS[unit]


def parse_temperature(text: str) -> float:
    value, unit = _split(text)
    unit = (unit or "K").lower()
    if unit not in _TEMP_UNITS:
        raise UnitError(f"unknown temperature unit {unit!r} in {text!r}")
    return value


def tau(a: float, T: float) -> float:
    """Dimensionless temperature ``4 pi k_B a T / (hbar c)``."""
    return 4.0 * math.pi * K_B * a * T / (HBAR * C_LIGHT)


def temperature_for_tau(a: float, tau_value: float) -> float:
    return tau_value * HBAR * C_LIGHT / (4.0 * math.pi * K_B * a)


def omega_c(a: float) -> float:
    """Characteristic frequency ``c / 2a``."""
    return C_LIGHT / (2.0 * a)


def matsubara_spacing(T: float) -> float:
    """``2 pi k_B T / hbar``: spacing of the Matsubara frequencies (rad/s)."""
    return 2.0 * math.pi * K_B * T / HBAR
