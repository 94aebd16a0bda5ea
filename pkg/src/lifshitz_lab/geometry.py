"""Plate separation and temperature with the derived dimensionless parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .units import C_LIGHT, matsubara_spacing, omega_c, tau


@dataclass(frozen=True)
class GeometryThermalState:
    """Separation ``a`` (m) and temperature ``T`` (K)."""

    a: float
    T: float = 0.0

    def __post_init__(self):
        if not self.a > 0.0:
            raise ValueError(f"separation must be positive, got {self.a!r}")
        if not self.T >= 0.0:
            raise ValueError(f"temperature must be >= 0, got {self.T!r}")

    @property
    def tau(self) -> float:
        return tau(self.a, self.T)

    @property
    def omega_c(self) -> float:
        return omega_c(self.a)

    def xi(self, l):
        """Matsubara frequency ``xi_l`` in rad/s."""
        return matsubara_spacing(self.T) * l

    def eta(self, metal) -> float:
        """``delta / 2a`` for a plasma metal (0 for an ideal one)."""
        omega_p = getattr(metal, "omega_p", None)
        if omega_p is None:
            return 0.0
        return C_LIGHT / omega_p / (2.0 * self.a)

    def b(self, diel) -> float:
        """``omega_c / omega_1`` for a one-oscillator dielectric (0 if frequency independent)."""
        terms = getattr(diel, "terms", None)
        if terms is None:
            base = getattr(diel, "base", None)
            return self.b(base) if base is not None else 0.0
        if len(terms) != 1:
            raise ValueError("b is defined for single-oscillator dielectrics only")
        return self.omega_c / terms[0][1]

    def with_a(self, a: float) -> "GeometryThermalState":
        return GeometryThermalState(a, self.T)

    def with_T(self, T: float) -> "GeometryThermalState":
        return GeometryThermalState(self.a, T)

    def __str__(self) -> str:
        return f"a={self.a:.6g} m, T={self.T:.6g} K, tau={self.tau:.6g}"


def is_zero_temperature(state: GeometryThermalState) -> bool:
    return state.T == 0.0 or math.isclose(state.tau, 0.0, abs_tol=0.0)
