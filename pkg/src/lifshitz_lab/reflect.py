"""TM and TE reflection coefficients in the dimensionless variables (zeta, y).

Sign convention: ``r_te = (k - y) / (k + y)`` with ``k = sqrt(y^2 + zeta^2 (eps - 1))``,
so both coefficients lie in ``[0, 1]`` for ``eps >= 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geometry import GeometryThermalState
from .models import DC_DIVERGENT, FINITE_EPS0, IDEAL, PLASMA_LIKE, ModelError, static_permittivity


class ReflectionError(ValueError):
    pass


@dataclass(frozen=True)
class DimensionlessPoint:
    zeta: float
    y: float

    def __post_init__(self):
        if not self.zeta >= 0.0:
            raise ReflectionError(f"zeta must be >= 0, got {self.zeta!r}")
        if not self.y >= self.zeta:
            raise ReflectionError(f"y must be >= zeta, got y={self.y!r} < zeta={self.zeta!r}")


class ReflectionPair(NamedTuple):
    r_tm: float
    r_te: float


def fresnel(eps, zeta, y):
    """Reflection coefficients at ``zeta > 0`` for permittivity ``eps`` (arrays broadcast).

    ``eps = inf`` stands for the ideal metal and gives ``(1, 1)``.
    """
    eps = np.asarray(eps, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    y = np.asarray(y, dtype=float)
    ideal = np.isinf(eps)
    em1 = np.where(ideal, 0.0, eps - 1.0)
    s = (zeta / y) ** 2 * em1
    root = np.sqrt(1.0 + s)
    # root - 1 without cancellation; (k - y)/(k + y) = (root - 1)/(root + 1)
    rm1 = s / (root + 1.0)
    r_te = rm1 / (root + 1.0)
    epsf = np.where(ideal, 1.0, eps)
    r_tm = (em1 - rm1) / (epsf + root)
    r_tm = np.where(ideal, 1.0, r_tm)
    r_te = np.where(ideal, 1.0, r_te)
    return r_tm, r_te


def zero_frequency_reflection(model, y, a: float):
    """``(r_tm, r_te)`` at ``zeta = 0`` dispatched on the model's zero-frequency class."""
    y = np.asarray(y, dtype=float)
    zc = model.zero_frequency_class()
    ones = np.ones_like(y)
    if zc.kind == IDEAL:
        return ones, ones.copy()
    if zc.kind == FINITE_EPS0:
        eps0 = zc.value
        return ones * (eps0 - 1.0) / (eps0 + 1.0), np.zeros_like(y)
    if zc.kind == DC_DIVERGENT:
        return ones, np.zeros_like(y)
    if zc.kind == PLASMA_LIKE:
        omega2 = zc.plasma_limit(a)
        k = np.sqrt(y * y + omega2)
        # (k - y)/(k + y) = omega2 / (k + y)^2
        return ones, omega2 / (k + y) ** 2
    raise ModelError(f"unknown zero-frequency class {zc.kind!r}")


def reflection(model, point: DimensionlessPoint, state: GeometryThermalState) -> ReflectionPair:
    """Reflection pair for ``model`` at ``point``; ``zeta = 0`` uses the limit branch."""
    if not isinstance(point, DimensionlessPoint):
        point = DimensionlessPoint(*point)
    if point.zeta == 0.0:
        r_tm, r_te = zero_frequency_reflection(model, point.y, state.a)
    else:
        xi = point.zeta * state.omega_c
        eps = model.permittivity(np.array([xi]), state.T)[0]
        r_tm, r_te = fresnel(eps, point.zeta, point.y)
    return ReflectionPair(float(r_tm), float(r_te))


def reflection_w(eps0_or_model, w) -> ReflectionPair:
    """Coefficients of a frequency-independent dielectric as functions of ``w = zeta / y``.

    Accepts the static permittivity or any model exposing one. Vectorised in ``w``.
    """
    if isinstance(eps0_or_model, (int, float, np.floating)):
        eps0 = float(eps0_or_model)
    else:
        eps0 = static_permittivity(eps0_or_model)
    w_arr = np.asarray(w, dtype=float)
    if np.any((w_arr < 0.0) | (w_arr > 1.0)):
        raise ReflectionError("w must lie in [0, 1]")
    em1 = eps0 - 1.0
    s = em1 * w_arr * w_arr
    root = np.sqrt(1.0 + s)
    rm1 = s / (root + 1.0)
    r_tm = (em1 - rm1) / (eps0 + root)
    r_te = rm1 / (root + 1.0)
    if np.ndim(w) == 0:
        return ReflectionPair(float(r_tm), float(r_te))
    return ReflectionPair(r_tm, r_te)
