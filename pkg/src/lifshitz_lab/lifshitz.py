"""Lifshitz free energy, pressure and entropy between a metal and a dielectric plate.

The Matsubara sum runs over ``zeta_l = tau * l`` and each term is a y-integral
over ``[zeta_l, inf)``. After the shift ``u = y - zeta_l`` the integral is done
with Gauss-Legendre rules on geometrically graded panels, whose first panel has
width ``min(zeta_l, 1) / 2``: the reflection coefficients vary on the scale
``y ~ zeta_l`` and the exponential on the scale 1.

All sums use ``math.fsum`` over a fixed term order, so results are
bit-reproducible for a given configuration.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import integrate

from .geometry import GeometryThermalState
from .models import IDEAL, PLASMA_LIKE
from .reflect import fresnel, zero_frequency_reflection
from .specfun import polylog
from .units import HBAR, C_LIGHT, matsubara_spacing

FREE_ENERGY = "free_energy"
PRESSURE = "pressure"

# points per block of Matsubara terms (memory bound for the vectorised kernel)
_BLOCK_POINTS = 400_000


class ConvergenceError(RuntimeError):
    """The Matsubara sum or a quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, tail_estimate: float = math.nan, terms_used: int = 0):
        super().__init__(message)
        self.tail_estimate = tail_estimate
        self.terms_used = terms_used


class EntropyStepError(ValueError):
    """Finite-difference step too large for the requested accuracy."""

    def __init__(self, message: str, suggested_dT: float):
        super().__init__(message)
        self.suggested_dT = suggested_dT


@dataclass(frozen=True)
class QuadratureConfig:
    """Convergence control for the Matsubara sum and the y/zeta quadratures.

    ``rel_tol`` and ``abs_tol`` act on the sum in natural units
    ``hbar c / (32 pi^2 a^3)``; ``y_max_multiplier`` is the cutoff ``U`` of
    the shifted y-integral (the integrand carries ``exp(-U)``).
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-16
    max_matsubara_terms: int = 2_000_000
    y_max_multiplier: float = 50.0
    panels: int = 24
    order: int = 16
    low_order: int = 10
    zeta_order: int = 20
    entropy_rtol: float = 1e-2

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise ValueError("rel_tol must be positive")
        if not self.abs_tol >= 0.0:
            raise ValueError("abs_tol must be >= 0")
        if self.max_matsubara_terms < 1:
            raise ValueError("max_matsubara_terms must be >= 1")
        if not self.y_max_multiplier > 1.0:
            raise ValueError("y_max_multiplier must exceed 1")
        if self.panels < 2 or self.order < 2 or self.low_order < 2:
            raise ValueError("need at least 2 panels and 2-point rules")

    def tighter(self, **changes) -> "QuadratureConfig":
        return replace(self, **changes)


@dataclass
class LifshitzResult:
    """Outcome of a Lifshitz evaluation; only the requested field is filled.

    ``tail_estimate`` and ``quadrature_error_estimate`` are in the units of the
    filled field.
    """

    state: GeometryThermalState
    free_energy_per_area: float | None = None
    pressure: float | None = None
    entropy_per_area: float | None = None
    energy_per_area: float | None = None
    matsubara_terms_used: int = 0
    tail_estimate: float = 0.0
    quadrature_error_estimate: float = 0.0
    dT: float | None = None

    @property
    def value(self) -> float:
        for name in ("free_energy_per_area", "pressure", "entropy_per_area", "energy_per_area"):
            v = getattr(self, name)
            if v is not None:
                return v
        raise ValueError("empty result")


@lru_cache(maxsize=None)
def _gauss01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _graded_nodes(x: np.ndarray, cfg: QuadratureConfig, order: int):
    """Nodes ``y`` and weights for ``int_x^{x+U} dy`` with panels graded towards ``y = x``."""
    L = x.size
    U = cfg.y_max_multiplier
    s = 0.5 * np.minimum(x, 1.0)
    P = cfg.panels
    expo = np.arange(P) / (P - 1)
    bounds = s[:, None] * (U / s[:, None]) ** expo[None, :]
    edges = np.concatenate([np.zeros((L, 1)), bounds], axis=1)
    lo = edges[:, :-1]
    width = np.diff(edges, axis=1)
    t, w = _gauss01(order)
    u = (lo[:, :, None] + width[:, :, None] * t).reshape(L, -1)
    wts = (width[:, :, None] * w).reshape(L, -1)
    return x[:, None] + u, wts


def _integrand(quantity: str, eps_m, eps_d, zeta, y):
    rm_tm, rm_te = fresnel(eps_m, zeta, y)
    rd_tm, rd_te = fresnel(eps_d, zeta, y)
    ey = np.exp(-y)
    R_tm = rm_tm * rd_tm * ey
    R_te = rm_te * rd_te * ey
    if quantity == FREE_ENERGY:
        return y * (np.log1p(-R_tm) + np.log1p(-R_te))
    return y * y * (R_tm / (1.0 - R_tm) + R_te / (1.0 - R_te))


def _y_integrals(quantity: str, zeta: np.ndarray, eps_m: np.ndarray, eps_d: np.ndarray, cfg: QuadratureConfig):
    """``int_zeta^inf`` of the integrand for every ``zeta`` (> 0); returns (values, low-order values)."""
    out = np.empty(zeta.size)
    out_lo = np.empty(zeta.size)
    n_nodes = cfg.panels * cfg.order
    block = max(1, _BLOCK_POINTS // n_nodes)
    for start in range(0, zeta.size, block):
        sl = slice(start, start + block)
        z = zeta[sl]
        em = eps_m[sl, None]
        ed = eps_d[sl, None]
        for order, dest in ((cfg.order, out), (cfg.low_order, out_lo)):
            y, w = _graded_nodes(z, cfg, order)
            vals = _integrand(quantity, em, ed, z[:, None], y)
            dest[sl] = np.sum(vals * w, axis=1)
    return out, out_lo


def _zero_term(quantity: str, state: GeometryThermalState, metal, diel) -> float:
    """``int_0^inf`` of the l = 0 integrand, closed form when the coefficients are y-independent."""
    kinds = (metal.zero_frequency_class().kind, diel.zero_frequency_class().kind)
    te_varies = PLASMA_LIKE in kinds and all(k in (IDEAL, PLASMA_LIKE) for k in kinds)
    probe = np.array([1.0])
    tm = float(zero_frequency_reflection(metal, probe, state.a)[0][0] * zero_frequency_reflection(diel, probe, state.a)[0][0])
    if quantity == FREE_ENERGY:
        tm_part = -polylog(3, tm)
    else:
        tm_part = 2.0 * polylog(3, tm)
    if not te_varies:
        te = float(zero_frequency_reflection(metal, probe, state.a)[1][0] * zero_frequency_reflection(diel, probe, state.a)[1][0])
        te_part = -polylog(3, te) if quantity == FREE_ENERGY else 2.0 * polylog(3, te)
        return tm_part + te_part

    def te_integrand(y):
        yy = np.array([y])
        r = zero_frequency_reflection(metal, yy, state.a)[1][0] * zero_frequency_reflection(diel, yy, state.a)[1][0]
        R = r * math.exp(-y)
        if quantity == FREE_ENERGY:
            return y * math.log1p(-R)
        return y * y * R / (1.0 - R)

    te_part, _ = integrate.quad(te_integrand, 0.0, np.inf, epsabs=1e-15, epsrel=1e-13, limit=200)
    return tm_part + te_part


def _natural_unit(a: float, quantity: str) -> float:
    if quantity == FREE_ENERGY:
        return HBAR * C_LIGHT / (32.0 * math.pi**2 * a**3)
    return -HBAR * C_LIGHT / (32.0 * math.pi**2 * a**4)


def matsubara_sum(quantity: str, state: GeometryThermalState, metal, diel, cfg: QuadratureConfig):
    """Dimensionless ``tau * sum'_l G(zeta_l)`` with convergence metadata.

    Returns ``(value, terms_used, tail, quad_err)``, all in natural units.
    """
    if not state.T > 0.0:
        raise ValueError("the Matsubara sum needs T > 0; use zero_temperature_energy/pressure at T = 0")
    tau = state.tau
    spacing = matsubara_spacing(state.T)
    g0 = 0.5 * _zero_term(quantity, state, metal, diel)
    terms: list[float] = [g0]
    err_terms: list[float] = [0.0]
    q_floor = math.exp(-tau)
    n_nodes = cfg.panels * cfg.order
    block = max(64, min(4096, _BLOCK_POINTS // n_nodes))
    l_next = 1
    while True:
        if l_next > cfg.max_matsubara_terms:
            tail = abs(terms[-1]) * q_floor / (1.0 - q_floor) * tau
            raise ConvergenceError(
                f"Matsubara sum not converged after {cfg.max_matsubara_terms} terms (tau={tau:.3g})",
                tail_estimate=tail,
                terms_used=len(terms),
            )
        ls = np.arange(l_next, min(l_next + block, cfg.max_matsubara_terms + 1), dtype=float)
        zeta = tau * ls
        xi = spacing * ls
        eps_m = metal.permittivity(xi, state.T)
        eps_d = diel.permittivity(xi, state.T)
        vals, vals_lo = _y_integrals(quantity, zeta, eps_m, eps_d, cfg)
        terms.extend(vals.tolist())
        err_terms.extend(np.abs(vals - vals_lo).tolist())
        l_next = int(ls[-1]) + 1

        arr = np.abs(np.asarray(terms))
        total = abs(math.fsum(terms))
        ratio = np.ones_like(arr)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio[1:] = arr[1:] / arr[:-1]
        q = np.clip(np.where(np.isfinite(ratio), np.maximum(ratio, q_floor), q_floor), 0.0, 1.0 - 1e-12)
        q = np.maximum(q, q_floor)
        geo_tail = arr * q / (1.0 - q)
        small = geo_tail <= cfg.rel_tol / 10.0 * total + cfg.abs_tol / tau
        small[0] = False
        run = small[1:-2] & small[2:-1] & small[3:]
        hits = np.nonzero(run)[0]
        if hits.size:
            cut = int(hits[0]) + 4  # keep terms 0 .. cut-1
            kept = terms[:cut]
            tail = float(geo_tail[cut - 1]) * math.copysign(1.0, kept[-1]) if kept[-1] != 0.0 else 0.0
            value = tau * (math.fsum(kept) + tail)
            return value, cut, abs(tau * tail), tau * math.fsum(err_terms[:cut])


def _thermal(quantity: str, state, metal, diel, cfg) -> LifshitzResult:
    value, used, tail, qerr = matsubara_sum(quantity, state, metal, diel, cfg)
    unit = _natural_unit(state.a, quantity)
    res = LifshitzResult(state, matsubara_terms_used=used, tail_estimate=abs(unit) * tail,
                         quadrature_error_estimate=abs(unit) * qerr)
    # + 0.0 normalises -0.0 from a vanishing sum
    if quantity == FREE_ENERGY:
        res.free_energy_per_area = unit * value + 0.0
    else:
        res.pressure = unit * value + 0.0
    return res


def free_energy(state: GeometryThermalState, metal, diel, cfg: QuadratureConfig | None = None) -> LifshitzResult:
    """Casimir free energy per unit area (J/m^2) from the Matsubara sum."""
    return _thermal(FREE_ENERGY, state, metal, diel, cfg or QuadratureConfig())


def pressure(state: GeometryThermalState, metal, diel, cfg: QuadratureConfig | None = None) -> LifshitzResult:
    """Casimir pressure (Pa, negative for attraction) from the Matsubara sum."""
    return _thermal(PRESSURE, state, metal, diel, cfg or QuadratureConfig())


def entropy(
    state: GeometryThermalState,
    metal,
    diel,
    cfg: QuadratureConfig | None = None,
    dT: float | None = None,
) -> LifshitzResult:
    """Casimir entropy per unit area ``-dF/dT`` (J/(K m^2)).

    Central differences at steps ``dT``, ``dT/2``, ``dT/4`` combined by two
    Richardson passes. ``dT`` defaults to ``T/4``.
    """
    cfg = cfg or QuadratureConfig()
    T = state.T
    if dT is None:
        dT = 0.25 * T
    if not (T > dT > 0.0):
        raise ValueError(f"entropy needs T > dT > 0, got T={T!r}, dT={dT!r}")

    cache: dict[float, LifshitzResult] = {}

    def F(temp: float) -> LifshitzResult:
        if temp not in cache:
            cache[temp] = free_energy(state.with_T(temp), metal, diel, cfg)
        return cache[temp]

    steps = (dT, 0.5 * dT, 0.25 * dT)
    diffs = [-(F(T + h).free_energy_per_area - F(T - h).free_energy_per_area) / (2.0 * h) for h in steps]
    r1 = (4.0 * diffs[1] - diffs[0]) / 3.0
    r2 = (4.0 * diffs[2] - diffs[1]) / 3.0
    value = r2 + (r2 - r1) / 15.0
    trunc = abs(r2 - r1)
    noise = max(abs(r.tail_estimate) + abs(r.quadrature_error_estimate) * 1e-3 for r in cache.values())
    noise_floor = 8.0 * (noise + 1e-15 * abs(F(T + steps[-1]).free_energy_per_area)) / steps[-1]
    if trunc > cfg.entropy_rtol * abs(value) + noise_floor:
        raise EntropyStepError(
            f"entropy finite-difference error {trunc:.3g} exceeds tolerance at dT={dT:.3g} K",
            suggested_dT=0.5 * dT,
        )
    used = max(r.matsubara_terms_used for r in cache.values())
    return LifshitzResult(
        state,
        entropy_per_area=value,
        matsubara_terms_used=used,
        tail_estimate=noise / steps[-1],
        quadrature_error_estimate=trunc,
        dT=dT,
    )


def _zeta_edges() -> np.ndarray:
    small = np.logspace(-9, 0, 19)
    large = np.array([2.0, 4.0, 8.0, 16.0, 32.0, 64.0])
    return np.concatenate([[0.0], small, large])


def _zero_temperature(quantity: str, a: float, metal, diel, cfg: QuadratureConfig):
    edges = _zeta_edges()
    lo = edges[:-1]
    width = np.diff(edges)
    results = []
    for order in (cfg.zeta_order, max(4, cfg.zeta_order * 2 // 3)):
        t, w = _gauss01(order)
        zeta = (lo[:, None] + width[:, None] * t).ravel()
        wts = (width[:, None] * w).ravel()
        xi = zeta * C_LIGHT / (2.0 * a)
        eps_m = metal.permittivity(xi, 0.0)
        eps_d = diel.permittivity(xi, 0.0)
        g, g_lo = _y_integrals(quantity, zeta, eps_m, eps_d, cfg)
        results.append((math.fsum(g * wts), math.fsum(np.abs(g - g_lo) * wts)))
    (value, inner_err), (value_lo, _) = results
    return value, abs(value - value_lo) + inner_err


def zero_temperature_energy(a: float, metal, diel, cfg: QuadratureConfig | None = None) -> LifshitzResult:
    """Casimir energy per unit area at T = 0 (J/m^2) by nested quadrature."""
    if not a > 0.0:
        raise ValueError("separation must be positive")
    cfg = cfg or QuadratureConfig()
    value, err = _zero_temperature(FREE_ENERGY, a, metal, diel, cfg)
    unit = _natural_unit(a, FREE_ENERGY)
    return LifshitzResult(GeometryThermalState(a, 0.0), energy_per_area=unit * value,
                          quadrature_error_estimate=abs(unit) * err)


def zero_temperature_pressure(a: float, metal, diel, cfg: QuadratureConfig | None = None) -> LifshitzResult:
    """Casimir pressure at T = 0 (Pa) from the zeta-integral of the pressure integrand."""
    if not a > 0.0:
        raise ValueError("separation must be positive")
    cfg = cfg or QuadratureConfig()
    value, err = _zero_temperature(PRESSURE, a, metal, diel, cfg)
    unit = _natural_unit(a, PRESSURE)
    return LifshitzResult(GeometryThermalState(a, 0.0), pressure=unit * value + 0.0,
                          quadrature_error_estimate=abs(unit) * err)


def sphere_plate_force(R: float, state: GeometryThermalState, metal, diel, cfg: QuadratureConfig | None = None) -> float:
    """Proximity-force sphere-plate force ``2 pi R F(a, T)`` (N)."""
    if not R > 0.0:
        raise ValueError("sphere radius must be positive")
    if R < 10.0 * state.a:
        warnings.warn(f"proximity force approximation needs R >> a (R/a = {R / state.a:.3g})", stacklevel=2)
    if state.T == 0.0:
        F = zero_temperature_energy(state.a, metal, diel, cfg).energy_per_area
    else:
        F = free_energy(state, metal, diel, cfg).free_energy_per_area
    return 2.0 * math.pi * R * F
