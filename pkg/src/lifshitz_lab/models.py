"""Dielectric permittivities along the imaginary frequency axis.

Every model exposes ``permittivity(xi, T)`` (vectorised over ``xi`` in rad/s,
``xi > 0``) and ``zero_frequency_class()``, which tells the reflection code how
to take the ``xi -> 0`` limit without evaluating ``0 * inf`` forms.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy.special import hyp2f1

from .units import C_LIGHT, EV_TO_RADS, HBAR, K_B, matsubara_spacing

IDEAL = "ideal"
FINITE_EPS0 = "finite_eps0"
PLASMA_LIKE = "plasma_like"
DC_DIVERGENT = "dc_divergent"

# beta(T) below this is flushed to zero
_BETA_UNDERFLOW = 1e-300

EXTRAPOLATION_POLICIES_LOW = ("zero", "constant", "power")
EXTRAPOLATION_POLICIES_HIGH = ("zero", "power")


class ModelError(ValueError):
    """Invalid model parameters or evaluation request."""


class OpticalDataError(ModelError):
    """Malformed optical-data table; ``lineno`` points at the offending line."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class ZeroFrequencyClass:
    """How a model behaves as ``xi -> 0``.

    ``value`` is the static permittivity for ``finite_eps0`` and ``omega_p**2``
    (rad^2/s^2) for ``plasma_like``; ``None`` otherwise.
    """

    kind: str
    value: float | None = None

    def plasma_limit(self, a: float) -> float:
        """Dimensionless ``lim zeta^2 (eps - 1) = (2 a omega_p / c)^2``."""
        if self.kind != PLASMA_LIKE:
            raise ModelError(f"no plasma limit for class {self.kind}")
        return (2.0 * a / C_LIGHT) ** 2 * self.value


def _check_xi(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if np.any(~(xi > 0.0)):
        raise ModelError("permittivity requires xi > 0; use zero_frequency_class() at xi = 0")
    return xi


@dataclass(frozen=True)
class IdealMetal:
    """Perfect reflector: both reflection coefficients are 1 at every frequency."""

    def permittivity(self, xi, T: float = 0.0) -> np.ndarray:
        return np.full(np.shape(_check_xi(xi)), np.inf)

    def zero_frequency_class(self) -> ZeroFrequencyClass:
        return ZeroFrequencyClass(IDEAL)

    def label(self) -> str:
        return "ideal"


@dataclass(frozen=True)
class PlasmaMetal:
    """Lossless free-electron metal, ``eps(i xi) = 1 + omega_p^2 / xi^2``."""

    omega_p: float

    def __post_init__(self):
        if not self.omega_p > 0.0:
            raise ModelError(f"plasma frequency must be positive, got {self.omega_p!r}")

    @classmethod
    def from_wavelength(cls, lambda_p: float) -> "PlasmaMetal":
        return cls(2.0 * math.pi * C_LIGHT / lambda_p)

    @classmethod
    def from_ev(cls, omega_p_ev: float) -> "PlasmaMetal":
        return cls(omega_p_ev * EV_TO_RADS)

    @property
    def plasma_wavelength(self) -> float:
        return 2.0 * math.pi * C_LIGHT / self.omega_p

    @property
    def penetration_depth(self) -> float:
        """``delta = lambda_p / 2 pi``."""
        return C_LIGHT / self.omega_p

    def permittivity(self, xi, T: float = 0.0) -> np.ndarray:
        xi = _check_xi(xi)
        return 1.0 + (self.omega_p / xi) ** 2

    def zero_frequency_class(self) -> ZeroFrequencyClass:
        return ZeroFrequencyClass(PLASMA_LIKE, self.omega_p**2)

    def label(self) -> str:
        return f"plasma:{self.omega_p:.6g}rad/s"


@dataclass(frozen=True)
class ConstantDielectric:
    """Frequency-independent permittivity ``eps0 >= 1``."""

    eps0: float

    def __post_init__(self):
        if not self.eps0 >= 1.0:
            raise ModelError(f"static permittivity must be >= 1, got {self.eps0!r}")

    @property
    def static_permittivity(self) -> float:
        return self.eps0

    def permittivity(self, xi, T: float = 0.0) -> np.ndarray:
        return np.full(np.shape(_check_xi(xi)), float(self.eps0))

    def zero_frequency_class(self) -> ZeroFrequencyClass:
        return ZeroFrequencyClass(FINITE_EPS0, float(self.eps0))

    def label(self) -> str:
        return f"const:{self.eps0:g}"


@dataclass(frozen=True)
class OscillatorDielectric:
    """Ninham-Parsegian sum ``1 + sum_j C_j / (1 + xi^2 / omega_j^2)``.

    ``terms`` is a sequence of ``(C_j, omega_j)`` pairs, omega in rad/s.
    """

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        terms = tuple((float(c), float(w)) for c, w in self.terms)
        if not terms:
            raise ModelError("oscillator model needs at least one term")
        for c, w in terms:
            if not (c > 0.0 and w > 0.0):
                raise ModelError(f"oscillator strength and frequency must be positive, got {(c, w)}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, strength: float, omega: float) -> "OscillatorDielectric":
        return cls(((strength, omega),))

    @property
    def static_permittivity(self) -> float:
        return 1.0 + sum(c for c, _ in self.terms)

    def permittivity(self, xi, T: float = 0.0) -> np.ndarray:
        xi = _check_xi(xi)
        eps = np.ones_like(xi)
        for c, w in self.terms:
            eps = eps + c / (1.0 + (xi / w) ** 2)
        return eps

    def zero_frequency_class(self) -> ZeroFrequencyClass:
        return ZeroFrequencyClass(FINITE_EPS0, self.static_permittivity)

    def label(self) -> str:
        return "osc:" + ",".join(f"{c:g}@{w:.6g}rad/s" for c, w in self.terms)


@dataclass(frozen=True)
class DcAugmentedDielectric:
    """A finite-eps0 dielectric plus the dc-conductivity term ``4 pi sigma_0(T) / xi``.

    ``sigma_0(T) = sigma_prefactor * exp(-g / T)`` with ``sigma_prefactor`` in
    Gaussian units (1/s) and the activation temperature ``g`` in K. At a
    Matsubara frequency ``xi_l`` the extra term equals ``beta(T) / l``.
    """

    base: object
    g: float
    sigma_prefactor: float

    def __post_init__(self):
        if self.base.zero_frequency_class().kind != FINITE_EPS0:
            raise ModelError("dc augmentation needs a base model with finite static permittivity")
        if self.g < 0.0 or self.sigma_prefactor < 0.0:
            raise ModelError("activation temperature and conductivity prefactor must be >= 0")

    @classmethod
    def calibrated(cls, base, g: float, beta_ref: float, T_ref: float = 300.0) -> "DcAugmentedDielectric":
        """Choose the prefactor so that ``beta(T_ref) == beta_ref``."""
        sigma_ref = beta_ref * K_B * T_ref / (2.0 * HBAR)
        return cls(base, g, sigma_ref * math.exp(g / T_ref))

    @property
    def static_permittivity(self) -> float:
        return self.base.static_permittivity

    def sigma0(self, T: float) -> float:
        if T <= 0.0:
            return 0.0
        return self.sigma_prefactor * math.exp(-self.g / T)

    def beta(self, T: float) -> float:
        if not T > 0.0:
            raise ModelError(f"beta(T) requires T > 0, got {T!r}")
        value = 2.0 * HBAR * self.sigma0(T) / (K_B * T)
        return 0.0 if value < _BETA_UNDERFLOW else value

    def permittivity(self, xi, T: float = 0.0) -> np.ndarray:
        xi = _check_xi(xi)
        eps = self.base.permittivity(xi, T)
        if T <= 0.0:
            return eps
        # beta / l with l = xi / (2 pi k_B T / hbar)
        return eps + self.beta(T) * matsubara_spacing(T) / xi

    def zero_frequency_class(self) -> ZeroFrequencyClass:
        return ZeroFrequencyClass(DC_DIVERGENT)

    def label(self) -> str:
        return f"{self.base.label()}+dc:g={self.g:g},s0={self.sigma_prefactor:.6g}"


def _h(u: np.ndarray) -> np.ndarray:
    """``u - arctan(u)`` without cancellation at small ``u``."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < 0.05
    us = u[small]
    u2 = us * us
    out[small] = us**3 * (1 / 3 - u2 * (1 / 5 - u2 * (1 / 7 - u2 * (1 / 9 - u2 / 11))))
    ul = u[~small]
    out[~small] = ul - np.arctan(ul)
    return out


@dataclass(frozen=True)
class TabulatedPermittivity:
    """Absorption spectrum ``Im eps(omega)`` sampled on a strictly increasing grid.

    ``eps(i xi)`` follows from the Kramers-Kronig integral with ``Im eps``
    interpolated linearly between samples; the extrapolation outside the grid
    is explicit (``zero``, ``constant``/``power`` below, ``zero``/``power``
    above). Power laws are fitted through the two outermost samples.
    """

    omega: np.ndarray
    im_eps: np.ndarray
    extrapolate_low: str = "zero"
    extrapolate_high: str = "zero"
    source: str = field(default="", compare=False)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        im_eps = np.asarray(self.im_eps, dtype=float)
        if omega.ndim != 1 or omega.size == 0 or omega.shape != im_eps.shape:
            raise OpticalDataError("table must be two equal-length non-empty columns")
        if not np.all(np.isfinite(omega)) or not np.all(np.isfinite(im_eps)):
            raise OpticalDataError("table contains non-finite values")
        if omega[0] <= 0.0:
            raise OpticalDataError("frequencies must be positive")
        bad = np.nonzero(np.diff(omega) <= 0.0)[0]
        if bad.size:
            raise OpticalDataError(f"frequency column not strictly increasing at row {bad[0] + 2}")
        neg = np.nonzero(im_eps < 0.0)[0]
        if neg.size:
            raise OpticalDataError(f"negative Im eps at row {neg[0] + 1} violates passivity")
        if self.extrapolate_low not in EXTRAPOLATION_POLICIES_LOW:
            raise OpticalDataError(f"unknown low-frequency extrapolation {self.extrapolate_low!r}")
        if self.extrapolate_high not in EXTRAPOLATION_POLICIES_HIGH:
            raise OpticalDataError(f"unknown high-frequency extrapolation {self.extrapolate_high!r}")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "im_eps", im_eps)
        if self.extrapolate_low == "power":
            p = self._power(0, 1)
            if not p > -2.0:
                raise OpticalDataError(f"low-frequency power law exponent {p:.3g} <= -2 is not integrable")
        if self.extrapolate_high == "power":
            p = self._power(-2, -1)
            if not p < 0.0:
                raise OpticalDataError(f"high-frequency power law exponent {p:.3g} >= 0 does not decay")

    def _power(self, i: int, j: int) -> float:
        if self.omega.size < 2:
            raise OpticalDataError("power-law extrapolation needs at least two samples")
        ei, ej = self.im_eps[i], self.im_eps[j]
        if ei <= 0.0 or ej <= 0.0:
            raise OpticalDataError("power-law extrapolation needs positive Im eps at the table edge")
        return math.log(ej / ei) / math.log(self.omega[j] / self.omega[i])

    def _low_tail(self, xi: float) -> float:
        w0, e0 = self.omega[0], self.im_eps[0]
        if self.extrapolate_low == "zero" or e0 == 0.0:
            return 0.0
        if self.extrapolate_low == "constant":
            if xi == 0.0:
                return math.inf
            return 0.5 * e0 * math.log1p((w0 / xi) ** 2)
        p = self._power(0, 1)
        b = 0.5 * (p + 2.0)
        if xi == 0.0:
            if p <= 0.0:
                return math.inf
            return e0 / p
        # int_0^w0 e0 (w/w0)^p w / (w^2 + xi^2) dw
        return e0 * w0**2 / ((p + 2.0) * xi**2) * hyp2f1(1.0, b, b + 1.0, -((w0 / xi) ** 2))

    def _high_tail(self, xi: float) -> float:
        w1, e1 = self.omega[-1], self.im_eps[-1]
        if self.extrapolate_high == "zero" or e1 == 0.0:
            return 0.0
        p = self._power(-2, -1)
        a = -0.5 * p
        # int_w1^inf e1 (w/w1)^p w / (w^2 + xi^2) dw
        return e1 / (-p) * hyp2f1(1.0, a, a + 1.0, -((xi / w1) ** 2))

    def _segments(self, xi: float) -> float:
        w1, w2 = self.omega[:-1], self.omega[1:]
        e1, e2 = self.im_eps[:-1], self.im_eps[1:]
        slope = (e2 - e1) / (w2 - w1)
        icpt = e1 - slope * w1
        if xi == 0.0:
            log_part = np.log(w2 / w1)
            lin_part = w2 - w1
        else:
            log_part = 0.5 * np.log1p((w2**2 - w1**2) / (w1**2 + xi**2))
            lin_part = xi * (_h(w2 / xi) - _h(w1 / xi))
        return float(math.fsum(icpt * log_part + slope * lin_part))

    def kk_integral(self, xi: float) -> float:
        """``int_0^inf omega Im eps(omega) / (omega^2 + xi^2) d omega``."""
        return self._low_tail(xi) + self._segments(xi) + self._high_tail(xi)

    @property
    def static_permittivity(self) -> float:
        return 1.0 + 2.0 / math.pi * self.kk_integral(0.0)

    def permittivity(self, xi, T: float = 0.0) -> np.ndarray:
        xi = _check_xi(xi)
        flat = [1.0 + 2.0 / math.pi * self.kk_integral(float(v)) for v in xi.ravel()]
        return np.maximum(np.asarray(flat).reshape(xi.shape), 1.0)

    def zero_frequency_class(self) -> ZeroFrequencyClass:
        eps0 = self.static_permittivity
        if math.isinf(eps0):
            return ZeroFrequencyClass(DC_DIVERGENT)
        return ZeroFrequencyClass(FINITE_EPS0, eps0)

    def label(self) -> str:
        return f"table:{self.source}" if self.source else "table"


@dataclass(frozen=True)
class SampledPermittivity:
    """``eps(i xi)`` known on a grid, e.g. the output of a Kramers-Kronig ingest.

    Interpolation is linear in ``log(eps - 1)`` versus ``log xi``. Below the grid
    the first value is held (the static limit); above it ``eps - 1`` decays as
    ``xi^-2``.
    """

    xi: np.ndarray
    eps: np.ndarray
    source: str = field(default="", compare=False)

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        eps = np.asarray(self.eps, dtype=float)
        if xi.ndim != 1 or xi.size < 2 or xi.shape != eps.shape:
            raise ModelError("sampled permittivity needs two equal-length columns with >= 2 rows")
        if np.any(np.diff(xi) <= 0.0) or xi[0] <= 0.0:
            raise ModelError("sampled xi grid must be positive and strictly increasing")
        if np.any(eps < 1.0):
            raise ModelError("sampled eps(i xi) must be >= 1")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eps", eps)

    @property
    def static_permittivity(self) -> float:
        return float(self.eps[0])

    def permittivity(self, xi, T: float = 0.0) -> np.ndarray:
        xi = _check_xi(xi)
        lx = np.log(xi)
        gx = np.log(self.xi)
        em1 = self.eps - 1.0
        if np.all(em1 > 0.0):
            out = 1.0 + np.exp(np.interp(lx, gx, np.log(em1)))
        else:
            out = 1.0 + np.interp(lx, gx, em1)
        above = xi > self.xi[-1]
        out = np.where(above, 1.0 + em1[-1] * (self.xi[-1] / np.where(above, xi, 1.0)) ** 2, out)
        return out

    def zero_frequency_class(self) -> ZeroFrequencyClass:
        return ZeroFrequencyClass(FINITE_EPS0, self.static_permittivity)

    def label(self) -> str:
        return f"table:{self.source}" if self.source else "sampled"


DielectricResponse = Union[
    IdealMetal,
    PlasmaMetal,
    ConstantDielectric,
    OscillatorDielectric,
    DcAugmentedDielectric,
    TabulatedPermittivity,
    SampledPermittivity,
]


def permittivity_at(model, xi, T: float = 0.0):
    """``eps(i xi)`` for ``xi > 0`` (rad/s); scalar in, scalar out."""
    out = model.permittivity(np.atleast_1d(np.asarray(xi, dtype=float)), T)
    return float(out[0]) if np.ndim(xi) == 0 else out


def beta(model: DcAugmentedDielectric, T: float) -> float:
    """Dimensionless dc-conductivity strength ``2 hbar sigma_0(T) / (k_B T)``."""
    if not isinstance(model, DcAugmentedDielectric):
        raise ModelError("beta(T) is defined only for dc-augmented dielectrics")
    return model.beta(T)


def kramers_kronig(table: TabulatedPermittivity, xi: float) -> float:
    """``1 + (2/pi) int_0^inf omega Im eps / (omega^2 + xi^2) d omega``."""
    if not xi > 0.0:
        raise ModelError(f"kramers_kronig requires xi > 0, got {xi!r}")
    return max(1.0, 1.0 + 2.0 / math.pi * table.kk_integral(float(xi)))


def zero_frequency_class(model) -> ZeroFrequencyClass:
    return model.zero_frequency_class()


def static_permittivity(model) -> float:
    """Static permittivity of a finite-eps0 model (or the base of a dc model)."""
    eps0 = getattr(model, "static_permittivity", None)
    if eps0 is None:
        raise ModelError(f"{type(model).__name__} has no finite static permittivity")
    return float(eps0)


# --- optical-data files -------------------------------------------------------

_FREQ_COLUMNS = {"omega_ev": EV_TO_RADS, "omega_rads": 1.0}


def parse_optical_csv(text: str, source: str = "") -> TabulatedPermittivity:
    """Parse ``omega_ev,im_eps`` / ``omega_rads,im_eps`` CSV text.

    Metadata lines ``# extrapolate_low: <policy>`` and
    ``# extrapolate_high: <policy>`` set the extrapolation; other ``#`` lines
    are ignored. Missing policies default to ``zero``.
    """
    meta = {"extrapolate_low": "zero", "extrapolate_high": "zero"}
    header = None
    scale = None
    omega: list[float] = []
    im_eps: list[float] = []
    rows: list[int] = []
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                key, _, value = body.partition(":")
                key = key.strip()
                if key in meta:
                    meta[key] = value.strip()
                    if key == "extrapolate_low" and meta[key] not in EXTRAPOLATION_POLICIES_LOW:
                        raise OpticalDataError(f"unknown policy {meta[key]!r}", lineno)
                    if key == "extrapolate_high" and meta[key] not in EXTRAPOLATION_POLICIES_HIGH:
                        raise OpticalDataError(f"unknown policy {meta[key]!r}", lineno)
            continue
        cells = next(csv.reader([line]))
        if header is None:
            header = [c.strip().lower() for c in cells]
            if len(header) != 2 or header[0] not in _FREQ_COLUMNS or header[1] != "im_eps":
                raise OpticalDataError(
                    "header must be 'omega_ev,im_eps' or 'omega_rads,im_eps'", lineno
                )
            scale = _FREQ_COLUMNS[header[0]]
            continue
        if len(cells) != 2:
            raise OpticalDataError(f"expected 2 columns, found {len(cells)}", lineno)
        try:
            w = float(cells[0]) * scale
            e = float(cells[1])
        except ValueError:
            raise OpticalDataError(f"non-numeric value in {line!r}", lineno) from None
        if not (math.isfinite(w) and math.isfinite(e)):
            raise OpticalDataError("non-finite value", lineno)
        if w <= 0.0:
            raise OpticalDataError("frequency must be positive", lineno)
        if omega and w <= omega[-1]:
            raise OpticalDataError("frequency column is not strictly increasing", lineno)
        if e < 0.0:
            raise OpticalDataError("negative Im eps violates passivity", lineno)
        omega.append(w)
        im_eps.append(e)
        rows.append(lineno)
    if header is None:
        raise OpticalDataError("missing header line")
    if not omega:
        raise OpticalDataError("table has no data rows")
    try:
        return TabulatedPermittivity(
            np.array(omega), np.array(im_eps), meta["extrapolate_low"], meta["extrapolate_high"], source
        )
    except OpticalDataError as exc:
        # edge power-law problems refer to the first/last data rows
        raise OpticalDataError(str(exc), rows[0] if "low" in str(exc) else rows[-1]) from None


def read_optical_csv(path: Union[str, Path]) -> TabulatedPermittivity:
    path = Path(path)
    return parse_optical_csv(path.read_text(), source=path.name)


def lorentzian_im_eps(omega: Sequence[float] | np.ndarray, strength: float, omega_0: float, gamma: float) -> np.ndarray:
    """``Im eps`` of a damped oscillator ``1 + C w0^2 / (w0^2 - w^2 - i gamma w)``.

    Its Kramers-Kronig image is ``1 + C w0^2 / (w0^2 + xi^2 + gamma xi)``.
    """
    w = np.asarray(omega, dtype=float)
    return strength * omega_0**2 * gamma * w / ((omega_0**2 - w**2) ** 2 + (gamma * w) ** 2)
