"""Thermal Casimir interaction between a metal plate and a dielectric plate.

Numerical Lifshitz free energy, pressure and entropy, the closed-form
asymptotics they are checked against, and the dielectric models feeding both.
"""

from .asympt import (
    dc_residual_entropy,
    high_t,
    ideal_low_t,
    k4,
    psi_dm,
    q1_correction,
    real_coefficients,
    real_low_t,
    real_zero_t,
)
from .geometry import GeometryThermalState
from .lifshitz import (
    ConvergenceError,
    EntropyStepError,
    LifshitzResult,
    QuadratureConfig,
    entropy,
    free_energy,
    pressure,
    sphere_plate_force,
    zero_temperature_energy,
    zero_temperature_pressure,
)
from .models import (
    ConstantDielectric,
    DcAugmentedDielectric,
    IdealMetal,
    OscillatorDielectric,
    PlasmaMetal,
    SampledPermittivity,
    TabulatedPermittivity,
)
from .reflect import DimensionlessPoint, ReflectionPair, reflection

__version__ = "0.1.0"
