"""Analytic engine for thermalized displaced squeezed thermal states."""

from .model import (
    Coefficients,
    Displacement,
    DomainError,
    OscillatorParams,
    Squeeze,
    StateSpec,
    ThermalAngles,
    ThermalSpec,
    braid_displacement,
    coefficients,
    temperature_for_angle,
    thermal_angle,
    thermal_angles,
)
from .analytic import (
    PhotonStats,
    XPMoments,
    entropy_sum,
    mgf,
    nth_moment,
    photon_stats,
    prob_p,
    prob_x,
    quadrature_variances,
    rho_position,
    rho_position_dsts,
    uncertainty_product,
    wavefunction,
    xp_moments,
)

__version__ = "0.1.0"
