"""Closed-form observables of the thermalized displaced squeezed thermal state.

All coordinate arguments broadcast as numpy arrays.  Temperatures enter only
through the angles in :class:`~tdsts.model.ThermalAngles`, so lists of noise
temperatures need no special handling here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .model import DomainError, StateSpec, coefficients, stretch_factors, thermal_angles

Which = Literal["position", "momentum"]


@dataclass(frozen=True)
class XPMoments:
    mean_x: float
    var_x: float
    mean_p: float
    var_p: float
    t: float


@dataclass(frozen=True)
class PhotonStats:
    """Photon-number mean, variance and g2(0).

    ``g2`` is ``None`` when ``mean_n == 0`` (the exact vacuum), where the
    normalized correlation is undefined.
    """

    mean_n: float
    var_n: float
    g2: Optional[float]


def _k(spec: StateSpec) -> float:
    """m omega / hbar."""
    return spec.osc.m * spec.osc.omega / spec.osc.hbar


def wavefunction(spec: StateSpec, x, x_tilde, t: float):
    """Two-mode amplitude <x_tilde, x | t, beta2, alpha, z, beta1, 0>."""
    c = coefficients(spec, t)
    ang = thermal_angles(spec.thermal, spec.osc)
    k = _k(spec)
    x = np.asarray(x, dtype=float)
    x_tilde = np.asarray(x_tilde, dtype=float)
    ch, sh = math.cosh(c.Theta), math.sinh(c.Theta)
    u = x * ch - x_tilde * sh
    v = x_tilde * ch - x * sh
    lin = 2.0 * math.sqrt(0.5 * k) * ang.kappa
    QB = c.Q / c.B
    norm = math.sqrt(k / math.pi) / abs(c.F1 * c.B) * math.exp(-2.0 * QB.real)
    phys = -0.5 * k * c.G1 * u**2 + lin * c.G2 * u
    tilde = -0.5 * k * c.G1.conjugate() * v**2 + lin * c.G2.conjugate() * v
    return norm * np.exp(phys + tilde)


def _mean_terms(spec: StateSpec, t: float):
    c = coefficients(spec, t)
    ang = thermal_angles(spec.thermal, spec.osc)
    aA = spec.alpha.value / c.A
    return c, ang, aA


def rho_position(spec: StateSpec, x_prime, x, t: float):
    """Position density-matrix element rho_{x',x}(t) = int psi(x, xt) psi*(x', xt) dxt."""
    c, ang, aA = _mean_terms(spec, t)
    k = _k(spec)
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    C = ang.cosh2Theta
    K = ang.coth_quarter
    FB2 = abs(c.F1 * c.B) ** 2
    d = c.G2 - c.G2.conjugate()
    shift = math.sqrt(2.0 / k) * math.sqrt(K)
    pref = math.sqrt(k / math.pi) / math.sqrt(FB2 * C)
    expo = (
        FB2 / (2.0 * C) * K * d**2
        - 0.25 * k / (FB2 * C) * (x + x_prime - shift * 2.0 * aA.real) ** 2
        - 0.25 * k * C / FB2 * (x - x_prime - shift * FB2 / C * d) ** 2
        - 0.25 * k * (c.G1 - c.G1.conjugate()) * (x**2 - x_prime**2)
    )
    return pref * np.exp(expo)


def rho_position_dsts(spec: StateSpec, x_prime, x):
    """The t = 0, detector-noise-free element (displaced squeezed thermal state).

    Only the input-noise angle of ``spec`` is used.
    """
    c = coefficients(spec, 0.0)
    ang = thermal_angles(spec.thermal, spec.osc)
    k = _k(spec)
    a1, a2 = spec.alpha.re, spec.alpha.im
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    c1 = math.cosh(2.0 * ang.theta1)
    F12 = abs(c.F1) ** 2
    dF = c.F2 - c.F2.conjugate()
    w = dF * a1 + 2j * a2
    pref = math.sqrt(k / math.pi) / math.sqrt(F12 * c1)
    expo = (
        F12 / (2.0 * c1) * w**2
        - 0.25 * k / (F12 * c1) * (x + x_prime - math.sqrt(2.0 / k) * 2.0 * a1) ** 2
        - 0.25 * k * dF * (x**2 - x_prime**2)
        - 0.25 * k * c1 / F12 * (x - x_prime - math.sqrt(2.0 / k) * F12 / c1 * w) ** 2
    )
    return pref * np.exp(expo)


def prob_x(spec: StateSpec, x, t: float):
    """Position probability density rho_{x,x}(t)."""
    c, ang, aA = _mean_terms(spec, t)
    k = _k(spec)
    x = np.asarray(x, dtype=float)
    FB2 = abs(c.F1 * c.B) ** 2
    C = ang.cosh2Theta
    mean = math.sqrt(0.5 / k) * math.sqrt(ang.coth_quarter) * 2.0 * aA.real
    return math.sqrt(k / math.pi) / math.sqrt(FB2 * C) * np.exp(-k / (FB2 * C) * (x - mean) ** 2)


def prob_p(spec: StateSpec, p, t: float):
    """Momentum probability density <p|rho|p>."""
    c, ang, aA = _mean_terms(spec, t)
    mhw = spec.osc.m * spec.osc.hbar * spec.osc.omega
    p = np.asarray(p, dtype=float)
    FB2 = abs(c.F1 * c.B) ** 2
    C = ang.cosh2Theta
    # 1 - |F1 B|^4 ((G1 - G1*)/2)^2, real because G1 - G1* is imaginary
    D = 1.0 + FB2**2 * c.G1.imag**2
    shift = 1j * math.sqrt(0.5 * mhw * ang.coth_quarter) * (aA - aA.conjugate())
    return (
        math.sqrt(1.0 / (math.pi * mhw))
        * math.sqrt(FB2 / D)
        / math.sqrt(C)
        * np.exp(-FB2 / (mhw * D * C) * (p + shift.real) ** 2)
    )


def _phase_terms(spec: StateSpec, t: float):
    r, phi = spec.z.r, spec.z.phi
    return math.cosh(2 * r), math.sinh(2 * r), 2 * spec.osc.omega * t - phi


def xp_moments(spec: StateSpec, t: float) -> XPMoments:
    osc = spec.osc
    ang = thermal_angles(spec.thermal, osc)
    C, K = ang.cosh2Theta, ang.coth_quarter
    _, _, psi = _phase_terms(spec, t)
    plus, minus = stretch_factors(spec.z.r, psi)
    mod, gamma = spec.alpha.mod, spec.alpha.phase
    wt = osc.omega * t
    mo = osc.m * osc.omega
    return XPMoments(
        mean_x=math.sqrt(2 * osc.hbar / mo) * math.sqrt(K) * mod * math.cos(wt - gamma),
        var_x=osc.hbar / (2 * mo) * plus * C,
        mean_p=-math.sqrt(2 * mo * osc.hbar * K) * mod * math.sin(wt - gamma),
        var_p=0.5 * mo * osc.hbar * minus * C,
        t=t,
    )


def _squeeze_radicand(spec: StateSpec, t: float) -> float:
    # cosh^2 2r - sinh^2 2r cos^2(psi), rewritten to avoid cancellation
    _, sh2, psi = _phase_terms(spec, t)
    return 1.0 + (sh2 * math.sin(psi)) ** 2


def uncertainty_product(spec: StateSpec, t: float) -> float:
    C = thermal_angles(spec.thermal, spec.osc).cosh2Theta
    return 0.5 * spec.osc.hbar * C * math.sqrt(_squeeze_radicand(spec, t))


def entropy_sum(spec: StateSpec, t: float) -> float:
    """Sum of position and momentum Shannon entropies."""
    C = thermal_angles(spec.thermal, spec.osc).cosh2Theta
    return (
        math.log(math.pi * math.e * spec.osc.hbar)
        + math.log(C)
        + 0.5 * math.log(_squeeze_radicand(spec, t))
    )


def quadrature_variances(spec: StateSpec, t: float, varphi: float = 0.0) -> tuple[float, float]:
    """Variances of the rotated quadratures Y1, Y2 at rotation angle ``varphi``."""
    C = thermal_angles(spec.thermal, spec.osc).cosh2Theta
    plus, minus = stretch_factors(spec.z.r, 2 * spec.osc.omega * t + 2 * varphi - spec.z.phi)
    return 0.25 * C * plus, 0.25 * C * minus


def _mean_var(spec: StateSpec, which: Which, t: float) -> tuple[float, float]:
    mom = xp_moments(spec, t)
    if which == "position":
        return mom.mean_x, mom.var_x
    if which == "momentum":
        return mom.mean_p, mom.var_p
    raise ValueError(f"which must be 'position' or 'momentum', got {which!r}")


def mgf(spec: StateSpec, which: Which, lam, t: float):
    """Moment generating function E[exp(lam * u)] of the position or momentum."""
    mean, var = _mean_var(spec, which, t)
    lam = np.asarray(lam, dtype=float)
    return np.exp(lam * mean + 0.5 * lam**2 * var)


def gaussian_raw_moment(mean: float, var: float, n: int) -> float:
    """E[u**n] for u ~ N(mean, var), by m_k = mean m_{k-1} + (k-1) var m_{k-2}."""
    if n < 0:
        raise DomainError(f"moment order must be >= 0, got {n}")
    prev, cur = 0.0, 1.0
    for k in range(1, n + 1):
        prev, cur = cur, mean * cur + (k - 1) * var * prev
    return cur


def nth_moment(spec: StateSpec, which: Which, n: int, t: float) -> float:
    """n-th raw moment, the n-th derivative of :func:`mgf` at zero."""
    if int(n) != n or n < 0:
        raise DomainError(f"moment order must be a non-negative integer, got {n!r}")
    mean, var = _mean_var(spec, which, t)
    return gaussian_raw_moment(mean, var, int(n))


def photon_stats(spec: StateSpec) -> PhotonStats:
    ang = thermal_angles(spec.thermal, spec.osc)
    C, K = ang.cosh2Theta, ang.coth_quarter
    r, phi = spec.z.r, spec.z.phi
    a2 = spec.alpha.mod**2
    ch2, sh2 = math.cosh(2 * r), math.sinh(2 * r)
    cos_term = math.cos(phi - 2 * spec.alpha.phase)

    mean_n = 0.5 * C * ch2 - 0.5 + K * a2
    var_n = -0.25 + 0.25 * C**2 * math.cosh(4 * r) + C * K * a2 * (ch2 + sh2 * cos_term)
    if mean_n == 0.0:
        return PhotonStats(mean_n, var_n, None)
    excess = 0.25 * C**2 * sh2**2 - K**2 * a2**2 + C * K * a2 * sh2 * cos_term
    return PhotonStats(mean_n, var_n, 2.0 + excess / mean_n**2)
