"""Parameter types, thermal angles and the complex coefficient bookkeeping.

Everything downstream (closed forms, oracles, CLI) consumes the immutable
values defined here.  Temperatures never enter a formula directly: they are
converted once into Bogoliubov angles ``theta`` with
``tanh(theta) = exp(-hbar*omega / (2*kb*T))``, and several noises of the same
kind compose by adding their angles.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence


class DomainError(ValueError):
    """Raised for physically meaningless inputs (negative temperature, ...)."""


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class OscillatorParams:
    """Mass, angular frequency, action quantum and Boltzmann constant."""

    m: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    kb: float = 1.0

    def __post_init__(self):
        for name in ("m", "omega", "hbar", "kb"):
            value = _check_finite(name, getattr(self, name))
            if value <= 0:
                raise DomainError(f"{name} must be positive, got {value!r}")

    @property
    def length_scale(self) -> float:
        """sqrt(hbar / (m omega)): ground-state position width times sqrt(2)."""
        return math.sqrt(self.hbar / (self.m * self.omega))

    @property
    def momentum_scale(self) -> float:
        return math.sqrt(self.m * self.hbar * self.omega)

    def temperature_from_tau(self, tau: float) -> float:
        """Absolute temperature for the dimensionless ``tau = kb T / (hbar omega)``."""
        return float(tau) * self.hbar * self.omega / self.kb


@dataclass(frozen=True)
class Displacement:
    re: float = 0.0
    im: float = 0.0

    def __post_init__(self):
        _check_finite("alpha.re", self.re)
        _check_finite("alpha.im", self.im)

    @classmethod
    def from_polar(cls, mod: float, arg: float) -> "Displacement":
        if mod < 0:
            raise DomainError(f"|alpha| must be non-negative, got {mod!r}")
        return cls(mod * math.cos(arg), mod * math.sin(arg))

    @classmethod
    def from_complex(cls, value: complex) -> "Displacement":
        return cls(value.real, value.imag)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    @property
    def mod(self) -> float:
        return math.hypot(self.re, self.im)

    @property
    def phase(self) -> float:
        """The phase gamma in alpha = |alpha| exp(i gamma)."""
        return math.atan2(self.im, self.re)


@dataclass(frozen=True)
class Squeeze:
    r: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        r = _check_finite("r", self.r)
        _check_finite("phi", self.phi)
        if r < 0:
            raise DomainError(f"squeeze magnitude r must be >= 0, got {r!r}")

    @property
    def value(self) -> complex:
        return cmath.rect(self.r, self.phi)


def _temps(values: Sequence[float] | None) -> tuple[float, ...]:
    out = []
    for T in values or ():
        T = _check_finite("temperature", T)
        if T < 0:
            raise DomainError(f"temperature must be >= 0, got {T!r}")
        out.append(T)
    return tuple(out)


@dataclass(frozen=True)
class ThermalSpec:
    """Input-noise and detector-noise temperatures (absolute units).

    An empty list is the same as a single zero temperature.
    """

    input_temps: tuple[float, ...] = ()
    detector_temps: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "input_temps", _temps(self.input_temps))
        object.__setattr__(self, "detector_temps", _temps(self.detector_temps))


@dataclass(frozen=True)
class StateSpec:
    osc: OscillatorParams = field(default_factory=OscillatorParams)
    alpha: Displacement = field(default_factory=Displacement)
    z: Squeeze = field(default_factory=Squeeze)
    thermal: ThermalSpec = field(default_factory=ThermalSpec)

    @classmethod
    def from_tau(
        cls,
        alpha: complex = 0j,
        r: float = 0.0,
        phi: float = 0.0,
        tau1: Sequence[float] | float = (),
        tau2: Sequence[float] | float = (),
        osc: OscillatorParams | None = None,
    ) -> "StateSpec":
        """Convenience constructor taking dimensionless temperatures kb T / (hbar omega)."""
        osc = osc or OscillatorParams()
        tau1 = [tau1] if isinstance(tau1, (int, float)) else list(tau1)
        tau2 = [tau2] if isinstance(tau2, (int, float)) else list(tau2)
        thermal = ThermalSpec(
            tuple(osc.temperature_from_tau(t) for t in tau1),
            tuple(osc.temperature_from_tau(t) for t in tau2),
        )
        return cls(osc, Displacement.from_complex(complex(alpha)), Squeeze(r, phi), thermal)


def thermal_angle(T: float, osc: OscillatorParams) -> float:
    """Bogoliubov angle with tanh(theta) = exp(-hbar omega / (2 kb T)); zero at T = 0."""
    T = _check_finite("temperature", T)
    if T < 0:
        raise DomainError(f"temperature must be >= 0, got {T!r}")
    if T == 0:
        return 0.0
    y = osc.hbar * osc.omega / (osc.kb * T)  # beta hbar omega
    if y > 1.0:
        return math.atanh(math.exp(-0.5 * y))
    # artanh(e^{-y/2}) = -ln(tanh(y/4)) / 2, accurate when e^{-y/2} is close to 1
    return -0.5 * math.log(math.tanh(0.25 * y))


def temperature_for_angle(theta: float, osc: OscillatorParams) -> float:
    """Inverse of :func:`thermal_angle`."""
    theta = _check_finite("theta", theta)
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta!r}")
    if theta == 0:
        return 0.0
    if theta < 1.0:
        log_tanh = math.log(math.tanh(theta))
    else:  # tanh close to 1: log1p keeps the digits
        log_tanh = math.log1p(-2.0 / (math.exp(2.0 * theta) + 1.0))
    return -osc.hbar * osc.omega / (2.0 * osc.kb * log_tanh)


@dataclass(frozen=True)
class ThermalAngles:
    theta1: float
    theta2: float

    @property
    def Theta(self) -> float:
        return self.theta1 + self.theta2

    @property
    def cosh2Theta(self) -> float:
        return math.cosh(2.0 * self.Theta)

    @property
    def coth_quarter(self) -> float:
        """coth(beta2 hbar omega / 4), i.e. (cosh theta2 + sinh theta2)**2."""
        return math.exp(2.0 * self.theta2)

    @property
    def kappa(self) -> float:
        """cosh(theta1) - sinh(theta1), the input-noise shrink of the displacement."""
        return math.exp(-self.theta1)


def thermal_angles(spec: ThermalSpec, osc: OscillatorParams) -> ThermalAngles:
    theta1 = math.fsum(thermal_angle(T, osc) for T in spec.input_temps)
    theta2 = math.fsum(thermal_angle(T, osc) for T in spec.detector_temps)
    return ThermalAngles(theta1, theta2)


@dataclass(frozen=True)
class Coefficients:
    """Time-dependent complex coefficients of the two-mode wavefunction."""

    F1: complex
    F2: complex
    B: complex
    G1: complex
    G2: complex
    Q: complex
    A: complex
    Theta: float


def stretch_factors(r: float, psi: float) -> tuple[float, float]:
    """cosh 2r +- sinh 2r cos(psi), free of cancellation.

    Written as e^{2r} cos^2(psi/2) + e^{-2r} sin^2(psi/2) and its mirror.
    """
    c2, s2 = math.cos(0.5 * psi) ** 2, math.sin(0.5 * psi) ** 2
    up, down = math.exp(2 * r), math.exp(-2 * r)
    return up * c2 + down * s2, up * s2 + down * c2


def coefficients(spec: StateSpec, t: float) -> Coefficients:
    t = _check_finite("t", t)
    r, phi = spec.z.r, spec.z.phi
    a1, a2 = spec.alpha.re, spec.alpha.im
    angles = thermal_angles(spec.thermal, spec.osc)
    wt = spec.osc.omega * t
    c, s = math.cos(wt), math.sin(wt)

    # cosh r + sinh r cos(phi) in the same cancellation-free form
    F1_re = math.exp(r) * math.cos(0.5 * phi) ** 2 + math.exp(-r) * math.sin(0.5 * phi) ** 2
    F1 = complex(F1_re, math.sinh(r) * math.sin(phi))
    F2 = complex(1.0, -math.sinh(2 * r) * math.sin(phi)) / stretch_factors(r, phi)[0]
    B = c + 1j * F2 * s
    G1 = (F2 * c + 1j * s) / B
    G2 = (F2 * a1 + 1j * a2) / B
    # middle term uses sin(omega t); a bare sin(omega) is dimensionally inconsistent
    Q = (F2 * c * a1**2 + 2 * F2 * s * a1 * a2 + 1j * s * a2**2) * angles.kappa**2
    return Coefficients(F1, F2, B, G1, G2, Q, complex(c, s), angles.Theta)


def braid_displacement(alpha: Displacement, z: Squeeze) -> Displacement:
    """Displacement alpha' with S(z) D(alpha) = D(alpha') S(z)."""
    a = alpha.value
    a_new = a * math.cosh(z.r) + a.conjugate() * cmath.exp(1j * z.phi) * math.sinh(z.r)
    return Displacement.from_complex(a_new)
