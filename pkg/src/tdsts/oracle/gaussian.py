"""Gaussian (mean vector + covariance) simulation of the thermofield circuit.

Every gate is written as its Heisenberg action on the ladder operators,
``a_i -> sum_j U_ij a_j + V_ij a_j^+ + d_i``, and converted to a real affine
map on the quadratures.  Nothing here uses the closed-form results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..analytic import PhotonStats
from ..model import OscillatorParams, StateSpec, thermal_angle


@dataclass(frozen=True, eq=False)
class GaussianMode:
    """Quadrature means (x1, p1, x2, p2, ...) and symmetrized covariance."""

    mean: np.ndarray
    cov: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size % 2 or cov.shape != (mean.size, mean.size):
            raise ValueError(f"inconsistent shapes: mean {mean.shape}, cov {cov.shape}")
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def modes(self) -> int:
        return self.mean.size // 2

    def symplectic_eigenvalues(self) -> np.ndarray:
        eig = np.linalg.eigvals(1j * symplectic_form(self.modes) @ self.cov)
        return np.sort(np.abs(eig))[::2]

    def is_valid(self, tol: float = 1e-10) -> bool:
        """Symmetric covariance and every symplectic eigenvalue >= hbar/2."""
        scale = max(1.0, np.abs(self.cov).max())
        if np.abs(self.cov - self.cov.T).max() > 1e-14 * scale:
            return False
        return bool(self.symplectic_eigenvalues().min() >= 0.5 * self.hbar - tol)


def symplectic_form(modes: int) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _ladder_basis(n: int) -> np.ndarray:
    """L with (a_1..a_n, a_1^+..a_n^+) = L (q_1, s_1, ..., q_n, s_n), [q, s] = i."""
    L = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(n):
        L[i, 2 * i], L[i, 2 * i + 1] = 1, 1j
        L[n + i, 2 * i], L[n + i, 2 * i + 1] = 1, -1j
    return L / math.sqrt(2.0)


def bogoliubov_map(U, V=None, d=None):
    """Real (S, shift) on dimensionless quadratures for a -> U a + V a^+ + d."""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    n = U.shape[0]
    V = np.zeros_like(U) if V is None else np.atleast_2d(np.asarray(V, dtype=complex))
    d = np.zeros(n, dtype=complex) if d is None else np.atleast_1d(np.asarray(d, dtype=complex))
    M = np.block([[U, V], [V.conj(), U.conj()]])
    L = _ladder_basis(n)
    Linv = np.linalg.inv(L)
    S = Linv @ M @ L
    shift = Linv @ np.concatenate([d, d.conj()])
    return S.real, shift.real


def _thermal(theta: float):
    c, s = math.cosh(theta), math.sinh(theta)
    return bogoliubov_map(np.eye(2) * c, np.array([[0, s], [s, 0]]))


def _squeeze_pair(r: float, phi: float):
    c, s = math.cosh(r), math.sinh(r)
    # tilde copy takes the conjugate squeeze parameter
    return bogoliubov_map(np.eye(2) * c, np.diag([s * np.exp(1j * phi), s * np.exp(-1j * phi)]))


def _displace_pair(alpha: complex):
    return bogoliubov_map(np.eye(2), d=[alpha, np.conj(alpha)])


def _free_pair(wt: float):
    return bogoliubov_map(np.diag([np.exp(-1j * wt), np.exp(1j * wt)]))


def _to_physical(mean, cov, osc: OscillatorParams, modes: int) -> GaussianMode:
    scale = np.tile([osc.length_scale, osc.momentum_scale], modes)
    return GaussianMode(mean * scale, cov * np.outer(scale, scale), osc.hbar)


def gaussian_tfd_state(spec: StateSpec, t: float) -> GaussianMode:
    """Two-mode (physical, tilde) Gaussian state after the full thermofield circuit."""
    osc = spec.osc
    gates = [_thermal(thermal_angle(T, osc)) for T in spec.thermal.input_temps]
    gates.append(_squeeze_pair(spec.z.r, spec.z.phi))
    gates.append(_displace_pair(spec.alpha.value))
    gates += [_thermal(thermal_angle(T, osc)) for T in spec.thermal.detector_temps]
    gates.append(_free_pair(osc.omega * t))

    mean = np.zeros(4)
    cov = 0.5 * np.eye(4)
    for S, shift in gates:
        mean = S @ mean + shift
        cov = S @ cov @ S.T
    return _to_physical(mean, 0.5 * (cov + cov.T), osc, 2)


def reduce_physical(state: GaussianMode) -> GaussianMode:
    """Partial trace over the tilde mode (the physical sub-block)."""
    if state.modes != 2:
        raise ValueError(f"expected a two-mode state, got {state.modes} mode(s)")
    return GaussianMode(state.mean[:2], state.cov[:2, :2], state.hbar)


def free_evolution(state: GaussianMode, osc: OscillatorParams, t: float) -> GaussianMode:
    """Evolve under H (one mode) or H - H_tilde (two modes) for time t."""
    wt = osc.omega * t
    c, s = math.cos(wt), math.sin(wt)
    mw = osc.m * osc.omega
    rot = lambda sign: np.array([[c, sign * s / mw], [-sign * s * mw, c]])  # noqa: E731
    blocks = [rot(1.0)] + [rot(-1.0)] * (state.modes - 1)
    S = np.zeros((2 * state.modes,) * 2)
    for i, b in enumerate(blocks):
        S[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = b
    return GaussianMode(S @ state.mean, S @ state.cov @ S.T, state.hbar)


def _ordered_moment(idx: tuple, mean: np.ndarray, K: np.ndarray) -> complex:
    """<r_i1 r_i2 ...> for a Gaussian state: sum over singleton/ordered-pair partitions."""
    if not idx:
        return 1.0
    first, rest = idx[0], idx[1:]
    total = mean[first] * _ordered_moment(rest, mean, K)
    for pos, other in enumerate(rest):
        total += K[first, other] * _ordered_moment(rest[:pos] + rest[pos + 1 :], mean, K)
    return total


def gaussian_photon_stats(mode: GaussianMode, osc: OscillatorParams) -> PhotonStats:
    """<n>, Var(n), g2 of a one-mode Gaussian state by the pairing theorem."""
    if mode.modes != 1:
        raise ValueError("gaussian_photon_stats expects a one-mode state")
    K = mode.cov + 0.5j * osc.hbar * symplectic_form(1)
    weights = (osc.m * osc.omega / (2 * osc.hbar), 1.0 / (2 * osc.m * osc.hbar * osc.omega))
    mean = mode.mean

    q1 = sum(w * _ordered_moment((i, i), mean, K) for i, w in enumerate(weights))
    q2 = sum(
        wi * wk * _ordered_moment((i, i, k, k), mean, K)
        for i, wi in enumerate(weights)
        for k, wk in enumerate(weights)
    )
    n1 = (q1 - 0.5).real
    n2 = (q2 - q1 + 0.25).real
    g2: Optional[float] = None
    if abs(n1) > 1e-15:  # zero up to rounding is the vacuum
        g2 = (n2 - n1) / n1**2
    return PhotonStats(n1, n2 - n1**2, g2)
