"""Truncated Fock-space simulation of the thermofield circuit.

Gates are exponentials of ladder-operator generators applied directly to the
two-mode amplitude array (see :mod:`tdsts.kernels`).  The circuit runs in a
padded working space and is then projected onto the requested cutoff; the
discarded weight is reported as ``norm_deficit``.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..analytic import PhotonStats
from ..model import Displacement, OscillatorParams, Squeeze, StateSpec, thermal_angle

DEFAULT_CUTOFF = 60
CONVERGED_DEFICIT = 1e-10
MAX_DEFICIT = 1e-6

# generator term slots, see tdsts._kernels_py
AB_DAG, AB, AA_DAG, AA, BB_DAG, BB, A_DAG, A, B_DAG, B, NA, NB = range(12)


class FockConvergenceError(RuntimeError):
    pass


class TruncationWarning(UserWarning):
    pass


def default_cutoff() -> int:
    return int(os.environ.get("TDSTS_FOCK_CUTOFF", DEFAULT_CUTOFF))


@dataclass(frozen=True, eq=False)
class FockState:
    cutoff: int
    amplitudes: np.ndarray
    norm_deficit: float

    @property
    def converged(self) -> bool:
        return self.norm_deficit <= CONVERGED_DEFICIT


def _gen(**terms) -> np.ndarray:
    c = np.zeros(12, dtype=complex)
    for name, value in terms.items():
        c[globals()[name.upper()]] = value
    return c


def thermal_generator(theta: float) -> np.ndarray:
    """-theta (a b - a+ b+)."""
    return _gen(ab_dag=theta, ab=-theta)


def squeeze_generator(z: complex, tilde: bool = True) -> np.ndarray:
    """-(z* a a - z a+ a+)/2, plus the tilde copy with z -> z*.

    The two factors act on different modes, so one exponential covers both.
    """
    g = _gen(aa_dag=0.5 * z, aa=-0.5 * np.conj(z))
    if tilde:
        g += _gen(bb_dag=0.5 * np.conj(z), bb=-0.5 * z)
    return g


def displacement_generator(alpha: complex, tilde: bool = True) -> np.ndarray:
    """alpha a+ - alpha* a, plus the tilde copy with alpha -> alpha*."""
    g = _gen(a_dag=alpha, a=-np.conj(alpha))
    if tilde:
        g += _gen(b_dag=np.conj(alpha), b=-alpha)
    return g


def _free_phase(psi: np.ndarray, wt: float) -> np.ndarray:
    """exp(-i (H - H_tilde) t / hbar), diagonal in the number basis."""
    j = np.arange(psi.shape[0])[:, None]
    k = np.arange(psi.shape[1])[None, :]
    return psi * np.exp(-1j * wt * (j - k))


def fock_tfd_state(spec: StateSpec, t: float, cutoff: int | None = None, pad: int | None = None) -> FockState:
    """Thermofield circuit on the two-mode vacuum, truncated at ``cutoff`` photons per mode."""
    cutoff = default_cutoff() if cutoff is None else int(cutoff)
    if cutoff < 8:
        raise ValueError(f"cutoff must be >= 8, got {cutoff}")
    work = cutoff + (cutoff if pad is None else int(pad))
    osc = spec.osc

    generators = [thermal_generator(thermal_angle(T, osc)) for T in spec.thermal.input_temps]
    generators.append(squeeze_generator(spec.z.value))
    generators.append(displacement_generator(spec.alpha.value))
    generators += [thermal_generator(thermal_angle(T, osc)) for T in spec.thermal.detector_temps]

    psi = np.zeros((work + 1, work + 1), dtype=complex)
    psi[0, 0] = 1.0
    for g in generators:
        psi = kernels.expm_apply(psi, g)
    psi = _free_phase(psi, osc.omega * t)

    kept = np.ascontiguousarray(psi[: cutoff + 1, : cutoff + 1])
    deficit = max(0.0, 1.0 - float(np.vdot(kept, kept).real))
    if deficit > MAX_DEFICIT:
        raise FockConvergenceError(
            f"Fock truncation at cutoff {cutoff} drops weight {deficit:.2e} > {MAX_DEFICIT:g}; "
            "increase the cutoff (oracle.fock_cutoff or TDSTS_FOCK_CUTOFF)"
        )
    return FockState(cutoff, kept, deficit)


@dataclass(frozen=True)
class FockExpectations:
    mean_x: float
    mean_p: float
    x2: float
    p2: float
    mean_n: float
    n2: float

    def photon_stats(self) -> PhotonStats:
        g2 = None if self.mean_n == 0 else (self.n2 - self.mean_n) / self.mean_n**2
        return PhotonStats(self.mean_n, self.n2 - self.mean_n**2, g2)


def fock_expectations(state: FockState, osc: OscillatorParams) -> FockExpectations:
    """Physical-mode expectations; the tilde index is summed over (partial trace)."""
    c = state.amplitudes
    norm = float(np.vdot(c, c).real)
    n = np.arange(c.shape[0], dtype=float)
    pn = (np.abs(c) ** 2).sum(axis=1) / norm
    a1 = np.vdot(c[:-1], np.sqrt(n[1:])[:, None] * c[1:]) / norm
    a2 = np.vdot(c[:-2], np.sqrt(n[1:-1] * n[2:])[:, None] * c[2:]) / norm
    mean_n = float(pn @ n)
    n2 = float(pn @ n**2)
    lx, lp = osc.length_scale, osc.momentum_scale
    return FockExpectations(
        mean_x=math.sqrt(2.0) * lx * a1.real,
        mean_p=math.sqrt(2.0) * lp * a1.imag,
        x2=0.5 * lx**2 * (2 * a2.real + 2 * mean_n + 1),
        p2=0.5 * lp**2 * (-2 * a2.real + 2 * mean_n + 1),
        mean_n=mean_n,
        n2=n2,
    )


def hermite_table(nmax: int, x, osc: OscillatorParams) -> np.ndarray:
    """Oscillator eigenfunctions phi_n(x), n = 0..nmax, in physical units."""
    xi = np.asarray(x, dtype=float) / osc.length_scale
    return kernels.hermite_functions(nmax, xi) / math.sqrt(osc.length_scale)


def wavefunction_from_fock(state: FockState, osc: OscillatorParams, x, x_tilde):
    """sum_jk c_jk phi_j(x) phi_k(x_tilde), broadcast over x and x_tilde."""
    x, x_tilde = np.broadcast_arrays(np.asarray(x, float), np.asarray(x_tilde, float))
    limit = math.sqrt(2.0 * state.cutoff) * osc.length_scale
    if max(np.abs(x).max(initial=0), np.abs(x_tilde).max(initial=0)) > limit:
        warnings.warn(
            "evaluation point beyond the classical turning point of the cutoff level; "
            "truncated reconstruction is unreliable there",
            TruncationWarning,
            stacklevel=2,
        )
    phi_x = hermite_table(state.cutoff, x.ravel(), osc)
    phi_t = hermite_table(state.cutoff, x_tilde.ravel(), osc)
    vals = np.einsum("jk,jp,kp->p", state.amplitudes, phi_x, phi_t)
    return vals.reshape(x.shape)


def single_mode_circuit(generators, cutoff: int = DEFAULT_CUTOFF, pad: int | None = None) -> np.ndarray:
    """Apply exp(g) for each generator in order to |0>, one mode; returns amplitudes up to cutoff."""
    work = cutoff + (cutoff if pad is None else int(pad))
    psi = np.zeros((work + 1, 1), dtype=complex)
    psi[0, 0] = 1.0
    for g in generators:
        psi = kernels.expm_apply(psi, g)
    return psi[: cutoff + 1, 0]


def fock_braid_overlap(alpha: Displacement, z: Squeeze, alpha_prime: Displacement, cutoff: int = DEFAULT_CUTOFF) -> float:
    """|<0| S+ D+ ... | ... D(alpha') S |0>|: overlap of S(z)D(alpha)|0> with D(alpha')S(z)|0>."""
    sq = squeeze_generator(z.value, tilde=False)
    lhs = single_mode_circuit([displacement_generator(alpha.value, tilde=False), sq], cutoff)
    rhs = single_mode_circuit([sq, displacement_generator(alpha_prime.value, tilde=False)], cutoff)
    return float(abs(np.vdot(lhs, rhs)))
