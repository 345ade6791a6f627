"""Pure numpy implementation of the Fock-space and Hermite kernels.

Mirrors the compiled ``_kernels`` extension function for function.  A
generator is described by 12 complex coefficients multiplying, in order::

    a+ b+,  a b,  a+ a+,  a a,  b+ b+,  b b,  a+,  a,  b+,  b,  a+ a,  b+ b

acting on an amplitude array ``psi[j, k]`` (j photons in mode a, k in mode b),
with everything outside the array treated as zero.
"""

import math

import numpy as np

N_TERMS = 12


def op_norm_bound(coeffs, na, nb):
    """Upper bound on the operator norm of the truncated generator."""
    c = np.abs(np.asarray(coeffs))
    sa, sb = math.sqrt(na), math.sqrt(nb)
    bounds = (sa * sb, sa * sb, na, na, nb, nb, sa, sa, sb, sb, na, nb)
    return float(sum(ci * bi for ci, bi in zip(c, bounds)))


def apply_generator(psi, coeffs, out=None):
    """out = G psi for the 12-term two-mode generator ``coeffs``."""
    psi = np.asarray(psi, dtype=np.complex128)
    na, nb = psi.shape[0] - 1, psi.shape[1] - 1
    if out is None:
        out = np.empty_like(psi)
    out[...] = 0
    j = np.arange(na + 1, dtype=float)[:, None]
    k = np.arange(nb + 1, dtype=float)[None, :]
    c = coeffs
    if c[0] and na and nb:  # a+ b+ : out[j,k] += sqrt(j k) psi[j-1,k-1]
        out[1:, 1:] += c[0] * np.sqrt(j[1:] * k[:, 1:]) * psi[:-1, :-1]
    if c[1] and na and nb:  # a b : out[j,k] += sqrt((j+1)(k+1)) psi[j+1,k+1]
        out[:-1, :-1] += c[1] * np.sqrt((j[:-1] + 1) * (k[:, :-1] + 1)) * psi[1:, 1:]
    if c[2] and na > 1:
        out[2:, :] += c[2] * np.sqrt(j[2:] * (j[2:] - 1)) * psi[:-2, :]
    if c[3] and na > 1:
        out[:-2, :] += c[3] * np.sqrt((j[:-2] + 1) * (j[:-2] + 2)) * psi[2:, :]
    if c[4] and nb > 1:
        out[:, 2:] += c[4] * np.sqrt(k[:, 2:] * (k[:, 2:] - 1)) * psi[:, :-2]
    if c[5] and nb > 1:
        out[:, :-2] += c[5] * np.sqrt((k[:, :-2] + 1) * (k[:, :-2] + 2)) * psi[:, 2:]
    if c[6] and na:
        out[1:, :] += c[6] * np.sqrt(j[1:]) * psi[:-1, :]
    if c[7] and na:
        out[:-1, :] += c[7] * np.sqrt(j[:-1] + 1) * psi[1:, :]
    if c[8] and nb:
        out[:, 1:] += c[8] * np.sqrt(k[:, 1:]) * psi[:, :-1]
    if c[9] and nb:
        out[:, :-1] += c[9] * np.sqrt(k[:, :-1] + 1) * psi[:, 1:]
    if c[10]:
        out += c[10] * j * psi
    if c[11]:
        out += c[11] * k * psi
    return out


def expm_apply(psi, coeffs, tol=1e-17, max_step_norm=4.0, max_terms=200):
    """exp(G) psi by a scaled Taylor series with per-step truncation control."""
    psi = np.array(psi, dtype=np.complex128, copy=True)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    na, nb = psi.shape[0] - 1, psi.shape[1] - 1
    bound = op_norm_bound(coeffs, na, nb)
    if bound == 0.0:
        return psi
    steps = max(1, math.ceil(bound / max_step_norm))
    scaled = coeffs / steps
    term = np.empty_like(psi)
    for _ in range(steps):
        acc = psi.copy()
        term[...] = psi
        ref = np.abs(acc).max()
        for m in range(1, max_terms + 1):
            term = apply_generator(term, scaled) / m
            acc += term
            if np.abs(term).max() <= tol * ref:
                break
        else:
            raise RuntimeError("Taylor series did not converge")
        psi = acc
    return psi


def hermite_functions(nmax, xi):
    """Table phi_n(xi), n = 0..nmax, of normalized Hermite functions (shape (nmax+1, len(xi)))."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float)).ravel()
    out = np.empty((nmax + 1, xi.size))
    out[0] = math.pi**-0.25 * np.exp(-0.5 * xi**2)
    if nmax >= 1:
        out[1] = math.sqrt(2.0) * xi * out[0]
    for n in range(1, nmax):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * xi * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out
