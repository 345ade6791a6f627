# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Fock-space and Hermite kernels.  Same API as ``_kernels_py``.

Complex amplitudes are handled as interleaved (re, im) doubles: C99 complex
multiplication goes through a NaN-safe library call that is far slower than
the four real products it replaces.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, fabs, ceil, M_PI
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset

cnp.import_array()

N_TERMS = 12

# factor tables, indexed by the output photon number
cdef enum:
    UP1 = 0  # sqrt(n)
    DN1 = 1  # sqrt(n + 1)
    UP2 = 2  # sqrt(n (n - 1))
    DN2 = 3  # sqrt((n + 1)(n + 2))
    NUM = 4  # n
    ONE = 5  # 1

# per term: row table, column table, row shift, column shift
_LAYOUT = (
    (UP1, UP1, -1, -1),  # a+ b+
    (DN1, DN1, 1, 1),    # a b
    (UP2, ONE, -2, 0),   # a+ a+
    (DN2, ONE, 2, 0),    # a a
    (ONE, UP2, 0, -2),   # b+ b+
    (ONE, DN2, 0, 2),    # b b
    (UP1, ONE, -1, 0),   # a+
    (DN1, ONE, 1, 0),    # a
    (ONE, UP1, 0, -1),   # b+
    (ONE, DN1, 0, 1),    # b
    (NUM, ONE, 0, 0),    # a+ a
    (ONE, NUM, 0, 0),    # b+ b
)
cdef int TERMS[12][4]
for _i, _row in enumerate(_LAYOUT):
    for _j, _v in enumerate(_row):
        TERMS[_i][_j] = _v


def op_norm_bound(coeffs, Py_ssize_t na, Py_ssize_t nb):
    cdef double sa = sqrt(<double>na), sb = sqrt(<double>nb)
    bounds = (sa * sb, sa * sb, na, na, nb, nb, sa, sa, sb, sb, na, nb)
    return float(sum(abs(complex(c)) * b for c, b in zip(coeffs, bounds)))


cdef double* _tables(Py_ssize_t n):
    """Six factor tables of length n, stored back to back."""
    cdef double *t = <double *> malloc(6 * n * sizeof(double))
    cdef Py_ssize_t i
    for i in range(n):
        t[UP1 * n + i] = sqrt(<double>i)
        t[DN1 * n + i] = sqrt(<double>(i + 1))
        t[UP2 * n + i] = sqrt(<double>i * (i - 1)) if i > 0 else 0.0
        t[DN2 * n + i] = sqrt(<double>(i + 1) * (i + 2))
        t[NUM * n + i] = <double>i
        t[ONE * n + i] = 1.0
    return t


cdef void _apply(const double *P, double *O, Py_ssize_t na1, Py_ssize_t nb1,
                 const double *cre, const double *cim, double scale,
                 const double *tab, Py_ssize_t tn) nogil:
    """O = scale * G P on an na1 x nb1 interleaved complex array."""
    cdef Py_ssize_t term, j, k, j0, j1, k0, k1, dj, dk, src
    cdef const double *wa
    cdef const double *wb
    cdef double wr, wi, f, pr, pi
    memset(O, 0, 2 * na1 * nb1 * sizeof(double))
    for term in range(12):
        if cre[term] == 0.0 and cim[term] == 0.0:
            continue
        wa = tab + TERMS[term][0] * tn
        wb = tab + TERMS[term][1] * tn
        dj = TERMS[term][2]
        dk = TERMS[term][3]
        j0 = -dj if dj < 0 else 0
        j1 = na1 - dj if dj > 0 else na1
        k0 = -dk if dk < 0 else 0
        k1 = nb1 - dk if dk > 0 else nb1
        for j in range(j0, j1):
            wr = cre[term] * wa[j] * scale
            wi = cim[term] * wa[j] * scale
            src = (j + dj) * nb1 + dk
            for k in range(k0, k1):
                f = wb[k]
                pr = P[2 * (src + k)]
                pi = P[2 * (src + k) + 1]
                O[2 * (j * nb1 + k)] += f * (wr * pr - wi * pi)
                O[2 * (j * nb1 + k) + 1] += f * (wr * pi + wi * pr)


cdef void _split(coeffs, double *cre, double *cim, double divisor):
    cdef int i
    for i in range(12):
        z = complex(coeffs[i]) / divisor
        cre[i] = z.real
        cim[i] = z.imag


def apply_generator(psi, coeffs, out=None):
    p = np.ascontiguousarray(psi, dtype=np.complex128)
    if out is None:
        out = np.empty_like(p)
    cdef double[:, ::1] pv = p.view(np.float64)
    cdef double[:, ::1] ov = out.view(np.float64)
    cdef Py_ssize_t na1 = p.shape[0], nb1 = p.shape[1]
    cdef double cre[12]
    cdef double cim[12]
    _split(coeffs, cre, cim, 1.0)
    cdef Py_ssize_t tn = max(na1, nb1) + 2
    cdef double *tab = _tables(tn)
    try:
        _apply(&pv[0, 0], &ov[0, 0], na1, nb1, cre, cim, 1.0, tab, tn)
    finally:
        free(tab)
    return out


def expm_apply(psi, coeffs, double tol=1e-17, double max_step_norm=4.0, int max_terms=200):
    cur_arr = np.array(psi, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t na1 = cur_arr.shape[0], nb1 = cur_arr.shape[1]
    cdef double bound = op_norm_bound(coeffs, na1 - 1, nb1 - 1)
    if bound == 0.0:
        return cur_arr
    cdef Py_ssize_t steps = max(1, <Py_ssize_t>ceil(bound / max_step_norm))
    cdef double cre[12]
    cdef double cim[12]
    _split(coeffs, cre, cim, <double>steps)

    work = np.empty((3, na1, 2 * nb1))
    cdef double[:, :, ::1] w = work
    cdef double[:, ::1] cv = cur_arr.view(np.float64)
    cdef double *cur = &cv[0, 0]
    cdef double *term = &w[0, 0, 0]
    cdef double *nxt = &w[1, 0, 0]
    cdef double *acc = &w[2, 0, 0]
    cdef double *swap
    cdef Py_ssize_t n2 = 2 * na1 * nb1, i, s
    cdef double ref, tmax, v
    cdef int m
    cdef bint converged
    cdef Py_ssize_t tn = max(na1, nb1) + 2
    cdef double *tab = _tables(tn)
    try:
        with nogil:
            for s in range(steps):
                memcpy(acc, cur, n2 * sizeof(double))
                memcpy(term, cur, n2 * sizeof(double))
                ref = 0.0
                for i in range(n2):
                    v = fabs(cur[i])
                    if v > ref:
                        ref = v
                converged = False
                for m in range(1, max_terms + 1):
                    _apply(term, nxt, na1, nb1, cre, cim, 1.0 / m, tab, tn)
                    swap = term
                    term = nxt
                    nxt = swap
                    tmax = 0.0
                    for i in range(n2):
                        acc[i] += term[i]
                        v = fabs(term[i])
                        if v > tmax:
                            tmax = v
                    if tmax <= tol * ref:
                        converged = True
                        break
                if not converged:
                    break
                memcpy(cur, acc, n2 * sizeof(double))
    finally:
        free(tab)
    if not converged:
        raise RuntimeError("Taylor series did not converge")
    return cur_arr


def hermite_functions(int nmax, xi):
    cdef double[::1] x = np.ascontiguousarray(np.atleast_1d(np.asarray(xi, dtype=float)).ravel())
    cdef Py_ssize_t npts = x.shape[0], i
    cdef int n
    out = np.empty((nmax + 1, npts))
    cdef double[:, ::1] o = out
    cdef double q0 = M_PI ** -0.25
    cdef double a, b
    for i in range(npts):
        o[0, i] = q0 * exp(-0.5 * x[i] * x[i])
    if nmax >= 1:
        for i in range(npts):
            o[1, i] = sqrt(2.0) * x[i] * o[0, i]
    for n in range(1, nmax):
        a = sqrt(2.0 / (n + 1))
        b = sqrt(<double>n / (n + 1))
        for i in range(npts):
            o[n + 1, i] = a * x[i] * o[n, i] - b * o[n - 1, i]
    return out
