# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the Tricomi Psi quadrature and Le Roy series.

Signatures mirror :mod:`hlrs._pykernels`; node arrays are prepared by the
caller so this module has no SciPy dependency.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, fabs, lgamma, ceil

cnp.import_array()

cdef double TAIL_CUT = 45.0
cdef long MAX_TERMS = 200000


def psi_positive(double a, double b, const double[::1] z,
                 const double[::1] xj, const double[::1] wj,
                 const double[::1] xl, const double[::1] wl):
    """Gamma(a) * Psi(a, b; z) for a > 0, z > 0 (caller divides by Gamma(a))."""
    cdef Py_ssize_t n = z.shape[0], nj = xj.shape[0], nl = xl.shape[0]
    cdef Py_ssize_t i, k, p, npan, ptab = 0
    cdef double zz, s0, ls0, s, head, tail, c = b - a - 1.0, ss, ratio, zmin = 1.0
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] res = out
    for i in range(n):
        if z[i] < zmin:
            zmin = z[i]
    # for z <= 1 the nodes do not depend on z, so log(s^a (1+s)^c) is tabulated once
    ratio = TAIL_CUT / zmin
    ptab = <Py_ssize_t>ceil(log(ratio)) + 1 if ratio > 1.0 else 1
    # z > 1 uses the panels up to log(TAIL_CUT) scaled by 1/z
    ptab = max(ptab, <Py_ssize_t>ceil(log(TAIL_CUT)) + 1)
    cdef double[::1] head_log = np.empty(nj)
    cdef double[::1] tail_s = np.empty(ptab * nl)
    cdef double[::1] tail_log = np.empty(ptab * nl)
    for k in range(nj):
        head_log[k] = c * log1p(xj[k])
    for p in range(ptab):
        for k in range(nl):
            ss = exp(p + xl[k])
            tail_s[p * nl + k] = ss
            tail_log[p * nl + k] = a * (p + xl[k]) + c * log1p(ss)
    for i in range(n):
        zz = z[i]
        head = 0.0
        tail = 0.0
        if zz <= 1.0:
            for k in range(nj):
                head += wj[k] * exp(head_log[k] - xj[k] * zz)
            ratio = TAIL_CUT / zz
            npan = <Py_ssize_t>ceil(log(ratio)) + 1 if ratio > 1.0 else 1
            for p in range(npan):
                for k in range(nl):
                    tail += wl[k] * exp(tail_log[p * nl + k] - zz * tail_s[p * nl + k])
        else:
            s0 = 1.0 / zz
            ls0 = log(s0)
            for k in range(nj):
                s = s0 * xj[k]
                head += wj[k] * exp(c * log1p(s) - s * zz)
            head *= exp(a * ls0)
            ratio = TAIL_CUT
            npan = <Py_ssize_t>ceil(log(ratio)) + 1
            for p in range(npan):
                for k in range(nl):
                    ss = s0 * tail_s[p * nl + k]
                    tail += wl[k] * exp(a * (ls0 + p + xl[k]) + c * log1p(ss) - zz * ss)
        res[i] = head + tail
    return out


def leroy_series(double beta, const double[::1] x, bint derivative):
    """Le Roy series (or its termwise derivative) with Neumaier summation.

    Returns ``(values, abs_sums, n_terms)``; ``abs_sums`` is the sum of term
    magnitudes, used by the caller to bound cancellation error.
    """
    cdef Py_ssize_t n = x.shape[0], i
    cdef long j, j0, peak
    cdef double xx, lx, term, mag, s, comp, t, asum, sign
    vals = np.empty(n, dtype=np.float64)
    asums = np.empty(n, dtype=np.float64)
    nterms = np.empty(n, dtype=np.int64)
    cdef double[::1] v = vals
    cdef double[::1] av = asums
    cdef long long[::1] nt = nterms
    j0 = 1 if derivative else 0
    for i in range(n):
        xx = x[i]
        if xx == 0.0:
            v[i] = 1.0
            av[i] = 1.0
            nt[i] = 1
            continue
        lx = log(fabs(xx))
        peak = <long>ceil(exp(lx / beta))
        s = 0.0
        comp = 0.0
        asum = 0.0
        j = j0
        while True:
            if derivative:
                mag = exp(log(<double>j) + (j - 1) * lx - beta * lgamma(j + 1.0))
                sign = -1.0 if (xx < 0.0 and (j - 1) % 2 == 1) else 1.0
            else:
                mag = exp(j * lx - beta * lgamma(j + 1.0))
                sign = -1.0 if (xx < 0.0 and j % 2 == 1) else 1.0
            term = sign * mag
            t = s + term
            if fabs(s) >= fabs(term):
                comp += (s - t) + term
            else:
                comp += (term - t) + s
            s = t
            asum += mag
            j += 1
            if j - j0 >= 20 and j > peak and mag < 1e-16 * fabs(s + comp):
                break
            if j - j0 >= MAX_TERMS:
                break
        v[i] = s + comp
        av[i] = asum
        nt[i] = j - j0
    return vals, asums, nterms
