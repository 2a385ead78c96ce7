"""NumPy fallback for :mod:`hlrs._ckernels` (same signatures, same results to rounding)."""

import math

import numpy as np
from scipy.special import gammaln

TAIL_CUT = 45.0
MAX_TERMS = 200000


def psi_positive(a, b, z, xj, wj, xl, wl):
    """Gamma(a) * Psi(a, b; z) for a > 0, z > 0 (caller divides by Gamma(a))."""
    z = np.asarray(z, dtype=np.float64)
    c = b - a - 1.0
    s0 = np.where(z <= 1.0, 1.0, 1.0 / np.where(z > 0, z, 1.0))
    s = s0[:, None] * xj[None, :]
    head = (np.exp(-s * z[:, None]) * (1.0 + s) ** c) @ wj * s0**a
    ratio = TAIL_CUT / (z * s0)
    npan = np.where(ratio > 1.0, np.ceil(np.log(np.maximum(ratio, 1.0))) + 1, 1).astype(int)
    out = head.copy()
    # group by panel count so each block is a dense array operation
    for m in np.unique(npan):
        idx = np.flatnonzero(npan == m)
        w = (np.arange(m)[:, None] + xl[None, :]).ravel()
        ss = s0[idx, None] * np.exp(w)[None, :]
        vals = np.exp(-z[idx, None] * ss) * ss**a * (1.0 + ss) ** c
        out[idx] += vals @ np.tile(wl, m)
    return out


def leroy_series(beta, x, derivative):
    """Le Roy series (or its termwise derivative); returns values, |term| sums, term counts."""
    x = np.asarray(x, dtype=np.float64)
    vals = np.empty_like(x)
    asums = np.empty_like(x)
    nterms = np.empty(x.shape, dtype=np.int64)
    j0 = 1 if derivative else 0
    for i, xx in enumerate(x):
        if xx == 0.0:
            vals[i], asums[i], nterms[i] = 1.0, 1.0, 1
            continue
        lx = math.log(abs(xx))
        peak = math.ceil(math.exp(lx / beta)) if lx / beta < 700 else MAX_TERMS + 1
        # evaluate in blocks; stop once past the peak and below the truncation threshold
        total, block = [], 64
        j = j0
        while True:
            js = np.arange(j, j + block, dtype=np.float64)
            if derivative:
                mag = np.exp(np.log(js) + (js - 1) * lx - beta * gammaln(js + 1))
                sign = np.where((xx < 0) & ((js - 1) % 2 == 1), -1.0, 1.0)
            else:
                mag = np.exp(js * lx - beta * gammaln(js + 1))
                sign = np.where((xx < 0) & (js % 2 == 1), -1.0, 1.0)
            total.append(sign * mag)
            j += block
            partial = math.fsum(np.concatenate(total))
            small = np.flatnonzero((js + 1 - j0 >= 20) & (js + 1 > peak) & (mag < 1e-16 * abs(partial)))
            if small.size or j - j0 >= MAX_TERMS:
                terms = np.concatenate(total)
                if small.size:
                    cut = (j - block - j0) + small[0] + 1
                    terms = terms[:cut]
                vals[i] = math.fsum(terms)
                asums[i] = float(np.sum(np.abs(terms)))
                nterms[i] = terms.size
                break
    return vals, asums, nterms
