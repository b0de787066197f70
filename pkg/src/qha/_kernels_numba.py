"""Numba-compiled kernel implementations (explicit loops, O(N^3) or O(#mask^2)).

Same contracts as _kernels_numpy; see that module for the index conventions.
Compiled lazily on first use and cached on disk.
"""
import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def diag_reduce(s, tch):
    n = s.shape[0]
    wrap = np.empty(3 * n, np.int64)
    for i in range(3 * n):
        wrap[i] = i % n
    out = np.empty((n, n), np.complex128)
    for m in range(n):
        for d in range(n):
            acc = complex(0.0)
            for v in range(n):
                acc += tch[wrap[v + d], v] * s[wrap[v + m], wrap[v + d + m]]
            out[m, d] = acc
    return out


@nb.njit(cache=True, nogil=True)
def weighted_shifts(fhat, s):
    n = s.shape[0]
    wrap = np.empty(3 * n, np.int64)
    for i in range(3 * n):
        wrap[i] = i % n
    w = 1.0 / n
    out = np.empty((n, n), np.complex128)
    for a in range(n):
        for d in range(n):
            acc = complex(0.0)
            for m in range(n):
                acc += fhat[m, d] * s[wrap[a - m + n], wrap[a - d - m + 2 * n]]
            out[a, wrap[a - d + n]] = w * acc
    return out


@nb.njit(cache=True, nogil=True)
def mask_autocorr(mask):
    n = mask.shape[0]
    npts = 0
    for i in range(n):
        for j in range(n):
            if mask[i, j]:
                npts += 1
    pm = np.empty(npts, np.int64)
    pn = np.empty(npts, np.int64)
    k = 0
    for i in range(n):
        for j in range(n):
            if mask[i, j]:
                pm[k] = i
                pn[k] = j
                k += 1
    out = np.zeros((n, n), np.int64)
    for a in range(npts):
        for b in range(npts):
            out[(pm[a] - pm[b]) % n, (pn[a] - pn[b]) % n] += 1
    return out
