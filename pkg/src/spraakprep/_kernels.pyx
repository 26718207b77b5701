# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: sample-level mixing and word-alignment DP.

Signatures mirror ``_kernels_py`` exactly; ``kernels.py`` selects one
backend at import time.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def rms_power(double[::1] x):
    """Mean of squared samples."""
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += x[i] * x[i]
    return acc / n


def cyclic_take(double[::1] src, Py_ssize_t n, Py_ssize_t offset):
    """n samples read cyclically from src starting at offset."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i, m = src.shape[0]
    cdef Py_ssize_t j = offset % m
    for i in range(n):
        ov[i] = src[j]
        j += 1
        if j == m:
            j = 0
    return out


def scale_add_peak(double[::1] signal, double[::1] noise, double gain):
    """signal + gain*noise, rescaled by the peak when it exceeds 1.0.

    Returns (mix, peak_scale) where peak_scale is the factor applied to
    the whole mixture (1.0 when no sample exceeded full scale).
    """
    cdef Py_ssize_t i, n = signal.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double peak = 0.0
    cdef double v, scale
    for i in range(n):
        v = signal[i] + gain * noise[i]
        ov[i] = v
        if v < 0.0:
            v = -v
        if v > peak:
            peak = v
    scale = 1.0
    if peak > 1.0:
        scale = 1.0 / peak
        for i in range(n):
            ov[i] *= scale
    return out, scale


def levenshtein_counts(int[::1] ref, int[::1] hyp):
    """Word-level minimum edit alignment.

    Returns (substitutions, deletions, insertions). Ties are resolved
    match/substitution first, then deletion, then insertion, so both
    backends produce identical triples.
    """
    cdef Py_ssize_t nr = ref.shape[0]
    cdef Py_ssize_t nh = hyp.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=2] buf = np.zeros((8, nh + 1), dtype=np.int64)
    cdef long[:, ::1] b = buf
    # rows 0-3: previous (cost, sub, del, ins); rows 4-7: current
    cdef Py_ssize_t i, j, k
    cdef long cd, cde, ci, sub_inc
    for j in range(nh + 1):
        b[0, j] = j
        b[3, j] = j
    for i in range(1, nr + 1):
        b[4, 0] = i
        b[5, 0] = 0
        b[6, 0] = i
        b[7, 0] = 0
        for j in range(1, nh + 1):
            sub_inc = 0 if ref[i - 1] == hyp[j - 1] else 1
            cd = b[0, j - 1] + sub_inc
            cde = b[0, j] + 1
            ci = b[4, j - 1] + 1
            if cd <= cde and cd <= ci:
                b[4, j] = cd
                b[5, j] = b[1, j - 1] + sub_inc
                b[6, j] = b[2, j - 1]
                b[7, j] = b[3, j - 1]
            elif cde <= ci:
                b[4, j] = cde
                b[5, j] = b[1, j]
                b[6, j] = b[2, j] + 1
                b[7, j] = b[3, j]
            else:
                b[4, j] = ci
                b[5, j] = b[5, j - 1]
                b[6, j] = b[6, j - 1]
                b[7, j] = b[7, j - 1] + 1
        for k in range(4):
            for j in range(nh + 1):
                b[k, j] = b[k + 4, j]
    return int(b[1, nh]), int(b[2, nh]), int(b[3, nh])
