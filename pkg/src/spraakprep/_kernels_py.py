"""Pure-Python/numpy fallback for the compiled kernels.

Same contracts as ``_kernels.pyx``; used when the extension is absent or
when ``SPRAAKPREP_PURE_PYTHON=1`` forces it.
"""

from __future__ import annotations

import numpy as np


def rms_power(x):
    x = np.asarray(x, dtype=np.float64)
    return float(np.mean(x * x))


def cyclic_take(src, n, offset):
    src = np.asarray(src, dtype=np.float64)
    m = src.shape[0]
    offset = offset % m
    if offset + n <= m:
        return src[offset : offset + n].copy()
    idx = np.arange(offset, offset + n) % m
    return src[idx]


def scale_add_peak(signal, noise, gain):
    signal = np.asarray(signal, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    out = signal + gain * noise
    peak = float(np.max(np.abs(out))) if out.size else 0.0
    scale = 1.0
    if peak > 1.0:
        scale = 1.0 / peak
        out = out * scale
    return out, scale


def levenshtein_counts(ref, hyp):
    # Two-row DP carrying (cost, subs, dels, ins) per cell. Tie order
    # must stay identical to the compiled kernel: diagonal, deletion,
    # insertion.
    ref = list(ref)
    hyp = list(hyp)
    nh = len(hyp)
    prev = [(j, 0, 0, j) for j in range(nh + 1)]
    for i, r in enumerate(ref, start=1):
        cur = [(i, 0, i, 0)] + [None] * nh
        for j, h in enumerate(hyp, start=1):
            sub_inc = 0 if r == h else 1
            pd = prev[j - 1]
            pu = prev[j]
            pl = cur[j - 1]
            cd = pd[0] + sub_inc
            cde = pu[0] + 1
            ci = pl[0] + 1
            if cd <= cde and cd <= ci:
                cur[j] = (cd, pd[1] + sub_inc, pd[2], pd[3])
            elif cde <= ci:
                cur[j] = (cde, pu[1], pu[2] + 1, pu[3])
            else:
                cur[j] = (ci, pl[1], pl[2], pl[3] + 1)
        prev = cur
    _, subs, dels, ins = prev[nh]
    return subs, dels, ins
