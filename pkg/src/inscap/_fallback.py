"""Pure-Python implementations of the hot kernels.

Same contracts as inscap._native; used when the compiled extension is absent
or disabled via INSCAP_PURE=1.
"""

from __future__ import annotations

import numpy as np


def joint_cells(x: int, n: int, model: int, max_events: int) -> dict:
    """Aggregate all realizations for one input into (y, y_len, k) -> count.

    The input is bit-packed little-endian in ``x``; outputs are packed the same
    way.  ``model`` is 0 for simple, 1 for gallager.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    xbit = [(x >> i) & 1 for i in range(n)]
    rid = []
    prev = None
    num_runs = 0
    for b in xbit:
        if b != prev:
            num_runs += 1
            prev = b
        rid.append(num_runs - 1)
    k = [0] * num_runs
    out: dict = {}

    def dfs(i: int, w: int, ylen: int, y: int) -> None:
        if i == n:
            key = (y, ylen, bytes(k))
            out[key] = out.get(key, 0) + 1
            return
        r = rid[i]
        if model == 0:
            yy = y | xbit[i] << ylen
            k[r] += 1
            dfs(i + 1, w, ylen + 1, yy)
            if w < max_events:
                k[r] += 1
                dfs(i + 1, w + 1, ylen + 2, yy)
                dfs(i + 1, w + 1, ylen + 2, yy | 1 << (ylen + 1))
                k[r] -= 1
            k[r] -= 1
        else:
            k[r] += 1
            dfs(i + 1, w, ylen + 1, y | xbit[i] << ylen)
            k[r] += 1
            if w < max_events:
                for v1 in (0, 1):
                    for v2 in (0, 1):
                        dfs(i + 1, w + 1, ylen + 2, y | v1 << ylen | v2 << (ylen + 1))
            k[r] -= 2

    dfs(0, 0, 0, 0)
    return out


def capped_fill(u: np.ndarray, out: np.ndarray, l_star: int) -> int:
    """Copy u into out, flipping any bit that would create a run of l_star+1.

    Returns the number of flipped bits.
    """
    n = u.shape[0]
    run = 0
    flips = 0
    cur = 2
    ul = u.tolist()
    res = [0] * n
    for i in range(n):
        b = ul[i]
        if b == cur:
            if run == l_star:
                b = 1 - b
                flips += 1
                cur = b
                run = 1
            else:
                run += 1
        else:
            cur = b
            run = 1
        res[i] = b
    out[:] = res
    return flips
