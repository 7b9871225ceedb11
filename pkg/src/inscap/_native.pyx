# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: joint-distribution enumeration and the capped sampler.

Mirrors inscap._fallback; selected at import time by inscap.kernels.
"""

cdef struct EnumState:
    int n
    int model  # 0 = simple, 1 = gallager
    int max_events
    int num_runs
    unsigned char xbit[64]
    unsigned char rid[64]
    int k[64]


cdef void _dfs(EnumState *st, int i, int w, int ylen,
               unsigned long long y, dict out):
    cdef int r, v1, v2
    cdef unsigned long long yy
    cdef bytes kb
    cdef object key
    if i == st.n:
        kb = bytes([st.k[r] for r in range(st.num_runs)])
        key = (y, ylen, kb)
        if key in out:
            out[key] += 1
        else:
            out[key] = 1
        return
    r = st.rid[i]
    if st.model == 0:
        # emit the input bit, then optionally one inserted bit
        yy = y | (<unsigned long long> st.xbit[i]) << ylen
        st.k[r] += 1
        _dfs(st, i + 1, w, ylen + 1, yy, out)
        if w < st.max_events:
            st.k[r] += 1
            for v1 in range(2):
                _dfs(st, i + 1, w + 1, ylen + 2,
                     yy | (<unsigned long long> v1) << (ylen + 1), out)
            st.k[r] -= 1
        st.k[r] -= 1
    else:
        # either emit the input bit, or replace it by a payload pair
        st.k[r] += 1
        _dfs(st, i + 1, w, ylen + 1,
             y | (<unsigned long long> st.xbit[i]) << ylen, out)
        st.k[r] += 1
        if w < st.max_events:
            for v1 in range(2):
                for v2 in range(2):
                    _dfs(st, i + 1, w + 1, ylen + 2,
                         y | (<unsigned long long> v1) << ylen
                           | (<unsigned long long> v2) << (ylen + 1), out)
        st.k[r] -= 2


def joint_cells(unsigned long long x, int n, int model, int max_events):
    """Aggregate all realizations for one input into (y, y_len, k) -> count.

    The input is bit-packed little-endian in ``x``; outputs are packed the same
    way.  Requires n <= 31 so every output fits in 64 bits.
    """
    if n < 1 or n > 31:
        raise ValueError("native joint_cells supports 1 <= n <= 31")
    cdef EnumState st
    cdef int i
    cdef unsigned char prev
    st.n = n
    st.model = model
    st.max_events = max_events
    st.num_runs = 0
    prev = 2
    for i in range(n):
        st.xbit[i] = <unsigned char> ((x >> i) & 1)
        if st.xbit[i] != prev:
            st.num_runs += 1
            prev = st.xbit[i]
        st.rid[i] = <unsigned char> (st.num_runs - 1)
    for i in range(st.num_runs):
        st.k[i] = 0
    cdef dict out = {}
    _dfs(&st, 0, 0, 0, 0, out)
    return out


def capped_fill(const unsigned char[::1] u, unsigned char[::1] out, int l_star):
    """Copy u into out, flipping any bit that would create a run of l_star+1.

    Returns the number of flipped bits.
    """
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i
    cdef int run = 0
    cdef long long flips = 0
    cdef unsigned char cur = 2, b
    for i in range(n):
        b = u[i]
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
        out[i] = b
    return flips
