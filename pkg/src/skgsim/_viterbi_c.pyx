# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython tail-biting Viterbi decoder (hot kernel).

Same algorithm and tie-breaking as ``_viterbi_py``: all-start-state trellis
search with the info-bit prefix carried per survivor as a uint64, used both
for readout and as the lexicographic tie-breaker.  All-integer arithmetic
keeps the two kernels bit-identical.
"""

from libc.stdlib cimport free, malloc

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline int _parity(unsigned int x) nogil:
    x ^= x >> 16
    x ^= x >> 8
    x ^= x >> 4
    x ^= x >> 2
    x ^= x >> 1
    return x & 1


def tb_viterbi_decode(y, int k, int constraint, unsigned int g0, unsigned int g1):
    """Decode ``2k`` hard bits into the ML ``k``-bit info word."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] yy = np.ascontiguousarray(y, dtype=np.uint8)
    if yy.shape[0] != 2 * k:
        raise ValueError(f"expected {2 * k} coded bits, got {yy.shape[0]}")
    if not 2 <= constraint <= 9:
        raise ValueError("unsupported constraint length")
    if not constraint - 1 <= k <= 63:
        raise ValueError("info length must be in [constraint-1, 63]")

    cdef int n_states = 1 << (constraint - 1)
    cdef int low_mask = (1 << (constraint - 2)) - 1
    cdef int cells = n_states * n_states
    cdef int s, b, t, ns, st, p0, p1, y0, y1, reg
    cdef int inf = 1 << 28

    cdef int out0[1024]
    cdef int out1[1024]
    for s in range(n_states):
        for b in range(2):
            reg = (b << (constraint - 1)) | s
            out0[s * 2 + b] = _parity(reg & g0)
            out1[s * 2 + b] = _parity(reg & g1)

    cdef int* mp = <int*>malloc(cells * sizeof(int))
    cdef int* mn = <int*>malloc(cells * sizeof(int))
    cdef unsigned long long* wp = <unsigned long long*>malloc(cells * 8)
    cdef unsigned long long* wn = <unsigned long long*>malloc(cells * 8)
    if mp == NULL or mn == NULL or wp == NULL or wn == NULL:
        free(mp); free(mn); free(wp); free(wn)
        raise MemoryError()

    cdef int* row_m0
    cdef int* row_m1
    cdef int* row_out
    cdef unsigned long long* row_w0
    cdef unsigned long long* row_w1
    cdef unsigned long long* row_wout
    cdef int* tmp_m
    cdef unsigned long long* tmp_w
    cdef int bm0, bm1, m0, m1, take1
    cdef unsigned long long w0, w1, wbit
    cdef long long best_m
    cdef unsigned long long best_w

    with nogil:
        for s in range(cells):
            mp[s] = inf
            wp[s] = 0
        for s in range(n_states):
            mp[s * n_states + s] = 0

        for t in range(k):
            y0 = yy[2 * t]
            y1 = yy[2 * t + 1]
            for ns in range(n_states):
                b = ns >> (constraint - 2)
                p0 = (ns & low_mask) << 1
                p1 = p0 | 1
                bm0 = (out0[p0 * 2 + b] != y0) + (out1[p0 * 2 + b] != y1)
                bm1 = (out0[p1 * 2 + b] != y0) + (out1[p1 * 2 + b] != y1)
                wbit = <unsigned long long>b
                row_m0 = mp + p0 * n_states
                row_m1 = mp + p1 * n_states
                row_w0 = wp + p0 * n_states
                row_w1 = wp + p1 * n_states
                row_out = mn + ns * n_states
                row_wout = wn + ns * n_states
                for st in range(n_states):
                    m0 = row_m0[st] + bm0
                    m1 = row_m1[st] + bm1
                    w0 = row_w0[st]
                    w1 = row_w1[st]
                    take1 = (m1 < m0) | ((m1 == m0) & (w1 < w0))
                    row_out[st] = m1 if take1 else m0
                    row_wout[st] = ((w1 if take1 else w0) << 1) | wbit
            tmp_m = mp; mp = mn; mn = tmp_m
            tmp_w = wp; wp = wn; wn = tmp_w

        best_m = inf + 1
        best_w = 0
        for s in range(n_states):
            m0 = mp[s * n_states + s]
            w0 = wp[s * n_states + s]
            if m0 < best_m or (m0 == best_m and w0 < best_w):
                best_m = m0
                best_w = w0

    free(mp); free(mn); free(wp); free(wn)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] info = np.empty(k, dtype=np.uint8)
    for t in range(k):
        info[t] = (best_w >> (k - 1 - t)) & 1
    return info
