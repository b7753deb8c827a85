"""Pure-NumPy tail-biting Viterbi decoder (fallback kernel).

Exact maximum-likelihood decoding for rate-1/2 tail-biting convolutional
codes: the trellis is expanded over all possible start states, constrained to
end where it started.  Instead of a traceback, every survivor carries its
info-bit prefix packed into a uint64, which doubles as the deterministic
tie-breaker (the lexicographically smallest info word wins).  Arithmetic is
all-integer, so results are bit-identical to the C kernel.
"""

import numpy as np

_INF = np.int64(1) << 40


def _tables(constraint: int, g0: int, g1: int):
    n_states = 1 << (constraint - 1)
    states = np.arange(n_states)
    out = np.empty((2, n_states, 2), dtype=np.int64)  # [poly, state, bit]
    for bit in (0, 1):
        reg = (bit << (constraint - 1)) | states
        for pi, g in enumerate((g0, g1)):
            vals = reg & g
            parity = np.zeros(n_states, dtype=np.int64)
            while np.any(vals):
                parity ^= vals & 1
                vals >>= 1
            out[pi, :, bit] = parity
    next_bit = states >> (constraint - 2)            # input bit leading into state ns
    low = states & ((1 << (constraint - 2)) - 1)
    pred0 = low << 1
    pred1 = pred0 | 1
    return out, next_bit, pred0, pred1


def tb_viterbi_decode(y, k: int, constraint: int, g0: int, g1: int):
    """Decode ``2k`` hard bits into the ML ``k``-bit info word."""
    y = np.asarray(y, dtype=np.uint8)
    if y.shape != (2 * k,):
        raise ValueError(f"expected {2 * k} coded bits, got {y.shape}")
    if not 2 <= constraint <= 16:
        raise ValueError("unsupported constraint length")
    if not constraint - 1 <= k <= 63:
        raise ValueError("info length must be in [constraint-1, 63]")

    out, bit_of, pred0, pred1 = _tables(constraint, g0, g1)
    n_states = 1 << (constraint - 1)

    # metric[state, start] / word[state, start]
    metric = np.full((n_states, n_states), _INF, dtype=np.int64)
    np.fill_diagonal(metric, 0)
    word = np.zeros((n_states, n_states), dtype=np.uint64)

    bits_col = bit_of.astype(np.uint64)[:, None]
    for t in range(k):
        y0 = int(y[2 * t])
        y1 = int(y[2 * t + 1])
        bm0 = (out[0, pred0, bit_of] != y0).astype(np.int64) + (out[1, pred0, bit_of] != y1)
        bm1 = (out[0, pred1, bit_of] != y0).astype(np.int64) + (out[1, pred1, bit_of] != y1)
        m0 = metric[pred0, :] + bm0[:, None]
        m1 = metric[pred1, :] + bm1[:, None]
        w0 = word[pred0, :]
        w1 = word[pred1, :]
        take1 = (m1 < m0) | ((m1 == m0) & (w1 < w0))
        metric = np.where(take1, m1, m0)
        word = (np.where(take1, w1, w0) << np.uint64(1)) | bits_col

    final_metric = np.diagonal(metric).copy()
    final_word = np.diagonal(word).copy()
    best = np.lexsort((final_word, final_metric))[0]
    w = int(final_word[best])
    return np.array([(w >> (k - 1 - i)) & 1 for i in range(k)], dtype=np.uint8)
