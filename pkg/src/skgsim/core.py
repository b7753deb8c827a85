"""Seeded randomness, complex baseband vectors, QAM constellations, Gray codes.

Complex vectors are plain ``numpy`` arrays of dtype complex128 with one entry
per OFDM subcarrier.  Bit sequences are uint8 arrays of 0/1.
"""

import math

import numpy as np

#: QAM orders with a square constellation whose per-axis size is a power of 2.
SUPPORTED_QAM_ORDERS = (4, 16, 64, 256)


_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def _mix_stream(indices) -> int:
    """Fold stream indices into one 64-bit word (boost-style hash combine)."""
    h = 0
    for v in indices:
        h ^= ((v & _MASK64) + _GOLDEN + ((h << 6) & _MASK64) + (h >> 2)) & _MASK64
        h &= _MASK64
    return h


def make_rng(seed, *stream):
    """Return a reproducible generator for ``(seed, *stream)``.

    Philox is counter-based: its 128-bit key (seed in the high word, a mix of
    the stream indices in the low word) fully determines the stream on every
    platform, and distinct keys give statistically independent streams, so
    Monte Carlo workers derive a child per trial index.  Not a CSPRNG; the
    protocol analysis assumes ideal uniform randomness, which a seeded
    simulation cannot provide anyway.
    """
    key = ((seed & _MASK64) << 64) | _mix_stream(stream)
    return np.random.Generator(np.random.Philox(key=key))


def gray_code(index: int, width: int) -> np.ndarray:
    """Reflected binary Gray code of ``index`` as ``width`` bits, MSB first."""
    if not 0 <= index < (1 << width):
        raise ValueError(f"index {index} out of range for width {width}")
    g = index ^ (index >> 1)
    return np.array([(g >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.uint8)


def gray_value(index):
    """Gray code of ``index`` as an integer (vectorized)."""
    index = np.asarray(index)
    return index ^ (index >> 1)


class QamConstellation:
    """Square M-QAM constellation, unit average power, Gray-labelled per axis.

    ``points[b]`` is the symbol whose bit label is ``b``; the label is the
    concatenation of the per-axis Gray labels (real axis bits first), so
    neighbouring grid points differ in exactly one bit.
    """

    def __init__(self, order: int):
        if order not in SUPPORTED_QAM_ORDERS:
            raise ValueError(f"unsupported QAM order {order}")
        self.order = order
        m = int(round(math.sqrt(order)))
        self.bits_per_axis = m.bit_length() - 1
        levels = np.arange(-(m - 1), m, 2, dtype=float)
        scale = math.sqrt(2.0 * (m * m - 1) / 3.0)  # E|point|^2 == 1
        levels /= scale
        # level index j (left to right) carries Gray label gray(j); invert so
        # points[] is indexed by label.
        gray = np.asarray(gray_value(np.arange(m)))
        level_of_label = np.empty(m, dtype=int)
        level_of_label[gray] = np.arange(m)
        pts = np.empty(order, dtype=complex)
        for br in range(m):
            for bi in range(m):
                pts[(br << self.bits_per_axis) | bi] = (
                    levels[level_of_label[br]] + 1j * levels[level_of_label[bi]]
                )
        self.points = pts

    @property
    def bits_per_symbol(self) -> int:
        return 2 * self.bits_per_axis


def draw_qam_vector(rng, constellation: QamConstellation, n: int) -> np.ndarray:
    """Draw ``n`` symbols i.i.d. uniform over the constellation points."""
    if n < 1:
        raise ValueError("n must be positive")
    idx = rng.integers(0, constellation.order, n)
    return constellation.points[idx]


def draw_cscg_vector(rng, variance_per_dim: float, n: int) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples.

    Real and imaginary parts are independent N(0, variance_per_dim), so the
    total per-entry power is ``2 * variance_per_dim``.
    """
    if variance_per_dim < 0:
        raise ValueError("variance must be non-negative")
    if variance_per_dim == 0:
        rng.standard_normal(2 * n)  # keep stream advancement uniform
        return np.zeros(n, dtype=complex)
    s = math.sqrt(variance_per_dim)
    re = s * rng.standard_normal(n)
    im = s * rng.standard_normal(n)
    return re + 1j * im


def bits_to_int(bits) -> int:
    """Big-endian bit sequence -> integer."""
    bits = np.asarray(bits, dtype=np.uint8)
    pad = (-bits.size) % 8
    if pad:
        bits = np.concatenate([np.zeros(pad, dtype=np.uint8), bits])
    return int.from_bytes(np.packbits(bits).tobytes(), "big")


def int_to_bits(value: int, width: int) -> np.ndarray:
    """Integer -> big-endian bit sequence of ``width`` bits."""
    if value < 0 or value >= (1 << width):
        raise ValueError(f"value {value} does not fit in {width} bits")
    nbytes = (width + 7) // 8
    raw = np.frombuffer(value.to_bytes(nbytes, "big"), dtype=np.uint8)
    return np.unpackbits(raw)[8 * nbytes - width :]
