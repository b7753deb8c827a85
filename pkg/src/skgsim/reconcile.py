"""Code-offset secure sketch over a tail-biting convolutional code.

Alice publishes ``SS = q_a XOR Enc(r)`` for a uniformly random ``r``; Bob
decodes ``SS XOR q_b`` with the Viterbi decoder and re-encodes to recover
Alice's sequence whenever the two are close enough.  Publishing SS costs at
most ``n - k`` bits of min-entropy.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels


@dataclass(frozen=True)
class ConvCode:
    """Rate-1/2 tail-biting convolutional code.

    The default is the (171, 133) octal constraint-length-7 code with 32 info
    bits, so the coded length matches the 64-bit quantized sequences without
    padding and without spending info bits on termination.  Lower-rate
    operation (more correction, more leakage) is available by sketching
    shorter segments with a smaller ``k``.
    """

    constraint_length: int = 7
    polynomials: tuple = (0o171, 0o133)
    k: int = 32

    def __post_init__(self):
        if len(self.polynomials) != 2:
            raise ValueError("rate-1/2 code needs exactly two generator polynomials")
        if self.k < self.constraint_length - 1:
            raise ValueError("info length must cover the code memory")
        for g in self.polynomials:
            if g >= (1 << self.constraint_length):
                raise ValueError("generator polynomial wider than the constraint length")

    @property
    def n(self) -> int:
        return 2 * self.k

    @property
    def n_states(self) -> int:
        return 1 << (self.constraint_length - 1)

    @property
    def entropy_loss(self) -> int:
        """Min-entropy given up by publishing the sketch: ``n - k`` bits."""
        return self.n - self.k

    @property
    def code_id(self) -> str:
        polys = ",".join(oct(g) for g in self.polynomials)
        return f"tb-conv(K={self.constraint_length},[{polys}],k={self.k})"

    def residual_min_entropy(self, m1: float) -> float:
        return m1 - self.entropy_loss


@lru_cache(maxsize=8)
def _register_outputs(constraint: int, g0: int, g1: int):
    """Per-register output bit pair, indexed by the full K-bit register."""
    regs = np.arange(1 << constraint)
    table = np.empty((1 << constraint, 2), dtype=np.uint8)
    for col, g in enumerate((g0, g1)):
        vals = regs & g
        parity = np.zeros(len(regs), dtype=np.uint8)
        while vals.any():
            parity ^= (vals & 1).astype(np.uint8)
            vals >>= 1
        table[:, col] = parity
    return table


def conv_encode(r: np.ndarray, code: ConvCode) -> np.ndarray:
    """Tail-biting encode: the shift register starts loaded with the last
    ``K-1`` info bits, so it ends in its starting state."""
    r = np.asarray(r, dtype=np.uint8)
    if r.shape != (code.k,):
        raise ValueError(f"expected {code.k} info bits, got {r.shape}")
    kk = code.constraint_length
    table = _register_outputs(kk, *code.polynomials)
    state = 0
    for i in range(kk - 1):
        state |= int(r[code.k - 1 - i]) << (kk - 2 - i)
    out = np.empty(code.n, dtype=np.uint8)
    rl = r.tolist()
    for t in range(code.k):
        reg = (rl[t] << (kk - 1)) | state
        out[2 * t : 2 * t + 2] = table[reg]
        state = reg >> 1
    return out


def viterbi_decode(y: np.ndarray, code: ConvCode) -> np.ndarray:
    """Info word whose tail-biting codeword is nearest to ``y`` in Hamming
    distance; metric ties resolve to the lexicographically smallest word."""
    y = np.asarray(y, dtype=np.uint8)
    if y.shape != (code.n,):
        raise ValueError(f"expected {code.n} coded bits, got {y.shape}")
    g0, g1 = code.polynomials
    return kernels.tb_viterbi_decode(y, code.k, code.constraint_length, g0, g1)


@dataclass
class SketchRecord:
    ss: np.ndarray
    code_id: str


def sketch(q_a: np.ndarray, rng, code: ConvCode) -> SketchRecord:
    """Publishable sketch of ``q_a``; the random seed word is not retained."""
    q_a = np.asarray(q_a, dtype=np.uint8)
    if q_a.shape != (code.n,):
        raise ValueError(f"expected {code.n} bits, got {q_a.shape}")
    r = rng.integers(0, 2, code.k).astype(np.uint8)
    return SketchRecord(ss=q_a ^ conv_encode(r, code), code_id=code.code_id)


def recover(ss: SketchRecord, q_b: np.ndarray, code: ConvCode) -> np.ndarray:
    """Bob's reconstruction of ``q_a`` from the sketch and his own sequence.

    Exact whenever the mismatch pattern lies within the decoder's correction
    radius; a wrong result beyond that is caught by the downstream
    consistency check.
    """
    q_b = np.asarray(q_b, dtype=np.uint8)
    if q_b.shape != ss.ss.shape:
        raise ValueError("length mismatch between sketch and sequence")
    r_hat = viterbi_decode(ss.ss ^ q_b, code)
    return ss.ss ^ conv_encode(r_hat, code)
