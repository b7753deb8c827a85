"""Privacy amplification and consistency checking with modular-product hashing.

The reconciled sequence is split in half: the first half selects the hash
function, the second half is hashed, so both parties land on the same
function exactly when their sequences agree.  The check value is derived from
the key the same way at half the width.  Big-endian bit/integer conversion
throughout.
"""

from dataclasses import dataclass

import numpy as np

from .core import bits_to_int, int_to_bits

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 2^64."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def largest_prime_below(pow2_m: int) -> int:
    """Largest prime p with 2^(m-1) < p < 2^m, for pow2_m = 2^m, m in [2, 64].

    Bertrand's postulate guarantees existence.
    """
    m = pow2_m.bit_length() - 1
    if pow2_m != 1 << m or not 2 <= m <= 64:
        raise ValueError("argument must be 2^m with 2 <= m <= 64")
    candidate = pow2_m - 1
    while candidate > pow2_m // 2:
        if _is_prime(candidate):
            return candidate
        candidate -= 1
    raise AssertionError("no prime found; unreachable for m >= 2")


@dataclass(frozen=True)
class HashParams:
    m: int              # output width in bits
    l: int = 1          # number of input parts

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("output width must be at least 2 bits")
        if self.l < 1:
            raise ValueError("need at least one part")

    @property
    def p(self) -> int:
        return largest_prime_below(1 << self.m)


def uhf(selector: np.ndarray, data: np.ndarray, params: HashParams) -> np.ndarray:
    """Modular multiply-accumulate hash, ``sum_k selector_k * data_k mod p``.

    ``selector`` plays the role of the randomly chosen member of the family;
    both inputs are split into ``l`` parts of at most ``m`` bits.  The output
    is the ``m``-bit big-endian encoding of the residue (values in [0, p),
    slightly non-uniform near 2^m, inherent to the construction).
    """
    selector = np.asarray(selector, dtype=np.uint8)
    data = np.asarray(data, dtype=np.uint8)
    for name, bits in (("selector", selector), ("input", data)):
        if bits.size == 0 or bits.size % params.l:
            raise ValueError(f"{name} does not split into {params.l} parts")
        if bits.size // params.l > params.m:
            raise ValueError(f"{name} parts exceed {params.m} bits")
    p = params.p
    part_s = selector.size // params.l
    part_d = data.size // params.l
    acc = 0
    for j in range(params.l):
        a = bits_to_int(selector[j * part_s : (j + 1) * part_s])
        b = bits_to_int(data[j * part_d : (j + 1) * part_d])
        acc = (acc + a * b) % p
    return int_to_bits(acc, params.m)


@dataclass
class KeyMaterial:
    key: np.ndarray
    check: np.ndarray


def derive_key(q: np.ndarray) -> KeyMaterial:
    """Key and check value from a reconciled bit sequence.

    The sequence splits into selector and payload halves; hashing gives the
    key at half the input length, and the same construction applied to the
    key gives the check value at half the key length.
    """
    q = np.asarray(q, dtype=np.uint8)
    if q.size % 4:
        raise ValueError("sequence length must be a multiple of 4")
    half = q.size // 2
    key = uhf(q[:half], q[half:], HashParams(m=half))
    quarter = half // 2
    check = uhf(key[:quarter], key[quarter:], HashParams(m=quarter))
    return KeyMaterial(key=key, check=check)


def combine_sessions(keys) -> np.ndarray:
    """XOR the keys of four accepted sessions into one final key."""
    keys = [np.asarray(k, dtype=np.uint8) for k in keys]
    if len(keys) != 4:
        raise ValueError(f"expected 4 session keys, got {len(keys)}")
    out = keys[0].copy()
    for k in keys[1:]:
        if k.shape != out.shape:
            raise ValueError("session keys differ in length")
        out ^= k
    return out


def consistency_check(c_alice: np.ndarray, c_bob: np.ndarray) -> bool:
    """True (accept) iff the check values agree; a reject re-initiates the
    session.  False accepts happen with probability at most 1/p."""
    c_alice = np.asarray(c_alice, dtype=np.uint8)
    c_bob = np.asarray(c_bob, dtype=np.uint8)
    if c_alice.shape != c_bob.shape:
        raise ValueError("check sequences differ in length")
    return bool(np.array_equal(c_alice, c_bob))
