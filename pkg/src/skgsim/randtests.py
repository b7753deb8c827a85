"""Core statistical randomness tests (frequency, runs, spectral, pattern,
entropy and cumulative-sum families), implemented from the published test
statistics so the package stays self-contained.

Each test returns a p-value; a sequence is considered random at 99%
confidence when p > 0.01.  Tests report ``None`` (skipped) when the sequence
is too short for their asymptotics.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, gammaincc
from scipy.stats import norm

PASS_THRESHOLD = 0.01


@dataclass
class TestResult:
    name: str
    p_value: float | None
    passed: bool | None
    note: str = ""


def _result(name, p, note=""):
    p = float(min(max(p, 0.0), 1.0))
    return TestResult(name, p, p > PASS_THRESHOLD, note)


def _skip(name, why):
    return TestResult(name, None, None, f"skipped: {why}")


def monobit(bits) -> TestResult:
    n = bits.size
    if n < 100:
        return _skip("monobit", f"needs >= 100 bits, got {n}")
    s = abs(int(2 * int(bits.sum()) - n)) / math.sqrt(n)
    return _result("monobit", erfc(s / math.sqrt(2.0)))


def block_frequency(bits, block: int = 128) -> TestResult:
    n = bits.size
    nb = n // block
    if nb < 1:
        return _skip("block_frequency", f"needs >= {block} bits, got {n}")
    pi = bits[: nb * block].reshape(nb, block).mean(axis=1)
    chi2 = 4.0 * block * float(((pi - 0.5) ** 2).sum())
    return _result("block_frequency", gammaincc(nb / 2.0, chi2 / 2.0))


def runs(bits) -> TestResult:
    n = bits.size
    if n < 100:
        return _skip("runs", f"needs >= 100 bits, got {n}")
    pi = float(bits.mean())
    if abs(pi - 0.5) >= 2.0 / math.sqrt(n):
        return _result("runs", 0.0, note="prerequisite frequency test failed")
    v = 1 + int((bits[1:] != bits[:-1]).sum())
    num = abs(v - 2.0 * n * pi * (1.0 - pi))
    den = 2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)
    return _result("runs", erfc(num / den))


_LONGEST_RUN_TABLES = (
    # (min n, block size, category upper edges, category probabilities)
    (750_000, 10_000, (10, 11, 12, 13, 14, 15), (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
    (6_272, 128, (4, 5, 6, 7, 8), (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (128, 8, (1, 2, 3), (0.2148, 0.3672, 0.2305, 0.1875)),
)


def _longest_run_of_ones(block_bits):
    best = run = 0
    for b in block_bits:
        run = run + 1 if b else 0
        if run > best:
            best = run
    return best


def longest_run(bits) -> TestResult:
    n = bits.size
    for min_n, block, edges, pi in _LONGEST_RUN_TABLES:
        if n >= min_n:
            break
    else:
        return _skip("longest_run", f"needs >= 128 bits, got {n}")
    nb = n // block
    counts = np.zeros(len(pi))
    blocks = bits[: nb * block].reshape(nb, block)
    # vectorized longest run per block: position of runs via cumulative trick
    for row in blocks:
        longest = _longest_run_of_ones(row)
        idx = np.searchsorted(edges, longest, side="left")
        if longest > edges[-1]:
            idx = len(pi) - 1
        counts[idx] += 1
    expected = nb * np.asarray(pi)
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    return _result("longest_run", gammaincc((len(pi) - 1) / 2.0, chi2 / 2.0))


def dft(bits) -> TestResult:
    n = bits.size
    if n < 1000:
        return _skip("dft", f"needs >= 1000 bits, got {n}")
    x = 2.0 * bits.astype(np.float64) - 1.0
    mags = np.abs(np.fft.rfft(x))[: n // 2]
    threshold = math.sqrt(n * math.log(1.0 / 0.05))
    n1 = int((mags < threshold).sum())
    n0 = 0.95 * n / 2.0
    d = (n1 - n0) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    return _result("dft", erfc(abs(d) / math.sqrt(2.0)))


def _pattern_counts(bits, m):
    """Counts of all overlapping m-bit patterns on the cyclic extension."""
    if m == 0:
        return None
    n = bits.size
    ext = np.concatenate([bits, bits[: m - 1]]).astype(np.int64)
    codes = np.zeros(n, dtype=np.int64)
    for j in range(m):
        codes = (codes << 1) | ext[j : j + n]
    return np.bincount(codes, minlength=1 << m)


def _psi_sq(bits, m):
    if m <= 0:
        return 0.0
    counts = _pattern_counts(bits, m)
    n = bits.size
    return float((1 << m) / n * (counts.astype(np.float64) ** 2).sum() - n)


def serial(bits, m: int = 16) -> TestResult:
    n = bits.size
    if n < (1 << (m + 2)):
        return _skip("serial", f"needs >= {1 << (m + 2)} bits for m={m}, got {n}")
    psi_m = _psi_sq(bits, m)
    psi_m1 = _psi_sq(bits, m - 1)
    psi_m2 = _psi_sq(bits, m - 2)
    d1 = psi_m - psi_m1
    d2 = psi_m - 2.0 * psi_m1 + psi_m2
    p1 = gammaincc(2 ** (m - 2), d1 / 2.0)
    p2 = gammaincc(2 ** (m - 3), d2 / 2.0)
    # both statistics must look random; report the stricter p-value
    return _result("serial", min(p1, p2), note=f"m={m}, min of two p-values")


def approximate_entropy(bits, m: int = 8) -> TestResult:
    n = bits.size
    if n < (1 << (m + 3)):
        return _skip("approximate_entropy", f"needs >= {1 << (m + 3)} bits for m={m}, got {n}")

    def phi(mm):
        counts = _pattern_counts(bits, mm)
        c = counts[counts > 0] / n
        return float((c * np.log(c)).sum())

    apen = phi(m) - phi(m + 1)
    chi2 = 2.0 * n * (math.log(2.0) - apen)
    return _result("approximate_entropy", gammaincc(2 ** (m - 1), chi2 / 2.0), note=f"m={m}")


def cumulative_sums(bits) -> TestResult:
    n = bits.size
    if n < 100:
        return _skip("cumulative_sums", f"needs >= 100 bits, got {n}")
    x = 2 * bits.astype(np.int64) - 1
    z = int(np.abs(np.cumsum(x)).max())
    if z == 0:
        return _result("cumulative_sums", 0.0)
    rt = math.sqrt(n)
    k1 = np.arange(math.floor((-n / z + 1) / 4), math.floor((n / z - 1) / 4) + 1)
    k2 = np.arange(math.floor((-n / z - 3) / 4), math.floor((n / z - 1) / 4) + 1)
    term1 = (norm.cdf((4 * k1 + 1) * z / rt) - norm.cdf((4 * k1 - 1) * z / rt)).sum()
    term2 = (norm.cdf((4 * k2 + 3) * z / rt) - norm.cdf((4 * k2 + 1) * z / rt)).sum()
    return _result("cumulative_sums", 1.0 - term1 + term2)


def nist_core_tests(bits) -> list:
    """Run the eight implemented tests on a 0/1 bit array.

    The remaining tests of the full 15-test battery (binary matrix rank,
    template matching, Maurer's universal, linear complexity, random
    excursions and its variant) are not implemented here.
    """
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    return [
        monobit(bits),
        block_frequency(bits),
        runs(bits),
        longest_run(bits),
        dft(bits),
        serial(bits),
        approximate_entropy(bits),
        cumulative_sums(bits),
    ]
