"""Analytic eavesdropping bounds and Monte Carlo information estimators.

All logarithms are base 2; every quantity is in bits.
"""

import math
from dataclasses import dataclass, field

import numpy as np

_LOG2E = 1.0 / math.log(2.0)


def mi_gaussian(rho: float) -> float:
    """Mutual information between two circularly-symmetric Gaussian channel
    coefficients whose real parts (and imaginary parts) are correlated with
    coefficient ``rho``: ``-log2(1 - rho^2)`` bits."""
    if not 0 <= rho < 1:
        raise ValueError("rho must be in [0, 1); the covariance is singular at 1")
    return -math.log2(1.0 - rho * rho)


@dataclass
class BoundReport:
    """Upper bound on the probability of a successful eavesdropping attack."""

    scenario: str
    guessing_term: float     # probability Eve reconstructs all shared randomness
    hash_term: float         # probability she guesses the key through the hash
    vacuous: bool = False
    inputs: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return min(self.guessing_term + self.hash_term, 1.0)

    @property
    def log2_total(self) -> float:
        return math.log2(self.total) if self.total > 0 else -math.inf

    def lines(self):
        yield f"scenario: {self.scenario}"
        for k, v in self.inputs.items():
            yield f"  {k} = {v}"
        yield f"  guessing term = {self.guessing_term:.6g} (2^{_safe_log2(self.guessing_term):.3f})"
        yield f"  hash term     = {self.hash_term:.6g} (2^{_safe_log2(self.hash_term):.3f})"
        if self.vacuous:
            yield "  bound is vacuous (>= 1)"
        yield f"  attack probability bound = {self.total:.6g} (2^{self.log2_total:.3f})"


def _safe_log2(x):
    return math.log2(x) if x > 0 else -math.inf


def semantic_bound(n: int, delta: int, mi: float) -> BoundReport:
    """Direct-scenario bound: ``(2^-2delta + sqrt(2 I))^N + 2^(-delta N)``.

    The first term bounds recovery of the quantized randomness on all
    subcarriers given Eve's channel-correlation advantage; the second is her
    chance through the hash output.  Large per-subcarrier leakage makes the
    bound vacuous, which is flagged rather than hidden.
    """
    if mi < 0:
        raise ValueError("mutual information cannot be negative")
    per_subcarrier = 2.0 ** (-2 * delta) + math.sqrt(2.0 * mi)
    guess = per_subcarrier**n
    hashp = 2.0 ** (-delta * n)
    report = BoundReport(
        scenario="direct",
        guessing_term=guess,
        hash_term=hashp,
        inputs={"N": n, "delta": delta, "mi_bits": mi},
    )
    if guess + hashp >= 1.0:
        report.vacuous = True
        report.guessing_term = min(guess, 1.0)
    return report


def fano_bound(n: int, delta: int, h_q: float, mi_abe: float, q_support: int) -> BoundReport:
    """Relay-scenario bound via Fano's inequality:
    ``(1 - (H(q) - I - 1)/log2|Q|)^N + 2^(-delta N)``."""
    log_q = math.log2(q_support)
    if h_q > log_q + 1e-9:
        raise ValueError("entropy cannot exceed log2 of the support size")
    margin = h_q - mi_abe - 1.0
    per_subcarrier = 1.0 - margin / log_q
    report = BoundReport(
        scenario="relay",
        guessing_term=min(per_subcarrier, 1.0) ** n if per_subcarrier > 0 else 0.0,
        hash_term=2.0 ** (-delta * n),
        inputs={"N": n, "delta": delta, "H_q_bits": h_q, "mi_bits": mi_abe, "support": q_support},
    )
    if margin <= 0 or per_subcarrier >= 1.0:
        report.vacuous = True
        report.guessing_term = 1.0
    return report


# --- plug-in estimators ------------------------------------------------------


@dataclass
class EstimatorConfig:
    """Plug-in histogram estimator settings.

    Bin edges are per-dimension empirical quantiles (equal-mass bins).  The
    Miller-Madow occupancy correction and the shuffled-baseline subtraction
    both fight the plug-in's positive bias; disable both to reproduce raw
    plug-in values.
    """

    n_samples: int = 100_000
    bins: int = 16
    kind: str = "plug-in-histogram"
    bins_x: tuple | None = None   # per-dimension override for the first variable
    bins_y: tuple | None = None
    miller_madow: bool = True
    shuffle_correction: bool = True
    seed: int = 1

    def __post_init__(self):
        if self.n_samples < 1_000:
            raise ValueError("need at least 1000 samples")
        if self.bins < 4:
            raise ValueError("need at least 4 bins per dimension")
        if self.kind != "plug-in-histogram":
            raise ValueError(f"unknown estimator kind {self.kind!r}")


@dataclass
class MiEstimate:
    value_bits: float
    avg_joint_occupancy: float
    sparse_warning: bool         # average samples per occupied joint bin < 5


def _as_columns(a) -> list:
    a = np.asarray(a)
    if np.iscomplexobj(a):
        if a.ndim == 1:
            return [a.real, a.imag]
        return [c for j in range(a.shape[1]) for c in (a[:, j].real, a[:, j].imag)]
    if a.ndim == 1:
        return [a.astype(float)]
    return [a[:, j].astype(float) for j in range(a.shape[1])]


def _quantile_codes(cols, bins_per_col):
    n = cols[0].size
    code = np.zeros(n, dtype=np.int64)
    for col, b in zip(cols, bins_per_col):
        edges = np.quantile(col, np.linspace(0.0, 1.0, b + 1)[1:-1])
        code = code * b + np.searchsorted(edges, col, side="right")
    return code


def _plug_in_entropy(codes, n, miller_madow):
    _, counts = np.unique(codes, return_counts=True)
    p = counts / n
    h = float(-(p * np.log2(p)).sum())
    if miller_madow:
        h += (len(counts) - 1) / (2.0 * n) * _LOG2E
    return h, len(counts)


def estimate_mi(samples_x, samples_y, cfg: EstimatorConfig) -> MiEstimate:
    """Plug-in mutual information between paired samples, in bits.

    ``samples_x`` and ``samples_y`` may be real or complex, 1-D or 2-D
    (samples along the first axis); complex columns count as two real
    dimensions each.
    """
    cols_x = _as_columns(samples_x)
    cols_y = _as_columns(samples_y)
    n = cols_x[0].size
    if any(c.size != n for c in cols_x + cols_y):
        raise ValueError("x and y must carry the same number of samples")
    bx = list(cfg.bins_x) if cfg.bins_x is not None else [cfg.bins] * len(cols_x)
    by = list(cfg.bins_y) if cfg.bins_y is not None else [cfg.bins] * len(cols_y)
    if len(bx) != len(cols_x) or len(by) != len(cols_y):
        raise ValueError("per-dimension bins do not match the data dimensions")

    cx = _quantile_codes(cols_x, bx)
    cy = _quantile_codes(cols_y, by)
    span = np.int64(1)
    for b in by:
        span *= b

    def mi_of(cy_arr):
        hx, _ = _plug_in_entropy(cx, n, cfg.miller_madow)
        hy, _ = _plug_in_entropy(cy_arr, n, cfg.miller_madow)
        hxy, occ = _plug_in_entropy(cx * span + cy_arr, n, cfg.miller_madow)
        return hx + hy - hxy, occ

    value, occupied = mi_of(cy)
    if cfg.shuffle_correction:
        perm = np.random.default_rng(cfg.seed).permutation(n)
        baseline, _ = mi_of(cy[perm])
        value -= baseline
    avg_occ = n / occupied
    return MiEstimate(value_bits=value, avg_joint_occupancy=avg_occ, sparse_warning=avg_occ < 5.0)


def estimate_entropy(symbols, support: int) -> float:
    """Plug-in entropy (bits) of the empirical distribution of integer symbols."""
    symbols = np.asarray(symbols).ravel()
    if symbols.size == 0:
        raise ValueError("no symbols given")
    if symbols.min() < 0 or symbols.max() >= support:
        raise ValueError(f"symbols outside [0, {support})")
    counts = np.bincount(symbols, minlength=support)
    p = counts[counts > 0] / symbols.size
    return float(-(p * np.log2(p)).sum())
