"""Range-normalized uniform quantization with Gray labelling.

Real and imaginary parts are quantized independently.  Each party sorts its
own samples only to find the per-component range (min to max); the samples
are then labelled in their original subcarrier order, because rank-based
labelling would destroy alignment between the two parties.
"""

from dataclasses import dataclass

import numpy as np

from .core import gray_value


@dataclass
class QuantizerSpec:
    delta: int = 2      # bits per real dimension

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("delta must be at least 1")

    @property
    def intervals(self) -> int:
        return 1 << self.delta


@dataclass
class QuantizeResult:
    bits: np.ndarray         # concatenated (real code, imag code) per subcarrier
    symbols: np.ndarray      # per-subcarrier 2*delta-bit interval-pair index
    degenerate: bool         # some component had zero range


def component_indices(values: np.ndarray, intervals: int):
    """Map samples of one real dimension to interval indices.

    The range is ``max - min`` over the samples; ties on an interval edge go
    to the higher interval, and the maximum lands in the top interval.
    Returns ``(indices, degenerate)``; a zero range maps everything to
    interval 0.
    """
    lo = values.min()
    hi = values.max()
    if hi == lo:
        return np.zeros(len(values), dtype=np.int64), True
    width = (hi - lo) / intervals
    idx = np.floor((values - lo) / width).astype(np.int64)
    return np.clip(idx, 0, intervals - 1), False


def quantize_symbols(w: np.ndarray, spec: QuantizerSpec):
    """Per-subcarrier interval-pair symbols ``(real_idx << delta) | imag_idx``."""
    if len(w) < 2:
        raise ValueError("need at least two samples to define a range")
    d = spec.intervals
    re_idx, deg_r = component_indices(np.real(w), d)
    im_idx, deg_i = component_indices(np.imag(w), d)
    return (re_idx << spec.delta) | im_idx, (deg_r or deg_i)


def quantize(w: np.ndarray, spec: QuantizerSpec) -> QuantizeResult:
    """Quantize a complex vector into ``2 * delta * len(w)`` bits."""
    symbols, degenerate = quantize_symbols(w, spec)
    delta = spec.delta
    re_gray = gray_value(symbols >> delta)
    im_gray = gray_value(symbols & (spec.intervals - 1))
    n = len(w)
    bits = np.empty((n, 2 * delta), dtype=np.uint8)
    for b in range(delta):
        shift = delta - 1 - b
        bits[:, b] = (re_gray >> shift) & 1
        bits[:, delta + b] = (im_gray >> shift) & 1
    return QuantizeResult(bits.reshape(-1), symbols, degenerate)


def bmr(a: np.ndarray, b: np.ndarray) -> float:
    """Bit mismatch rate: Hamming distance over length."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.mean(a != b))
