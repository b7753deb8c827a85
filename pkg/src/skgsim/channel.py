"""Fading-channel generation for both scenarios, plus trace-file ingestion.

All links are flat per subcarrier with circularly-symmetric Gaussian
coefficients, independent across subcarriers and sessions.  Eve's links are
drawn jointly Gaussian with the spatially nearest legitimate link at
per-dimension correlation ``rho``; reverse links follow the non-reciprocity
model with Pearson correlation ``zeta``.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import j0

from .core import draw_cscg_vector


def spatial_correlation(distance_over_lambda: float) -> float:
    """Channel correlation of two receivers separated by ``d / lambda``.

    Returns ``[J0(2*pi*d/lambda)]**2``.  At half a wavelength this is about
    0.0926, i.e. nodes a few centimetres apart in typical bands already see
    nearly independent fading.
    """
    if distance_over_lambda < 0:
        raise ValueError("distance must be non-negative")
    return float(j0(2.0 * math.pi * distance_over_lambda)) ** 2


@dataclass
class ChannelModelConfig:
    n_subcarriers: int = 16
    sigma_h_sq: float = 1.0
    sigma_g_sq: float = 1.0
    rho: float = 0.0          # Eve spatial correlation, in [0, 1)
    zeta: float = 1.0         # reciprocity correlation, in (0, 1]
    source: str = "synthetic"  # synthetic | trace-file

    def __post_init__(self):
        if not 0 <= self.rho < 1:
            raise ValueError("rho must be in [0, 1)")
        if not 0 < self.zeta <= 1:
            raise ValueError("zeta must be in (0, 1]")
        if self.n_subcarriers < 1:
            raise ValueError("need at least one subcarrier")


@dataclass
class ChannelRealization:
    """All channel coefficient vectors for one coherence interval.

    Direct scenario fills ``h_ab``/``h_ab_rev`` plus Eve's ``h_ae``/``h_be``;
    the relay scenario fills ``h``/``h_rev`` (Alice-relay), ``g``/``g_rev``
    (Bob-relay), ``f_ce`` (relay-Eve) and Eve's uplink views ``h_ae``/``h_be``.
    """

    n_subcarriers: int
    sigma_h_sq: float = 1.0
    sigma_g_sq: float = 1.0
    h_ab: np.ndarray | None = None
    h_ab_rev: np.ndarray | None = None
    h: np.ndarray | None = None
    h_rev: np.ndarray | None = None
    g: np.ndarray | None = None
    g_rev: np.ndarray | None = None
    h_ae: np.ndarray | None = None
    h_be: np.ndarray | None = None
    f_ce: np.ndarray | None = None

    @property
    def has_eve_links(self) -> bool:
        return self.h_ae is not None

    def _vectors(self):
        for name in ("h_ab", "h_ab_rev", "h", "h_rev", "g", "g_rev", "h_ae", "h_be", "f_ce"):
            v = getattr(self, name)
            if v is not None:
                yield name, v

    def validate(self):
        for name, v in self._vectors():
            if v.shape != (self.n_subcarriers,):
                raise ValueError(f"{name} has shape {v.shape}, expected ({self.n_subcarriers},)")
            if not np.all(np.isfinite(v.view(float))):
                raise ValueError(f"{name} contains non-finite entries")
        return self


def apply_nonreciprocity(h_fwd: np.ndarray, zeta: float, sigma_h: float, rng) -> np.ndarray:
    """Perturb a link to model imperfect reciprocity.

    The returned vector keeps the marginal law of the input and has
    per-dimension correlation ``zeta`` with it.  ``sigma_h`` is the marginal
    std of the coefficients (per-dimension variance ``sigma_h**2 / 2``).
    """
    if not 0 < zeta <= 1:
        raise ValueError("zeta must be in (0, 1]")
    n = draw_cscg_vector(rng, 1.0, len(h_fwd))  # unit per-dimension variance
    return zeta * h_fwd + math.sqrt(1.0 - zeta * zeta) * (sigma_h / math.sqrt(2.0)) * n


def _correlated_pair(rng, sigma_sq, rho, n):
    """Draw (a, b) CSCG with per-dimension cross-correlation rho."""
    a = draw_cscg_vector(rng, sigma_sq / 2.0, n)
    z = draw_cscg_vector(rng, sigma_sq / 2.0, n)
    b = rho * a + math.sqrt(1.0 - rho * rho) * z
    return a, b


def sample_channels(rng, config: ChannelModelConfig, scenario: str) -> ChannelRealization:
    """Draw one channel realization for ``scenario`` ('direct' or 'relay')."""
    n = config.n_subcarriers
    real = ChannelRealization(n, config.sigma_h_sq, config.sigma_g_sq)
    sig_h = math.sqrt(config.sigma_h_sq)
    sig_g = math.sqrt(config.sigma_g_sq)
    if scenario == "direct":
        # Eve close to Bob: her Alice-side link resembles Alice->Bob.
        real.h_ab, real.h_ae = _correlated_pair(rng, config.sigma_h_sq, config.rho, n)
        real.h_ab_rev = apply_nonreciprocity(real.h_ab, config.zeta, sig_h, rng)
        real.h_be = draw_cscg_vector(rng, config.sigma_h_sq / 2.0, n)
    elif scenario == "relay":
        # Eve close to the relay: both her uplink views correlate with the
        # corresponding legitimate uplink.
        real.h, real.h_ae = _correlated_pair(rng, config.sigma_h_sq, config.rho, n)
        real.g, real.h_be = _correlated_pair(rng, config.sigma_g_sq, config.rho, n)
        real.h_rev = apply_nonreciprocity(real.h, config.zeta, sig_h, rng)
        real.g_rev = apply_nonreciprocity(real.g, config.zeta, sig_g, rng)
        real.f_ce = draw_cscg_vector(rng, 0.5, n)
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    return real.validate()


# --- trace files -----------------------------------------------------------
#
# CSV with header  session,subcarrier,h_ab_re,h_ab_im[,h_ae_re,h_ae_im]
# one row per (session, subcarrier), subcarriers 0..N-1 in order.

TRACE_BASE_FIELDS = ["session", "subcarrier", "h_ab_re", "h_ab_im"]
TRACE_EVE_FIELDS = ["h_ae_re", "h_ae_im"]


def write_trace(path, realizations, include_eve: bool = True):
    """Write realizations (their ``h_ab`` and optionally ``h_ae``) as CSV."""
    realizations = list(realizations)
    include_eve = include_eve and all(r.has_eve_links for r in realizations)
    fields = TRACE_BASE_FIELDS + (TRACE_EVE_FIELDS if include_eve else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fields)
        for si, r in enumerate(realizations):
            for j in range(r.n_subcarriers):
                row = [si, j, repr(float(r.h_ab[j].real)), repr(float(r.h_ab[j].imag))]
                if include_eve:
                    row += [repr(float(r.h_ae[j].real)), repr(float(r.h_ae[j].imag))]
                w.writerow(row)


def load_trace(path, n_subcarriers: int):
    """Yield :class:`ChannelRealization` objects from a trace CSV, in file order.

    Only the forward legitimate link (and Eve's link when present) comes from
    the file; reverse links are derived downstream via the reciprocity model.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty trace file") from None
        header = [h.strip() for h in header]
        if header[: len(TRACE_BASE_FIELDS)] != TRACE_BASE_FIELDS:
            raise ValueError(f"{path}: unexpected header {header!r}")
        has_eve = header[len(TRACE_BASE_FIELDS) :] == TRACE_EVE_FIELDS
        ncols = len(TRACE_BASE_FIELDS) + (2 if has_eve else 0)

        current = None
        h_ab = np.zeros(n_subcarriers, dtype=complex)
        h_ae = np.zeros(n_subcarriers, dtype=complex) if has_eve else None
        count = 0

        def finish():
            if count != n_subcarriers:
                raise ValueError(
                    f"{path}: session {current} has {count} subcarriers, expected {n_subcarriers}"
                )
            r = ChannelRealization(n_subcarriers)
            r.h_ab = h_ab.copy()
            if has_eve:
                r.h_ae = h_ae.copy()
            return r.validate()

        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != ncols:
                raise ValueError(f"{path}: line {lineno}: expected {ncols} columns, got {len(row)}")
            try:
                sess = int(row[0])
                sub = int(row[1])
                vals = [float(x) for x in row[2:]]
            except ValueError as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from None
            if current is None:
                current = sess
            if sess != current:
                yield finish()
                current = sess
                count = 0
            if sub != count:
                raise ValueError(
                    f"{path}: line {lineno}: subcarrier {sub} out of order (expected {count})"
                )
            h_ab[sub] = vals[0] + 1j * vals[1]
            if has_eve:
                h_ae[sub] = vals[2] + 1j * vals[3]
            count += 1
        if current is not None:
            yield finish()
