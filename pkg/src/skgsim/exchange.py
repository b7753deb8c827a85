"""Induced-randomness exchange for one session (direct or relay scenario).

Both parties inject locally drawn QAM symbols into the channel and multiply
what they sent with what they received, so the product of both symbol vectors
and the channel becomes a shared observation even when the channel itself is
static.  Eve's raw observations are collected alongside.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization
from .config import SessionConfig
from .core import QamConstellation, draw_cscg_vector, draw_qam_vector


@dataclass
class ExchangeResult:
    w_alice: np.ndarray
    w_bob: np.ndarray
    s: np.ndarray                     # Alice's transmitted symbols (retained for oracles)
    v: np.ndarray                     # Bob's transmitted symbols
    eve_obs: list = field(default_factory=list)
    eve_flag: str = ""                # non-empty when Eve observations are omitted
    channel: ChannelRealization | None = None
    alpha: float | None = None        # relay amplification factor (public)
    noise_alice: np.ndarray | None = None
    noise_bob: np.ndarray | None = None


def _noise_variance(cfg: SessionConfig) -> float:
    """Receiver noise total power sigma_n^2 for the direct scenario.

    Chosen so that E|s o v o h|^2 / E|s o n|^2 equals the configured SNR with
    unit-power constellations: sigma_n^2 = sigma_h^2 / snr.
    """
    if cfg.snr_db == math.inf:
        return 0.0
    return cfg.sigma_h_sq / (10.0 ** (cfg.snr_db / 10.0))


def run_direct_exchange(cfg: SessionConfig, channel: ChannelRealization, rng) -> ExchangeResult:
    """One direct-scenario exchange over ``channel``."""
    if cfg.scenario != "direct":
        raise ValueError("config is not for the direct scenario")
    n = cfg.n_subcarriers
    const = QamConstellation(cfg.qam_order)
    s = draw_qam_vector(rng, const, n)
    v = draw_qam_vector(rng, const, n)
    nv = _noise_variance(cfg)
    n_a = draw_cscg_vector(rng, nv / 2.0, n)
    n_b = draw_cscg_vector(rng, nv / 2.0, n)

    w_alice = s * v * channel.h_ab_rev + s * n_a
    w_bob = s * v * channel.h_ab + v * n_b

    res = ExchangeResult(w_alice, w_bob, s, v, channel=channel,
                         noise_alice=s * n_a, noise_bob=v * n_b)
    if channel.has_eve_links and channel.h_be is not None:
        ev = 0.0 if cfg.eve_noiseless else nv / 2.0
        n_e1 = draw_cscg_vector(rng, ev, n)
        n_e2 = draw_cscg_vector(rng, ev, n)
        res.eve_obs = [s * channel.h_ae + n_e1, v * channel.h_be + n_e2]
    else:
        res.eve_flag = "eve channels missing; observations omitted"
    return res


def relay_power(cfg: SessionConfig) -> tuple[float, float]:
    """Per-party transmit powers making both uplink SNRs equal at the relay.

    Relay receiver noise power is fixed at 1, so P_a * sigma_h^2 =
    P_b * sigma_g^2 = relay uplink SNR.  In the noiseless limit any equal
    powers do; unit power is used.
    """
    gr = 10.0 ** (cfg.effective_relay_snr_db / 10.0)
    if not math.isfinite(gr):
        return 1.0, 1.0
    return gr / cfg.sigma_h_sq, gr / cfg.sigma_g_sq


def compute_alpha(cfg: SessionConfig, noise_alice_sq: float = 1.0) -> float:
    """Amplification factor meeting the target SNR of the correlated samples.

    With perfect estimation the per-entry noise of w_alice is
    ``P_a * (sigma_nR^2 sigma_h^2 + sigma_nA^2 / alpha^2)`` against signal
    ``P_a P_b sigma_g^2 sigma_h^2``; solving for alpha gives the value below.
    alpha is public knowledge.
    """
    if noise_alice_sq == 0.0:
        # no downlink receiver noise: alpha cancels from the SNR entirely
        return 1.0
    gw = 10.0 ** (cfg.snr_db / 10.0)
    gr = 10.0 ** (cfg.effective_relay_snr_db / 10.0)
    if not gr > gw:
        max_db = cfg.effective_relay_snr_db
        raise ValueError(
            f"target SNR {cfg.snr_db} dB unreachable: the relay-noise floor limits "
            f"the correlated-observation SNR to the uplink SNR, {max_db} dB"
        )
    alpha_sq = noise_alice_sq / (cfg.sigma_h_sq * (gr / gw - 1.0))
    alpha = math.sqrt(alpha_sq)
    if not math.isfinite(alpha) or alpha <= 0:
        raise ValueError(f"amplification factor came out non-finite ({alpha})")
    return alpha


def received_snr_db(cfg: SessionConfig) -> float:
    """Per-entry SNR of the *received* downlink signal at Alice/Bob.

    The broadcast carries both parties' streams, but each party can only use
    the cross term; the self-interference half is cancelled.  At high uplink
    SNR this sits almost exactly 3 dB above the correlated-observation SNR.
    For the direct scenario the two SNR notions coincide.
    """
    if cfg.scenario == "direct" or cfg.snr_db == math.inf:
        return cfg.snr_db
    gr = 10.0 ** (cfg.effective_relay_snr_db / 10.0)
    alpha = compute_alpha(cfg)
    return 10.0 * math.log10(alpha * alpha * (2.0 * gr + 1.0) * cfg.sigma_h_sq)


def run_relay_exchange(cfg: SessionConfig, channel: ChannelRealization, rng) -> ExchangeResult:
    """One relay-scenario exchange: probe, estimation, uplink, amplified
    downlink, self-interference cancellation, multiplication by the local
    randomness.

    The returned observations are assembled from the closed-form signal and
    noise terms (algebraically identical to stepping through the downlink
    signal), which keeps the noiseless case exactly reproducible.
    """
    if cfg.scenario != "relay":
        raise ValueError("config is not for the relay scenario")
    n = cfg.n_subcarriers
    const = QamConstellation(cfg.qam_order)
    p_a, p_b = relay_power(cfg)
    s = math.sqrt(p_a) * draw_qam_vector(rng, const, n)
    v = math.sqrt(p_b) * draw_qam_vector(rng, const, n)

    noiseless = cfg.snr_db == math.inf
    sigma_rcv = 0.0 if noiseless else 1.0      # receiver noise at Alice/Bob/Eve
    sigma_relay = 0.0 if noiseless else 1.0    # receiver noise at the relay
    alpha = compute_alpha(cfg, noise_alice_sq=sigma_rcv)

    # channel estimation from the relay's probe broadcast
    if cfg.estimation == "perfect":
        z_a = np.zeros(n, dtype=complex)
        z_b = np.zeros(n, dtype=complex)
    else:
        # unit probe, least squares: h_hat = y_probe / p
        h_hat = channel.h_rev + draw_cscg_vector(rng, sigma_rcv / 2.0, n)
        g_hat = channel.g_rev + draw_cscg_vector(rng, sigma_rcv / 2.0, n)
        z_a = channel.h * channel.h_rev - h_hat * h_hat
        z_b = channel.g * channel.g_rev - g_hat * g_hat

    n_2r = draw_cscg_vector(rng, sigma_relay / 2.0, n)
    n_3a = draw_cscg_vector(rng, sigma_rcv / 2.0, n)
    n_3b = draw_cscg_vector(rng, sigma_rcv / 2.0, n)

    noise_a = s * s * z_a + s * n_2r * channel.h_rev + s * n_3a / alpha
    noise_b = v * v * z_b + v * n_2r * channel.g_rev + v * n_3b / alpha
    w_alice = s * v * channel.g * channel.h_rev + noise_a
    w_bob = s * v * channel.g_rev * channel.h + noise_b

    res = ExchangeResult(w_alice, w_bob, s, v, channel=channel, alpha=alpha,
                         noise_alice=noise_a, noise_bob=noise_b)
    # Eve hears the uplink directly, and recovers the relay's received signal
    # from the downlink broadcast (she knows alpha and estimates f_ce from the
    # probe, so the division is exact up to her receiver noise, neglected as
    # the conservative case).
    ev = 0.0 if (cfg.eve_noiseless or noiseless) else sigma_rcv / 2.0
    n_e5 = draw_cscg_vector(rng, ev, n)
    w_e1 = s * channel.h_ae + v * channel.h_be + n_e5
    w_e2 = s * channel.h + v * channel.g + n_2r
    res.eve_obs = [w_e1, w_e2]
    return res


def run_exchange(cfg: SessionConfig, channel: ChannelRealization, rng) -> ExchangeResult:
    if cfg.scenario == "direct":
        return run_direct_exchange(cfg, channel, rng)
    return run_relay_exchange(cfg, channel, rng)
