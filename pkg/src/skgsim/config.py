"""Session configuration shared by the exchange stage and the harness."""

import math
from dataclasses import dataclass, field, fields

from .channel import ChannelModelConfig, spatial_correlation


@dataclass
class SessionConfig:
    """Parameters of one key-generation session.

    ``snr_db`` targets the per-entry SNR of the correlated observations
    (signal-product power over aggregate noise power, averaged over channel
    and symbol randomness).  In the relay scenario the corresponding SNR
    actually *received* on the downlink is higher, because half of the
    received power is self-interference that gets cancelled; see
    :func:`skgsim.exchange.received_snr_db`.
    """

    scenario: str = "direct"            # direct | relay
    n_subcarriers: int = 16
    qam_order: int = 16
    delta: int = 2                      # quantizer bits per real dimension
    snr_db: float = 20.0
    zeta: float = 1.0
    rho: float | None = None            # overrides d_over_lambda when set
    d_over_lambda: float = 0.5
    alpha_policy: str = "target-snr"
    relay_snr_db: float | None = None   # uplink SNR at the relay
    relay_snr_margin_db: float = 12.0   # used when relay_snr_db is None
    estimation: str = "perfect"         # perfect | probe
    eve_noiseless: bool = False
    sigma_h_sq: float = 1.0
    sigma_g_sq: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in ("direct", "relay"):
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.delta < 1:
            raise ValueError("delta must be at least 1")
        if self.n_subcarriers < 1:
            raise ValueError("need at least one subcarrier")
        if self.alpha_policy != "target-snr":
            raise ValueError(f"unknown alpha policy {self.alpha_policy!r}")
        if self.estimation not in ("perfect", "probe"):
            raise ValueError(f"unknown estimation mode {self.estimation!r}")
        if not math.isfinite(self.snr_db) and self.snr_db != math.inf:
            raise ValueError("snr_db must be finite or +inf")

    @property
    def effective_rho(self) -> float:
        if self.rho is not None:
            return self.rho
        return spatial_correlation(self.d_over_lambda)

    @property
    def effective_relay_snr_db(self) -> float:
        if self.relay_snr_db is not None:
            return self.relay_snr_db
        return self.snr_db + self.relay_snr_margin_db

    def channel_config(self) -> ChannelModelConfig:
        return ChannelModelConfig(
            n_subcarriers=self.n_subcarriers,
            sigma_h_sq=self.sigma_h_sq,
            sigma_g_sq=self.sigma_g_sq,
            rho=self.effective_rho,
            zeta=self.zeta,
        )


_BOOL_STRINGS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _coerce(name, text, ftype):
    text = text.strip()
    if text.lower() in ("none", ""):
        return None
    if ftype is bool or ftype == "bool":
        try:
            return _BOOL_STRINGS[text.lower()]
        except KeyError:
            raise ValueError(f"{name}: cannot parse {text!r} as bool") from None
    if ftype is int or ftype == "int":
        return int(text)
    if ftype is float or ftype in ("float", "float | None"):
        return float(text)
    if ftype == "int | None":
        return int(text)
    return text


def parse_config_text(text: str, cls=SessionConfig, **overrides):
    """Parse a flat ``key = value`` config file body into ``cls``.

    Lines starting with ``#`` (and blank lines) are ignored.  ``overrides``
    win over file values.
    """
    ftypes = {f.name: f.type for f in fields(cls)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in ftypes:
            raise ValueError(f"line {lineno}: unknown option {key!r}")
        values[key] = _coerce(key, val, ftypes[key])
    values.update({k: v for k, v in overrides.items() if v is not None})
    return cls(**values)


def load_config(path, cls=SessionConfig, **overrides):
    with open(path) as fh:
        return parse_config_text(fh.read(), cls=cls, **overrides)
