"""Physical-layer secret key generation from induced randomness.

Simulates the full protocol (symbol exchange, quantization, secure-sketch
reconciliation, privacy amplification, consistency checking) for a direct
channel and for an untrusted amplify-and-forward relay, together with the
eavesdropping-probability bounds and the reliability/randomness metrics used
to evaluate it.
"""

from .amplify import (
    HashParams,
    KeyMaterial,
    combine_sessions,
    consistency_check,
    derive_key,
    largest_prime_below,
    uhf,
)
from .channel import (
    ChannelModelConfig,
    ChannelRealization,
    apply_nonreciprocity,
    load_trace,
    sample_channels,
    spatial_correlation,
    write_trace,
)
from .config import SessionConfig, load_config, parse_config_text
from .core import QamConstellation, draw_cscg_vector, draw_qam_vector, gray_code, make_rng
from .exchange import (
    ExchangeResult,
    compute_alpha,
    received_snr_db,
    run_direct_exchange,
    run_exchange,
    run_relay_exchange,
)
from .harness import (
    CampaignConfig,
    CampaignResult,
    EveView,
    MetricsRow,
    SessionOutcome,
    default_code,
    emit_results,
    eve_attack,
    mismatched_key_trials,
    randomness_efficiency,
    run_campaign,
    run_session,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .quantize import QuantizerSpec, bmr, quantize, quantize_symbols
from .randtests import nist_core_tests
from .reconcile import ConvCode, SketchRecord, conv_encode, recover, sketch, viterbi_decode
from .security import (
    BoundReport,
    EstimatorConfig,
    estimate_entropy,
    estimate_mi,
    fano_bound,
    mi_gaussian,
    semantic_bound,
)

__version__ = "0.1.0"
