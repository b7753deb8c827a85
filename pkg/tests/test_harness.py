import dataclasses
import hashlib
import math

import numpy as np
import pytest

from skgsim.channel import sample_channels, write_trace
from skgsim.config import SessionConfig
from skgsim.core import make_rng
from skgsim.harness import (
    EVE_VIEW_FIELDS,
    CampaignConfig,
    CampaignResult,
    EveView,
    MetricsRow,
    default_code,
    emit_results,
    eve_attack,
    mismatched_key_trials,
    randomness_efficiency,
    run_campaign,
    run_session,
)


def session_env(scenario="direct", seed=1, **kw):
    kw.setdefault("scenario", scenario)
    if scenario == "relay":
        kw.setdefault("qam_order", 64)
        kw.setdefault("snr_db", 23.0)
    cfg = SessionConfig(**kw)
    ch = sample_channels(make_rng(seed, 1), cfg.channel_config(), scenario)
    return cfg, ch


class TestRunSession:
    def test_noiseless_session_accepts_with_equal_keys(self):
        cfg, ch = session_env(snr_db=math.inf)
        out = run_session(cfg, ch, make_rng(2))
        assert out.accept
        assert np.array_equal(out.key_alice, out.key_bob)
        assert np.array_equal(out.q_recovered, out.q_alice)

    def test_throughput_constants(self):
        cfg, ch = session_env(snr_db=20.0)
        out = run_session(cfg, ch, make_rng(3))
        assert out.q_alice.size == 64          # 64 bits generated per packet
        assert out.key_alice.size == 32
        assert out.check_alice.size == 16

    def test_forced_complement_rejects(self):
        cfg, ch = session_env(snr_db=30.0)
        accepts = 0
        for t in range(500):
            out = run_session(cfg, ch, make_rng(4, t), force_complement=True)
            assert np.array_equal(out.q_bob, 1 - out.q_alice)
            accepts += bool(out.accept)
        assert accepts <= 1  # false accepts happen with probability ~1/65521

    def test_transcript_contains_public_values_only(self):
        cfg, ch = session_env(snr_db=15.0)
        out = run_session(cfg, ch, make_rng(5))
        assert out.transcript.ss.ss.size == 64
        assert out.transcript.check_alice.size == 16
        assert out.transcript.alpha is None  # direct scenario

    def test_relay_session_publishes_alpha(self):
        cfg, ch = session_env("relay", seed=6)
        out = run_session(cfg, ch, make_rng(6))
        assert out.transcript.alpha > 0

    def test_quantize_stage_skips_keys(self):
        cfg, ch = session_env(snr_db=10.0)
        out = run_session(cfg, ch, make_rng(7), stages="quantize")
        assert out.accept is None and out.key_alice is None
        assert out.q_eve is not None


class TestEveDiscipline:
    def test_view_fields_are_whitelisted(self):
        names = tuple(f.name for f in dataclasses.fields(EveView))
        assert names == EVE_VIEW_FIELDS

    def test_no_legitimate_only_material_in_view(self):
        forbidden = {"h_ab", "h_ab_rev", "w_alice", "w_bob", "q_alice", "q_bob",
                     "key_alice", "key_bob", "channel", "noise_alice", "noise_bob"}
        assert not forbidden & set(EVE_VIEW_FIELDS)

    def test_eve_key_comes_from_public_transcript(self):
        cfg, ch = session_env(snr_db=20.0, seed=8)
        out = run_session(cfg, ch, make_rng(8))
        assert out.key_eve is not None and out.key_eve.size == 32

    def test_eve_bmr_exceeds_bob_bmr(self):
        camp = CampaignConfig(
            session=SessionConfig(scenario="direct", d_over_lambda=0.5),
            sweep_values=(10.0, 20.0), trials=400, seed=9, channel_mode="fresh",
        )
        for row in run_campaign(camp).rows:
            assert row.bmr_eve > row.bmr_bob


class TestRandomnessEfficiency:
    def test_direct_half(self):
        assert randomness_efficiency(SessionConfig(scenario="direct", qam_order=16)) == 0.5

    def test_relay_third(self):
        cfg = SessionConfig(scenario="relay", qam_order=64)
        assert abs(randomness_efficiency(cfg) - 1 / 3) < 1e-12

    def test_qpsk_single_bit(self):
        cfg = SessionConfig(scenario="direct", qam_order=4, delta=1)
        assert randomness_efficiency(cfg) == 0.5


class TestCampaign:
    def test_deterministic_outputs(self, tmp_path):
        camp = CampaignConfig(
            session=SessionConfig(scenario="direct"),
            sweep_values=(10.0, 20.0), trials=200, seed=11, channel_mode="fresh",
        )
        digests = []
        for run_dir in ("a", "b"):
            paths = emit_results(run_campaign(camp), tmp_path / run_dir)
            digest = hashlib.sha256()
            for key in sorted(paths):
                digest.update(open(paths[key], "rb").read())
            digests.append(digest.hexdigest())
        assert digests[0] == digests[1]

    def test_accept_implies_equal_keys(self):
        camp = CampaignConfig(
            session=SessionConfig(scenario="direct"),
            sweep_values=(15.0,), trials=2000, seed=12, channel_mode="fresh",
        )
        row = run_campaign(camp).rows[0]
        # false accepts are ~1/65521 per accepted session
        assert row.ber_bob <= 1e-3

    def test_fixed_channel_reuses_one_realization(self):
        camp = CampaignConfig(
            session=SessionConfig(scenario="direct", snr_db=20.0),
            sweep_values=(20.0,), trials=50, seed=13, channel_mode="fixed",
        )
        res = run_campaign(camp)
        assert res.rows[0].sessions == 50

    def test_keystream_collects_final_keys(self):
        camp = CampaignConfig(
            session=SessionConfig(scenario="direct", snr_db=30.0),
            sweep_values=(30.0,), trials=80, seed=14, channel_mode="fresh",
        )
        res = run_campaign(camp)
        assert res.keystream_bits.size == 32 * res.rows[0].keys_completed

    def test_metrics_row_rates_in_range(self):
        camp = CampaignConfig(
            session=SessionConfig(scenario="relay", qam_order=64),
            sweep_values=(23.0,), trials=300, seed=15, channel_mode="fresh",
        )
        row = run_campaign(camp).rows[0]
        for field in ("bmr_bob", "bmr_eve", "ber_bob", "ber_eve", "accept_rate"):
            val = getattr(row, field)
            assert 0.0 <= val <= 1.0
        assert row.avg_sessions_per_key >= 4.0

    def test_config_validation(self):
        with pytest.raises(ValueError):
            CampaignConfig(trials=0)
        with pytest.raises(ValueError):
            CampaignConfig(sweep_values=())
        with pytest.raises(ValueError):
            CampaignConfig(sweep_axis="power")


class TestTraceDrivenCampaign:
    def _trace(self, tmp_path, sessions, n=16):
        cfg = SessionConfig(scenario="direct")
        reals = [
            sample_channels(make_rng(20, i), cfg.channel_config(), "direct")
            for i in range(sessions)
        ]
        path = tmp_path / "trace.csv"
        write_trace(path, reals)
        return path

    def test_runs_from_file(self, tmp_path):
        path = self._trace(tmp_path, 60)
        camp = CampaignConfig(
            session=SessionConfig(scenario="direct", snr_db=20.0),
            sweep_values=(20.0,), trials=60, seed=21,
            channel_mode="fresh", trace=str(path),
        )
        row = run_campaign(camp).rows[0]
        assert row.sessions == 60
        assert row.randomness_efficiency == 0.5

    def test_exhaustion_reported(self, tmp_path):
        path = self._trace(tmp_path, 10)
        camp = CampaignConfig(
            session=SessionConfig(scenario="direct"),
            sweep_values=(20.0,), trials=11, seed=22,
            channel_mode="fresh", trace=str(path),
        )
        with pytest.raises(RuntimeError, match="trace exhausted"):
            run_campaign(camp)


class TestEmitResults:
    def test_empty_campaign_header_only(self, tmp_path):
        res = CampaignResult(
            config=CampaignConfig(), rows=[], eve_ber_samples={},
            keystream_bits=np.zeros(0, dtype=np.uint8),
        )
        paths = emit_results(res, tmp_path)
        assert open(paths["metrics"]).read() == MetricsRow.HEADER + "\n"
        assert open(paths["eve_ber_cdf"]).read() == "sweep_value,eve_ber,cdf\n"

    def test_cdf_is_monotone_and_ends_at_one(self, tmp_path):
        camp = CampaignConfig(
            session=SessionConfig(scenario="direct", snr_db=25.0),
            sweep_values=(25.0,), trials=300, seed=23, channel_mode="fresh",
        )
        paths = emit_results(run_campaign(camp), tmp_path)
        rows = [line.split(",") for line in open(paths["eve_ber_cdf"]).read().splitlines()[1:]]
        cdf = [float(r[2]) for r in rows]
        assert cdf == sorted(cdf) and abs(cdf[-1] - 1.0) < 1e-12


class TestMismatchedKeyTrials:
    def test_counts(self):
        mismatched, accepts = mismatched_key_trials(5000, seed=24)
        assert mismatched > 4990
        assert accepts <= 2
