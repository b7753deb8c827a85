import math

import numpy as np
import pytest
from scipy.stats import norm

from skgsim.core import make_rng
from skgsim.randtests import (
    PASS_THRESHOLD,
    approximate_entropy,
    block_frequency,
    cumulative_sums,
    dft,
    longest_run,
    monobit,
    nist_core_tests,
    runs,
    serial,
)

EXPECTED_NAMES = [
    "monobit",
    "block_frequency",
    "runs",
    "longest_run",
    "dft",
    "serial",
    "approximate_entropy",
    "cumulative_sums",
]


@pytest.fixture(scope="module")
def good_bits():
    return make_rng(2718).integers(0, 2, 1 << 20).astype(np.uint8)


class TestIndividualStatistics:
    def test_monobit_matches_normal_cdf_route(self):
        bits = make_rng(1).integers(0, 2, 5000).astype(np.uint8)
        s = (2 * int(bits.sum()) - bits.size) / math.sqrt(bits.size)
        independent = 2 * (1 - norm.cdf(abs(s)))
        assert abs(monobit(bits).p_value - independent) < 1e-9

    def test_monobit_all_zeros_fails(self):
        r = monobit(np.zeros(1000, dtype=np.uint8))
        assert r.p_value < 1e-10 and not r.passed

    def test_runs_alternating_fails(self):
        bits = np.tile(np.array([0, 1], dtype=np.uint8), 5000)
        r = runs(bits)
        assert r.p_value < PASS_THRESHOLD and not r.passed

    def test_runs_hand_computed(self):
        # 50 ones then 50 zeros: pi=0.5, v=2 runs
        bits = np.concatenate([np.ones(50, np.uint8), np.zeros(50, np.uint8)])
        expected = math.erfc(abs(2 - 2 * 100 * 0.25) / (2 * math.sqrt(200) * 0.25))
        assert abs(runs(bits).p_value - expected) < 1e-12

    def test_runs_prerequisite(self):
        bits = np.concatenate([np.ones(90, np.uint8), np.zeros(10, np.uint8)])
        assert runs(bits).p_value == 0.0

    def test_block_frequency_alternating_passes(self):
        # alternating bits are perfectly balanced inside every block
        bits = np.tile(np.array([0, 1], dtype=np.uint8), 5000)
        assert block_frequency(bits).p_value > 0.99

    def test_longest_run_biased_blocks_fail(self):
        rng = make_rng(9)
        bits = (rng.random(10_000) < 0.8).astype(np.uint8)
        assert not longest_run(bits).passed

    def test_dft_periodic_fails(self):
        bits = np.tile(np.array([0, 1, 1, 0, 1, 0, 0, 1], dtype=np.uint8), 2048)
        assert not dft(bits).passed

    def test_serial_constant_fails(self):
        bits = np.zeros(1 << 19, dtype=np.uint8)
        assert not serial(bits).passed

    def test_apen_alternating_fails(self):
        bits = np.tile(np.array([0, 1], dtype=np.uint8), 1 << 12)
        assert not approximate_entropy(bits, m=2).passed

    def test_cusum_drift_fails(self):
        rng = make_rng(10)
        bits = (rng.random(10_000) < 0.53).astype(np.uint8)
        assert not cumulative_sums(bits).passed


class TestBattery:
    def test_prng_stream_passes_everything(self, good_bits):
        results = nist_core_tests(good_bits)
        assert [r.name for r in results] == EXPECTED_NAMES
        for r in results:
            assert r.p_value is not None, r.name
            assert r.passed, f"{r.name}: p={r.p_value}"

    def test_short_sequence_reports_skips(self):
        results = nist_core_tests(np.ones(64, dtype=np.uint8))
        skipped = [r for r in results if r.p_value is None]
        assert skipped and all(r.note.startswith("skipped") for r in skipped)
        assert all(r.passed is None for r in skipped)

    def test_p_values_roughly_uniform_on_independent_streams(self):
        # 40 independent streams: monobit p-values should not cluster near 0
        ps = []
        for i in range(40):
            bits = make_rng(3000 + i).integers(0, 2, 4096).astype(np.uint8)
            ps.append(monobit(bits).p_value)
        assert min(ps) > 1e-4 and np.mean(ps) > 0.2
