import math

import numpy as np
import pytest

from skgsim.core import make_rng
from skgsim.security import (
    BoundReport,
    EstimatorConfig,
    estimate_entropy,
    estimate_mi,
    fano_bound,
    mi_gaussian,
    semantic_bound,
)


class TestMiGaussian:
    def test_zero_correlation(self):
        assert mi_gaussian(0.0) == 0.0

    def test_paper_operating_points(self):
        assert abs(mi_gaussian(0.09) - 0.0117334) < 1e-6
        assert abs(mi_gaussian(0.0926) - 0.0124241) < 1e-6

    def test_monotone_and_divergent(self):
        grid = np.linspace(0, 0.999, 200)
        vals = [mi_gaussian(r) for r in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert mi_gaussian(0.99999) > 15

    def test_domain(self):
        with pytest.raises(ValueError):
            mi_gaussian(1.0)
        with pytest.raises(ValueError):
            mi_gaussian(-0.1)


class TestSemanticBound:
    def test_no_leakage_limit(self):
        rep = semantic_bound(16, 2, 0.0)
        assert rep.guessing_term == 2.0 ** (-2 * 2 * 16)
        assert rep.hash_term == 2.0 ** (-2 * 16)
        assert not rep.vacuous

    def test_paper_instantiation(self):
        rep = semantic_bound(16, 2, 0.01)
        assert rep.total < 2.0**-31
        # component terms near 2^-37 and 2^-32, within a factor of 4
        assert 2.0**-39 < rep.guessing_term < 2.0**-35
        assert rep.hash_term == 2.0**-32

    def test_vacuous_flagged(self):
        rep = semantic_bound(16, 2, 0.5)
        assert rep.vacuous and rep.total == 1.0

    def test_total_is_sum_of_terms(self):
        rep = semantic_bound(16, 2, 0.0117)
        assert rep.total == rep.guessing_term + rep.hash_term

    def test_monotone_in_n_and_mi(self):
        assert semantic_bound(20, 2, 0.01).total < semantic_bound(16, 2, 0.01).total
        assert semantic_bound(16, 2, 0.02).total > semantic_bound(16, 2, 0.01).total


class TestFanoBound:
    def test_paper_instantiation(self):
        rep = fano_bound(16, 2, 3.86, 1.39, 16)
        assert abs(rep.log2_total - (-10.5738)) < 0.01

    def test_no_leakage_arithmetic(self):
        rep = fano_bound(16, 2, 4.0, 0.0, 16)
        assert abs(rep.guessing_term - 0.25**16) < 1e-18

    def test_single_subcarrier(self):
        rep = fano_bound(1, 2, 4.0, 0.0, 16)
        assert abs(rep.total - 0.5) < 1e-12

    def test_vacuous_when_entropy_margin_gone(self):
        rep = fano_bound(16, 2, 2.3, 1.4, 16)
        assert rep.vacuous and rep.total == 1.0

    def test_monotone_in_entropy(self):
        assert fano_bound(16, 2, 3.9, 1.39, 16).total < fano_bound(16, 2, 3.5, 1.39, 16).total

    def test_entropy_exceeding_support_rejected(self):
        with pytest.raises(ValueError):
            fano_bound(16, 2, 4.2, 1.0, 16)


def _complex_gauss_pair(rho, n, seed):
    rng = make_rng(seed)
    xr, xi = rng.standard_normal(n), rng.standard_normal(n)
    s = math.sqrt(1 - rho * rho)
    yr = rho * xr + s * rng.standard_normal(n)
    yi = rho * xi + s * rng.standard_normal(n)
    return xr + 1j * xi, yr + 1j * yi


class TestEstimateMi:
    def test_independent_pairing_near_zero(self):
        x, y = _complex_gauss_pair(0.5, 100_000, 51)
        y = np.random.default_rng(3).permutation(y)
        est = estimate_mi(x, y, EstimatorConfig(bins=16))
        assert -0.02 <= est.value_bits <= 0.05

    def test_gaussian_closed_form_complex(self):
        # Lemma-style complex pair: both real and imaginary parts carry rho
        x, y = _complex_gauss_pair(0.5, 100_000, 52)
        est = estimate_mi(x, y, EstimatorConfig(bins=16))
        assert abs(est.value_bits - (-math.log2(1 - 0.25))) < 0.03

    def test_convergence_with_samples(self):
        target = -math.log2(1 - 0.25)
        errs = []
        for n, seed in ((20_000, 53), (200_000, 54), (800_000, 55)):
            x, y = _complex_gauss_pair(0.5, n, seed)
            est = estimate_mi(x, y, EstimatorConfig(bins=16))
            errs.append(abs(est.value_bits - target))
        assert errs[2] <= errs[0] + 0.01

    def test_matched_real_pairs_across_rho_grid(self):
        # real pairs with correlation chosen so the true MI equals the
        # complex closed form at each rho; dense 2-D histograms
        for rho, seed in ((0.3, 56), (0.5, 57), (0.8, 58)):
            target = -math.log2(1 - rho * rho)
            c = rho * math.sqrt(2 - rho * rho)
            rng = make_rng(seed)
            n = 400_000
            x = rng.standard_normal(n)
            y = c * x + math.sqrt(1 - c * c) * rng.standard_normal(n)
            est = estimate_mi(x, y, EstimatorConfig(bins=96))
            assert abs(est.value_bits - target) < 0.03

    def test_sparse_warning(self):
        x, y = _complex_gauss_pair(0.3, 10_000, 59)
        est = estimate_mi(x, y, EstimatorConfig(bins=16))
        assert est.sparse_warning

    def test_mismatched_lengths(self):
        with pytest.raises(ValueError):
            estimate_mi(np.zeros(1000), np.zeros(999), EstimatorConfig())

    def test_per_dimension_bins(self):
        x, y = _complex_gauss_pair(0.5, 50_000, 60)
        est = estimate_mi(x, y, EstimatorConfig(bins=16, bins_x=(8, 8), bins_y=(8, 8)))
        assert est.value_bits > 0.2

    def test_config_validation(self):
        with pytest.raises(ValueError):
            EstimatorConfig(n_samples=10)
        with pytest.raises(ValueError):
            EstimatorConfig(bins=2)
        with pytest.raises(ValueError):
            EstimatorConfig(kind="knn")


class TestEstimateEntropy:
    def test_constant_symbols(self):
        assert estimate_entropy(np.zeros(1000, dtype=int), 16) == 0.0

    def test_uniform_16(self):
        sym = make_rng(61).integers(0, 16, 1_000_000)
        assert abs(estimate_entropy(sym, 16) - 4.0) < 0.01

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            estimate_entropy(np.array([], dtype=int), 16)

    def test_out_of_support_rejected(self):
        with pytest.raises(ValueError):
            estimate_entropy(np.array([17]), 16)


class TestBoundReport:
    def test_lines_mention_terms(self):
        text = "\n".join(semantic_bound(16, 2, 0.01).lines())
        assert "guessing term" in text and "hash term" in text and "direct" in text
