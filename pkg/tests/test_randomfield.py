"""Sampling determinism, per-mode laws, equivalence diagnostics, tails."""

import math

import numpy as np
import pytest

from lenslab.errors import InvalidArgument
from lenslab.randomfield import (
    SampleStream,
    custom_law,
    equivalence_diagnostic,
    law_by_name,
    mu0_law,
    rotation_invariance_test,
    sample,
    sample_matrix,
    scaled_law,
    shifted_law,
    smoothing_tail_experiment,
)


class TestSampling:
    def test_determinism_bitwise(self):
        a = sample(mu0_law(), 16, SampleStream(seed=9, index=3)).coeffs
        b = sample(mu0_law(), 16, SampleStream(seed=9, index=3)).coeffs
        assert np.array_equal(a, b)

    def test_distinct_indices_differ(self):
        a = sample(mu0_law(), 16, SampleStream(seed=9, index=0)).coeffs
        b = sample(mu0_law(), 16, SampleStream(seed=9, index=1)).coeffs
        assert np.abs(a - b).max() > 1e-3

    def test_per_mode_variance(self):
        m = 100_000
        mat = sample_matrix(mu0_law(), 8, m, SampleStream(seed=5))
        e2 = (np.abs(mat) ** 2).mean(axis=0)
        se = (np.abs(mat) ** 2).std(ddof=1, axis=0) / math.sqrt(m)
        targets = mu0_law().alphas(8) ** 2
        assert np.all(np.abs(e2 - targets) <= 4 * se)
        # spot values pinned by the law: E|c_0|^2 = 1, E|c_4|^2 = 1/9
        assert abs(e2[0] - 1.0) <= 4 * se[0]
        assert abs(e2[4] - 1.0 / 9.0) <= 4 * se[4]

    def test_per_mode_mean(self):
        m = 100_000
        mat = sample_matrix(mu0_law(), 4, m, SampleStream(seed=6))
        mean = mat.mean(axis=0)
        se = mat.std(ddof=1, axis=0) / math.sqrt(m)
        assert np.all(np.abs(mean) <= 4 * se)

    def test_stream_independence(self):
        m = 50_000
        mat = sample_matrix(mu0_law(), 2, m, SampleStream(seed=7))
        x = mat[:, 0].real
        y = np.roll(mat[:, 0].real, 1)  # coefficient of adjacent indices
        corr = np.corrcoef(x, y)[0, 1]
        assert abs(corr) <= 4 / math.sqrt(m)

    def test_law_names(self):
        assert law_by_name("mu0").name == "mu0"
        assert law_by_name("scaled(2)").alphas(1)[0] == pytest.approx(2.0)
        with pytest.raises(InvalidArgument):
            law_by_name("bogus")
        with pytest.raises(InvalidArgument):
            scaled_law(-1.0)
        with pytest.raises(InvalidArgument):
            sample(mu0_law(), 0, SampleStream(seed=1))

    def test_custom_law_table_bound(self):
        law = custom_law([1.0, 0.5])
        assert law.alphas(2).tolist() == [1.0, 0.5]
        with pytest.raises(InvalidArgument):
            law.alphas(3)


class TestEquivalence:
    def test_identical_laws(self):
        rep = equivalence_diagnostic(mu0_law(), mu0_law(), 64)
        assert rep.verdict == "equivalent"
        assert rep.partial_sums_ratio[-1] == 0.0

    def test_scaled_is_singular(self):
        rep = equivalence_diagnostic(mu0_law(), scaled_law(2.0), 64)
        assert rep.verdict == "singular"
        # constant increment (1/2 - 1)^2 per mode
        inc = np.diff(rep.partial_sums_ratio)
        assert np.allclose(inc, 0.25)

    def test_shifted_is_equivalent(self):
        rep = equivalence_diagnostic(mu0_law(), shifted_law(), 256)
        assert rep.verdict == "equivalent"
        # Richardson tail oracle: S_inf - S_K ~ C/K, so S_K at doubled K
        # brackets a finite limit
        s1 = equivalence_diagnostic(mu0_law(), shifted_law(), 128).partial_sums_ratio[-1]
        s2 = rep.partial_sums_ratio[-1]
        s_inf = s2 + (s2 - s1)  # one Richardson step
        assert 0 < s_inf < 1.0
        assert abs(s2 - s_inf) < 0.01

    @pytest.mark.parametrize(
        "law_a,law_b",
        [
            (mu0_law(), mu0_law()),
            (mu0_law(), scaled_law(2.0)),
            (mu0_law(), shifted_law()),
            (scaled_law(0.5), mu0_law()),
        ],
    )
    def test_verdict_symmetry(self, law_a, law_b):
        v1 = equivalence_diagnostic(law_a, law_b, 128).verdict
        v2 = equivalence_diagnostic(law_b, law_a, 128).verdict
        # swapping never flips equivalent <-> singular
        assert {v1, v2} != {"equivalent", "singular"}

    def test_terms_precondition(self):
        with pytest.raises(InvalidArgument):
            equivalence_diagnostic(mu0_law(), mu0_law(), 8)


class TestRotationInvariance:
    def test_zero_rotation(self):
        rep = rotation_invariance_test(0.0, 8, 2000, SampleStream(seed=3))
        assert rep.p_value > 0.001

    def test_generic_rotation(self):
        rep = rotation_invariance_test(0.7, 16, 10_000, SampleStream(seed=3))
        assert rep.p_value > 0.01
        assert rep.p_value_moduli > 0.001

    def test_adversarial_control_has_power(self):
        rep = rotation_invariance_test(0.7, 16, 2000, SampleStream(seed=3), transform=np.abs)
        assert rep.p_value < 1e-6

    def test_sample_floor(self):
        with pytest.raises(InvalidArgument):
            rotation_invariance_test(0.1, 4, 10, SampleStream(seed=1))


class TestSmoothingTails:
    def test_median_bound_and_slope(self):
        rep = smoothing_tail_experiment(0.1, 32, 2000, SampleStream(seed=11))
        # radius at the ensemble median must show a fat tail
        median_r = np.quantile(rep.sup_norms, 0.5)
        assert (rep.sup_norms >= median_r).mean() > 0.4
        assert rep.slope < 0

    def test_doubling_samples_consistent(self):
        r1 = smoothing_tail_experiment(0.1, 32, 2000, SampleStream(seed=11))
        r2 = smoothing_tail_experiment(
            0.1, 32, 4000, SampleStream(seed=11), radii=r1.radii
        )
        for t1, t2, c1, c2 in zip(r1.tails, r2.tails, r1.censored, r2.censored):
            if c1 or c2:
                continue
            se = math.sqrt(t1 * (1 - t1) / 2000) + math.sqrt(t2 * (1 - t2) / 4000)
            assert abs(t1 - t2) <= 3 * se + 1e-12

    def test_flow_preserves_moduli(self):
        # the scan uses diagonal phases only; check |c_n| is untouched
        u = sample(mu0_law(), 16, SampleStream(seed=2))
        lam = 2.0 * np.arange(16) + 1.0
        rotated = np.exp(-1j * lam * 0.37) * u.coeffs
        assert np.abs(np.abs(rotated) - np.abs(u.coeffs)).max() <= 1e-15

    def test_sigma_precondition(self):
        with pytest.raises(InvalidArgument):
            smoothing_tail_experiment(0.3, 16, 2000, SampleStream(seed=1))
