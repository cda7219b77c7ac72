import math

import numpy as np
import pytest

from densecoding import gaussian as gs
from densecoding.protocol import (
    ExperimentConfig,
    epr_noise,
    epr_noise_profile,
    run_experiment,
    separability_check,
    transfer_matrix,
)

R2DB = math.log(10 ** 0.2) / 2
SQ = 0.5 * 10 ** -0.2
ANTI = 0.5 * 10 ** 0.2


def ideal(r, alpha=0j):
    return ExperimentConfig.ideal(r, alpha)


def test_no_squeezing_is_shot_noise_limited():
    res = run_experiment(ideal(0.0))
    assert res.x_channel.variance == pytest.approx(0.5, abs=1e-15)
    assert res.p_channel.variance == pytest.approx(0.5, abs=1e-15)


def test_two_db_decoded_variances():
    res = run_experiment(ideal(R2DB))
    assert res.x_channel.variance == pytest.approx(SQ, abs=1e-12)
    assert res.p_channel.variance == pytest.approx(SQ, abs=1e-12)
    assert res.x_channel.rel_db == pytest.approx(-2.0, abs=1e-9)
    assert res.p_channel.rel_db == pytest.approx(-2.0, abs=1e-9)


def test_strong_squeezing_drives_noise_to_zero():
    res = run_experiment(ideal(5.0))
    assert res.x_channel.variance == pytest.approx(math.exp(-10) / 2, abs=1e-10)
    assert res.x_channel.variance == pytest.approx(2.27e-5, abs=5e-8)


def test_signal_shifts_means_only():
    res = run_experiment(ideal(R2DB, 3 + 4j))
    ref = run_experiment(ideal(R2DB))
    assert res.x_channel.mean == pytest.approx(3.0, abs=1e-12)
    assert res.p_channel.mean == pytest.approx(4.0, abs=1e-12)
    assert res.x_channel.variance == ref.x_channel.variance
    assert res.p_channel.variance == ref.p_channel.variance


@pytest.mark.parametrize("r", np.linspace(0.0, 5.0, 26))
def test_decoded_variance_identity(r):
    res = run_experiment(ideal(r))
    assert abs(res.x_channel.variance - 0.5 * math.exp(-2 * r)) < 1e-10
    assert abs(res.p_channel.variance - 0.5 * math.exp(-2 * r)) < 1e-10
    assert abs(res.x_channel.variance - res.p_channel.variance) < 1e-12


def test_both_quadratures_below_shot_noise_together():
    res = run_experiment(ideal(R2DB, 0.7 - 1.1j))
    assert res.x_channel.variance < 0.5 and res.p_channel.variance < 0.5
    # readouts come from different output modes, whose cross terms vanish
    assert np.max(np.abs(res.state.cross_cov(0, 1))) < 1e-12


def test_transfer_is_identity():
    np.testing.assert_allclose(transfer_matrix(ideal(R2DB)), np.eye(2), atol=1e-12)


@pytest.mark.parametrize("alpha", [a + 1j * b for a in (-2.0, 0.0, 1.5) for b in (-1.0, 0.0, 3.0)])
def test_signal_linearity(alpha):
    res = run_experiment(ideal(0.8, alpha))
    assert res.x_channel.mean == pytest.approx(alpha.real, abs=1e-12)
    assert res.p_channel.mean == pytest.approx(alpha.imag, abs=1e-12)


class TestEprNoise:
    def test_no_squeezing(self):
        assert epr_noise(ideal(0.0)) == pytest.approx(0.5, abs=1e-15)

    def test_two_db(self):
        profile = epr_noise_profile(ideal(R2DB), 8)
        np.testing.assert_allclose(profile, (SQ + ANTI) / 2, atol=1e-12)
        assert np.ptp(profile) < 1e-9
        assert epr_noise(ideal(R2DB)) > 0.5

    def test_half(self):
        assert epr_noise(ideal(0.5)) == pytest.approx((math.e + 1 / math.e) / 4, abs=1e-12)
        assert epr_noise(ideal(0.5)) == pytest.approx(0.7715, abs=5e-5)

    def test_asymmetric_squeezing_is_phase_dependent(self):
        cfg = ExperimentConfig(0.5, detector_efficiency=1.0, r2=0.1)
        with pytest.raises(ValueError, match="LO phase"):
            epr_noise(cfg)


class TestSeparability:
    @pytest.mark.parametrize("r", [0.0, R2DB, 1.7])
    def test_ideal_outputs_uncorrelated(self, r):
        assert separability_check(ideal(r)) < 1e-10

    def test_asymmetric_squeezing_still_separable(self):
        # decoding inverts the combiner exactly, so outputs are the two OPO modes
        assert separability_check(ExperimentConfig(0.5, detector_efficiency=1.0, r2=0.2)) < 1e-10

    def test_mirror_loss_leaves_correlation(self):
        cfg = ExperimentConfig(R2DB, detector_efficiency=1.0, ideal_displacement=False)
        # the mirror swaps a fraction T of the signal beam for vacuum, so the two
        # decoder inputs differ in x variance by T (EPR noise - 1/2)
        T = cfg.pt_transmittance
        expected = T * ((SQ + ANTI) / 2 - 0.5) / 2
        assert separability_check(cfg) == pytest.approx(expected, rel=1e-9)


class TestRealisticSetup:
    def config(self, alpha=0j, **kw):
        return ExperimentConfig(R2DB, alpha, detector_efficiency=1.0, ideal_displacement=False, **kw)

    @pytest.mark.parametrize("alpha", [1.0, 3 + 4j, -0.5j])
    def test_mirror_displacement_matches_ideal(self, alpha):
        real = run_experiment(self.config(alpha))
        ref = run_experiment(ideal(R2DB, alpha))
        assert real.x_channel.mean == pytest.approx(ref.x_channel.mean, rel=5e-3, abs=1e-12)
        assert real.p_channel.mean == pytest.approx(ref.p_channel.mean, rel=5e-3, abs=1e-12)
        assert real.x_channel.variance == pytest.approx(ref.x_channel.variance, rel=1e-2)
        assert real.p_channel.variance == pytest.approx(ref.p_channel.variance, rel=1e-2)

    def test_detector_efficiency(self):
        cfg = ExperimentConfig(R2DB, detector_efficiency=0.999)
        res = run_experiment(cfg)
        assert res.x_channel.variance == pytest.approx(0.999 * SQ + 0.001 * 0.5, abs=1e-14)

    def test_default_config_is_not_ideal(self):
        assert not ExperimentConfig(R2DB).is_ideal
        assert ideal(R2DB).is_ideal


class TestAntisqueezing:
    def test_squeezed_readout_unchanged(self):
        cfg = ExperimentConfig(R2DB, detector_efficiency=1.0, antisqueeze_r_plus=0.41)
        res = run_experiment(cfg)
        assert res.x_channel.variance == pytest.approx(SQ, abs=1e-12)
        assert res.p_channel.variance == pytest.approx(SQ, abs=1e-12)

    def test_antisqueezed_quadrature_inflated(self):
        cfg = ExperimentConfig(R2DB, detector_efficiency=1.0, antisqueeze_r_plus=0.41)
        out = run_experiment(cfg).state
        assert gs.homodyne_stats(out, 0, math.pi / 2).variance == pytest.approx(
            math.exp(0.82) / 2, abs=1e-12)
        assert not out.is_pure()

    def test_r_plus_below_r_rejected(self):
        with pytest.raises(ValueError, match="uncertainty"):
            ExperimentConfig(0.5, antisqueeze_r_plus=0.4)


@pytest.mark.parametrize("kw", [
    {"r": -0.1}, {"r": 0.1, "pt_transmittance": 1.5}, {"r": 0.1, "detector_efficiency": -0.01},
    {"r": float("nan")},
])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ExperimentConfig(**kw)


def test_photon_budget_of_signal_beam():
    res = run_experiment(ideal(R2DB, 1.0))
    assert res.n_bar == pytest.approx(1.0 + math.sinh(R2DB) ** 2, abs=1e-12)
    assert res.n_bar == pytest.approx(1.0540, abs=5e-5)
