"""Acceptance criteria, one test per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from densecoding import capacity as cap
from densecoding import gaussian as gs
from densecoding.capacity import ChannelModel as M
from densecoding.protocol import ExperimentConfig, epr_noise, epr_noise_profile, run_experiment, separability_check
from densecoding.traces import summarize_spectra
from oracles import brute_force_max_over_r

pytestmark = pytest.mark.acceptance

R = 0.23026  # 2.0 dB


def test_criterion_01_decoded_variances_at_two_db():
    start = time.perf_counter()
    res = run_experiment(ExperimentConfig.ideal(R))
    analytic = math.exp(-2 * R) / 2
    for ch in (res.x_channel, res.p_channel):
        assert abs(ch.variance - analytic) < 1e-9
        assert ch.variance == pytest.approx(0.31548, abs=5e-6)
        assert ch.rel_db == pytest.approx(-2.0, abs=1e-3)
    samples = gs.sample_quadratures(res.state, 1_000_000, np.random.default_rng(2024))
    assert np.var(samples[:, 0]) == pytest.approx(analytic, rel=0.02)  # x on output 1
    assert np.var(samples[:, 3]) == pytest.approx(analytic, rel=0.02)  # p on output 2
    assert time.perf_counter() - start < 1.0


def test_criterion_02_epr_noise_phase_independent():
    cfg = ExperimentConfig.ideal(R)
    profile = epr_noise_profile(cfg, 8)
    assert np.ptp(profile) < 1e-9
    # cosh(2r)/2 at r = 0.23026 is 0.553963
    np.testing.assert_allclose(profile, math.cosh(2 * R) / 2, atol=1e-9)
    assert epr_noise(cfg) == pytest.approx(0.55396, abs=5e-6)


def test_criterion_03_outputs_separable():
    for r in (0.0, R, 1.0, 3.0):
        assert separability_check(ExperimentConfig.ideal(r)) < 1e-10


def test_criterion_04_dense_coding_beats_homodyne_threshold():
    n = cap.crossing(M("dense_coding", R), M("squeezed_homodyne", R), (0.5, 3.0))
    assert n == pytest.approx(1.316, abs=1e-3)
    assert n == pytest.approx(2 * math.exp(-2 * R) + math.sinh(R) ** 2, abs=1e-6)


def test_criterion_05_optimal_dense_coding_beats_holevo_threshold():
    n = cap.crossing(M("dense_coding_optimal"), M("holevo_limit"), (1.0, 3.0))
    assert n == pytest.approx(1.884, abs=5e-3)
    assert cap.r_to_db(cap.optimal_squeezing(n)) == pytest.approx(6.78, abs=0.01)


def test_criterion_06_asymptotic_squeezing_threshold():
    n = 1e4
    assert cap.i_dense_coding(n, 0.51) > cap.holevo_limit(n)
    assert not cap.i_dense_coding(n, 0.49) > cap.holevo_limit(n)


def test_criterion_07_excess_photons():
    # r_plus from inverting 0.062 = (e^{r_plus} - e^{r}) / 4
    r_plus = math.log(4 * 0.062 + math.exp(R))
    assert r_plus == pytest.approx(0.4100, abs=1e-3)
    assert cap.excess_photons(R, 0.4100) == pytest.approx(0.0620, abs=5e-4)


def test_criterion_08_optimizer_certificates():
    for n in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
        best_dc, _ = brute_force_max_over_r(cap.i_dense_coding, n)
        best_sh, _ = brute_force_max_over_r(cap.i_squeezed_homodyne, n)
        assert abs(math.log(1 + n + n * n) - best_dc) < 1e-8
        assert abs(math.log(1 + 2 * n) - best_sh) < 1e-8
        assert cap.i_dense_coding_optimal(n) == pytest.approx(best_dc, abs=1e-8)
        assert cap.i_squeezed_homodyne_optimal(n) == pytest.approx(best_sh, abs=1e-8)


def test_criterion_09_two_tone_spectra_isolated(two_tone_spectra):
    _, tc, (x, p) = two_tone_spectra
    s = summarize_spectra(x, p, tc)
    assert s.am_leakage_db < -20 and s.pm_leakage_db < -20
    for floor in s.floor_db:
        assert floor == pytest.approx(-2.0, abs=0.2)
    assert x.axis[np.argmax(x.power_db)] == pytest.approx(1.3e6, abs=tc.rbw_hz / 2)
    assert p.axis[np.argmax(p.power_db)] == pytest.approx(1.1e6, abs=tc.rbw_hz / 2)


# --- criterion 10: randomized invariants -------------------------------------------

CASES = 1000


def _random_op(rng):
    kind = rng.integers(3)
    if kind == 0:
        return gs.squeeze_op(rng.uniform(0, 2), rng.uniform(0, 2 * np.pi)), 1
    if kind == 1:
        return gs.rotation_op(rng.uniform(-np.pi, np.pi)), 1
    return gs.beamsplitter_op(rng.uniform(0, 1), rng.uniform(-np.pi, np.pi)), 2


def _apply_random(state, rng, passive=False):
    n = state.n_modes
    for _ in range(6):
        op, width = _random_op(rng)
        while passive and op.kind == "squeeze":
            op, width = _random_op(rng)
        modes = rng.choice(n, size=width, replace=False)
        state = op.apply(state, *map(int, modes))
    return state


def test_criterion_10_randomized_invariants():
    rng = np.random.default_rng(10)
    # symplecticity
    for _ in range(CASES):
        op, _ = _random_op(rng)
        assert op.is_symplectic(1e-10)
    # purity preservation under random symplectic circuits
    for _ in range(CASES):
        state = _apply_random(gs.vacuum(3), rng)
        assert state.is_pure(gs.uncertainty_tolerance(state.cov))
    # uncertainty positivity after loss and added noise
    for _ in range(CASES):
        state = _apply_random(gs.vacuum(2), rng)
        state = gs.loss(state, int(rng.integers(2)), rng.uniform(0, 1))
        a = rng.normal(size=(2, 2)) * 0.1
        state = gs.add_noise(state, int(rng.integers(2)), a @ a.T)
        tol = gs.uncertainty_tolerance(state.cov)
        assert state.symplectic_eigenvalues()[0] >= gs.VACUUM_VARIANCE - tol
    # passive photon conservation
    for _ in range(CASES):
        state = gs.squeeze(gs.vacuum(3), 0, rng.uniform(0, 1.5), rng.uniform(0, np.pi))
        state = gs.displace(state, 1, complex(*rng.normal(size=2)))
        before = sum(gs.mean_photon(state, m) for m in range(3))
        after = _apply_random(state, rng, passive=True)
        assert sum(gs.mean_photon(after, m) for m in range(3)) == pytest.approx(before, abs=1e-9)
    # zero-photon capacity nullity
    for _ in range(CASES):
        r = rng.uniform(0, 3)
        for model in (M("coherent_1q"), M("coherent_2q"), M("dense_coding_optimal"),
                      M("holevo_limit"), M("dense_coding", 0.0), M("squeezed_homodyne", 0.0)):
            assert model(0.0) == 0.0
        # all photons spent on squeezing leaves nothing for the signal
        assert cap.i_dense_coding(math.sinh(r) ** 2, r) == pytest.approx(0.0, abs=1e-12)
        assert cap.i_squeezed_homodyne(math.sinh(r) ** 2, r) == pytest.approx(0.0, abs=1e-12)
