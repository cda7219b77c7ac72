"""The dense-coding pipeline: two squeezers, EPR combiner, encoding, decoding.

Mode layout inside the simulation:

    0  signal beam (OPO1 output, then EPR beam 1, then decoded output 1)
    1  decoding beam (OPO2 output, then EPR beam 2, then decoded output 2)
    2  displacement beam, only present with the partially transmitting mirror model

Output 1 is read out on x (LO phase 0), output 2 on p (LO phase pi/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import gaussian as gs
from .errors import UncertaintyViolationError

SIGNAL, DECODER, DISPLACER = 0, 1, 2


@dataclass(frozen=True)
class ExperimentConfig:
    """Physical parameters of one dense-coding run.

    ``r2`` squeezes OPO2 differently from OPO1; it is an extension knob for
    studying imperfect decoding and defaults to ``r``.
    """

    r: float
    alpha: complex = 0j
    pt_transmittance: float = 0.01
    detector_efficiency: float = 0.999
    ideal_displacement: bool = True
    antisqueeze_r_plus: float | None = None
    r2: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        if not math.isfinite(self.r) or self.r < 0:
            raise ValueError(f"r must be a finite number >= 0, got {self.r}")
        if self.r2 is not None and (not math.isfinite(self.r2) or self.r2 < 0):
            raise ValueError(f"r2 must be a finite number >= 0, got {self.r2}")
        for name in ("pt_transmittance", "detector_efficiency"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if not self.ideal_displacement and self.pt_transmittance == 0.0:
            raise ValueError("pt_transmittance must be > 0 for the mirror displacement model")
        if self.antisqueeze_r_plus is not None and self.antisqueeze_r_plus < max(self.r, self.r2 or 0.0):
            raise UncertaintyViolationError(
                f"antisqueeze_r_plus={self.antisqueeze_r_plus} must be >= r (uncertainty principle)")

    @classmethod
    def ideal(cls, r: float, alpha: complex = 0j) -> "ExperimentConfig":
        """Lossless detectors, phase-space displacement, no excess noise."""
        return cls(r=r, alpha=alpha, detector_efficiency=1.0, ideal_displacement=True)

    @property
    def is_ideal(self) -> bool:
        return (self.ideal_displacement and self.detector_efficiency == 1.0
                and self.antisqueeze_r_plus in (None, self.r) and self.r2 in (None, self.r))


@dataclass(frozen=True)
class DecodedResult:
    x_channel: gs.HomodyneStats
    p_channel: gs.HomodyneStats
    epr_variance: float
    separability_cross_cov: float
    n_bar: float
    state: gs.GaussianState = field(repr=False)
    epr_state: gs.GaussianState = field(repr=False)


def _opo(state: gs.GaussianState, mode: int, r: float, orientation: float,
         r_plus: float | None) -> gs.GaussianState:
    state = gs.squeeze(state, mode, r, orientation)
    if r_plus is not None and r_plus > r:
        # excess noise on the antisqueezed axis only, so the state goes mixed
        R = gs.rotation_matrix(orientation)
        extra = (math.exp(2 * r_plus) - math.exp(2 * r)) / 2
        state = gs.add_noise(state, mode, R @ np.diag([0.0, extra]) @ R.T)
    return state


def epr_state(config: ExperimentConfig) -> gs.GaussianState:
    """Two EPR beams on modes 0 and 1 (plus an idle displacement mode if needed)."""
    n_modes = 2 if config.ideal_displacement else 3
    r2 = config.r if config.r2 is None else config.r2
    state = gs.vacuum(n_modes)
    state = _opo(state, SIGNAL, config.r, 0.0, config.antisqueeze_r_plus)
    state = _opo(state, DECODER, r2, math.pi / 2, config.antisqueeze_r_plus)
    return gs.beamsplitter(state, SIGNAL, DECODER, 0.5, 0.0)


def encode(state: gs.GaussianState, config: ExperimentConfig) -> gs.GaussianState:
    """Displace the signal beam by ``config.alpha``.

    The mirror model reflects the EPR beam off a mirror of transmittance T and
    transmits a coherent beam of amplitude ``alpha / sqrt(T)``, so the net
    displacement is ``alpha`` at the cost of a loss of T on the EPR beam.
    """
    if config.ideal_displacement:
        return gs.displace(state, SIGNAL, config.alpha)
    T = config.pt_transmittance
    state = gs.displace(state, DISPLACER, config.alpha / math.sqrt(T))
    return gs.beamsplitter(state, SIGNAL, DISPLACER, 1.0 - T, 0.0)


def decode(state: gs.GaussianState, config: ExperimentConfig) -> gs.GaussianState:
    eta = config.detector_efficiency
    if eta < 1.0:
        state = gs.loss(gs.loss(state, SIGNAL, eta), DECODER, eta)
    return gs.beamsplitter(state, SIGNAL, DECODER, 0.5, math.pi)


def run_experiment(config: ExperimentConfig) -> DecodedResult:
    epr = epr_state(config)
    sent = encode(epr, config)
    out = decode(sent, config)
    return DecodedResult(
        x_channel=gs.homodyne_stats(out, SIGNAL, 0.0),
        p_channel=gs.homodyne_stats(out, DECODER, math.pi / 2),
        epr_variance=gs.homodyne_stats(epr, SIGNAL, 0.0).variance,
        separability_cross_cov=float(np.max(np.abs(out.cross_cov(SIGNAL, DECODER)))),
        n_bar=gs.mean_photon(sent, SIGNAL),
        state=out,
        epr_state=epr,
    )


def epr_noise_profile(config: ExperimentConfig, n_phases: int = 8) -> np.ndarray:
    """Single-EPR-beam variance at ``n_phases`` LO phases spread over ``[0, pi)``."""
    epr = epr_state(config)
    phases = np.arange(n_phases) * math.pi / n_phases
    return np.array([gs.homodyne_stats(epr, SIGNAL, th).variance for th in phases])


def epr_noise(config: ExperimentConfig, tol: float = 1e-9) -> float:
    """Variance of one EPR beam, checked to be independent of the LO phase."""
    profile = epr_noise_profile(config, 8)
    if np.ptp(profile) > tol:
        raise ValueError(f"EPR noise depends on LO phase (spread {np.ptp(profile):.3g})")
    return float(profile[0])


def separability_check(config: ExperimentConfig) -> float:
    """Largest cross-covariance magnitude between the two decoded outputs."""
    return run_experiment(config).separability_cross_cov


def transfer_matrix(config: ExperimentConfig) -> np.ndarray:
    """2x2 map from ``(Re alpha, Im alpha)`` to the decoded ``(<x_1>, <p_2>)``."""
    def means(alpha):
        res = run_experiment(replace(config, alpha=alpha))
        return np.array([res.x_channel.mean, res.p_channel.mean])

    base = means(0j)
    return np.column_stack([means(1 + 0j) - base, means(1j) - base])
