"""Spectrum-analyzer emulation of the two balanced homodyne detectors.

Each detector photocurrent is synthesized as white Gaussian noise whose
variance is the homodyne variance of the detected mode at the instantaneous
LO phase, plus the mean signal carried by the AM/PM tones. The analyzer is
a swept superheterodyne receiver: an N-pole synchronously tuned resolution
filter (near-Gaussian shape), a power detector, a one-pole video filter and
linear trace averaging. Power is reported in dB relative to shot noise,
i.e. relative to the level a vacuum input produces through the same chain.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from . import gaussian as gs
from . import kernels
from .protocol import DECODER, SIGNAL, ExperimentConfig, epr_state, run_experiment

KINDS = ("shot_noise", "epr_noise", "squeezed_locked", "squeezed_scanned")
CHANNELS = ("x", "p")

# analyzer sweep-time coupling factor, sweep = K * span / (rbw * vbw)
SWEEP_COUPLING = 2.5
# zero-span sweeps default to this many video time constants
ZERO_SPAN_TAUS = 100.0
# pre-roll before the first display point, in filter time constants
SETTLE_TAUS = 8.0


@dataclass(frozen=True)
class TraceConfig:
    """Analyzer settings. ``am_signal``/``pm_signal`` are ``(freq_hz, depth_db)``.

    ``depth_db`` is the tone power relative to the shot-noise power inside
    the resolution bandwidth, so a 10 dB tone on a shot-noise floor reads
    about 10.4 dB at its peak.
    """

    center_hz: float = 1.1e6
    span_hz: float = 0.0
    rbw_hz: float = 30e3
    vbw_hz: float = 300.0
    averages: int = 10
    sweep_s: float | None = None
    lo_scan: bool = False
    seed: int = 0
    am_signal: tuple[float, float] | None = None
    pm_signal: tuple[float, float] | None = None
    points: int = 501
    rbw_poles: int = 4
    oversample: float = 16.0
    lo_scan_range: float = math.pi

    def __post_init__(self):
        if self.span_hz < 0:
            raise ValueError(f"span_hz must be >= 0, got {self.span_hz}")
        if self.rbw_hz <= 0 or self.vbw_hz <= 0:
            raise ValueError("rbw_hz and vbw_hz must be positive")
        if self.vbw_hz > self.rbw_hz:
            raise ValueError(f"vbw_hz={self.vbw_hz} exceeds rbw_hz={self.rbw_hz}")
        if self.averages < 1:
            raise ValueError(f"averages must be >= 1, got {self.averages}")
        if self.points < 2:
            raise ValueError("points must be >= 2")
        if self.oversample < 16:
            raise ValueError("oversample must be >= 16")
        if self.center_hz - self.span_hz / 2 <= 0:
            raise ValueError("sweep must stay at positive frequencies")
        if self.sweep_s is not None and self.sweep_s <= 0:
            raise ValueError("sweep_s must be positive")
        for name in ("am_signal", "pm_signal"):
            sig = getattr(self, name)
            if sig is not None:
                f, _ = sig
                if f <= 0:
                    raise ValueError(f"{name} frequency must be positive")
                object.__setattr__(self, name, (float(sig[0]), float(sig[1])))

    @property
    def sample_rate(self) -> float:
        return self.oversample * (self.center_hz + self.span_hz / 2)

    @property
    def sweep_time(self) -> float:
        if self.sweep_s is not None:
            return self.sweep_s
        if self.span_hz > 0:
            return SWEEP_COUPLING * self.span_hz / (self.rbw_hz * self.vbw_hz)
        return ZERO_SPAN_TAUS / (2 * math.pi * self.vbw_hz)

    @property
    def start_hz(self) -> float:
        return self.center_hz - self.span_hz / 2

    def axis(self) -> np.ndarray:
        """Display-point axis: time in s at zero span, frequency in Hz otherwise."""
        frac = np.linspace(0.0, 1.0, self.points)
        if self.span_hz == 0:
            return frac * self.sweep_time
        return self.start_hz + frac * self.span_hz


@dataclass(frozen=True, eq=False)
class Trace:
    axis: np.ndarray
    power_db: np.ndarray
    kind: str
    channel: str
    axis_name: str

    @property
    def power_linear(self) -> np.ndarray:
        return 10.0 ** (self.power_db / 10.0)


# --- receiver model -------------------------------------------------------------


def _pole_coefficient(corner_hz: float, fs: float) -> float:
    return 1.0 - math.exp(-2.0 * math.pi * corner_hz / fs)


def rbw_stage_corner(rbw_hz: float, poles: int) -> float:
    """Per-stage corner so that the cascade's full 3 dB width equals ``rbw_hz``."""
    return rbw_hz / 2.0 / math.sqrt(2.0 ** (1.0 / poles) - 1.0)


@lru_cache(maxsize=32)
def noise_power_gain(a_rbw: float, poles: int) -> float:
    """Sum of squared impulse-response taps of the resolution filter."""
    n = int(60.0 * poles / a_rbw) + 64
    h = np.zeros(n)
    h[0] = 1.0
    for _ in range(poles):
        h = lfilter([a_rbw], [1.0, a_rbw - 1.0], h)
    return float(np.sum(h * h))


@dataclass(frozen=True)
class _Receiver:
    fs: float
    a_rbw: float
    a_vbw: float
    poles: int
    n_pre: int
    n_total: int
    display_idx: np.ndarray
    t: np.ndarray  # time of every sample, negative during pre-roll

    @property
    def shot_level(self) -> float:
        """Detected power for a vacuum-noise input."""
        return gs.VACUUM_VARIANCE * noise_power_gain(self.a_rbw, self.poles)


def _receiver(tc: TraceConfig) -> _Receiver:
    fs = tc.sample_rate
    rbw_corner = rbw_stage_corner(tc.rbw_hz, tc.rbw_poles)
    settle = SETTLE_TAUS * (1.0 / (2 * math.pi * tc.vbw_hz)
                            + tc.rbw_poles / (2 * math.pi * rbw_corner))
    n_pre = int(math.ceil(settle * fs))
    n_sweep = int(round(tc.sweep_time * fs))
    display = n_pre + np.round(np.linspace(0.0, 1.0, tc.points) * n_sweep).astype(np.intp)
    n_total = n_pre + n_sweep + 1
    return _Receiver(fs, _pole_coefficient(rbw_corner, fs), _pole_coefficient(tc.vbw_hz, fs),
                     tc.rbw_poles, n_pre, n_total, display,
                     (np.arange(n_total) - n_pre) / fs)


# --- photocurrent synthesis -----------------------------------------------------


@dataclass(frozen=True)
class _Detectors:
    """Second moments and signal transfer of the two detected modes."""

    cov: np.ndarray       # 4x4 covariance of (x1, p1, x2, p2)
    transfer: np.ndarray  # 4x2 map (Re alpha, Im alpha) -> mode means
    lo_base: tuple[float, float]


def _detectors(exp: ExperimentConfig, kind: str) -> _Detectors:
    if kind == "shot_noise":
        state = gs.vacuum(2)
        return _Detectors(state.cov, np.zeros((4, 2)), (0.0, math.pi / 2))
    idx = [2 * SIGNAL, 2 * SIGNAL + 1, 2 * DECODER, 2 * DECODER + 1]
    if kind == "epr_noise":
        state = epr_state(exp)
        return _Detectors(state.cov[np.ix_(idx, idx)], np.zeros((4, 2)), (0.0, math.pi / 2))
    if kind not in KINDS:
        raise ValueError(f"unknown trace kind {kind!r}; expected one of {KINDS}")
    base = run_experiment(replace(exp, alpha=0j))
    cols = [run_experiment(replace(exp, alpha=a)).state.mean[idx] - base.state.mean[idx]
            for a in (1 + 0j, 1j)]
    return _Detectors(base.state.cov[np.ix_(idx, idx)], np.column_stack(cols),
                      (0.0, math.pi / 2))


def _lo_phases(tc: TraceConfig, rx: _Receiver, base: float, scanning: bool) -> np.ndarray | float:
    if not scanning:
        return base
    # linear ramp centred on the locked phase, clamped through the pre-roll
    frac = np.clip(rx.t / tc.sweep_time, 0.0, 1.0)
    return base + (frac - 0.5) * tc.lo_scan_range


def _tone_amplitude(depth_db: float, rx: _Receiver) -> float:
    # a real tone A cos(wt) detects as A^2/4 at its own frequency
    return 2.0 * math.sqrt(10.0 ** (depth_db / 10.0) * rx.shot_level)


@dataclass(frozen=True, eq=False)
class _Synth:
    """Deterministic parts of the two photocurrents; noise is drawn per average.

    ``i1 = a11 z1 + m1`` and ``i2 = a21 z1 + a22 z2 + m2`` with ``z`` white
    standard normal, so ``(i1, i2)`` has the detected modes' covariance.
    """

    a11: np.ndarray | float
    a21: np.ndarray | float
    a22: np.ndarray | float
    m1: np.ndarray | float
    m2: np.ndarray | float

    def draw(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        z1 = rng.standard_normal(n)
        z2 = rng.standard_normal(n)
        i1 = self.a11 * z1
        i1 += self.m1
        i2 = self.a21 * z1
        i2 += self.a22 * z2
        i2 += self.m2
        return i1, i2


def _synth(exp: ExperimentConfig, tc: TraceConfig, kind: str, rx: _Receiver,
           scanning: bool) -> _Synth:
    det = _detectors(exp, kind)
    th1 = _lo_phases(tc, rx, det.lo_base[0], scanning)
    th2 = _lo_phases(tc, rx, det.lo_base[1], scanning)
    u1 = (np.cos(th1), np.sin(th1))
    u2 = (np.cos(th2), np.sin(th2))
    C = det.cov

    def quad(ua, block, ub):
        return (ua[0] * block[0, 0] * ub[0] + ua[0] * block[0, 1] * ub[1]
                + ua[1] * block[1, 0] * ub[0] + ua[1] * block[1, 1] * ub[1])

    v1 = quad(u1, C[:2, :2], u1)
    v2 = quad(u2, C[2:, 2:], u2)
    c12 = quad(u1, C[:2, 2:], u2)
    s1 = np.sqrt(v1)

    m1 = m2 = 0.0
    if tc.am_signal is not None or tc.pm_signal is not None:
        re_alpha = np.zeros(rx.n_total)
        im_alpha = np.zeros(rx.n_total)
        if tc.am_signal is not None:
            f, depth = tc.am_signal
            re_alpha += _tone_amplitude(depth, rx) * np.cos(2 * np.pi * f * rx.t)
        if tc.pm_signal is not None:
            f, depth = tc.pm_signal
            im_alpha += _tone_amplitude(depth, rx) * np.cos(2 * np.pi * f * rx.t)
        M = det.transfer
        m1 = (u1[0] * (M[0, 0] * re_alpha + M[0, 1] * im_alpha)
              + u1[1] * (M[1, 0] * re_alpha + M[1, 1] * im_alpha))
        m2 = (u2[0] * (M[2, 0] * re_alpha + M[2, 1] * im_alpha)
              + u2[1] * (M[3, 0] * re_alpha + M[3, 1] * im_alpha))
    return _Synth(s1, c12 / s1, np.sqrt(np.maximum(v2 - c12 ** 2 / v1, 0.0)), m1, m2)


def _acquire(exp: ExperimentConfig, tc: TraceConfig, kind: str, scanning: bool):
    rx = _receiver(tc)
    synth = _synth(exp, tc, kind, rx, scanning)
    rng = np.random.default_rng(tc.seed)
    rate = tc.span_hz / tc.sweep_time
    acc = np.zeros((2, tc.points))
    for _ in range(tc.averages):
        for k, current in enumerate(synth.draw(rng, rx.n_total)):
            acc[k] += kernels.sweep_detect(current, rx.fs, tc.start_hz, rate, rx.n_pre,
                                           rx.a_rbw, rx.poles, rx.a_vbw, rx.display_idx)
    rel = acc / tc.averages / rx.shot_level
    return 10.0 * np.log10(rel)


def time_traces(exp: ExperimentConfig, tc: TraceConfig, kind: str) -> tuple[Trace, Trace]:
    """Zero-span records of both detectors (x on output 1, p on output 2)."""
    if tc.span_hz != 0:
        raise ValueError("time traces need span_hz = 0")
    if kind not in KINDS:
        raise ValueError(f"unknown trace kind {kind!r}; expected one of {KINDS}")
    scanning = kind != "squeezed_locked"
    power = _acquire(exp, tc, kind, scanning)
    axis = tc.axis()
    return tuple(Trace(axis, power[k], kind, ch, "time_s") for k, ch in enumerate(CHANNELS))


def time_trace(exp: ExperimentConfig, tc: TraceConfig, kind: str, channel: str = "x") -> Trace:
    if channel not in CHANNELS:
        raise ValueError(f"channel must be one of {CHANNELS}")
    return time_traces(exp, tc, kind)[CHANNELS.index(channel)]


def spectrum_trace(exp: ExperimentConfig, tc: TraceConfig,
                   kind: str = "squeezed_locked") -> tuple[Trace, Trace]:
    """Swept spectra of both detectors over ``center +- span/2``."""
    if tc.span_hz <= 0:
        raise ValueError("spectrum traces need span_hz > 0")
    lo, hi = tc.start_hz, tc.start_hz + tc.span_hz
    for name in ("am_signal", "pm_signal"):
        sig = getattr(tc, name)
        if sig is not None and not lo <= sig[0] <= hi:
            warnings.warn(f"{name} at {sig[0]:.6g} Hz lies outside the sweep [{lo:.6g}, {hi:.6g}] Hz")
    scanning = tc.lo_scan or kind in ("shot_noise", "epr_noise", "squeezed_scanned")
    power = _acquire(exp, tc, kind, scanning)
    axis = tc.axis()
    return tuple(Trace(axis, power[k], kind, ch, "freq_hz") for k, ch in enumerate(CHANNELS))


def expected_level_db(exp: ExperimentConfig, kind: str, channel: str = "x",
                      lo_offset: float = 0.0) -> float:
    """Noise level a trace should converge to, from the Gaussian moments."""
    det = _detectors(exp, kind)
    k = CHANNELS.index(channel)
    th = det.lo_base[k] + lo_offset
    u = np.array([math.cos(th), math.sin(th)])
    v = u @ det.cov[2 * k:2 * k + 2, 2 * k:2 * k + 2] @ u
    return 10.0 * math.log10(v / gs.VACUUM_VARIANCE)


@dataclass(frozen=True)
class SpectrumSummary:
    floor_db: tuple[float, float]
    am_peak_db: tuple[float, float] | None
    pm_peak_db: tuple[float, float] | None
    am_leakage_db: float | None
    pm_leakage_db: float | None


def summarize_spectra(x: Trace, p: Trace, tc: TraceConfig) -> SpectrumSummary:
    """Noise floors, tone peaks and wrong-channel leakage of a spectrum pair.

    Floors are mean powers away from the tones. Leakage is the least-squares
    fraction of the right channel's tone profile that reappears in the wrong
    channel, fitted together with a local floor. It is floored at the standard error of
    that fraction, so a clean channel reports its detection limit.
    """
    half = 2.0 * tc.rbw_hz
    mask = np.ones_like(x.axis, dtype=bool)
    for sig in (tc.am_signal, tc.pm_signal):
        if sig is not None:
            mask &= np.abs(x.axis - sig[0]) > 2 * half
    if np.count_nonzero(mask) < 10:
        raise ValueError("span too narrow to estimate the noise floor away from the tones")
    floors = tuple(float(10 * np.log10(np.mean(t.power_linear[mask]))) for t in (x, p))
    # display points per independent noise sample along the swept trace
    spacing = tc.span_hz / (tc.points - 1)
    video_width = tc.span_hz / tc.sweep_time / (2 * math.pi * tc.vbw_hz)
    correlation = max(1.0, video_width / spacing)

    def tone(sig, right: Trace, wrong: Trace):
        if sig is None:
            return None, None
        sel = np.abs(right.axis - sig[0]) <= half
        peaks = (float(np.max(right.power_db[sel])), float(np.max(wrong.power_db[sel])))
        # wrong = floor + fraction * right, fitted inside the window
        design = np.column_stack([np.ones(np.count_nonzero(sel)), right.power_linear[sel]])
        coef, *_ = np.linalg.lstsq(design, wrong.power_linear[sel], rcond=None)
        fraction = float(coef[1])
        scatter = float(np.std(wrong.power_linear[mask]))
        stderr = scatter * math.sqrt(correlation * np.linalg.inv(design.T @ design)[1, 1])
        return peaks, 10.0 * math.log10(max(fraction, stderr))

    am_peak, am_leak = tone(tc.am_signal, x, p)
    pm_peak, pm_leak = tone(tc.pm_signal, p, x)
    return SpectrumSummary(floors, am_peak, pm_peak, am_leak, pm_leak)
