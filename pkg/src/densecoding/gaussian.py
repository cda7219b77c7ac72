"""Gaussian states in phase space and the operations acting on them.

Conventions:
    * quadratures are ordered ``(x1, p1, x2, p2, ...)``
    * ``[x, p] = i``, so the vacuum covariance is ``I / 2``
    * a displacement by ``alpha`` shifts ``<x>`` by ``sqrt(2) Re(alpha)`` and
      ``<p>`` by ``sqrt(2) Im(alpha)``, so a displaced vacuum carries
      ``|alpha|**2`` photons

Every operation is a pure function: it returns a new :class:`GaussianState`
and never modifies its input.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# shot-noise (vacuum) quadrature variance
VACUUM_VARIANCE = 0.5

SYMMETRY_TOL = 1e-12
UNCERTAINTY_TOL = 1e-9


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for ``(x1, p1, x2, p2, ...)`` ordering."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def rotation_matrix(theta: float) -> np.ndarray:
    """2x2 phase-space rotation, ``a -> a exp(i theta)``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Sorted symplectic eigenvalues of a covariance matrix."""
    n = cov.shape[0] // 2
    w, U = np.linalg.eigh(cov)
    if w[0] <= 0:
        return np.zeros(n)
    root = (U * np.sqrt(w)) @ U.T
    # Hermitian form: eigenvalues of i sqrt(cov) Omega sqrt(cov) are +-nu
    ev = np.linalg.eigvalsh(1j * root @ symplectic_form(n) @ root)
    return np.sort(ev[n:])


def uncertainty_tolerance(cov: np.ndarray) -> float:
    """Slack for the symplectic-eigenvalue check.

    Strongly squeezed entangled states are ill-conditioned and their computed
    symplectic spectrum carries rounding of order ``eps * cond(cov)``.
    """
    w = np.linalg.eigvalsh(cov)
    if w[0] <= 0:
        return UNCERTAINTY_TOL
    return max(UNCERTAINTY_TOL, 8 * np.finfo(float).eps * (w[-1] / w[0]) * VACUUM_VARIANCE)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of an ``n``-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        cov = np.array(self.cov, dtype=float)
        if mean.ndim != 1 or mean.size == 0 or mean.size % 2:
            raise ValueError("mean must be a non-empty vector of even length")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov must have shape {(mean.size, mean.size)}, got {cov.shape}")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL:
            raise ValueError("covariance matrix is not symmetric")
        if symplectic_eigenvalues(cov)[0] < VACUUM_VARIANCE - uncertainty_tolerance(cov):
            raise ValueError("covariance matrix violates the uncertainty principle")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def n_modes(self) -> int:
        return self.mean.size // 2

    def mode_mean(self, mode: int) -> np.ndarray:
        i = _check_mode(self, mode)
        return self.mean[2 * i:2 * i + 2]

    def mode_cov(self, mode: int) -> np.ndarray:
        i = _check_mode(self, mode)
        return self.cov[2 * i:2 * i + 2, 2 * i:2 * i + 2]

    def cross_cov(self, mode_a: int, mode_b: int) -> np.ndarray:
        """2x2 block ``<Delta q_a Delta q_b>`` between two modes."""
        a, b = _check_mode(self, mode_a), _check_mode(self, mode_b)
        return self.cov[2 * a:2 * a + 2, 2 * b:2 * b + 2]

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.symplectic_eigenvalues() - VACUUM_VARIANCE) < tol))

    def purity(self) -> float:
        """``Tr(rho^2) = 1 / sqrt(det(2 cov))``."""
        return float(1.0 / math.sqrt(np.linalg.det(2.0 * self.cov)))


@dataclass(frozen=True)
class SymplecticOp:
    """A linear phase-space map acting on a contiguous list of modes."""

    matrix: np.ndarray
    kind: str

    def is_symplectic(self, tol: float = 1e-10) -> bool:
        n = self.matrix.shape[0] // 2
        omega = symplectic_form(n)
        return bool(np.max(np.abs(self.matrix @ omega @ self.matrix.T - omega)) < tol)

    def apply(self, state: GaussianState, *modes: int) -> GaussianState:
        if 2 * len(modes) != self.matrix.shape[0]:
            raise ValueError(f"{self.kind} acts on {self.matrix.shape[0] // 2} mode(s)")
        idx = _indices(state, modes)
        S = np.eye(2 * state.n_modes)
        S[np.ix_(idx, idx)] = self.matrix
        cov = S @ state.cov @ S.T
        return GaussianState(S @ state.mean, (cov + cov.T) / 2)


@dataclass(frozen=True)
class HomodyneStats:
    """Moments of one homodyne-detected quadrature."""

    mean: float
    variance: float

    @property
    def rel_db(self) -> float:
        """Noise power relative to shot noise, in dB."""
        return 10.0 * math.log10(self.variance / VACUUM_VARIANCE)


def _check_mode(state: GaussianState, mode: int) -> int:
    if not isinstance(mode, (int, np.integer)) or not 0 <= mode < state.n_modes:
        raise IndexError(f"mode {mode!r} out of range for a {state.n_modes}-mode state")
    return int(mode)


def _indices(state: GaussianState, modes) -> list[int]:
    checked = [_check_mode(state, m) for m in modes]
    if len(set(checked)) != len(checked):
        raise ValueError("modes must be distinct")
    return [k for m in checked for k in (2 * m, 2 * m + 1)]


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


# --- symplectic matrices -------------------------------------------------


def squeeze_op(r: float, orientation: float = 0.0) -> SymplecticOp:
    """Single-mode squeezer.

    At ``orientation = 0`` the x quadrature is scaled by ``exp(-r)`` and p by
    ``exp(r)``; ``orientation = pi/2`` exchanges the roles.
    """
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r} (use orientation)")
    R = rotation_matrix(orientation)
    return SymplecticOp(R @ np.diag([math.exp(-r), math.exp(r)]) @ R.T, "squeeze")


def rotation_op(theta: float) -> SymplecticOp:
    return SymplecticOp(rotation_matrix(theta), "rotation")


def beamsplitter_op(transmittance: float, phase: float = 0.0) -> SymplecticOp:
    """Two-mode beamsplitter ``a' = t a + r e^{i phase} b``, ``b' = t b - r e^{-i phase} a``.

    With ``transmittance = 1/2`` and ``phase = 0`` this is the EPR combiner
    ``X1 = (x1 + x2)/sqrt2``, ``X2 = (x2 - x1)/sqrt2``; ``phase = pi`` gives
    its inverse.
    """
    _check_unit_interval("transmittance", transmittance)
    t, r = math.sqrt(transmittance), math.sqrt(1.0 - transmittance)
    I = np.eye(2)
    S = np.block([[t * I, r * rotation_matrix(phase)],
                  [-r * rotation_matrix(-phase), t * I]])
    return SymplecticOp(S, "beamsplitter")


# --- state operations ----------------------------------------------------


def vacuum(n_modes: int) -> GaussianState:
    if not isinstance(n_modes, (int, np.integer)) or n_modes < 1:
        raise ValueError(f"n_modes must be a positive integer, got {n_modes!r}")
    return GaussianState(np.zeros(2 * n_modes), VACUUM_VARIANCE * np.eye(2 * n_modes))


def squeeze(state: GaussianState, mode: int, r: float, orientation: float = 0.0) -> GaussianState:
    return squeeze_op(r, orientation).apply(state, mode)


def beamsplitter(state: GaussianState, mode_a: int, mode_b: int,
                 transmittance: float = 0.5, phase: float = 0.0) -> GaussianState:
    return beamsplitter_op(transmittance, phase).apply(state, mode_a, mode_b)


def phase_rotate(state: GaussianState, mode: int, theta: float) -> GaussianState:
    return rotation_op(theta).apply(state, mode)


def displace(state: GaussianState, mode: int, alpha: complex) -> GaussianState:
    i = _check_mode(state, mode)
    mean = state.mean.copy()
    mean[2 * i] += math.sqrt(2.0) * complex(alpha).real
    mean[2 * i + 1] += math.sqrt(2.0) * complex(alpha).imag
    return GaussianState(mean, state.cov)


def loss(state: GaussianState, mode: int, transmittance: float) -> GaussianState:
    """Pure-loss channel: mix the mode with vacuum at the given transmittance."""
    _check_unit_interval("transmittance", transmittance)
    i = _check_mode(state, mode)
    scale = np.ones(2 * state.n_modes)
    scale[2 * i:2 * i + 2] = math.sqrt(transmittance)
    cov = state.cov * np.outer(scale, scale)
    cov[2 * i:2 * i + 2, 2 * i:2 * i + 2] += (1.0 - transmittance) * VACUUM_VARIANCE * np.eye(2)
    return GaussianState(state.mean * scale, cov)


def add_noise(state: GaussianState, mode: int, noise_cov) -> GaussianState:
    """Add classical Gaussian noise with 2x2 covariance ``noise_cov`` to one mode."""
    noise_cov = np.asarray(noise_cov, dtype=float)
    if noise_cov.shape != (2, 2) or np.min(np.linalg.eigvalsh((noise_cov + noise_cov.T) / 2)) < -1e-15:
        raise ValueError("noise_cov must be a positive semidefinite 2x2 matrix")
    i = _check_mode(state, mode)
    cov = state.cov.copy()
    cov[2 * i:2 * i + 2, 2 * i:2 * i + 2] += (noise_cov + noise_cov.T) / 2
    return GaussianState(state.mean, cov)


def homodyne_stats(state: GaussianState, mode: int, lo_phase: float = 0.0) -> HomodyneStats:
    """Mean and variance of ``x cos(lo_phase) + p sin(lo_phase)`` on one mode."""
    u = np.array([math.cos(lo_phase), math.sin(lo_phase)])
    return HomodyneStats(float(u @ state.mode_mean(mode)), float(u @ state.mode_cov(mode) @ u))


def mean_photon(state: GaussianState, mode: int) -> float:
    mu, V = state.mode_mean(mode), state.mode_cov(mode)
    return float((mu @ mu) / 2 + (V[0, 0] + V[1, 1] - 1.0) / 2)


def sample_quadratures(state: GaussianState, n_samples: int, rng=None) -> np.ndarray:
    """Draw ``(n_samples, 2 n_modes)`` quadrature outcomes from the Wigner function."""
    rng = np.random.default_rng(rng)
    return rng.multivariate_normal(state.mean, state.cov, size=n_samples, method="eigh")
