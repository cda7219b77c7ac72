"""Channel capacities at fixed mean photon number, in nats.

The photon budget of a channel using squeezing ``r`` is split as
``n_bar = |alpha|**2 + sinh(r)**2``; a budget below ``sinh(r)**2`` raises
:class:`~densecoding.errors.InfeasibleBudgetError`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy.special import xlogy

from .errors import BracketError, InfeasibleBudgetError, UncertaintyViolationError

NAT_IN_BITS = 1.0 / math.log(2.0)

# relative slack when checking n_bar >= sinh(r)**2 (lets n_bar == sinh(r)**2 through)
_BUDGET_RTOL = 1e-12


def nats_to_bits(nats):
    return nats * NAT_IN_BITS


def db_to_r(db: float) -> float:
    """Squeezing parameter for a squeezing level in dB, ``10 log10(exp(2r)) = db``."""
    if db < 0:
        raise ValueError(f"squeezing level must be >= 0 dB, got {db}")
    return db * math.log(10.0) / 20.0


def r_to_db(r: float) -> float:
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    return 20.0 * r / math.log(10.0)


def squeezing_photons(r: float) -> float:
    return math.sinh(r) ** 2


def signal_photons(n_bar: float, r: float) -> float:
    """Photons left for the signal after paying for squeezing."""
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    if n_bar < 0:
        raise InfeasibleBudgetError(f"n_bar must be >= 0, got {n_bar}")
    spent = squeezing_photons(r)
    if n_bar < spent * (1.0 - _BUDGET_RTOL):
        raise InfeasibleBudgetError(
            f"n_bar={n_bar:.6g} is below the {spent:.6g} photons needed for squeezing r={r:.6g}")
    return max(n_bar - spent, 0.0)


def _check_n_bar(n_bar: float) -> float:
    if n_bar < 0:
        raise InfeasibleBudgetError(f"n_bar must be >= 0, got {n_bar}")
    return n_bar


def i_dense_coding(n_bar: float, r: float) -> float:
    return math.log1p(signal_photons(n_bar, r) * math.exp(2 * r))


def i_dense_coding_optimal(n_bar: float) -> float:
    """Dense coding with the best squeezing for the budget, ``exp(2r) = 1 + 2 n_bar``."""
    n = _check_n_bar(n_bar)
    return math.log1p(n + n * n)


def optimal_squeezing(n_bar: float) -> float:
    """Maximizer in r of both :func:`i_dense_coding` and :func:`i_squeezed_homodyne`."""
    return 0.5 * math.log1p(2.0 * _check_n_bar(n_bar))


def i_coherent_2q(n_bar: float) -> float:
    """Coherent states read out on both quadratures (heterodyne)."""
    return math.log1p(_check_n_bar(n_bar))


def i_coherent_1q(n_bar: float) -> float:
    """Coherent states read out on one quadrature (homodyne)."""
    return 0.5 * math.log1p(4.0 * _check_n_bar(n_bar))


def i_squeezed_homodyne(n_bar: float, r: float) -> float:
    """Amplitude-squeezed states carrying the signal on the squeezed quadrature."""
    return 0.5 * math.log1p(4.0 * signal_photons(n_bar, r) * math.exp(2 * r))


def i_squeezed_homodyne_optimal(n_bar: float) -> float:
    return math.log1p(2.0 * _check_n_bar(n_bar))


def holevo_limit(n_bar: float) -> float:
    """Entropy of a thermal state with ``n_bar`` photons."""
    n = _check_n_bar(n_bar)
    return float((1.0 + n) * math.log1p(n) - xlogy(n, n))


def excess_photons(r: float, r_plus: float) -> float:
    """Extra photons carried by antisqueezing ``r_plus`` beyond the ideal ``r``."""
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r}")
    if r_plus < r:
        raise UncertaintyViolationError(f"antisqueezing r_plus={r_plus} must be >= r={r}")
    return (math.exp(r_plus) - math.exp(r)) / 4.0


def asymptotic_min_squeezing() -> float:
    """Squeezing needed to beat the Holevo limit as ``n_bar -> infinity``.

    For large budgets ``I_DC ~ ln(n_bar) + 2r`` while the Holevo limit goes
    as ``ln(n_bar) + 1``.
    """
    return 0.5


# --- channel families -------------------------------------------------------


_NEEDS_R = {"dense_coding", "squeezed_homodyne"}
_KINDS = ("dense_coding", "dense_coding_optimal", "coherent_1q", "coherent_2q",
          "squeezed_homodyne", "holevo_limit")


@dataclass(frozen=True)
class ChannelModel:
    """One curve of the capacity comparison."""

    kind: str
    r: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}; expected one of {_KINDS}")
        if self.kind in _NEEDS_R:
            if self.r is None or self.r < 0:
                raise ValueError(f"{self.kind} needs a squeezing parameter r >= 0")
        elif self.r is not None:
            raise ValueError(f"{self.kind} takes no squeezing parameter")

    @classmethod
    def parse(cls, text: str) -> "ChannelModel":
        """Parse ``kind`` or ``kind:R`` where ``R`` is ``r`` or a level like ``2dB``."""
        kind, _, arg = text.strip().partition(":")
        if not arg:
            return cls(kind)
        m = re.fullmatch(r"\s*([0-9.eE+-]+)\s*(dB)?\s*", arg, flags=re.IGNORECASE)
        if m is None:
            raise ValueError(f"cannot parse squeezing {arg!r} in channel {text!r}")
        value = float(m.group(1))
        return cls(kind, db_to_r(value) if m.group(2) else value)

    @property
    def label(self) -> str:
        return self.kind if self.r is None else f"{self.kind}:{self.r:.6g}"

    @property
    def min_n_bar(self) -> float:
        return squeezing_photons(self.r) if self.kind in _NEEDS_R else 0.0

    def __call__(self, n_bar: float) -> float:
        if self.kind == "dense_coding":
            return i_dense_coding(n_bar, self.r)
        if self.kind == "squeezed_homodyne":
            return i_squeezed_homodyne(n_bar, self.r)
        return _SIMPLE[self.kind](n_bar)


_SIMPLE: dict[str, Callable[[float], float]] = {
    "dense_coding_optimal": i_dense_coding_optimal,
    "coherent_1q": i_coherent_1q,
    "coherent_2q": i_coherent_2q,
    "holevo_limit": holevo_limit,
}

# the six curves of the standard comparison, at 2 dB where squeezing is fixed
def default_channels(r: float = db_to_r(2.0)) -> list[ChannelModel]:
    return [ChannelModel("coherent_1q"), ChannelModel("coherent_2q"),
            ChannelModel("dense_coding_optimal"), ChannelModel("dense_coding", r),
            ChannelModel("squeezed_homodyne", r), ChannelModel("holevo_limit")]


@dataclass(frozen=True)
class CapacityPoint:
    n_bar: float
    info_nats: float | None
    feasible: bool = True


def capacity_curve(model: ChannelModel, n_grid: Iterable[float]) -> list[CapacityPoint]:
    """Evaluate a channel on a grid; infeasible budgets are kept and flagged."""
    points = []
    for n in n_grid:
        n = float(n)
        try:
            points.append(CapacityPoint(n, model(n)))
        except InfeasibleBudgetError:
            points.append(CapacityPoint(n, None, feasible=False))
    return points


# --- root finding -------------------------------------------------------------


def find_root(f: Callable[[float], float], lo: float, hi: float,
              xtol: float = 1e-6, maxiter: int = 200) -> float:
    """Bracketing root finder mixing Illinois false position with bisection.

    A false-position step that fails to halve the bracket is followed by a
    bisection step, so the bracket shrinks at least as fast as every other
    bisection. Returns a point within ``xtol`` of a root.
    """
    if not lo < hi:
        raise ValueError(f"empty bracket [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo:.3g}, {fhi:.3g}")
    side = 0
    bisect_next = False
    for _ in range(maxiter):
        width = hi - lo
        if width <= 2.0 * xtol:
            break
        if bisect_next:
            c = 0.5 * (lo + hi)
        else:
            c = (lo * fhi - hi * flo) / (fhi - flo)
            if not lo < c < hi:
                c = 0.5 * (lo + hi)
        fc = f(c)
        if fc == 0.0:
            return c
        if np.sign(fc) == np.sign(flo):
            lo, flo = c, fc
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = c, fc
            if side == 1:
                flo *= 0.5
            side = 1
        bisect_next = (hi - lo) > 0.5 * width and not bisect_next
    else:
        raise RuntimeError(f"root finder did not converge in {maxiter} iterations")
    return 0.5 * (lo + hi)


def crossing(a: ChannelModel, b: ChannelModel, bracket: tuple[float, float],
             xtol: float = 1e-6) -> float:
    """Mean photon number where channels ``a`` and ``b`` carry equal information."""
    lo, hi = map(float, bracket)
    floor = max(a.min_n_bar, b.min_n_bar)
    if lo < floor:
        raise InfeasibleBudgetError(
            f"bracket starts at n_bar={lo:.6g}, below the squeezing cost {floor:.6g}")
    return find_root(lambda n: a(n) - b(n), lo, hi, xtol)


def min_squeezing_to_beat_holevo(n_bar: float, xtol: float = 1e-10) -> float:
    """Smallest r at which dense coding with budget ``n_bar`` reaches the Holevo limit."""
    target = holevo_limit(n_bar)
    r_opt = optimal_squeezing(n_bar)
    gap = i_dense_coding(n_bar, r_opt) - target
    if gap < 0:
        raise BracketError(f"dense coding cannot reach the Holevo limit at n_bar={n_bar}")
    return find_root(lambda r: i_dense_coding(n_bar, r) - target, 0.0, r_opt, xtol)
