"""Simulation and capacity analysis of continuous-variable dense coding
with two-mode squeezed vacuum."""

__version__ = "0.1.0"

from .capacity import (
    CapacityPoint,
    ChannelModel,
    crossing,
    db_to_r,
    excess_photons,
    holevo_limit,
    i_coherent_1q,
    i_coherent_2q,
    i_dense_coding,
    i_dense_coding_optimal,
    i_squeezed_homodyne,
    r_to_db,
)
from .gaussian import GaussianState, HomodyneStats, SymplecticOp, homodyne_stats, vacuum
from .protocol import DecodedResult, ExperimentConfig, run_experiment
from .traces import Trace, TraceConfig, spectrum_trace, time_trace
