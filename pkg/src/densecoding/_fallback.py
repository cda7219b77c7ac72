"""NumPy/SciPy version of the swept-receiver kernel, used when the extension is not built."""
import numpy as np
from scipy.signal import lfilter

MAX_STAGES = 16


def sweep_detect(x, fs, f_start, sweep_rate, n_pre, a_rbw, n_stages, a_vbw, out_idx):
    if not 1 <= n_stages <= MAX_STAGES:
        raise ValueError(f"n_stages must be in [1, {MAX_STAGES}]")
    x = np.ascontiguousarray(x, dtype=np.float64)
    out_idx = np.asarray(out_idx, dtype=np.intp)
    if out_idx.size and (out_idx[0] < 0 or np.any(np.diff(out_idx) < 0)):
        raise ValueError("display indices must be non-negative and sorted")
    if out_idx.size and out_idx[-1] >= x.size:
        raise IndexError("display index beyond the end of the record")
    stop = int(out_idx[-1]) + 1 if out_idx.size else 0
    t = (np.arange(stop) - n_pre) / fs
    cycles = f_start * t + np.where(t < 0, 0.0, 0.5 * sweep_rate * t * t)
    ang = 2.0 * np.pi * (cycles - np.floor(cycles))
    y = x[:stop] * np.cos(ang) - 1j * (x[:stop] * np.sin(ang))
    for _ in range(n_stages):
        y = lfilter([a_rbw], [1.0, a_rbw - 1.0], y)
    video = lfilter([a_vbw], [1.0, a_vbw - 1.0], y.real ** 2 + y.imag ** 2)
    return video[out_idx]
