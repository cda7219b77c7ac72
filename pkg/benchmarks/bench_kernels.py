"""Time the compiled swept-receiver kernel against the NumPy/SciPy fallback.

    python3 benchmarks/bench_kernels.py --samples 2000000 --repeat 3

Both backends see the same record and analyzer settings; the script checks
they agree before reporting timings.
"""
import argparse
import math
import timeit

import numpy as np

from densecoding import kernels
from densecoding.traces import TraceConfig, _receiver


def setup(n_samples: int, span_hz: float):
    tc = TraceConfig(span_hz=span_hz)
    rx = _receiver(tc)
    x = np.random.default_rng(0).standard_normal(n_samples)
    idx = np.linspace(rx.n_pre, n_samples - 1, tc.points).astype(np.intp)
    rate = tc.span_hz / tc.sweep_time
    return (x, rx.fs, tc.start_hz, rate, rx.n_pre, rx.a_rbw, rx.poles, rx.a_vbw, idx)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=2_000_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--span-hz", type=float, default=1e6)
    args = parser.parse_args()

    call = setup(args.samples, args.span_hz)
    backends = {"numpy": kernels.fallback.sweep_detect}
    if kernels.compiled is not None:
        backends["cython"] = kernels.compiled.sweep_detect
    else:
        print("compiled extension not built; timing the fallback only")

    results = {name: fn(*call) for name, fn in backends.items()}
    if len(results) == 2:
        err = np.max(np.abs(results["cython"] / results["numpy"] - 1))
        print(f"max relative difference: {err:.2e}")

    print(f"{'backend':8s} {'best (s)':>10s} {'ns/sample':>10s}")
    best = {}
    for name, fn in backends.items():
        best[name] = min(timeit.repeat(lambda: fn(*call), number=1, repeat=args.repeat))
        print(f"{name:8s} {best[name]:10.3f} {1e9 * best[name] / args.samples:10.1f}")
    if len(best) == 2:
        print(f"speed-up: {best['numpy'] / best['cython']:.1f}x")
    # a default two-tone spectrum is about this many samples per channel and average
    tc = TraceConfig(span_hz=1e6)
    print(f"(one default 1 MHz sweep is {math.ceil(tc.sweep_time * tc.sample_rate):,} samples)")


if __name__ == "__main__":
    main()
