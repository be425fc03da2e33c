#!/usr/bin/env python3
"""Benchmark the compiled split-step kernel against the NumPy fallback.

Measures single-trajectory throughput at ensemble-scale mode counts (the
regime of the Monte Carlo measure experiments) and at experiment-scale ones.
Run after ``pip install -e . --no-build-isolation``:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from lenslab import backend
from lenslab.evolution import collocation_system
from lenslab.randomfield import SampleStream, mu0_law, sample


def bench(kernel, n_modes, dealias, t1=0.3, dt=2e-3, repeats=50):
    work = collocation_system(n_modes, dealias)
    u0 = sample(mu0_law(), n_modes, SampleStream(seed=1))
    c0 = np.zeros(work.n_modes, dtype=complex)
    c0[:n_modes] = u0.coeffs
    n_steps = round(t1 / dt)
    h = t1 / n_steps
    best = float("inf")
    out = None
    for _ in range(repeats):
        tic = time.perf_counter()
        out, _, _ = kernel(c0, work.values, work.analysis_matrix, 0.0, h, n_steps, 0.1, 5.0, True)
        best = min(best, time.perf_counter() - tic)
    return best, out


def main():
    names = backend.available_backends()
    print(f"selected backend: {backend.BACKEND}")
    print(f"{'modes':>6} {'work':>5} " + " ".join(f"{n:>12}" for n in names) + "   speedup")
    for n_modes, dealias, repeats in ((8, False, 200), (16, False, 100), (64, True, 20), (128, True, 5)):
        row = []
        outs = []
        for name in names:
            t, out = bench(backend.kernel_for(name), n_modes, dealias, repeats=repeats)
            row.append(t)
            outs.append(out)
        work = 2 * n_modes if dealias else n_modes
        speed = row[0] / row[-1] if len(row) > 1 else 1.0
        agree = float(np.abs(outs[0] - outs[-1]).max()) if len(outs) > 1 else 0.0
        print(
            f"{n_modes:>6} {work:>5} "
            + " ".join(f"{1e3 * t:>10.2f}ms" for t in row)
            + f"   {speed:5.1f}x  (backend diff {agree:.1e})"
        )


if __name__ == "__main__":
    main()
