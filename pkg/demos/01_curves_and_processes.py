"""Grids, curves and simulated processes.

Walks through the basic objects: a weighted grid, curves on it, samples
drawn from Karhunen-Loeve expansions, and the principal components of a
simulated Brownian sample compared against the known spectrum.
"""

import math

import numpy as np

from spatialfda import (
    Grid,
    KernelSpec,
    ProcessSpec,
    bm_eigenpair,
    mean_curve,
    pca,
    sample_process,
    total_variance,
)


def main():
    grid = Grid.uniform(0.0, 1.0, 200)
    print(f"uniform grid: {grid.size} points, weights sum to {grid.weights.sum():.6f}")

    spec = ProcessSpec(KernelSpec.brownian())
    sample = sample_process(spec, grid, 1000, seed=42)
    print(f"simulated {len(sample)} Brownian paths")
    print(f"  mean curve norm ~ 0:      {np.abs(mean_curve(sample).values).max():.4f} (max abs)")
    print(f"  total variance ~ 1/2:     {total_variance(sample):.4f}")

    # the sample principal components approach the analytic sine system
    basis = pca(sample, 4)
    print("\nleading eigenvalues (sample vs closed form lambda_k^2):")
    for k in range(1, 5):
        lam, _ = bm_eigenpair(k, grid)
        print(f"  k={k}:  {basis.eigenvalues[k - 1]:.5f}  vs  {lam**2:.5f}")
    frac = basis.eigenvalues[0] / total_variance(sample)
    print(f"first component carries {frac:.1%} of the variance (theory {8 / math.pi**2:.1%})")

    # rougher and smoother relatives, and a heavy-tailed cousin
    for label, p in [
        ("fBM H=0.2 (rough)", ProcessSpec(KernelSpec.fractional_brownian(0.2))),
        ("fBM H=0.8 (smooth)", ProcessSpec(KernelSpec.fractional_brownian(0.8))),
        ("t(3) on min kernel", ProcessSpec(KernelSpec.min_kernel(), "student-t", df=3)),
    ]:
        s = sample_process(p, grid, 1000, seed=7)
        increments = np.diff(s.values, axis=1)
        rough = float(np.mean(np.abs(increments)))
        print(f"{label:22s} total variance {total_variance(s):.3f}, mean |increment| {rough:.4f}")


if __name__ == "__main__":
    main()
