"""Spatial signs and the empirical spatial distribution.

On the real line the spatial distribution collapses to 2F(x) - 1, so the
machinery can be checked against the standard normal CDF. In function space
the same map sends a query curve to a point in the unit ball, and its norm
grows toward 1 as the query moves away from the bulk of the sample.
"""

import math

import numpy as np

from spatialfda import (
    Curve,
    Grid,
    KernelSpec,
    ProcessSpec,
    FunctionalSample,
    empirical_spatial_dist,
    monotonicity_probe,
    norm,
    sample_process,
    sgn_hilbert,
)


def scalar_sample(values):
    """Embed plain numbers as constant curves on a two-point grid."""
    grid = Grid.custom(np.array([0.0, 1.0]), np.array([0.5, 0.5]))
    vals = np.repeat(np.asarray(values, dtype=float)[:, None], 2, axis=1)
    return FunctionalSample(grid, vals), grid


def main():
    rng = np.random.default_rng(5)
    sample, grid = scalar_sample(rng.standard_normal(20000))

    print("scalar check: empirical spatial distribution vs 2*Phi(x) - 1")
    for x in [-2.0, -1.0, 0.0, 1.0, 2.0]:
        q = Curve(grid, np.full(2, x))
        s = empirical_spatial_dist(q, sample)
        target = math.erf(x / math.sqrt(2.0))
        print(f"  x={x:+.1f}:  {s.representation.values[0]:+.4f}  vs  {target:+.4f}")

    # now genuinely functional: Brownian sample, curve-valued queries
    fgrid = Grid.uniform(0.0, 1.0, 100)
    fsample = sample_process(ProcessSpec(KernelSpec.brownian()), fgrid, 500, seed=11)

    center = Curve(fgrid, np.zeros(fgrid.size))
    print(f"\nnorm of the spatial distribution at the center curve: "
          f"{empirical_spatial_dist(center, fsample).norm:.4f} (small)")
    far = Curve(fgrid, 50.0 * np.sqrt(fgrid.points))
    print(f"norm far from the sample:                             "
          f"{empirical_spatial_dist(far, fsample).norm:.4f} (approaches 1)")

    # the map is monotone: <S_x - S_y, x - y> >= 0 for distinct queries
    probes = sample_process(ProcessSpec(KernelSpec.brownian()), fgrid, 120, seed=99)
    pairs = [(probes.curve(2 * i), probes.curve(2 * i + 1)) for i in range(60)]
    report = monotonicity_probe(fsample, pairs)
    print(f"\nmonotonicity probe over {report.n_pairs} random query pairs: "
          f"{report.violations} violations, "
          f"smallest inner product {report.values.min():.2e}")

    # spatial sign of a curve has unit norm in the grid geometry
    wave = Curve(fgrid, np.sin(np.pi * fgrid.points))
    print(f"||sgn(curve)|| = {norm(sgn_hilbert(wave)):.6f}")


if __name__ == "__main__":
    main()
