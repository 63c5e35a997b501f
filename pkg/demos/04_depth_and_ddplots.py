"""Spatial depth and depth-vs-depth plots.

Depth ranks curves from the center of a sample outward: the spatial median
sits near depth 1 and remote curves fall toward 0. Plotting the depth of
each curve with respect to two different samples (a DD-plot) separates
distributions that plain location summaries cannot tell apart.
"""

import pathlib

import numpy as np

from spatialfda import (
    Curve,
    Grid,
    KernelSpec,
    ProcessSpec,
    dd_plot,
    dd_plot_svg,
    sample_process,
    solve_quantile,
    spatial_depth,
)

OUT = pathlib.Path(__file__).with_name("dd_plot.svg")


def main():
    grid = Grid.uniform(0.0, 1.0, 150)
    sample = sample_process(ProcessSpec(KernelSpec.brownian()), grid, 300, seed=8)

    med = solve_quantile(sample, d=6)
    print(f"depth of the spatial median: {spatial_depth(med.curve, sample):.4f}")
    for scale in [1.0, 3.0, 10.0]:
        ray = Curve(grid, scale * np.sqrt(grid.points))
        print(f"depth at {scale:4.1f} * sqrt(t):      "
              f"{spatial_depth(ray, sample):.4f}")

    # DD-plot: a smooth fractional process (H = 0.9) against Brownian
    # motion. Column 0 scores every pooled curve against the fBM sample,
    # column 1 against the Brownian one; the cloud sits above the diagonal
    # because everything looks deeper under the more dispersed Brownian law.
    fbm = sample_process(
        ProcessSpec(KernelSpec.fractional_brownian(0.9)), grid, 60, seed=27
    )
    bm = sample_process(ProcessSpec(KernelSpec.brownian()), grid, 60, seed=28)
    dd = dd_plot(fbm, bm)

    above = np.mean(dd.points[:, 1] > dd.points[:, 0])
    print(f"\nDD-plot with {dd.points.shape[0]} curves: "
          f"{above:.0%} sit above the 45-degree line")
    OUT.write_text(dd_plot_svg(dd))
    print(f"wrote {OUT.name} ({OUT.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
