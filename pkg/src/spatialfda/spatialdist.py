"""Spatial signs and empirical spatial distributions.

The spatial sign of x is the unit vector x / ||x|| (zero at the origin), and
the empirical spatial distribution at a query point x is the average sign of
x - X_i over the sample. In one dimension this reduces to 2 F(x) - 1, so the
object plays the role of a centered CDF; its norm never exceeds 1, and
1 - ||S_x|| is the spatial depth (see the depth module).

All Hilbert-space geometry is the weighted grid inner product from
funcspace. The l_p variant of the sign map is provided for plain coefficient
vectors only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError
from .funcspace import Curve, FunctionalSample, norm

# Norms at or below 1e-12 * (1 + reference scale) count as zero, realizing
# the SGN_0 = 0 convention for data that coincide numerically.
ZERO_RTOL = 1e-12


def zero_threshold(ref_scale: float) -> float:
    return ZERO_RTOL * (1.0 + ref_scale)


@dataclass(frozen=True)
class SpatialDistValue:
    """Value of an (empirical) spatial distribution at one query point.

    representation is a Curve in the Hilbert case, or a plain dual
    coefficient vector for the l_p case. norm is cached because callers
    (depth, rate studies) use it constantly; it is at most 1 up to
    round-off, being an average of unit and zero vectors.
    """

    representation: Curve | np.ndarray
    norm: float

    def __post_init__(self):
        if self.norm > 1.0 + 1e-10 or self.norm < 0.0:
            raise ValueError(f"spatial distribution norm {self.norm} outside [0, 1]")


def sgn_hilbert(x: Curve, ref_scale: float = 0.0) -> Curve:
    """Spatial sign x / ||x||, or the zero curve when ||x|| is negligible.

    ref_scale sets the scale against which "negligible" is judged; by
    default only norms at machine-zero level (1e-12) are flattened.
    """
    nx = norm(x)
    if nx <= zero_threshold(ref_scale):
        return Curve(x.grid, np.zeros(x.grid.size))
    return Curve(x.grid, x.values / nx)


def sgn_lp(x: np.ndarray, p: float) -> np.ndarray:
    """Dual vector of the norming functional at x in l_p, p in (1, inf).

    Component i is sign(x_i) |x_i|^(p-1) / ||x||_p^(p-1); the result has
    l_q norm exactly 1 (q conjugate to p), and p = 2 recovers x / ||x||.
    Zero input maps to zero.
    """
    if not np.isfinite(p) or p <= 1.0:
        raise ValueError("p must lie in (1, inf)")
    v = np.asarray(x, dtype=float)
    nx = float(np.linalg.norm(v, ord=p))
    if nx <= zero_threshold(0.0):
        return np.zeros_like(v)
    return np.sign(v) * np.abs(v) ** (p - 1.0) / nx ** (p - 1.0)


def _sign_mean(
    queries: np.ndarray,
    data: np.ndarray,
    weights: np.ndarray,
    thresh: float | None = None,
) -> np.ndarray:
    """Average spatial sign of (query - X_i) for each query row.

    queries (m, D), data (n, D) -> (m, D). Chunked over queries to bound
    the (chunk, n, D) difference tensor; coincident pairs contribute zero.
    The result does not depend on the chunking. Callers that split a batch
    themselves pass a precomputed coincidence threshold so the split does
    not move the coincidence decision either.
    """
    m, D = queries.shape
    n = data.shape[0]
    if thresh is None:
        ref = float(
            np.sqrt(np.max(np.sum(queries * queries * weights, axis=1), initial=0.0))
        )
        ref += float(np.sqrt(np.max(np.sum(data * data * weights, axis=1), initial=0.0)))
        thresh = zero_threshold(ref)
    out = np.empty((m, D))
    chunk = max(1, int(4_000_000 / max(1, n * D)))
    for start in range(0, m, chunk):
        block = queries[start : start + chunk]
        diff = block[:, None, :] - data[None, :, :]  # (mb, n, D)
        r = np.sqrt(np.einsum("bnd,d,bnd->bn", diff, weights, diff))
        keep = r > thresh
        np.divide(1.0, r, out=r, where=keep)
        r[~keep] = 0.0
        out[start : start + chunk] = np.einsum("bn,bnd->bd", r, diff) / n
    return out


def empirical_spatial_dist(x: Curve, sample: FunctionalSample) -> SpatialDistValue:
    """Mean spatial sign of x - X_i over the sample.

    Coincident data points contribute zero vectors; the returned norm is
    always in [0, 1].
    """
    if not x.grid.matches(sample.grid):
        raise GridMismatchError("query and sample live on different grids")
    s = _sign_mean(x.values[None, :], sample.values, sample.grid.weights)[0]
    curve = Curve(x.grid, s)
    return SpatialDistValue(curve, min(norm(curve), 1.0))


def empirical_spatial_dist_lp(x: np.ndarray, data: np.ndarray, p: float) -> SpatialDistValue:
    """l_p analogue on plain coefficient vectors: mean of sgn_lp(x - row)."""
    v = np.asarray(x, dtype=float)
    rows = np.atleast_2d(np.asarray(data, dtype=float))
    total = np.zeros_like(v)
    for row in rows:
        total += sgn_lp(v - row, p)
    rep = total / rows.shape[0]
    q = p / (p - 1.0)
    return SpatialDistValue(rep, min(float(np.linalg.norm(rep, ord=q)), 1.0))


@dataclass(frozen=True)
class MonotonicityReport:
    """Per-pair values of <S_x - S_y, x - y> and the violation count."""

    values: np.ndarray
    degenerate: np.ndarray  # True where x = y (value pinned to 0)
    violations: int

    @property
    def n_pairs(self) -> int:
        return self.values.size


def monotonicity_probe(
    sample: FunctionalSample, pairs: list[tuple[Curve, Curve]]
) -> MonotonicityReport:
    """Check the monotonicity of the empirical spatial distribution.

    For each pair (x, y) computes <S_x - S_y, x - y> under the grid inner
    product. For distinct points of a nonatomic law this is positive in
    population; a nonpositive value for a distinct pair counts as a
    violation. Pairs with x = y are flagged degenerate and not counted.
    """
    w = sample.grid.weights
    xs = np.array([p[0].values for p in pairs])
    ys = np.array([p[1].values for p in pairs])
    sx = _sign_mean(xs, sample.values, w)
    sy = _sign_mean(ys, sample.values, w)
    dxy = xs - ys
    values = np.sum((sx - sy) * dxy * w, axis=1)
    scale = np.sqrt(np.sum(dxy * dxy * w, axis=1))
    degenerate = scale <= zero_threshold(0.0)
    values = np.where(degenerate, 0.0, values)
    violations = int(np.sum((values <= 0.0) & ~degenerate))
    return MonotonicityReport(values, degenerate, violations)
