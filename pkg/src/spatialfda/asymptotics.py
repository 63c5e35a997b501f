"""Monte Carlo studies of convergence rates for spatial statistics.

Three harnesses, all built on the same pattern: a large reference sample
stands in for the population, fresh samples of increasing size n are scored
against it over replications, and a least-squares line through the log-log
medians estimates the rate exponent.

  * gc_rate_study: worst-case error of the empirical spatial distribution
    over a finite probe set (a stand-in for a compact set of query points);
    the expected slope is -1/2.
  * integrated_error_study: squared error integrated against the process
    law itself, approximated by averaging over fresh probe draws; the
    expected slope is -1.
  * bahadur_rate_study: norm of the quantile linearization remainder
    (estimate minus reference quantile plus inverse-Hessian-corrected mean
    score) against the norm of the linear term itself; the remainder decays
    strictly faster than n^{-1/2}, the linear term at n^{-1/2}.

Replications run on the shared thread pool; every (sample size, replicate)
pair has its own tagged substream of the study seed, so reports are
reproducible bit for bit at any thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import parallel
from .funcspace import Curve, FunctionalSample, Grid, pca, project_sample
from .quantile import (
    DirectionU,
    _coincidence_threshold,
    _hessian_raw,
    _solve_coeffs,
    _stable_inverse,
)
from .simulate import ProcessSpec, sample_process, stream_seed
from .spatialdist import SpatialDistValue, _sign_mean, empirical_spatial_dist

DEFAULT_N_REF = 100_000
DEFAULT_INT_PROBES = 200

# Substream tags within a study seed.
_TAG_REF = 0
_TAG_PROBES = 1
_TAG_DATA = 2


@dataclass(frozen=True)
class ReferenceSpatialDist:
    """Large-sample stand-in for the population spatial distribution.

    mc_error is the norm-level standard error sqrt((1 - ||S||^2) / n_ref)
    of the vector average, using that each summand is a unit (or zero)
    vector.
    """

    value: SpatialDistValue
    mc_error: float
    n_ref: int


def reference_spatial_dist(
    spec: ProcessSpec, x: Curve, n_ref: int = DEFAULT_N_REF, seed: int = 0
) -> ReferenceSpatialDist:
    """Spatial distribution at x under the spec, from n_ref simulated paths."""
    data = sample_process(spec, x.grid, n_ref, stream_seed(seed, _TAG_REF))
    val = empirical_spatial_dist(x, data)
    err = math.sqrt(max(0.0, 1.0 - val.norm**2) / n_ref)
    return ReferenceSpatialDist(val, err, n_ref)


@dataclass(frozen=True)
class RateReport:
    """Medians and fitted log-log slopes of one rate study.

    Only the fields of the study that produced the report are set; the
    others stay None. notes records study-specific context (probe counts,
    working dimension, the finite-probe caveat).
    """

    study: str
    n_values: tuple[int, ...]
    replications: int
    seed: int
    sup_errors: tuple[float, ...] | None = None
    integrated_errors: tuple[float, ...] | None = None
    residual_errors: tuple[float, ...] | None = None
    linear_errors: tuple[float, ...] | None = None
    fitted_slope_sup: float | None = None
    fitted_slope_int: float | None = None
    fitted_slope_residual: float | None = None
    fitted_slope_linear: float | None = None
    n_ref: int | None = None
    notes: str = ""

    def __post_init__(self):
        if len(self.n_values) < 2:
            raise ValueError("need at least two sample sizes to fit a slope")
        if list(self.n_values) != sorted(set(self.n_values)):
            raise ValueError("n_values must be strictly increasing")
        for name in ("sup_errors", "integrated_errors", "residual_errors", "linear_errors"):
            vals = getattr(self, name)
            if vals is None:
                continue
            if len(vals) != len(self.n_values):
                raise ValueError(f"{name} must have one entry per sample size")
            if any(v < 0.0 for v in vals):
                raise ValueError(f"{name} must be nonnegative")


def _fit_slope(n_values, medians) -> float:
    return float(np.polyfit(np.log(np.asarray(n_values, dtype=float)), np.log(medians), 1)[0])


def _median_matrix(job_errors, n_count: int, reps: int) -> np.ndarray:
    """(n_count * reps) job results in n-major order -> per-n medians."""
    arr = np.asarray(job_errors, dtype=float).reshape(n_count, reps)
    return np.median(arr, axis=1)


def gc_rate_study(
    spec: ProcessSpec,
    K: FunctionalSample,
    n_values,
    reps: int,
    seed: int,
    n_ref: int = DEFAULT_N_REF,
) -> RateReport:
    """Worst-case spatial-distribution error over the probe set K.

    For each replicate and sample size n, draws n fresh paths, evaluates
    the empirical spatial distribution at every probe and records the
    largest norm distance to the reference values. Medians over replicates
    feed the slope fit; the expected exponent is -1/2.
    """
    n_values = [int(n) for n in n_values]
    grid = K.grid
    w = grid.weights
    ref_data = sample_process(spec, grid, n_ref, stream_seed(seed, _TAG_REF))
    s_ref = _sign_mean(K.values, ref_data.values, w)

    def one(job):
        i_n, rep = job
        n = n_values[i_n]
        data = sample_process(spec, grid, n, stream_seed(seed, _TAG_DATA, i_n, rep))
        s_hat = _sign_mean(K.values, data.values, w)
        diff = s_hat - s_ref
        norms = np.sqrt(np.sum(w * diff * diff, axis=1))
        return float(norms.max())

    jobs = [(i, r) for i in range(len(n_values)) for r in range(reps)]
    errors = parallel.run_indexed(one, jobs)
    med = _median_matrix(errors, len(n_values), reps)
    return RateReport(
        study="gc",
        n_values=tuple(n_values),
        replications=reps,
        seed=int(seed),
        sup_errors=tuple(float(v) for v in med),
        fitted_slope_sup=_fit_slope(n_values, med),
        n_ref=n_ref,
        notes=f"max over {len(K)} probe curves stands in for a compact-set sup; "
        f"the finite-max vs true-sup gap is not estimated",
    )


def integrated_error_study(
    spec: ProcessSpec,
    grid: Grid,
    n_values,
    reps: int,
    seed: int,
    n_probes: int = DEFAULT_INT_PROBES,
    n_ref: int = DEFAULT_N_REF,
) -> RateReport:
    """Squared spatial-distribution error averaged over draws from the law.

    The integral of ||S_hat - S||^2 against the process law is approximated
    by an average over n_probes fresh probe paths, fixed across replicates.
    The expected log-log slope is -1.
    """
    n_values = [int(n) for n in n_values]
    w = grid.weights
    probes = sample_process(spec, grid, n_probes, stream_seed(seed, _TAG_PROBES))
    ref_data = sample_process(spec, grid, n_ref, stream_seed(seed, _TAG_REF))
    s_ref = _sign_mean(probes.values, ref_data.values, w)

    def one(job):
        i_n, rep = job
        n = n_values[i_n]
        data = sample_process(spec, grid, n, stream_seed(seed, _TAG_DATA, i_n, rep))
        s_hat = _sign_mean(probes.values, data.values, w)
        diff = s_hat - s_ref
        return float(np.mean(np.sum(w * diff * diff, axis=1)))

    jobs = [(i, r) for i in range(len(n_values)) for r in range(reps)]
    errors = parallel.run_indexed(one, jobs)
    med = _median_matrix(errors, len(n_values), reps)
    return RateReport(
        study="integrated",
        n_values=tuple(n_values),
        replications=reps,
        seed=int(seed),
        integrated_errors=tuple(float(v) for v in med),
        fitted_slope_int=_fit_slope(n_values, med),
        n_ref=n_ref,
        notes=f"integral against the process law approximated by {n_probes} fixed probe draws",
    )


def bahadur_rate_study(
    spec: ProcessSpec,
    grid: Grid,
    n_values,
    reps: int,
    seed: int,
    u: DirectionU | None = None,
    d: int | None = None,
    n_ref: int = DEFAULT_N_REF,
) -> RateReport:
    """Decay of the quantile linearization remainder versus its linear term.

    A reference sample of n_ref paths fixes the working basis (its PCA),
    the reference quantile and the inverse Hessian once. Each (n, replicate)
    job then solves the sample quantile in that basis and splits the
    estimation error into the linear score term and the remainder; the two
    norms are tracked on the same draws so their slopes are comparable.
    The remainder slope should sit strictly below -1/2, the linear term
    close to -1/2.
    """
    n_values = [int(n) for n in n_values]
    if d is None:
        d = max(1, math.isqrt(max(n_values)))
    ref_data = sample_process(spec, grid, n_ref, stream_seed(seed, _TAG_REF))
    basis = pca(ref_data, d)
    if u is None:
        u = DirectionU.zero(d)
    elif u.dimension != d:
        raise ValueError(f"direction has dimension {u.dimension}, expected {d}")
    b = u.coefficients

    C_ref = project_sample(ref_data, basis)
    ref_sol = _solve_coeffs(C_ref, b)
    q_ref = ref_sol.q
    cmax_ref = float(np.linalg.norm(C_ref, axis=1).max())
    diff_ref = q_ref - C_ref
    r_ref = np.linalg.norm(diff_ref, axis=1)
    keep = r_ref > _coincidence_threshold(q_ref, cmax_ref)
    inv_r = np.zeros_like(r_ref)
    np.divide(1.0, r_ref, out=inv_r, where=keep)
    J = _hessian_raw(inv_r, diff_ref, C_ref.shape[0], d)
    J_inv = _stable_inverse(J, "reference Hessian")

    def one(job):
        i_n, rep = job
        n = n_values[i_n]
        data = sample_process(spec, grid, n, stream_seed(seed, _TAG_DATA, i_n, rep))
        C = project_sample(data, basis)
        sol = _solve_coeffs(C, b)
        diff = q_ref - C
        r = np.linalg.norm(diff, axis=1)
        keep_s = r > _coincidence_threshold(q_ref, float(np.linalg.norm(C, axis=1).max()))
        inv_rs = np.zeros_like(r)
        np.divide(1.0, r, out=inv_rs, where=keep_s)
        scores = diff * inv_rs[:, None] - b[None, :]
        linear = J_inv @ scores.mean(axis=0)
        residual = (sol.q - q_ref) + linear
        return float(np.linalg.norm(residual)), float(np.linalg.norm(linear))

    jobs = [(i, r) for i in range(len(n_values)) for r in range(reps)]
    results = parallel.run_indexed(one, jobs)
    res_med = _median_matrix([a for a, _ in results], len(n_values), reps)
    lin_med = _median_matrix([b_ for _, b_ in results], len(n_values), reps)
    return RateReport(
        study="bahadur",
        n_values=tuple(n_values),
        replications=reps,
        seed=int(seed),
        residual_errors=tuple(float(v) for v in res_med),
        linear_errors=tuple(float(v) for v in lin_med),
        fitted_slope_residual=_fit_slope(n_values, res_med),
        fitted_slope_linear=_fit_slope(n_values, lin_med),
        n_ref=n_ref,
        notes=f"working dimension {d} fixed across sample sizes; basis, reference "
        f"quantile and Hessian from the reference sample",
    )
