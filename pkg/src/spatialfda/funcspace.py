"""Discretized function spaces.

Curves are represented by their values on a fixed grid of D points, and the
L2 inner product is approximated by a quadrature rule attached to the grid:

    <a, b> = sum_i w_i a(t_i) b(t_i)

Uniform grids on an interval carry trapezoid weights (summing to b - a);
grids of points drawn from a probability measure carry equal weights 1/D
(summing to 1). Everything downstream (signs, quantiles, depth, efficiency)
is expressed through this weighted geometry, so the grid and its weights
travel together as one object.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, RankDeficiencyError

# Kinds a Grid can advertise. "custom" makes no promise about the weights
# beyond positivity.
UNIFORM_INTERVAL = "uniform-interval"
GAUSSIAN_MEASURE = "gaussian-measure"
CUSTOM = "custom"


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Grid:
    """Evaluation points plus quadrature weights.

    Parameters
    ----------
    points : array of shape (D,)
        Strictly increasing evaluation points, D >= 2.
    weights : array of shape (D,)
        Positive quadrature weights.
    kind : str
        One of "uniform-interval", "gaussian-measure", "custom".
    """

    points: np.ndarray
    weights: np.ndarray
    kind: str = CUSTOM

    def __post_init__(self):
        object.__setattr__(self, "points", _readonly(self.points))
        object.__setattr__(self, "weights", _readonly(self.weights))
        if self.points.ndim != 1 or self.weights.ndim != 1:
            raise ValueError("grid points and weights must be 1-d arrays")
        if self.points.size < 2:
            raise ValueError("degenerate grid: need at least 2 points")
        if self.points.size != self.weights.size:
            raise GridMismatchError(
                f"{self.points.size} points but {self.weights.size} weights"
            )
        if not np.all(np.diff(self.points) > 0):
            raise ValueError("grid points must be strictly increasing")
        if not np.all(self.weights > 0):
            raise ValueError("grid weights must be positive")
        if self.kind not in (UNIFORM_INTERVAL, GAUSSIAN_MEASURE, CUSTOM):
            raise ValueError(f"unknown grid kind {self.kind!r}")

    @property
    def size(self) -> int:
        return self.points.size

    @staticmethod
    def uniform(a: float, b: float, num: int) -> "Grid":
        """Equispaced grid on [a, b] with trapezoid weights (sum = b - a)."""
        if not b > a:
            raise ValueError("need b > a")
        pts = np.linspace(a, b, num)
        h = (b - a) / (num - 1)
        w = np.full(num, h)
        w[0] = w[-1] = h / 2.0
        return Grid(pts, w, UNIFORM_INTERVAL)

    @staticmethod
    def gaussian(num: int, seed: int, mean: float = 0.0, var: float = 0.5) -> "Grid":
        """Grid of points drawn once from N(mean, var), sorted, weights 1/D.

        This realizes quadrature against the Gaussian base measure itself:
        integrals against N(mean, var) become plain averages over the drawn
        points. The draw is deterministic in ``seed``.
        """
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
        pts = np.sort(rng.normal(mean, np.sqrt(var), size=num))
        # A repeated point would break strict monotonicity; nudge would be
        # dishonest, so just redraw extras until distinct (astronomically rare).
        while np.any(np.diff(pts) <= 0):
            pts = np.sort(rng.normal(mean, np.sqrt(var), size=num))
        w = np.full(num, 1.0 / num)
        return Grid(pts, w, GAUSSIAN_MEASURE)

    @staticmethod
    def custom(points, weights) -> "Grid":
        return Grid(np.asarray(points, dtype=float), np.asarray(weights, dtype=float), CUSTOM)

    def matches(self, other: "Grid") -> bool:
        return (
            self.points.size == other.points.size
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights)
        )


def _check_same_grid(a, b):
    if not a.grid.matches(b.grid):
        raise GridMismatchError("objects live on different grids")


@dataclass(frozen=True)
class Curve:
    """One function sampled on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        if self.values.shape != (self.grid.size,):
            raise GridMismatchError(
                f"curve has {self.values.shape} values on a grid of size {self.grid.size}"
            )

    def __add__(self, other: "Curve") -> "Curve":
        _check_same_grid(self, other)
        return Curve(self.grid, self.values + other.values)

    def __sub__(self, other: "Curve") -> "Curve":
        _check_same_grid(self, other)
        return Curve(self.grid, self.values - other.values)

    def __mul__(self, c: float) -> "Curve":
        return Curve(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "Curve":
        return Curve(self.grid, -self.values)


@dataclass(frozen=True)
class FunctionalSample:
    """n curves on a shared grid, stored as one (n, D) matrix."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.ndim != 2:
            raise ValueError("sample values must be a 2-d array (n, D)")
        if vals.shape[1] != self.grid.size:
            raise GridMismatchError(
                f"sample has {vals.shape[1]} columns on a grid of size {self.grid.size}"
            )
        if vals.shape[0] < 1:
            raise ValueError("empty sample")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.shape[0]

    def curve(self, i: int) -> Curve:
        return Curve(self.grid, self.values[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self.curve(i)


@dataclass(frozen=True)
class Basis:
    """d orthonormal functions on a grid, optionally with eigenvalues.

    Orthonormality is with respect to the grid's weighted inner product and
    is validated at construction: the Gram matrix must match the identity
    within ``tol`` (default 1e-8).
    """

    grid: Grid
    functions: np.ndarray  # (d, D), row k is the k-th basis function
    eigenvalues: np.ndarray | None = None
    tol: float = field(default=1e-8, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "functions", _readonly(self.functions))
        if self.functions.ndim != 2 or self.functions.shape[1] != self.grid.size:
            raise GridMismatchError("basis functions do not match the grid")
        if self.functions.shape[0] > self.grid.size:
            raise RankDeficiencyError(
                f"{self.functions.shape[0]} basis functions on a grid of size "
                f"{self.grid.size}"
            )
        if self.eigenvalues is not None:
            ev = _readonly(self.eigenvalues)
            if ev.shape != (self.functions.shape[0],):
                raise ValueError("one eigenvalue per basis function expected")
            if ev.size and ev[-1] < 0:
                raise ValueError("basis eigenvalues must be nonnegative")
            if np.any(np.diff(ev) > 1e-12 * max(1.0, float(ev[0]))):
                raise ValueError("basis eigenvalues must be nonincreasing")
            object.__setattr__(self, "eigenvalues", ev)
        gram = (self.functions * self.grid.weights) @ self.functions.T
        err = np.max(np.abs(gram - np.eye(self.functions.shape[0])))
        if err > self.tol:
            raise ValueError(
                f"basis is not orthonormal under the grid inner product "
                f"(max Gram deviation {err:.3e} > tol {self.tol:.1e})"
            )

    @property
    def dimension(self) -> int:
        return self.functions.shape[0]

    def truncated(self, d: int) -> "Basis":
        """First d functions as a new Basis."""
        if d < 1 or d > self.dimension:
            raise RankDeficiencyError(f"cannot truncate basis of dimension {self.dimension} to {d}")
        ev = None if self.eigenvalues is None else self.eigenvalues[:d]
        return Basis(self.grid, self.functions[:d], ev, self.tol)


@dataclass(frozen=True)
class Coefficients:
    """Coordinates of a curve in a Basis."""

    values: np.ndarray  # (d,)
    basis: Basis

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        if self.values.shape != (self.basis.dimension,):
            raise ValueError("coefficient length must equal the basis dimension")

    def norm(self) -> float:
        """Euclidean norm; equals the function-space norm of the reconstruction."""
        return float(np.linalg.norm(self.values))


def inner_product(a: Curve, b: Curve) -> float:
    """Weighted inner product <a, b> = sum_i w_i a_i b_i."""
    _check_same_grid(a, b)
    return float(np.sum(a.grid.weights * a.values * b.values))


def norm(a: Curve) -> float:
    """Weighted L2 norm sqrt(<a, a>)."""
    return float(np.sqrt(np.sum(a.grid.weights * a.values * a.values)))


def mean_curve(sample: FunctionalSample) -> Curve:
    """Pointwise sample mean."""
    return Curve(sample.grid, sample.values.mean(axis=0))


def total_variance(sample: FunctionalSample) -> float:
    """Mean squared norm of the centered curves, (1/n) sum ||X_i - Xbar||^2.

    Equals the trace of the sample covariance operator; dividing PCA
    eigenvalues by this gives explained-variance fractions.
    """
    centered = sample.values - sample.values.mean(axis=0)
    return float(np.mean(np.sum(centered * centered * sample.grid.weights, axis=1)))


def project(x: Curve, basis: Basis, d: int | None = None) -> Coefficients:
    """Coordinates of x in the first d basis functions.

    The projection is a contraction: the Euclidean norm of the returned
    coefficients never exceeds ||x|| (Parseval inequality), with equality
    when x lies in the span.
    """
    _check_same_grid(x, basis)
    use = basis if d is None else basis.truncated(d)
    c = (use.functions * use.grid.weights) @ x.values
    return Coefficients(c, use)


def project_sample(sample: FunctionalSample, basis: Basis, d: int | None = None) -> np.ndarray:
    """Coefficient matrix (n, d) of a whole sample. Plumbing for the solvers."""
    _check_same_grid(sample, basis)
    use = basis if d is None else basis.truncated(d)
    return sample.values @ (use.functions * use.grid.weights).T


def reconstruct(c: Coefficients) -> Curve:
    """Curve sum_k c_k phi_k."""
    return Curve(c.basis.grid, c.values @ c.basis.functions)


def pca(sample: FunctionalSample, d: int) -> Basis:
    """Principal components of a sample under the grid inner product.

    Centers the sample, then eigendecomposes the weighted Gram matrix of the
    centered curves (n x n) when n < D, or the weighted covariance (D x D)
    otherwise. Returns a Basis whose rows are the top d eigenfunctions and
    whose ``eigenvalues`` are the corresponding variances (divisor n).

    Raises
    ------
    RankDeficiencyError
        If the centered sample has numerical rank below d (for example all
        curves identical).
    """
    n, D = sample.values.shape
    if d < 1:
        raise ValueError("d must be >= 1")
    if d > min(n - 1, D):
        raise RankDeficiencyError(
            f"requested {d} components from an {n} x {D} sample "
            f"(centered rank is at most min(n - 1, D))"
        )
    sw = np.sqrt(sample.grid.weights)
    A = (sample.values - sample.values.mean(axis=0)) * sw  # whitened, centered
    if n < D:
        G = A @ A.T
        evals, evecs = np.linalg.eigh(G)  # ascending
        evals = evals[::-1][:d]
        evecs = evecs[:, ::-1][:, :d]
        scale = np.sqrt(np.maximum(evals, 0.0))
        rank_tol = max(n, D) * np.finfo(float).eps * max(evals[0], 0.0) if evals.size else 0.0
        if evals[d - 1] <= rank_tol or evals[d - 1] <= 0.0:
            raise RankDeficiencyError(
                f"sample has numerical rank below {d} (degenerate directions)"
            )
        vt = (A.T @ evecs) / scale  # (D, d), orthonormal columns in Euclidean
        variances = evals / n
    else:
        C = (A.T @ A) / n
        evals, evecs = np.linalg.eigh(C)
        evals = evals[::-1][:d]
        evecs = evecs[:, ::-1][:, :d]
        rank_tol = max(n, D) * np.finfo(float).eps * max(evals[0], 0.0) if evals.size else 0.0
        if evals[d - 1] <= rank_tol or evals[d - 1] <= 0.0:
            raise RankDeficiencyError(
                f"sample has numerical rank below {d} (degenerate directions)"
            )
        vt = evecs
        variances = evals
    functions = (vt / sw[:, None]).T  # un-whiten, rows are eigenfunctions
    return Basis(sample.grid, functions, variances)


def orthonormalize(functions: np.ndarray, grid: Grid, eigenvalues=None) -> Basis:
    """Build a Basis from nearly-orthonormal rows by QR under the grid metric.

    Useful for closed-form eigenfunctions whose grid quadrature is only
    O(1/D) accurate: the analytic values stay close, but the Gram matrix is
    corrected to the identity so the Basis invariant holds exactly.
    """
    sw = np.sqrt(grid.weights)
    q, r = np.linalg.qr((functions * sw).T)  # columns span the same space
    # Fix signs so each output row correlates positively with its input row.
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    q = q * signs
    return Basis(grid, (q / sw[:, None]).T, eigenvalues)
