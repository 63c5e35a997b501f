"""Gaussian and elliptical t process simulation via Karhunen-Loeve expansions.

A process is described by a covariance kernel plus a coefficient law. Paths
are built as

    X(t) = m(t) + sum_k lambda_k Y_k phi_k(t)

where (lambda_k^2, phi_k) are eigenpairs of the covariance operator. For the
Brownian kernel on [0, 1] the eigenpairs are closed form; for every other
kernel they come from the weighted kernel matrix on the grid. Gaussian
coefficients are iid N(0, 1); the student-t law divides all coefficients of
a path by one shared sqrt(W/r) with W ~ chi-square(r), which keeps the
process elliptical rather than making coordinates independently heavy-tailed.

Randomness uses the counter-based Philox generator with SeedSequence-spawned
substreams, one per fixed-size chunk of paths, so results are reproducible
bit for bit for a given seed and independent of how many paths are requested
beyond the chunk in question.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPSDError
from .funcspace import Basis, Curve, FunctionalSample, Grid

GENERATOR_NAME = "numpy.random.Philox"

# Fixed chunk of paths per RNG substream. Changing this changes the stream
# layout, so it is a module constant rather than a call argument.
CHUNK = 4096

BROWNIAN = "brownian"
FRACTIONAL_BROWNIAN = "fractional-brownian"
MIN_KERNEL = "min"
GAUSSIAN_KERNEL = "gaussian"
CUSTOM_KERNEL = "custom"

GAUSSIAN_LAW = "gaussian"
STUDENT_T_LAW = "student-t"


@dataclass(frozen=True)
class KernelSpec:
    """Covariance kernel description.

    kind is one of "brownian", "fractional-brownian", "min", "gaussian",
    "custom". "brownian" and "min" share the kernel min(t, s); the former
    additionally promises the closed-form eigenpairs on [0, 1], which
    sample_process exploits. hurst is only meaningful for
    "fractional-brownian"; matrix only for "custom".
    """

    kind: str
    hurst: float | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (
            BROWNIAN,
            FRACTIONAL_BROWNIAN,
            MIN_KERNEL,
            GAUSSIAN_KERNEL,
            CUSTOM_KERNEL,
        ):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == FRACTIONAL_BROWNIAN:
            if self.hurst is None or not (0.0 < self.hurst < 1.0):
                raise ValueError("fractional-brownian needs hurst in (0, 1)")
        if self.kind == CUSTOM_KERNEL:
            if self.matrix is None:
                raise ValueError("custom kernel needs a matrix")
            m = np.array(self.matrix, dtype=float, copy=True)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError("custom kernel matrix must be square")
            scale = max(1.0, float(np.max(np.abs(m))))
            if np.max(np.abs(m - m.T)) > 1e-8 * scale:
                raise NotPSDError("custom kernel matrix is not symmetric")
            m = 0.5 * (m + m.T)
            if np.min(np.linalg.eigvalsh(m)) < -1e-8 * scale:
                raise NotPSDError("custom kernel matrix is not positive semidefinite")
            m.flags.writeable = False
            object.__setattr__(self, "matrix", m)

    @staticmethod
    def brownian() -> "KernelSpec":
        return KernelSpec(BROWNIAN)

    @staticmethod
    def fractional_brownian(hurst: float) -> "KernelSpec":
        return KernelSpec(FRACTIONAL_BROWNIAN, hurst=hurst)

    @staticmethod
    def min_kernel() -> "KernelSpec":
        return KernelSpec(MIN_KERNEL)

    @staticmethod
    def gaussian_kernel() -> "KernelSpec":
        return KernelSpec(GAUSSIAN_KERNEL)

    @staticmethod
    def custom(matrix) -> "KernelSpec":
        return KernelSpec(CUSTOM_KERNEL, matrix=np.asarray(matrix, dtype=float))

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Kernel matrix K(t_i, t_j) on the given points."""
        t = np.asarray(points, dtype=float)
        if self.kind in (BROWNIAN, MIN_KERNEL):
            return np.minimum.outer(t, t)
        if self.kind == FRACTIONAL_BROWNIAN:
            h2 = 2.0 * self.hurst
            tt = np.abs(t) ** h2
            return 0.5 * (tt[:, None] + tt[None, :] - np.abs(t[:, None] - t[None, :]) ** h2)
        if self.kind == GAUSSIAN_KERNEL:
            return np.exp(-((t[:, None] - t[None, :]) ** 2))
        if self.matrix.shape[0] != t.size:
            raise ValueError(
                f"custom kernel matrix is {self.matrix.shape[0]} x "
                f"{self.matrix.shape[0]} but the grid has {t.size} points"
            )
        return np.array(self.matrix)

    def diagonal(self, points: np.ndarray) -> np.ndarray:
        """K(t, t) without building the full matrix."""
        t = np.asarray(points, dtype=float)
        if self.kind in (BROWNIAN, MIN_KERNEL):
            return t.copy()
        if self.kind == FRACTIONAL_BROWNIAN:
            return np.abs(t) ** (2.0 * self.hurst)
        if self.kind == GAUSSIAN_KERNEL:
            return np.ones_like(t)
        return np.diag(self.evaluate(t)).copy()


@dataclass(frozen=True)
class ProcessSpec:
    """Kernel plus coefficient law plus optional mean and truncation.

    truncation=None means: 100 terms for the closed-form Brownian expansion,
    otherwise all grid eigenpairs. df is required (and must be >= 3) for the
    student-t law so that second moments exist.
    """

    kernel: KernelSpec
    coefficient_law: str = GAUSSIAN_LAW
    df: int | None = None
    mean: Curve | None = None
    truncation: int | None = None

    def __post_init__(self):
        if self.coefficient_law not in (GAUSSIAN_LAW, STUDENT_T_LAW):
            raise ValueError(f"unknown coefficient law {self.coefficient_law!r}")
        if self.coefficient_law == STUDENT_T_LAW:
            if self.df is None or self.df < 3:
                raise ValueError("student-t law needs df >= 3")
        if self.truncation is not None and self.truncation < 1:
            raise ValueError("truncation must be >= 1")

    def coefficient_variance(self) -> float:
        """Var(Y_k): 1 for gaussian, r / (r - 2) for student-t(r)."""
        if self.coefficient_law == GAUSSIAN_LAW:
            return 1.0
        return self.df / (self.df - 2.0)


def bm_eigenpair(k: int, grid: Grid) -> tuple[float, Curve]:
    """Closed-form Brownian eigenpair number k on [0, 1].

    Returns (lambda_k, phi_k) with lambda_k = 1 / ((k - 1/2) pi) and
    phi_k(t) = sqrt(2) sin((k - 1/2) pi t); the covariance operator
    eigenvalue is lambda_k squared. The grid must lie inside [0, 1].
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pts = grid.points
    if pts[0] < -1e-12 or pts[-1] > 1.0 + 1e-12:
        raise ValueError("Brownian eigenpairs need a grid inside [0, 1]")
    freq = (k - 0.5) * math.pi
    lam = 1.0 / freq
    phi = math.sqrt(2.0) * np.sin(freq * pts)
    return lam, Curve(grid, phi)


def kernel_eigen(kernel: KernelSpec, grid: Grid, d: int) -> Basis:
    """Top d eigenpairs of the covariance operator discretized on the grid.

    Eigendecomposes B = W^{1/2} K W^{1/2} (symmetric), maps eigenvectors v
    back to functions W^{-1/2} v, and stores the eigenvalues of B, which
    approximate the operator eigenvalues lambda_k^2. Tiny negative
    eigenvalues in [-1e-10, 0) are clipped to zero; anything below that
    raises NotPSDError.
    """
    if d < 1 or d > grid.size:
        raise ValueError(f"d must be in [1, {grid.size}]")
    K = kernel.evaluate(grid.points)
    sw = np.sqrt(grid.weights)
    B = sw[:, None] * K * sw[None, :]
    B = 0.5 * (B + B.T)
    evals, evecs = np.linalg.eigh(B)
    if evals[0] < -1e-10:
        raise NotPSDError(
            f"discretized kernel has eigenvalue {evals[0]:.3e} below -1e-10"
        )
    evals = np.where((evals < 0.0) & (evals >= -1e-10), 0.0, evals)
    order = np.argsort(evals)[::-1][:d]
    functions = (evecs[:, order] / sw[:, None]).T
    return Basis(grid, functions, evals[order])


def _truncation(spec: ProcessSpec, grid: Grid) -> int:
    if spec.truncation is not None:
        return spec.truncation
    return 100 if spec.kernel.kind == BROWNIAN else grid.size


def _kl_system(spec: ProcessSpec, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """KL scales lambda_k (k,) and function values (k, D) for sampling."""
    k = _truncation(spec, grid)
    if spec.kernel.kind == BROWNIAN:
        freqs = (np.arange(1, k + 1) - 0.5) * math.pi
        scales = 1.0 / freqs
        functions = math.sqrt(2.0) * np.sin(freqs[:, None] * grid.points[None, :])
        return scales, functions
    if k > grid.size:
        raise ValueError(
            f"truncation {k} exceeds the {grid.size} eigenpairs available on this grid"
        )
    basis = kernel_eigen(spec.kernel, grid, k)
    return np.sqrt(basis.eigenvalues), np.asarray(basis.functions)


def stream_seed(seed: int, *tags: int) -> int:
    """Integer seed of a named substream of a study seed.

    Entropy is [seed, *tags]; fixed integer tags keep each substream stable
    when unrelated parts of a study add or reorder their own draws.
    """
    entropy = [int(seed), *(int(t) for t in tags)]
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def coefficient_chunks(spec: ProcessSpec, n: int, k: int, seed: int):
    """Yield (m, k) coefficient blocks Y, m <= CHUNK, totalling n rows.

    Each chunk gets its own Philox substream spawned from the seed. Draw
    order inside a chunk is fixed: the normal block first, then (for the
    student-t law) one chi-square variate per path.
    """
    n_chunks = max(1, math.ceil(n / CHUNK))
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    done = 0
    for child in children:
        m = min(CHUNK, n - done)
        rng = np.random.Generator(np.random.Philox(child))
        y = rng.standard_normal((m, k))
        if spec.coefficient_law == STUDENT_T_LAW:
            w = rng.chisquare(spec.df, size=m)
            y /= np.sqrt(w / spec.df)[:, None]
        done += m
        yield y


def sample_process(spec: ProcessSpec, grid: Grid, n: int, seed: int) -> FunctionalSample:
    """n independent paths of the process on the grid.

    Deterministic in (spec, grid, n, seed); the first min(n, CHUNK) paths do
    not change when more are requested.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if spec.mean is not None and not spec.mean.grid.matches(grid):
        raise ValueError("mean curve lives on a different grid")
    scales, functions = _kl_system(spec, grid)
    loadings = scales[:, None] * functions  # (k, D)
    out = np.empty((n, grid.size))
    row = 0
    for y in coefficient_chunks(spec, n, scales.size, seed):
        out[row : row + y.shape[0]] = y @ loadings
        row += y.shape[0]
    if spec.mean is not None:
        out += spec.mean.values[None, :]
    return FunctionalSample(grid, out)
