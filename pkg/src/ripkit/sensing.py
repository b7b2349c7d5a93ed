"""Domain types and seeded generators for sensing matrices, sparse signals,
noise, and measurements.

Every generator is a pure function of its parameters and a 64-bit seed
(``numpy.random.default_rng``), so any run is reproducible from the seed
alone and independent trials may execute concurrently.  Indices are 0-based
throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from .errors import InvalidDimensions, InvalidSupport, NonFiniteInput
from .numerics import as_matrix, as_vector

COLUMN_NORM_TOL = 1e-12

# 17 significant digits round-trip float64 exactly.
_CSV_FMT = "%.17g"


@dataclass(frozen=True)
class SupportSet:
    """A strictly increasing set of indices into a length-``n`` vector."""

    n: int
    indices: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidSupport(f"ambient dimension must be positive, got {self.n}")
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(i < 0 or i >= self.n for i in idx):
            raise InvalidSupport(f"indices out of range [0, {self.n})")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise InvalidSupport("indices must be strictly increasing")

    @classmethod
    def from_iterable(cls, n: int, indices: Iterable[int]) -> "SupportSet":
        return cls(n, tuple(sorted(int(i) for i in indices)))

    @property
    def size(self) -> int:
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.array(self.indices, dtype=np.intp)

    def union(self, other: "SupportSet") -> "SupportSet":
        if other.n != self.n:
            raise InvalidSupport("ambient dimensions differ")
        return SupportSet.from_iterable(self.n, set(self.indices) | set(other.indices))

    def difference(self, other: "SupportSet") -> "SupportSet":
        if other.n != self.n:
            raise InvalidSupport("ambient dimensions differ")
        return SupportSet.from_iterable(self.n, set(self.indices) - set(other.indices))

    def intersects(self, other: "SupportSet") -> bool:
        return bool(set(self.indices) & set(other.indices))

    def complement(self) -> "SupportSet":
        return SupportSet.from_iterable(self.n, set(range(self.n)) - set(self.indices))

    def __contains__(self, i: int) -> bool:
        return i in set(self.indices)

    def __iter__(self):
        return iter(self.indices)


@dataclass(frozen=True, eq=False)
class SparseSignal:
    """A length-``n`` vector stored as (support, nonzero values)."""

    n: int
    support: SupportSet
    values: np.ndarray

    def __post_init__(self):
        if self.support.n != self.n:
            raise InvalidSupport("support ambient dimension does not match signal length")
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.shape[0] != self.support.size:
            raise InvalidDimensions("one value per support index required")
        if not np.all(np.isfinite(vals)):
            raise NonFiniteInput("signal values must be finite")
        if np.any(vals == 0.0):
            raise InvalidSupport("stored values must be nonzero")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_dense(cls, vec) -> "SparseSignal":
        """Build a signal from a dense vector, keeping its exact nonzeros."""
        vec = as_vector(vec)
        idx = np.flatnonzero(vec != 0.0)
        support = SupportSet(vec.shape[0], tuple(int(i) for i in idx))
        return cls(vec.shape[0], support, vec[idx])

    @property
    def sparsity(self) -> int:
        return self.support.size

    def dense(self) -> np.ndarray:
        """Zero-padded embedding into length ``n``."""
        out = np.zeros(self.n)
        out[self.support.as_array()] = self.values
        return out

    def min_magnitude(self) -> float:
        return float(np.min(np.abs(self.values))) if self.support.size else 0.0


@dataclass(frozen=True, eq=False)
class SensingMatrix:
    """An m x n measurement operator with unit-norm columns."""

    m: int
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = as_matrix(self.matrix)
        if mat.shape != (self.m, self.n):
            raise InvalidDimensions(f"matrix shape {mat.shape} does not match ({self.m}, {self.n})")
        norms = np.linalg.norm(mat, axis=0)
        if np.any(np.abs(norms - 1.0) > COLUMN_NORM_TOL):
            raise InvalidDimensions("columns must have unit norm; use from_columns() to normalize")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def from_columns(cls, arr) -> "SensingMatrix":
        """Normalize the columns of ``arr`` and wrap the result."""
        arr = as_matrix(arr)
        norms = np.linalg.norm(arr, axis=0)
        if np.any(norms == 0.0):
            raise InvalidDimensions("cannot normalize a zero column")
        return cls(arr.shape[0], arr.shape[1], arr / norms)

    def column(self, i: int) -> np.ndarray:
        return self.matrix[:, i].copy()

    def gram(self) -> np.ndarray:
        return self.matrix.T @ self.matrix


@dataclass(frozen=True)
class L2Ball:
    """Noise bounded in Euclidean norm: ||w||_2 <= radius."""

    radius: float

    def __post_init__(self):
        if not (self.radius >= 0.0 and np.isfinite(self.radius)):
            raise InvalidDimensions("noise radius must be a finite nonnegative real")


@dataclass(frozen=True)
class LinfCorrelation:
    """Noise bounded in correlation sup-norm: ||Phi^T w||_inf <= level."""

    level: float

    def __post_init__(self):
        if not (self.level >= 0.0 and np.isfinite(self.level)):
            raise InvalidDimensions("noise level must be a finite nonnegative real")


NoiseSpec = Union[None, L2Ball, LinfCorrelation]


@dataclass(frozen=True, eq=False)
class Measurement:
    """A measurement vector together with the noise that produced it."""

    y: np.ndarray
    noise: Optional[np.ndarray] = None
    noise_model: NoiseSpec = None

    def __post_init__(self):
        object.__setattr__(self, "y", as_vector(self.y))
        if self.noise is not None:
            w = as_vector(self.noise)
            if w.shape != self.y.shape:
                raise InvalidDimensions("noise and measurement lengths differ")
            object.__setattr__(self, "noise", w)


@dataclass(frozen=True)
class GeneratorConfig:
    """Seeded problem-instance description used by the experiment sweeps."""

    seed: int
    m: int
    n: int
    k: int
    value_distribution: str = "gaussian"
    min_magnitude: Optional[float] = None

    def __post_init__(self):
        if not (1 <= self.k <= self.m <= self.n):
            raise InvalidDimensions(f"need 1 <= k <= m <= n, got k={self.k} m={self.m} n={self.n}")


def generate_gaussian_matrix(m: int, n: int, seed: int) -> SensingMatrix:
    """i.i.d. standard-normal matrix with columns scaled to unit norm."""
    if not (1 <= m <= n):
        raise InvalidDimensions(f"need 1 <= m <= n, got m={m} n={n}")
    rng = np.random.default_rng(seed)
    return SensingMatrix.from_columns(rng.standard_normal((m, n)))


def generate_near_orthonormal_matrix(m: int, n: int, seed: int, spread: float = 0.0) -> SensingMatrix:
    """Column-normalized random tight frame plus an optional Gaussian perturbation.

    A Gaussian draw is row-whitened into a random partial isometry (for
    ``m == n`` this is exactly a random orthogonal matrix), then perturbed by
    ``spread``-scaled i.i.d. noise and column-normalized.  Small isometry
    constants are only reachable in this near-orthonormal regime; ``spread``
    moves them toward the generic Gaussian ensemble.
    """
    if not (1 <= m <= n):
        raise InvalidDimensions(f"need 1 <= m <= n, got m={m} n={n}")
    if spread < 0.0:
        raise InvalidDimensions("spread must be nonnegative")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, n))
    u, _, vt = np.linalg.svd(a, full_matrices=False)
    w = u @ vt
    if spread > 0.0:
        w = w + spread * rng.standard_normal((m, n)) / np.sqrt(m)
    return SensingMatrix.from_columns(w)


def generate_sparse_signal(
    n: int,
    k: int,
    seed: int,
    distribution: str = "gaussian",
    min_magnitude: Optional[float] = None,
) -> SparseSignal:
    """Draw a k-sparse signal with a uniformly random support.

    ``distribution`` is one of ``gaussian``, ``rademacher``, or
    ``uniform_min_magnitude``; the latter draws magnitudes uniformly from
    [min_magnitude, 2 * min_magnitude] with random signs, so every entry
    satisfies ``|x_i| >= min_magnitude``.  Zero draws are rejected and
    redrawn, since stored values must be nonzero.
    """
    if not (1 <= k <= n):
        raise InvalidDimensions(f"need 1 <= k <= n, got k={k} n={n}")
    rng = np.random.default_rng(seed)
    support = SupportSet.from_iterable(n, rng.choice(n, size=k, replace=False))
    if distribution == "gaussian":
        vals = rng.standard_normal(k)
        while np.any(vals == 0.0):
            vals[vals == 0.0] = rng.standard_normal(int(np.sum(vals == 0.0)))
    elif distribution == "rademacher":
        vals = rng.choice([-1.0, 1.0], size=k)
    elif distribution == "uniform_min_magnitude":
        if min_magnitude is None or min_magnitude <= 0.0:
            raise InvalidDimensions("uniform_min_magnitude requires a positive min_magnitude")
        vals = rng.uniform(min_magnitude, 2.0 * min_magnitude, size=k)
        vals *= rng.choice([-1.0, 1.0], size=k)
    else:
        raise InvalidDimensions(f"unknown value distribution {distribution!r}")
    return SparseSignal(n, support, vals)


def measure(
    phi: SensingMatrix,
    x: SparseSignal,
    noise: NoiseSpec = None,
    seed: int = 0,
) -> Measurement:
    """Measure ``y = Phi x + w`` under the requested noise model.

    ``L2Ball(eps)`` draws a Gaussian direction scaled to norm ``rho * eps``;
    ``LinfCorrelation(eps)`` draws Gaussian noise rescaled so that
    ``||Phi^T w||_inf == rho * eps``; in both cases ``rho`` is uniform on
    (0, 1], so the stated bound always holds.
    """
    if phi.n != x.n:
        raise InvalidDimensions(f"matrix has {phi.n} columns but signal has length {x.n}")
    clean = phi.matrix @ x.dense()
    if noise is None:
        return Measurement(clean, None, None)
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(phi.m)
    rho = 1.0 - rng.random()  # uniform on (0, 1]
    if isinstance(noise, L2Ball):
        nw = np.linalg.norm(w)
        w = w / nw * (rho * noise.radius) if nw > 0.0 else np.zeros(phi.m)
    elif isinstance(noise, LinfCorrelation):
        peak = np.max(np.abs(phi.matrix.T @ w))
        w = w / peak * (rho * noise.level) if peak > 0.0 else np.zeros(phi.m)
    else:
        raise InvalidDimensions(f"unknown noise specification {noise!r}")
    return Measurement(clean + w, w, noise)


def submatrix(phi: SensingMatrix, support: SupportSet) -> np.ndarray:
    """Columns of ``phi`` selected by ``support``, in index order."""
    if support.n != phi.n:
        raise InvalidSupport(f"support is over {support.n} columns but matrix has {phi.n}")
    return phi.matrix[:, support.as_array()].copy()


def restrict(vec, support: SupportSet) -> np.ndarray:
    """Entries of a dense vector at the support indices."""
    vec = as_vector(vec)
    if vec.shape[0] != support.n:
        raise InvalidSupport("vector length does not match support ambient dimension")
    return vec[support.as_array()]


def embed(values, support: SupportSet) -> np.ndarray:
    """Zero-padded embedding of per-support values into the ambient space."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (support.size,):
        raise InvalidSupport("one value per support index required")
    out = np.zeros(support.n)
    out[support.as_array()] = values
    return out


def matrix_to_csv(arr, path) -> None:
    """Write a matrix as plain-text CSV, one row per matrix row."""
    arr = np.atleast_2d(np.asarray(arr, dtype=np.float64))
    np.savetxt(path, arr, fmt=_CSV_FMT, delimiter=",")


def matrix_from_csv(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64))


def signal_to_csv(x: SparseSignal, path) -> None:
    """Write the dense embedding of a signal as a single CSV row."""
    matrix_to_csv(x.dense().reshape(1, -1), path)


def signal_from_csv(path) -> SparseSignal:
    arr = matrix_from_csv(path)
    if arr.shape[0] != 1:
        raise InvalidDimensions("expected a single-row CSV for a signal")
    return SparseSignal.from_dense(arr[0])
