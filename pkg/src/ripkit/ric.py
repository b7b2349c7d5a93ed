"""Exact and Monte Carlo restricted-isometry-constant computation, the catalog
of recovery-guarantee bounds, near-orthogonality angle bounds, and the
condition-number/minimum-angle identity.

The exact constant of order k is found by enumerating every size-k column
support and taking the worst two-sided deviation of the squared singular
values from 1.  Enumerating only |S| = k suffices: singular values of column
submatrices interlace those of any superset, so smaller supports are never
binding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Optional

import numpy as np

from .errors import (
    EnumerationTooLarge,
    InvalidDelta,
    InvalidDimensions,
    InvalidSparsity,
    RankDeficient,
    UnknownBound,
    UnsupportedShape,
)
from .numerics import as_matrix, singular_values
from .sensing import SensingMatrix, SupportSet

ENUMERATION_CAP = 2_000_000

# Sparsity bound for the subspace-pursuit guarantee: delta_{3K} <= SP_RIC_BOUND.
SP_RIC_BOUND = 0.2412


@dataclass(frozen=True)
class RicEstimate:
    """An order-k isometry constant with method provenance."""

    order_k: int
    delta: float
    method: str  # "exact_enumeration" | "monte_carlo_lower_bound"
    supports_examined: int

    def __post_init__(self):
        if self.method not in ("exact_enumeration", "monte_carlo_lower_bound"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.delta < 0.0:
            raise ValueError("isometry constant cannot be negative")


@dataclass(frozen=True)
class ConditionAngleReport:
    """Condition number and the matching minimum angle, kappa = cot(theta/2)."""

    kappa: float
    theta: float

    def __post_init__(self):
        if self.kappa < 1.0:
            raise ValueError("condition number is at least 1")
        if not (0.0 < self.theta <= np.pi / 2 + 1e-12):
            raise ValueError("theta must lie in (0, pi/2]")
        if abs(1.0 / np.tan(self.theta / 2.0) - self.kappa) > 1e-10 * max(1.0, self.kappa):
            raise ValueError("kappa and theta violate kappa == cot(theta/2)")


@dataclass(frozen=True)
class GuaranteeCertificate:
    """Outcome of checking an isometry constant against a named bound.

    ``guaranteed`` uses strict inequality except for ``proposed_sp``, whose
    statement is non-strict (delta_3k <= bound).  The ``conjectured`` bound is
    a conjecture, not a theorem; a certificate against it is informational.
    """

    k: int
    delta_k_plus_1: float
    bound_name: str
    bound_value: float
    guaranteed: bool

    def __post_init__(self):
        if self.bound_name == "proposed_sp":
            expect = self.delta_k_plus_1 <= self.bound_value
        else:
            expect = self.delta_k_plus_1 < self.bound_value
        if self.guaranteed != expect:
            raise ValueError("guaranteed flag contradicts the bound comparison")

    @property
    def conjectural(self) -> bool:
        return self.bound_name == "conjectured"


def ric_bound(name: str, k: int) -> float:
    """Sufficient upper bound on delta_{k+1} for exact recovery, by name.

    ``davenport_wakin``: 1/(3 sqrt(k)); ``huang_zhu``: 1/(1 + sqrt(2k));
    ``mo_shen``: 1/(sqrt(k) + 1); ``proposed``: (sqrt(4k+1) - 1)/(2k);
    ``conjectured``: 1/sqrt(k), the believed-sharp threshold.
    """
    if k < 1:
        raise InvalidSparsity(f"sparsity must be at least 1, got {k}")
    rk = float(np.sqrt(k))
    if name == "davenport_wakin":
        return 1.0 / (3.0 * rk)
    if name == "huang_zhu":
        return 1.0 / (1.0 + np.sqrt(2.0 * k))
    if name == "mo_shen":
        return 1.0 / (rk + 1.0)
    if name == "proposed":
        return (np.sqrt(4.0 * k + 1.0) - 1.0) / (2.0 * k)
    if name == "conjectured":
        return 1.0 / rk
    raise UnknownBound(f"unknown bound name {name!r}")


RIC_BOUND_NAMES = ("davenport_wakin", "huang_zhu", "mo_shen", "proposed", "conjectured")


def angle_bound(name: str, delta: float) -> float:
    """Upper bound on |cos angle(Phi u, Phi v)| for orthogonal sparse u, v.

    ``proposed`` is delta itself; ``plane_geometry`` is the older
    delta/sqrt(1 - delta^2); ``algebraic`` is the worst-case
    delta/(1 - delta).
    """
    if not (0.0 < delta < 1.0):
        raise InvalidDelta(f"delta must lie in (0, 1), got {delta}")
    if name == "proposed":
        return float(delta)
    if name == "plane_geometry":
        return float(delta / np.sqrt(1.0 - delta * delta))
    if name == "algebraic":
        return float(delta / (1.0 - delta))
    raise UnknownBound(f"unknown angle bound {name!r}")


@lru_cache(maxsize=8)
def _all_supports(n: int, k: int) -> np.ndarray:
    """All size-k index combinations of range(n), shape (C(n,k), k)."""
    count = comb(n, k)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.int32,
        count=count * k,
    )
    out = flat.reshape(count, k)
    out.setflags(write=False)
    return out


def _sym3_extremes(d1, d2, d3, a, b, c):
    """Smallest and largest eigenvalues of symmetric 3x3 matrices, vectorized.

    Closed-form trigonometric solution of the characteristic cubic; accurate
    to a few ulps, which is far inside the 1e-10 tolerances used downstream.
    """
    q = (d1 + d2 + d3) / 3.0
    k1, k2, k3 = d1 - q, d2 - q, d3 - q
    p = np.sqrt((k1 * k1 + k2 * k2 + k3 * k3 + 2.0 * (a * a + b * b + c * c)) / 6.0)
    safe = np.where(p > 0.0, p, 1.0)
    b11, b22, b33 = k1 / safe, k2 / safe, k3 / safe
    b12, b13, b23 = a / safe, b / safe, c / safe
    det = (
        b11 * (b22 * b33 - b23 * b23)
        - b12 * (b12 * b33 - b23 * b13)
        + b13 * (b12 * b23 - b22 * b13)
    )
    phi = np.arccos(np.clip(det / 2.0, -1.0, 1.0)) / 3.0
    lmax = q + 2.0 * p * np.cos(phi)
    lmin = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    return lmin, lmax


_EIGH_CHUNK = 50_000


def gram_eigenvalue_extremes(gram: np.ndarray, supports: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-support (min, max) eigenvalues of the Gram submatrices.

    ``supports`` is an integer array of shape (count, k).  k in {1, 2, 3} uses
    closed forms; larger orders fall back to batched symmetric eigensolves.
    """
    supports = np.asarray(supports)
    count, k = supports.shape
    if k == 1:
        d = gram[supports[:, 0], supports[:, 0]]
        return d, d
    if k == 2:
        i, j = supports[:, 0], supports[:, 1]
        mid = (gram[i, i] + gram[j, j]) / 2.0
        rad = np.sqrt(((gram[i, i] - gram[j, j]) / 2.0) ** 2 + gram[i, j] ** 2)
        return mid - rad, mid + rad
    if k == 3:
        i, j, l = supports[:, 0], supports[:, 1], supports[:, 2]
        return _sym3_extremes(
            gram[i, i], gram[j, j], gram[l, l], gram[i, j], gram[i, l], gram[j, l]
        )
    lmin = np.empty(count)
    lmax = np.empty(count)
    for start in range(0, count, _EIGH_CHUNK):
        chunk = supports[start : start + _EIGH_CHUNK]
        blocks = gram[chunk[:, :, None], chunk[:, None, :]]
        eig = np.linalg.eigvalsh(blocks)
        lmin[start : start + _EIGH_CHUNK] = eig[:, 0]
        lmax[start : start + _EIGH_CHUNK] = eig[:, -1]
    return lmin, lmax


def _delta_from_extremes(lmin: np.ndarray, lmax: np.ndarray) -> float:
    return float(max(np.max(lmax) - 1.0, 1.0 - np.min(lmin)))


def exact_ric(phi: SensingMatrix, k: int, enumeration_cap: int = ENUMERATION_CAP) -> RicEstimate:
    """Exact order-k isometry constant by exhaustive support enumeration.

    The per-support constant is ``max(sigma_max^2 - 1, 1 - sigma_min^2)`` of
    the selected columns, computed from Gram-submatrix eigenvalues; the result
    is the maximum over all C(n, k) supports.

    Raises
    ------
    EnumerationTooLarge
        If C(n, k) exceeds ``enumeration_cap``; use
        :func:`monte_carlo_ric_lower` instead.
    """
    if not (1 <= k <= phi.m):
        raise InvalidSparsity(f"need 1 <= k <= m={phi.m}, got k={k}")
    total = comb(phi.n, k)
    if total > enumeration_cap:
        raise EnumerationTooLarge(f"C({phi.n}, {k}) = {total} exceeds cap {enumeration_cap}")
    lmin, lmax = gram_eigenvalue_extremes(phi.gram(), _all_supports(phi.n, k))
    return RicEstimate(k, _delta_from_extremes(lmin, lmax), "exact_enumeration", total)


def monte_carlo_ric_lower(phi: SensingMatrix, k: int, trials: int, seed: int) -> RicEstimate:
    """Lower bound on the order-k constant from uniformly sampled supports."""
    if not (1 <= k <= phi.m):
        raise InvalidSparsity(f"need 1 <= k <= m={phi.m}, got k={k}")
    if trials < 1:
        raise InvalidDimensions("at least one trial required")
    rng = np.random.default_rng(seed)
    supports = np.empty((trials, k), dtype=np.int32)
    for t in range(trials):
        supports[t] = np.sort(rng.choice(phi.n, size=k, replace=False))
    lmin, lmax = gram_eigenvalue_extremes(phi.gram(), supports)
    return RicEstimate(k, _delta_from_extremes(lmin, lmax), "monte_carlo_lower_bound", trials)


def support_singular_value_range(phi: SensingMatrix, k: int) -> tuple[float, float]:
    """(min sigma_min, max sigma_max) over all size-k column submatrices.

    Independent SVD-based cross-check of the Gram-eigenvalue enumeration.
    """
    lo, hi = np.inf, 0.0
    for support in itertools.combinations(range(phi.n), k):
        sv = singular_values(phi.matrix[:, list(support)])
        lo = min(lo, float(sv[-1]))
        hi = max(hi, float(sv[0]))
    return lo, hi


def verify_near_orthogonality(phi: SensingMatrix, k: int, trials: int, seed: int) -> float:
    """Maximum observed |cos angle(Phi u, Phi v)| over random orthogonal sparse pairs.

    Pairs are drawn two ways, half each: disjoint supports obtained by
    splitting a random support of size <= k (orthogonal for free), and
    overlapping supports whose second value vector is Gram-orthogonalized
    against the first.  The caller compares the result to the exact order-k
    constant.
    """
    if k < 2:
        raise InvalidSparsity(f"orthogonal sparse pairs need k >= 2, got k={k}")
    if k > phi.n:
        raise InvalidSparsity(f"k={k} exceeds the number of columns {phi.n}")
    if trials < 1:
        raise InvalidDimensions("at least one trial required")
    rng = np.random.default_rng(seed)
    n = phi.n
    half = trials // 2
    worst = 0.0

    def batch_max_cos(u_rows: np.ndarray, v_rows: np.ndarray) -> float:
        img_u = u_rows @ phi.matrix.T
        img_v = v_rows @ phi.matrix.T
        nu = np.linalg.norm(img_u, axis=1)
        nv = np.linalg.norm(img_v, axis=1)
        ok = (nu > 1e-300) & (nv > 1e-300)
        if not np.any(ok):
            return 0.0
        cos = np.abs(np.sum(img_u[ok] * img_v[ok], axis=1)) / (nu[ok] * nv[ok])
        return float(np.max(cos))

    # Disjoint-support pairs: a random size-s support split at a random point.
    if half:
        sizes = rng.integers(2, k + 1, size=half)
        cuts = np.array([rng.integers(1, s) for s in sizes])
        ranks = np.argsort(rng.random((half, n)), axis=1).argsort(axis=1)
        u_mask = ranks < cuts[:, None]
        v_mask = (ranks >= cuts[:, None]) & (ranks < sizes[:, None])
        u_rows = rng.standard_normal((half, n)) * u_mask
        v_rows = rng.standard_normal((half, n)) * v_mask
        worst = max(worst, batch_max_cos(u_rows, v_rows))

    # Overlapping-support pairs: both vectors on one support, orthogonalized.
    count = trials - half
    sizes = rng.integers(2, k + 1, size=count)
    ranks = np.argsort(rng.random((count, n)), axis=1).argsort(axis=1)
    mask = ranks < sizes[:, None]
    u_rows = rng.standard_normal((count, n)) * mask
    v_rows = rng.standard_normal((count, n)) * mask
    coeff = np.sum(u_rows * v_rows, axis=1) / np.sum(u_rows * u_rows, axis=1)
    v_rows = v_rows - coeff[:, None] * u_rows
    keep = np.linalg.norm(v_rows, axis=1) > 1e-12
    if np.any(keep):
        worst = max(worst, batch_max_cos(u_rows[keep], v_rows[keep]))
    return worst


def condition_angle(a) -> ConditionAngleReport:
    """Condition number of a tall full-rank matrix and its minimum achievable
    angle between images of orthogonal vectors, via kappa = cot(theta/2)."""
    a = as_matrix(a)
    if a.shape[0] < a.shape[1]:
        raise InvalidDimensions(f"expected rows >= cols, got shape {a.shape}")
    sv = singular_values(a)
    if sv[0] == 0.0 or sv[-1] <= 1e-10 * sv[0]:
        raise RankDeficient("matrix is numerically rank-deficient")
    kappa = float(sv[0] / sv[-1])
    theta = float(2.0 * np.arctan(1.0 / kappa))
    return ConditionAngleReport(kappa, theta)


def min_angle_grid(a, grid_points: int) -> float:
    """Brute-force minimum angle between images of orthogonal unit vectors.

    Only defined for two-column matrices, where orthogonal pairs are
    parametrized by a single rotation angle; serves as the grid oracle for
    the condition-number/angle identity.
    """
    a = as_matrix(a)
    if a.shape[1] != 2:
        raise UnsupportedShape(f"grid search needs exactly 2 columns, got {a.shape[1]}")
    if grid_points < 8:
        raise InvalidDimensions("grid must have at least 8 points")
    t = np.arange(grid_points) * (np.pi / grid_points)
    c, s = np.cos(t), np.sin(t)
    img_x = a @ np.vstack([c, s])
    img_y = a @ np.vstack([-s, c])
    nx = np.linalg.norm(img_x, axis=0)
    ny = np.linalg.norm(img_y, axis=0)
    cos = np.sum(img_x * img_y, axis=0) / (nx * ny)
    return float(np.min(np.arccos(np.clip(cos, -1.0, 1.0))))


def check_recovery_guarantee(
    phi: SensingMatrix,
    k: int,
    bound_name: str = "proposed",
    enumeration_cap: int = ENUMERATION_CAP,
) -> GuaranteeCertificate:
    """Certify exact k-sparse recovery by comparing the exact order-(k+1)
    constant against a named sufficient bound."""
    estimate = exact_ric(phi, k + 1, enumeration_cap=enumeration_cap)
    bound = ric_bound(bound_name, k)
    return GuaranteeCertificate(k, estimate.delta, bound_name, bound, estimate.delta < bound)
