"""Dense linear-algebra kernel used by every other module.

All routines operate on float64 ``numpy`` arrays, validate their inputs, and
are pure functions: nothing here mutates its arguments or keeps state, so the
whole module is safe to call from concurrent workers.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidDimensions, NonFiniteInput, RankDeficient, ZeroVector

# Relative singular-value cutoff below which a matrix is treated as
# rank-deficient.  Orthogonal factorizations keep roughly twice the digits of
# Gram-based solves, which is why everything below goes through SVD/lstsq.
RANK_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a 2-D float64 array with finite entries."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidDimensions(f"expected a nonempty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("matrix entries must be finite")
    return arr


def as_vector(a) -> np.ndarray:
    """Validate and return ``a`` as a 1-D float64 array with finite entries."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise InvalidDimensions(f"expected a nonempty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInput("vector entries must be finite")
    return arr


def matvec(a, x) -> np.ndarray:
    """Matrix-vector product ``a @ x`` with dimension checking."""
    a = as_matrix(a)
    x = as_vector(x)
    if a.shape[1] != x.shape[0]:
        raise InvalidDimensions(f"cannot multiply {a.shape} by length-{x.shape[0]} vector")
    return a @ x


def least_squares(a, b, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Solve ``min_x ||a x - b||_2`` for a tall full-column-rank matrix.

    Uses an orthogonal factorization (LAPACK lstsq), never the normal
    equations, so the residual is orthogonal to the column space to close to
    machine precision.

    Raises
    ------
    RankDeficient
        If the smallest singular value is at most ``rank_tol`` times the
        largest.
    """
    a = as_matrix(a)
    b = as_vector(b)
    if a.shape[0] != b.shape[0]:
        raise InvalidDimensions(f"matrix has {a.shape[0]} rows but rhs has length {b.shape[0]}")
    if a.shape[0] < a.shape[1]:
        raise InvalidDimensions(f"expected rows >= cols, got shape {a.shape}")
    x, _, _, sv = np.linalg.lstsq(a, b, rcond=None)
    if sv[0] == 0.0 or sv[-1] <= rank_tol * sv[0]:
        raise RankDeficient(f"smallest singular value {sv[-1]:.3e} within {rank_tol:g} of zero")
    return x


def singular_values(a) -> np.ndarray:
    """Singular values of ``a`` in descending order."""
    return np.linalg.svd(as_matrix(a), compute_uv=False)


def orthogonal_projector(a, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthogonal projector onto the column space of ``a``.

    Returns the symmetric idempotent matrix P with ``P @ a == a``.  A matrix
    with zero columns projects onto the trivial subspace (P = 0).
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidDimensions(f"expected a 2-D array, got shape {arr.shape}")
    if arr.shape[1] == 0:
        return np.zeros((arr.shape[0], arr.shape[0]))
    arr = as_matrix(arr)
    u, sv, _ = np.linalg.svd(arr, full_matrices=False)
    if sv[0] == 0.0 or sv[-1] <= rank_tol * sv[0]:
        raise RankDeficient(f"smallest singular value {sv[-1]:.3e} within {rank_tol:g} of zero")
    return u @ u.T


def angle_between(u, v) -> float:
    """Angle in radians between two nonzero vectors, in [0, pi].

    The cosine is clamped to [-1, 1] before ``arccos``: rounding can push it
    a few ulps outside.
    """
    u = as_vector(u)
    v = as_vector(v)
    if u.shape[0] != v.shape[0]:
        raise InvalidDimensions("vectors must have equal length")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("angle is undefined for a zero vector")
    cos = float(np.dot(u, v) / (nu * nv))
    return float(np.arccos(min(1.0, max(-1.0, cos))))
