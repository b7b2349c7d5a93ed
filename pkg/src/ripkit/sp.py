"""Subspace pursuit: a greedy solver that maintains a size-k candidate
support, expands it by the k strongest residual correlations, prunes back to
k by coefficient magnitude, and stops as soon as the residual norm fails to
decrease.  Also provides the analytic constants governing its contraction
and noisy-stability guarantees.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import comb
from typing import Optional

import numpy as np

from .errors import InvalidDelta, InvalidDimensions, InvalidSparsity, RankDeficient
from .numerics import as_vector, least_squares
from .omp import HALT_BUDGET, HALT_CRITERION, HALT_ZERO, SolverResult
from .sensing import SensingMatrix, SparseSignal, SupportSet

# Largest delta_{3K} for which the recovery/stability guarantee holds.
SP_RIC_BOUND = 0.2412


@dataclass(frozen=True)
class SpConfig:
    """Sparsity and stopping limits for a subspace-pursuit solve.

    ``max_iterations`` defaults to min(100, C(n, k) + 1) at solve time; the
    combinatorial term is the theoretical worst case (supports must repeat
    after C(n, k) iterations of strictly decreasing residuals) and is
    astronomically loose, hence the desk-scale default of 100.
    ``rollback_on_stop`` returns the estimate from the iteration before the
    one that failed to decrease the residual, matching the original
    formulation of the algorithm.
    """

    k: int
    max_iterations: Optional[int] = None
    rollback_on_stop: bool = False
    zero_residual_tol: float = 1e-12

    def __post_init__(self):
        if self.k < 1:
            raise InvalidSparsity(f"sparsity must be at least 1, got {self.k}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise InvalidDimensions("max_iterations must be positive")
        if self.zero_residual_tol < 0.0:
            raise InvalidDimensions("zero_residual_tol cannot be negative")


@dataclass(frozen=True, eq=False)
class SpTrace:
    """Instrumented per-iteration history of a subspace-pursuit run.

    ``missed_energy[j]`` is ``||x restricted to T \\ support_j||_2`` when the
    true signal was supplied, and tracks the per-iteration contraction.
    """

    support_per_iteration: tuple[SupportSet, ...]
    expanded_supports: tuple[SupportSet, ...]
    residual_norms: tuple[float, ...]
    missed_energy: tuple[float, ...]


@dataclass(frozen=True)
class SpConstants:
    """Analytic constants of the subspace-pursuit analysis at a given delta.

    ``alpha`` is the per-iteration missed-energy contraction factor, ``beta``
    the matching noise amplification, ``c_k`` the noisy reconstruction-error
    factor (None when sqrt(1-delta) <= sqrt(1+delta) * alpha, where the
    guarantee is inapplicable), and ``c_prime_k`` / ``c_bar_k`` the earlier
    published error factors kept for comparison.
    """

    delta: float
    alpha: float
    beta: float
    c_k: Optional[float]
    c_prime_k: float
    c_bar_k: float

    def __post_init__(self):
        for name in ("alpha", "beta", "c_prime_k", "c_bar_k"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0.0):
                raise ValueError(f"{name} must be finite and positive, got {val}")
        if self.c_k is not None and not (np.isfinite(self.c_k) and self.c_k > 0.0):
            raise ValueError(f"c_k must be finite and positive when defined, got {self.c_k}")


def sp_constants(delta: float) -> SpConstants:
    """Evaluate the contraction/stability constants at ``delta``."""
    if not (0.0 < delta < 1.0):
        raise InvalidDelta(f"delta must lie in (0, 1), got {delta}")
    ratio = delta * delta * (1.0 + delta) / (1.0 - delta)
    alpha = (2.0 * delta / (1.0 - delta)) * np.sqrt(1.0 + ratio) * np.sqrt(1.0 + 4.0 * ratio)
    beta = (2.0 * np.sqrt(1.0 + delta) / (1.0 - delta)) * np.sqrt(1.0 + 4.0 * ratio) + 2.0 / np.sqrt(
        1.0 - delta
    )
    den = np.sqrt(1.0 - delta) - np.sqrt(1.0 + delta) * alpha
    if den > 0.0:
        c_k = (1.0 + delta * np.sqrt(1.0 + delta) / np.sqrt(1.0 - delta)) * (
            2.0 + np.sqrt(1.0 + delta) * beta
        ) / den + 1.0 / np.sqrt(1.0 - delta)
        c_k = float(c_k)
    else:
        c_k = None
    c_prime_k = (1.0 + delta + delta * delta) / (delta * (1.0 - delta))
    c_bar_k = 2.0 * (7.0 - 9.0 * delta + 7.0 * delta * delta - delta**3) / (1.0 - delta) ** 4
    return SpConstants(float(delta), float(alpha), float(beta), c_k, float(c_prime_k), float(c_bar_k))


def sp_guarantee(delta_3k: float) -> bool:
    """True iff ``delta_3k`` certifies exact/stable subspace-pursuit recovery."""
    if delta_3k < 0.0:
        raise InvalidDelta(f"isometry constant cannot be negative, got {delta_3k}")
    return delta_3k <= SP_RIC_BOUND


def _top_k(magnitudes: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest magnitudes, smallest index first on ties."""
    order = np.argsort(-magnitudes, kind="stable")
    return np.sort(order[:k])


def subspace_pursuit(
    phi: SensingMatrix,
    y,
    config: SpConfig,
    true_x: Optional[SparseSignal] = None,
) -> tuple[SolverResult, SpTrace]:
    """Run subspace pursuit and return the result plus its full trace.

    Initialization takes the k columns most correlated with ``y``.  Each
    later iteration unions the k strongest residual correlations into the
    previous support, solves least squares on the (at most 2k) expanded
    support, keeps the k largest coefficients, re-solves on that support,
    and recomputes the residual.  The loop runs while the residual norm
    strictly decreases and halts once ``||r_j|| >= ||r_{j-1}||``, on a zero
    residual, or at the iteration cap.  All magnitude ties break toward the
    smallest index.

    Parameters
    ----------
    phi : SensingMatrix
    y : array_like
        Measurement vector of length ``phi.m``.
    config : SpConfig
    true_x : SparseSignal, optional
        When supplied, the trace records the missed energy
        ``||x on T \\ support_j||_2`` per iteration.

    Returns
    -------
    (SolverResult, SpTrace)
    """
    y = as_vector(y)
    if y.shape[0] != phi.m:
        raise InvalidDimensions(f"measurement length {y.shape[0]} != m={phi.m}")
    if true_x is not None and true_x.n != phi.n:
        raise InvalidDimensions("true signal length does not match the dictionary")
    k = config.k
    if 3 * k > phi.m:
        warnings.warn(
            f"3k = {3 * k} exceeds m = {phi.m}; the order-3k certification regime does not apply",
            stacklevel=2,
        )
    if k > phi.n:
        raise InvalidSparsity(f"k={k} exceeds the number of columns {phi.n}")
    max_iter = config.max_iterations
    if max_iter is None:
        max_iter = min(100, comb(phi.n, k) + 1)

    y_norm = float(np.linalg.norm(y))
    zero_tol = config.zero_residual_tol * y_norm
    x_dense = true_x.dense() if true_x is not None else None

    def solve_on(indices: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        if len(indices) > phi.m:
            raise RankDeficient(
                f"expanded support of size {len(indices)} exceeds m = {phi.m} rows"
            )
        cols = phi.matrix[:, indices]
        coeffs = least_squares(cols, y)
        res = y - cols @ coeffs
        return coeffs, res, float(np.linalg.norm(res))

    def missed(indices: np.ndarray) -> float:
        mask = np.ones(phi.n, dtype=bool)
        mask[indices] = False
        return float(np.linalg.norm(x_dense[mask]))

    omega = _top_k(np.abs(phi.matrix.T @ y), k)
    coeffs, residual, r_norm = solve_on(omega)
    iterations = 1
    supports = [SupportSet.from_iterable(phi.n, omega)]
    expanded: list[SupportSet] = []
    norms = [y_norm, r_norm]
    missed_list = [missed(omega)] if x_dense is not None else []

    halted = None
    prev = (omega, coeffs)
    if r_norm <= zero_tol:
        halted = HALT_ZERO
    elif iterations >= max_iter:
        halted = HALT_BUDGET

    while halted is None:
        corr = np.abs(phi.matrix.T @ residual)
        union = np.union1d(_top_k(corr, k), omega)
        wide_coeffs, _, _ = solve_on(union)
        keep = _top_k(np.abs(wide_coeffs), k)
        new_omega = union[keep]
        new_coeffs, new_residual, new_norm = solve_on(new_omega)
        iterations += 1
        supports.append(SupportSet.from_iterable(phi.n, new_omega))
        expanded.append(SupportSet.from_iterable(phi.n, union))
        norms.append(new_norm)
        if x_dense is not None:
            missed_list.append(missed(new_omega))
        if new_norm <= zero_tol:
            omega, coeffs = new_omega, new_coeffs
            halted = HALT_ZERO
        elif new_norm >= r_norm:
            if config.rollback_on_stop:
                omega, coeffs = prev
            else:
                omega, coeffs = new_omega, new_coeffs
            halted = HALT_CRITERION
        else:
            prev = (new_omega, new_coeffs)
            omega, coeffs, residual, r_norm = new_omega, new_coeffs, new_residual, new_norm
            if iterations >= max_iter:
                halted = HALT_BUDGET

    dense = np.zeros(phi.n)
    dense[omega] = coeffs
    result = SolverResult(
        estimate=SparseSignal.from_dense(dense),
        support_trace=tuple(supports),
        residual_norms=tuple(norms),
        iterations=iterations,
        halted_by=halted,
    )
    trace = SpTrace(
        support_per_iteration=tuple(supports),
        expanded_supports=tuple(expanded),
        residual_norms=tuple(norms),
        missed_energy=tuple(missed_list),
    )
    return result, trace
