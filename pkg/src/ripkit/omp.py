"""Orthogonal matching pursuit with noiseless and noisy stopping rules, and
the minimum-magnitude thresholds under which noisy support identification is
guaranteed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import GuaranteeInapplicable, InvalidDelta, InvalidDimensions, InvalidSparsity, UnknownBound
from .numerics import as_vector, least_squares
from .sensing import SensingMatrix, SparseSignal, SupportSet

HALT_BUDGET = "iteration_budget"
HALT_CRITERION = "stopping_criterion"
HALT_ZERO = "zero_residual"


@dataclass(frozen=True)
class OmpConfig:
    """Stopping mode and limits for an OMP solve.

    ``noiseless_k`` runs exactly ``k`` iterations (halting early on a zero
    residual); ``l2`` stops once ``||r||_2 <= eps``; ``linf`` stops once
    ``||Phi^T r||_inf <= eps``.  Noisy modes evaluate their criterion before
    each selection, so a compliant measurement needing zero iterations
    returns immediately.  ``max_iterations`` defaults to m at solve time and
    is clamped there; beyond m columns the selected submatrix loses full
    column rank.
    """

    mode: str
    k: Optional[int] = None
    eps: Optional[float] = None
    max_iterations: Optional[int] = None
    zero_residual_tol: float = 1e-12

    def __post_init__(self):
        if self.mode not in ("noiseless_k", "l2", "linf"):
            raise InvalidDimensions(f"unknown OMP mode {self.mode!r}")
        if self.mode == "noiseless_k":
            if self.k is None or self.k < 1:
                raise InvalidSparsity("noiseless mode needs a positive iteration count k")
        else:
            if self.eps is None or self.eps < 0.0:
                raise InvalidDimensions("noisy modes need a nonnegative stopping level")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise InvalidDimensions("max_iterations cannot be negative")
        if self.zero_residual_tol < 0.0:
            raise InvalidDimensions("zero_residual_tol cannot be negative")

    @classmethod
    def noiseless(cls, k: int, **kw) -> "OmpConfig":
        return cls(mode="noiseless_k", k=k, **kw)

    @classmethod
    def l2_stopping(cls, eps: float, **kw) -> "OmpConfig":
        return cls(mode="l2", eps=eps, **kw)

    @classmethod
    def linf_stopping(cls, eps: float, **kw) -> "OmpConfig":
        return cls(mode="linf", eps=eps, **kw)


@dataclass(frozen=True, eq=False)
class SolverResult:
    """Per-iteration trace of a greedy solve.

    ``support_trace[j]`` is the estimated support after j iterations
    (starting from the empty set for OMP), ``residual_norms[j]`` the matching
    residual norm with ``residual_norms[0] == ||y||_2``.
    """

    estimate: SparseSignal
    support_trace: tuple[SupportSet, ...]
    residual_norms: tuple[float, ...]
    iterations: int
    halted_by: str

    def __post_init__(self):
        if self.halted_by not in (HALT_BUDGET, HALT_CRITERION, HALT_ZERO):
            raise ValueError(f"unknown halt reason {self.halted_by!r}")

    @property
    def final_support(self) -> SupportSet:
        return self.support_trace[-1]

    @property
    def final_residual_norm(self) -> float:
        return self.residual_norms[-1]


def omp(phi: SensingMatrix, y, config: OmpConfig) -> SolverResult:
    """Orthogonal matching pursuit.

    Each iteration selects the column most correlated with the residual
    (ties broken toward the smallest index), refits by least squares on the
    selected columns, and recomputes the residual, which stays orthogonal to
    everything already selected, so no index is picked twice.

    Parameters
    ----------
    phi : SensingMatrix
        Unit-column dictionary.
    y : array_like
        Measurement vector of length ``phi.m``.
    config : OmpConfig
        Stopping mode; see :class:`OmpConfig`.

    Returns
    -------
    SolverResult
        Zero-padded final coefficients plus the full support/residual trace.
    """
    y = as_vector(y)
    if y.shape[0] != phi.m:
        raise InvalidDimensions(f"measurement length {y.shape[0]} != m={phi.m}")
    m, n = phi.m, phi.n
    budget = m if config.max_iterations is None else min(config.max_iterations, m)
    if config.mode == "noiseless_k":
        budget = min(config.k, budget)

    y_norm = float(np.linalg.norm(y))
    zero_tol = config.zero_residual_tol * y_norm
    residual = y.copy()
    selected: list[int] = []
    coeffs = np.zeros(0)
    trace = [SupportSet.from_iterable(n, ())]
    norms = [y_norm]
    iterations = 0

    while True:
        r_norm = float(np.linalg.norm(residual))
        if config.mode == "noiseless_k" and r_norm <= zero_tol:
            halted = HALT_ZERO
            break
        if config.mode == "l2" and r_norm <= config.eps:
            halted = HALT_CRITERION
            break
        if config.mode == "linf" and float(np.max(np.abs(phi.matrix.T @ residual))) <= config.eps:
            halted = HALT_CRITERION
            break
        if iterations >= budget:
            halted = HALT_BUDGET
            break
        corr = np.abs(phi.matrix.T @ residual)
        pick = int(np.argmax(corr))  # argmax returns the first, hence smallest, index on ties
        if pick in selected:
            # Orthogonality rules this out while the residual is meaningful,
            # so the residual has hit numerical zero.
            halted = HALT_ZERO
            break
        selected = sorted(selected + [pick])
        cols = phi.matrix[:, selected]
        coeffs = least_squares(cols, y)
        residual = y - cols @ coeffs
        iterations += 1
        trace.append(SupportSet.from_iterable(n, selected))
        norms.append(float(np.linalg.norm(residual)))

    dense = np.zeros(n)
    dense[selected] = coeffs
    return SolverResult(
        estimate=SparseSignal.from_dense(dense),
        support_trace=tuple(trace),
        residual_norms=tuple(norms),
        iterations=iterations,
        halted_by=halted,
    )


def omp_threshold(name: str, k: int, delta: float, eps: float) -> float:
    """Minimum nonzero-entry magnitude guaranteeing noisy support recovery.

    ``l2_prior`` / ``linf_prior`` are the earlier thresholds requiring
    ``1 - delta - sqrt(k) delta > 0``; ``l2_proposed`` / ``linf_proposed``
    are the sharper ones requiring
    ``1 - delta - sqrt(1 - delta) sqrt(k) delta > 0`` (equivalent to delta
    below the proposed recovery bound), and are strictly smaller wherever
    both denominators are positive.

    Raises
    ------
    GuaranteeInapplicable
        If the relevant denominator is not positive (delta too large for k).
    """
    if k < 1:
        raise InvalidSparsity(f"sparsity must be at least 1, got {k}")
    if not (0.0 < delta < 1.0):
        raise InvalidDelta(f"delta must lie in (0, 1), got {delta}")
    if eps < 0.0:
        raise InvalidDimensions("noise level must be nonnegative")
    rk = np.sqrt(float(k))
    if name in ("l2_prior", "linf_prior"):
        den = 1.0 - delta - rk * delta
    elif name in ("l2_proposed", "linf_proposed"):
        den = 1.0 - delta - np.sqrt(1.0 - delta) * rk * delta
    else:
        raise UnknownBound(f"unknown threshold name {name!r}")
    if den <= 0.0:
        raise GuaranteeInapplicable(f"threshold {name} undefined: denominator {den:.3e} <= 0")
    if name == "l2_prior" or name == "l2_proposed":
        num = (np.sqrt(1.0 + delta) + 1.0) * eps
    elif name == "linf_prior":
        num = (rk + rk * np.sqrt(1.0 + delta)) * eps
    else:
        num = (rk + 1.0) * eps
    return float(num / den)


OMP_THRESHOLD_NAMES = ("l2_prior", "l2_proposed", "linf_prior", "linf_proposed")
