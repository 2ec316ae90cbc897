"""Closed-form projections under weighted Frobenius norms.

For rank-one weight grids rho_i*rho_j the orthogonal projection of an
anti-symmetric matrix onto the consistent subspace has an explicit solution:
sigma_i is the rho-weighted arithmetic mean of row i, and the projection is
[sigma_i - sigma_j].  In the multiplicative domain this is the weighted
geometric mean of the rows.  With uniform weights both reduce to the
classical GMM priority.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import core, subspace
from .core import ADDITIVE, MULTIPLICATIVE, AdditiveMatrix, PCMatrix, PriorityVector
from .errors import DimensionMismatchError, NonPositiveEntryError
from .products import WeightedFrobenius, validate


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Positive weights rho with their cached total |rho| = sum rho_j."""

    rho: np.ndarray
    total: float = field(init=False, default=0.0)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float).reshape(-1)
        for idx, val in enumerate(rho):
            if not (val > 0 and math.isfinite(val)):
                raise NonPositiveEntryError(idx + 1, idx + 1, float(val), "weight")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "total", float(np.sum(rho)))

    @property
    def n(self) -> int:
        return self.rho.shape[0]

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(np.ones(n))


def _check_dims(n: int, rho: WeightVector) -> None:
    if rho.n != n:
        raise DimensionMismatchError(f"weight vector has length {rho.n}, matrix is {n}x{n}")


def closed_form_sigma(A: AdditiveMatrix, rho: WeightVector) -> PriorityVector:
    """Weighted row means: sigma_i = sum_j rho_j a_ij / |rho|.

    The matrix [sigma_i - sigma_j] is exactly the orthogonal projection of A
    under the weighted Frobenius form with weights rho_i*rho_j.  The returned
    gauge satisfies sum_i rho_i sigma_i = 0 (no normalization tag).
    """
    _check_dims(A.n, rho)
    sigma = (A.entries @ rho.rho) / rho.total
    return PriorityVector(sigma, ADDITIVE)


def weighted_gm_priority(M: PCMatrix, rho: WeightVector) -> PriorityVector:
    """Weighted geometric means of the rows: omega_i = [prod_j m_ij^rho_j]^(1/|rho|)."""
    sigma = closed_form_sigma(core.log_transform(M), rho)
    return PriorityVector(np.exp(sigma.values), MULTIPLICATIVE)


def normal_equations_residual(A: AdditiveMatrix, sigma, rho: WeightVector) -> np.ndarray:
    """Stationarity residuals sum_j rho_j (a_ij - sigma_i + sigma_j), i = 2..n.

    Zero exactly when sigma solves the weighted least-squares problem; entry
    r of the output corresponds to i = r + 2.  ``sigma`` may be an additive
    PriorityVector or a plain array of log-weights.
    """
    _check_dims(A.n, rho)
    if isinstance(sigma, PriorityVector):
        sigma = sigma.to_additive().values
    sigma = np.asarray(sigma, dtype=float).reshape(-1)
    if sigma.shape[0] != A.n:
        raise DimensionMismatchError(f"sigma has length {sigma.shape[0]}, matrix is {A.n}x{A.n}")
    res = A.entries @ rho.rho - sigma * rho.total + float(rho.rho @ sigma)
    return res[1:]


def sigma1_row_mean(A: AdditiveMatrix, rho: WeightVector) -> float:
    """Weighted arithmetic mean of the first row; an alternative sigma_1 gauge."""
    _check_dims(A.n, rho)
    return float(A.entries[0] @ rho.rho / rho.total)


def check_idempotence(M: PCMatrix, rho: WeightVector, tol: float = 1e-10) -> bool:
    """Apply the consistent-approximation pipeline twice; compare entrywise.

    Returns True when the second pass changes no entry by more than ``tol``
    relative, which the weighted-Frobenius theory guarantees.
    """
    _check_dims(M.n, rho)
    vspec = validate(WeightedFrobenius(rho.rho))
    once = subspace.approximate(M, vspec).multiplicative_projection
    twice = subspace.approximate(once, vspec).multiplicative_projection
    rel = np.abs(twice.entries - once.entries) / np.abs(once.entries)
    return bool(np.max(rel) <= tol)
