"""Core types for pairwise-comparison matrices.

A pairwise-comparison (PC) matrix stores positive ratio judgments m_ij with
m_ij * m_ji = 1.  Taking entrywise logarithms maps it to an anti-symmetric
matrix; consistency (m_ik * m_kj = m_ij over all triads) becomes additive
consistency a_ik + a_kj = a_ij.  Both directions of that isomorphism, the
reciprocity repair by geometric means, triad enumeration, priority vectors,
and the ratio-form reconstruction live here.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    DimensionTooSmallError,
    NonPositiveCoordinateError,
    NonPositiveEntryError,
    NonSquareError,
    NotConsistentError,
    NotReciprocalError,
    RangeOverflowError,
)

#: tolerance on |ln(m_ij * m_ji)| for accepting a matrix as reciprocal
TAU_REC = 1e-9
#: tolerance on |a_ik + a_kj - a_ij| for the consistency test (log domain)
TAU_CONS = 1e-9

MULTIPLICATIVE = "multiplicative"
ADDITIVE = "additive"

GEOMETRIC_MEAN_ONE = "geometric-mean-one"
FIRST_COORDINATE_ONE = "first-coordinate-one"
SUM_ONE = "sum-one"
NORMALIZATIONS = (GEOMETRIC_MEAN_ONE, FIRST_COORDINATE_ONE, SUM_ONE)

# exp() overflows above this; used by exp_transform
_MAX_LOG = math.log(np.finfo(float).max)


def _square_float_array(raw, what: str) -> np.ndarray:
    arr = np.array(raw, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NonSquareError(f"{what} must be a square matrix, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise DimensionTooSmallError(f"{what} needs dimension >= 2, got {arr.shape[0]}")
    return arr


def _check_positive(arr: np.ndarray, what: str) -> None:
    bad = ~(arr > 0) | ~np.isfinite(arr)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise NonPositiveEntryError(int(i) + 1, int(j) + 1, float(arr[i, j]), what)


def _bad_domain(domain) -> DimensionMismatchError:
    return DimensionMismatchError(
        f"domain must be '{MULTIPLICATIVE}' or '{ADDITIVE}', got {domain!r}"
    )


@dataclass(frozen=True, eq=False)
class PCMatrix:
    """Positive reciprocal matrix of ratio judgments.

    Invariants: every entry positive, unit diagonal, and
    |ln(m_ij * m_ji)| <= TAU_REC for all pairs.  Entries are stored in a
    read-only array; instances are immutable and safe to share.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = _square_float_array(self.entries, "PC matrix")
        _check_positive(arr, "PC matrix")
        defect = np.abs(np.log(arr * arr.T))
        if np.max(defect) > TAU_REC:
            i, j = np.unravel_index(np.argmax(defect), defect.shape)
            raise NotReciprocalError(
                f"entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) violate reciprocity: "
                f"m_ij*m_ji = {arr[i, j] * arr[j, i]!r}; "
                "use make_reciprocal() to repair non-reciprocal input"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def identity(cls, n: int) -> "PCMatrix":
        """Group identity: every comparison equal to 1."""
        return cls(np.ones((n, n)))

    def __repr__(self) -> str:
        return f"PCMatrix(n={self.n})"


@dataclass(frozen=True, eq=False)
class AdditiveMatrix:
    """Anti-symmetric matrix of log-ratios a_ij = ln m_ij.

    Construction accepts input anti-symmetric within TAU_REC and then makes
    anti-symmetry exact by replacing entries with (a_ij - a_ji)/2, so that
    downstream projections never see floating-point drift.
    """

    entries: np.ndarray

    def __post_init__(self):
        arr = _square_float_array(self.entries, "additive matrix")
        if not np.all(np.isfinite(arr)):
            i, j = np.argwhere(~np.isfinite(arr))[0]
            raise NonPositiveEntryError(int(i) + 1, int(j) + 1, float(arr[i, j]), "additive matrix")
        defect = np.abs(arr + arr.T)
        if np.max(defect) > TAU_REC:
            i, j = np.unravel_index(np.argmax(defect), defect.shape)
            raise NotReciprocalError(
                f"entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) violate anti-symmetry: "
                f"a_ij + a_ji = {arr[i, j] + arr[j, i]!r}"
            )
        arr = 0.5 * (arr - arr.T)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def zero(cls, n: int) -> "AdditiveMatrix":
        return cls(np.zeros((n, n)))

    def __repr__(self) -> str:
        return f"AdditiveMatrix(n={self.n})"


@dataclass(frozen=True, order=True)
class Triad:
    """Index triple 1 <= i < j < k <= n (1-based, paper convention)."""

    i: int
    j: int
    k: int

    def __post_init__(self):
        if not (1 <= self.i < self.j < self.k):
            raise DimensionMismatchError(f"triad indices must satisfy 1 <= i < j < k, got {self}")


@dataclass(frozen=True, eq=False)
class PriorityVector:
    """Weights ranking the compared entities.

    ``domain``/``values``: multiplicative weights omega_i > 0 or additive
    log-weights sigma_i.  ``normalization`` is one of NORMALIZATIONS, or None
    when the vector is in whatever gauge the producing formula yields.
    The three tags mean, in the multiplicative domain: product of weights 1,
    first weight 1, sum of weights 1.  In the additive domain the same tags
    are interpreted through exp: sum sigma_i = 0, sigma_1 = 0, sum e^sigma = 1.
    """

    values: np.ndarray
    domain: str
    normalization: str | None = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if self.domain not in (MULTIPLICATIVE, ADDITIVE):
            raise _bad_domain(self.domain)
        if self.normalization is not None and self.normalization not in NORMALIZATIONS:
            raise DimensionMismatchError(f"unknown normalization tag {self.normalization!r}")
        if not np.all(np.isfinite(vals)):
            raise NonPositiveCoordinateError("priority vector has non-finite coordinates")
        if self.domain == MULTIPLICATIVE and not np.all(vals > 0):
            raise NonPositiveCoordinateError("multiplicative priority weights must be positive")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def normalized(self, tag: str) -> "PriorityVector":
        """Rescale (multiplicative) or shift (additive) to the requested gauge."""
        if tag not in NORMALIZATIONS:
            raise DimensionMismatchError(f"unknown normalization tag {tag!r}")
        v = self.values
        if self.domain == MULTIPLICATIVE:
            if tag == GEOMETRIC_MEAN_ONE:
                v = v / math.exp(float(np.mean(np.log(v))))
            elif tag == FIRST_COORDINATE_ONE:
                v = v / v[0]
            else:
                v = v / float(np.sum(v))
        else:
            if tag == GEOMETRIC_MEAN_ONE:
                v = v - float(np.mean(v))
            elif tag == FIRST_COORDINATE_ONE:
                v = v - v[0]
            else:
                m = float(np.max(v))
                v = v - (m + math.log(float(np.sum(np.exp(v - m)))))
        return PriorityVector(v, self.domain, tag)

    def to_additive(self) -> "PriorityVector":
        if self.domain == ADDITIVE:
            return self
        return PriorityVector(np.log(self.values), ADDITIVE, self.normalization)

    def to_multiplicative(self) -> "PriorityVector":
        if self.domain == MULTIPLICATIVE:
            return self
        if np.max(np.abs(self.values)) > _MAX_LOG:
            raise RangeOverflowError("log-weights exceed the representable exponent range")
        return PriorityVector(np.exp(self.values), MULTIPLICATIVE, self.normalization)

    def __repr__(self) -> str:
        return f"PriorityVector({np.array2string(self.values, precision=6)}, {self.domain})"


def make_reciprocal(raw) -> PCMatrix:
    """Repair a positive square matrix to reciprocal form.

    For i < j the pair (raw_ij, raw_ji) is replaced by its geometric mean
    g = sqrt(raw_ij * raw_ji) and its exact reciprocal 1/g; the diagonal is
    set to 1.  Already-reciprocal input is reproduced within TAU_REC.
    """
    arr = _square_float_array(raw, "input matrix")
    _check_positive(arr, "input matrix")
    n = arr.shape[0]
    g = np.sqrt(arr * arr.T)
    out = np.ones((n, n))
    iu, ju = np.triu_indices(n, 1)
    out[iu, ju] = g[iu, ju]
    out[ju, iu] = 1.0 / g[iu, ju]
    return PCMatrix(out)


def log_transform(M: PCMatrix) -> AdditiveMatrix:
    """Entrywise logarithm, with anti-symmetry enforced exactly.

    a_ij = (ln m_ij - ln m_ji) / 2, which equals ln m_ij when M is exactly
    reciprocal and removes floating-point drift otherwise.
    """
    L = np.log(M.entries)
    return AdditiveMatrix(0.5 * (L - L.T))


def exp_transform(A: AdditiveMatrix) -> PCMatrix:
    """Entrywise exponential; inverse of log_transform."""
    if np.max(np.abs(A.entries)) > _MAX_LOG:
        raise RangeOverflowError(
            f"additive entries exceed the representable exponent range (|a| > {_MAX_LOG:.2f})"
        )
    return PCMatrix(np.exp(A.entries))


def max_consistency_defect(A: AdditiveMatrix) -> float:
    """Worst |a_ik + a_kj - a_ij| over all index triples (0 when n = 2)."""
    a = A.entries
    d = a[:, None, :] + a.T[None, :, :] - a[:, :, None]
    return float(np.max(np.abs(d)))


def is_additively_consistent(A: AdditiveMatrix, tol: float = TAU_CONS) -> bool:
    return max_consistency_defect(A) <= tol


def is_consistent(M: PCMatrix, tol: float = TAU_CONS) -> bool:
    """Triad consistency test, performed in the log domain.

    True iff |ln(m_ik * m_kj) - ln m_ij| <= tol for every triad; every 2x2
    reciprocal matrix is consistent vacuously.
    """
    return is_additively_consistent(log_transform(M), tol)


def triads(n: int) -> list[Triad]:
    """All C(n,3) triads (i, j, k), 1-based, in lexicographic order."""
    if n < 1:
        raise DimensionTooSmallError(f"triads requires n >= 1, got {n}")
    return [Triad(i, j, k) for i, j, k in itertools.combinations(range(1, n + 1), 3)]


def priority_from_consistent(
    M: PCMatrix,
    normalization: str = GEOMETRIC_MEAN_ONE,
    tol: float = TAU_CONS,
) -> PriorityVector:
    """Priority vector of a consistent matrix via its first row.

    omega_1 = 1 and omega_j = 1/m_1j reproduce M = [omega_i / omega_j]; the
    result is re-normalized to the requested gauge.  Raises NotConsistentError
    when M fails the triad test at ``tol``.
    """
    if not is_consistent(M, tol):
        raise NotConsistentError(
            "matrix is not consistent within tolerance; a priority vector in ratio form "
            "would not reproduce it (project it first)"
        )
    w = np.concatenate([[1.0], 1.0 / M.entries[0, 1:]])
    return PriorityVector(w, MULTIPLICATIVE).normalized(normalization)


def reconstruct_consistent(v: PriorityVector, domain: str | None = None):
    """Ratio-form matrix [omega_i/omega_j] or difference form [sigma_i - sigma_j].

    ``domain`` selects the output kind and defaults to the vector's own
    domain.  The result is consistent by construction and invariant under
    rescaling (multiplicative) or shifting (additive) of ``v``.
    """
    if domain is None:
        domain = v.domain
    if domain == MULTIPLICATIVE:
        w = v.to_multiplicative().values
        return PCMatrix(w[:, None] / w[None, :])
    if domain == ADDITIVE:
        s = v.to_additive().values
        return AdditiveMatrix(s[:, None] - s[None, :])
    raise _bad_domain(domain)


def gmm_priority(M: PCMatrix) -> PriorityVector:
    """Geometric means of the rows; the classical GMM priority vector.

    Computed in the log domain as row means, so the output has geometric
    mean 1 automatically for any reciprocal M.
    """
    sigma = np.mean(log_transform(M).entries, axis=1)
    return PriorityVector(np.exp(sigma), MULTIPLICATIVE, GEOMETRIC_MEAN_ONE)
