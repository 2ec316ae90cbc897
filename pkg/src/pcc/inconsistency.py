"""Triad-based inconsistency index.

The index takes the worst triad's deviation 1 - min(r, 1/r), where
r = m_ik / (m_ij * m_jk).  Evaluation happens in the log domain as
1 - exp(-|a_ik - a_ij - a_jk|), which is the same number but immune to
overflow for extreme ratios.  Subtracting any additively consistent matrix
from the log matrix leaves the index unchanged, so the index of the
"residual" exp(A - B) equals the index of exp(A) for every consistent B.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import core
from .core import AdditiveMatrix, PCMatrix, Triad
from .errors import DimensionMismatchError, NotConsistentError


class NoTriadsWarning(UserWarning):
    """Emitted when the index is requested for n < 3 (no triads exist)."""


@dataclass(frozen=True)
class TriadReport:
    """Per-triad diagnostic: the forward ratio and its local index."""

    triad: Triad
    ratio_forward: float
    local_index: float


def _local_indices(M: PCMatrix) -> list[TriadReport]:
    a = core.log_transform(M).entries
    reports = []
    for t in core.triads(M.n):
        i, j, k = t.i - 1, t.j - 1, t.k - 1
        d = a[i, k] - a[i, j] - a[j, k]
        reports.append(TriadReport(t, float(np.exp(d)), float(-np.expm1(-abs(d)))))
    return reports


def kii(M: PCMatrix) -> float:
    """Worst-triad inconsistency, in [0, 1); 0 iff the matrix is consistent.

    For n < 3 there are no triads; the index floor 0 is returned with a
    NoTriadsWarning rather than an error.
    """
    if M.n < 3:
        warnings.warn("matrix has no triads (n < 3); inconsistency index is 0 by convention",
                      NoTriadsWarning, stacklevel=2)
        return 0.0
    a = core.log_transform(M)
    return float(-np.expm1(-core.max_consistency_defect(a)))


def triad_reports(M: PCMatrix) -> list[TriadReport]:
    """All triads, sorted by descending local index (lexicographic tie-break).

    The first report's index equals kii(M); for a consistent matrix every
    local index is 0.
    """
    reports = _local_indices(M)
    return sorted(reports, key=lambda r: (-r.local_index, (r.triad.i, r.triad.j, r.triad.k)))


def kii_invariance_check(A: AdditiveMatrix, B: AdditiveMatrix) -> tuple[float, float]:
    """Index of exp(A - B) next to the index of exp(A), for consistent B.

    B must be additively consistent (this is checked); the two returned
    values agree up to floating-point noise, which is the invariance of the
    index under subtracting consistent matrices.
    """
    if A.n != B.n:
        raise DimensionMismatchError(f"shape mismatch: A is {A.n}x{A.n}, B is {B.n}x{B.n}")
    if not core.is_additively_consistent(B):
        raise NotConsistentError("B must be additively consistent")
    shifted = core.exp_transform(AdditiveMatrix(A.entries - B.entries))
    return kii(shifted), kii(core.exp_transform(A))
