"""The (n-1)-dimensional subspace of additively consistent matrices.

Provides the canonical integer basis B_1..B_{n-1}, classical Gram-Schmidt
orthogonalization under any validated inner product, and orthogonal
projection onto the subspace.  The multiplicative pipeline
M -> exp[(log M)_proj] lives in ``approximate``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core
from .core import AdditiveMatrix, PCMatrix, PriorityVector
from .errors import DegenerateBasisError, DimensionMismatchError, DimensionTooSmallError
from .products import EPS_PD, ValidatedSpec, evaluate, norm

#: orthogonality threshold triggering one reorthogonalization sweep
_REORTH_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Ordered basis of the consistent subspace: n-1 anti-symmetric matrices.

    Construction verifies each element is anti-symmetric, additively
    consistent, and that the set is linearly independent (Frobenius Gram
    matrix positive definite).
    """

    n: int
    matrices: tuple

    def __post_init__(self):
        mats = tuple(np.array(b, dtype=float) for b in self.matrices)
        if len(mats) != self.n - 1:
            raise DimensionMismatchError(
                f"basis of the consistent subspace must have {self.n - 1} elements, got {len(mats)}"
            )
        for b in mats:
            if b.shape != (self.n, self.n):
                raise DimensionMismatchError(f"basis matrix has shape {b.shape}, expected square {self.n}")
            wrapped = AdditiveMatrix(b)
            if not core.is_additively_consistent(wrapped):
                raise DegenerateBasisError("basis matrix is not additively consistent")
            b.setflags(write=False)
        gram = np.array([[float(np.sum(p * q)) for q in mats] for p in mats])
        try:
            np.linalg.cholesky(gram)
        except np.linalg.LinAlgError:
            raise DegenerateBasisError("basis matrices are linearly dependent") from None
        object.__setattr__(self, "matrices", mats)


@dataclass(frozen=True, eq=False)
class OrthogonalBasis:
    """Gram-Schmidt output: matrices E_1..E_{n-1} orthogonal under ``spec``."""

    n: int
    spec: ValidatedSpec
    matrices: tuple
    squared_norms: tuple


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """Orthogonal projection of an additive matrix onto the consistent subspace.

    ``coefficients`` expand the projection over the orthogonal basis used;
    ``residual_distance`` is measured in the norm of that basis's inner
    product; ``priority`` is the geometric-mean-one priority vector of the
    multiplicative projection.
    """

    coefficients: np.ndarray
    additive_projection: AdditiveMatrix
    multiplicative_projection: PCMatrix
    residual_distance: float
    priority: PriorityVector

    def __post_init__(self):
        coeff = np.array(self.coefficients, dtype=float).reshape(-1)
        coeff.setflags(write=False)
        object.__setattr__(self, "coefficients", coeff)


def canonical_basis(n: int) -> SubspaceBasis:
    """The integer basis B_k, k = 1..n-1: b_ij = 1 for i <= k < j, -1 mirrored.

    Equivalently B_k = [s_i - s_j] for the step vector s = (1,..,1,0,..,0)
    with k ones, so every B_k is additively consistent.
    """
    if n < 2:
        raise DimensionTooSmallError(f"canonical basis needs n >= 2, got {n}")
    mats = []
    for k in range(1, n):
        s = (np.arange(n) < k).astype(float)
        mats.append(s[:, None] - s[None, :])
    return SubspaceBasis(n, tuple(mats))


def _pairwise_orthogonal(vspec, mats, sq_norms) -> bool:
    for p in range(len(mats)):
        for q in range(p + 1, len(mats)):
            bound = _REORTH_TOL * np.sqrt(sq_norms[p] * sq_norms[q])
            if abs(evaluate(vspec, mats[p], mats[q])) > bound:
                return False
    return True


def gram_schmidt(basis: SubspaceBasis, vspec: ValidatedSpec) -> OrthogonalBasis:
    """Classical Gram-Schmidt, in basis order, without normalizing lengths.

    E_k = B_k - sum_{j<k} <E_j, B_k>/<E_j, E_j> E_j.  Deterministic for a
    given basis order.  One reorthogonalization sweep is applied if rounding
    left any normalized off-diagonal product above 1e-12 (relevant only for
    large n).  Raises DegenerateBasisError if some squared norm falls to
    EPS_PD or below.
    """
    if vspec.n is not None and vspec.n != basis.n:
        raise DimensionMismatchError(
            f"inner product is for {vspec.n}x{vspec.n} matrices, basis is {basis.n}x{basis.n}"
        )

    def sweep(source):
        mats, sq = [], []
        for b in source:
            e = np.array(b, dtype=float)
            for f, f_sq in zip(mats, sq):
                e = e - (evaluate(vspec, f, b) / f_sq) * f
            e_sq = evaluate(vspec, e, e)
            if e_sq <= EPS_PD:
                raise DegenerateBasisError(
                    f"Gram-Schmidt norm fell to {e_sq:g}; basis is degenerate under this form"
                )
            mats.append(e)
            sq.append(e_sq)
        return mats, sq

    mats, sq = sweep(basis.matrices)
    if not _pairwise_orthogonal(vspec, mats, sq):
        mats, sq = sweep(mats)
    for e in mats:
        e.setflags(write=False)
    return OrthogonalBasis(basis.n, vspec, tuple(mats), tuple(float(s) for s in sq))


def project(A: AdditiveMatrix, ortho: OrthogonalBasis) -> ProjectionResult:
    """Orthogonal projection of A onto the span of the orthogonal basis.

    Coefficients come from the diagonal normal equations
    eps_k = <A, E_k> / <E_k, E_k>, valid because the basis is orthogonal.
    """
    if A.n != ortho.n:
        raise DimensionMismatchError(f"matrix is {A.n}x{A.n}, basis is {ortho.n}x{ortho.n}")
    vspec = ortho.spec
    eps = np.array(
        [evaluate(vspec, A, e) / sq for e, sq in zip(ortho.matrices, ortho.squared_norms)]
    )
    proj = np.zeros((ortho.n, ortho.n))
    for c, e in zip(eps, ortho.matrices):
        proj += c * e
    additive = AdditiveMatrix(proj)
    residual = norm(vspec, A.entries - additive.entries)
    multiplicative = core.exp_transform(additive)
    priority = core.priority_from_consistent(multiplicative)
    return ProjectionResult(eps, additive, multiplicative, float(residual), priority)


def approximate(M: PCMatrix, vspec: ValidatedSpec) -> ProjectionResult:
    """Consistent approximation of a PC matrix: exp of the projected log.

    Pipeline: A = log M, project A onto the consistent subspace under the
    given inner product (Gram-Schmidt on the canonical basis), exponentiate.
    """
    basis = canonical_basis(M.n)
    ortho = gram_schmidt(basis, vspec)
    return project(core.log_transform(M), ortho)
