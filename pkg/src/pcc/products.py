"""Inner products on the space of real n-by-n matrices.

Four variants are supported:

* ``Frobenius``: sum of entrywise products, tr(B^T A).
* ``WeightedFrobenius(rho)``: entrywise form with rank-one weights rho_i*rho_j.
* ``TraceForm(factors)``: tr(sum_t B^T X_t A Y_t) for symmetric PSD factor
  pairs (X_t, Y_t), evaluated through the linear operator
  A -> sum_t X_t A Y_t.
* ``CoefficientForm(gamma)``: a symmetric positive-definite n^2 x n^2
  coefficient matrix over the canonical matrix basis, flattened row-major
  (index (i-1)*n + j).

PSD factor pairs only guarantee a positive *semi*-definite form, so
``validate`` additionally audits definiteness of the induced form and refuses
forms that projection could not divide by.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DimensionMismatchError,
    FormNotDefiniteError,
    NonPositiveEntryError,
    NonSquareError,
    NotPSDError,
    NotSymmetricError,
    SpecNotValidatedError,
)

#: floor for squared norms and eigenvalues in definiteness checks
EPS_PD = 1e-10
#: absolute symmetry tolerance for parameter matrices
SYM_TOL = 1e-12
#: Gram matrices up to this dimension are audited exactly; larger ones by probes
_EXACT_AUDIT_MAX_N = 6
_PROBE_COUNT = 50


@dataclass(frozen=True)
class Frobenius:
    """The standard inner product; dimension-agnostic."""


@dataclass(frozen=True, eq=False)
class WeightedFrobenius:
    """Entrywise form sum rho_i rho_j a_ij b_ij with positive weights rho."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float).reshape(-1)
        if rho.size < 2:
            raise DimensionMismatchError("weight vector needs at least 2 entries")
        for idx, val in enumerate(rho):
            if not (val > 0 and math.isfinite(val)):
                raise NonPositiveEntryError(idx + 1, idx + 1, float(val), "weight")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def n(self) -> int:
        return self.rho.shape[0]


@dataclass(frozen=True, eq=False)
class TraceForm:
    """Factor pairs (X_t, Y_t) defining <A,B> = tr(sum_t B^T X_t A Y_t)."""

    factors: tuple

    def __post_init__(self):
        pairs = []
        n = None
        for t, pair in enumerate(self.factors):
            X, Y = pair
            X = np.array(X, dtype=float)
            Y = np.array(Y, dtype=float)
            for name, Z in ((f"X[{t + 1}]", X), (f"Y[{t + 1}]", Y)):
                if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
                    raise NonSquareError(f"trace-form factor {name} must be square")
            if X.shape != Y.shape or (n is not None and X.shape[0] != n):
                raise DimensionMismatchError("trace-form factors must share one dimension")
            n = X.shape[0]
            X.setflags(write=False)
            Y.setflags(write=False)
            pairs.append((X, Y))
        if not pairs:
            raise DimensionMismatchError("trace form needs at least one factor pair")
        object.__setattr__(self, "factors", tuple(pairs))

    @property
    def n(self) -> int:
        return self.factors[0][0].shape[0]


@dataclass(frozen=True, eq=False)
class CoefficientForm:
    """Symmetric positive-definite coefficient matrix over the canonical basis."""

    gamma: np.ndarray

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise NonSquareError("coefficient matrix must be square")
        n = math.isqrt(g.shape[0])
        if n * n != g.shape[0] or n < 2:
            raise DimensionMismatchError(
                f"coefficient matrix must be n^2 x n^2 with n >= 2, got {g.shape[0]} rows"
            )
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @property
    def n(self) -> int:
        return math.isqrt(self.gamma.shape[0])


InnerProductSpec = Union[Frobenius, WeightedFrobenius, TraceForm, CoefficientForm]


@dataclass(frozen=True, eq=False)
class ValidatedSpec:
    """An inner-product spec that passed ``validate``; required by evaluate.

    ``n`` is None for the dimension-agnostic Frobenius product.
    """

    spec: InnerProductSpec
    n: int | None

    @property
    def kind(self) -> str:
        return type(self.spec).__name__


def _entries(mat) -> np.ndarray:
    if hasattr(mat, "entries"):
        return mat.entries
    return np.asarray(mat, dtype=float)


def _check_symmetric(Z: np.ndarray, which: str) -> None:
    if np.max(np.abs(Z - Z.T)) > SYM_TOL:
        raise NotSymmetricError(f"{which} is not symmetric within {SYM_TOL:g}")


def _check_psd(Z: np.ndarray, which: str) -> None:
    eigs = np.linalg.eigvalsh(Z)
    scale = max(float(np.max(np.abs(eigs))), 1.0)
    if eigs[0] < -EPS_PD * scale:
        raise NotPSDError(f"{which} has negative eigenvalue {eigs[0]:g}")


def apply_operator(spec, A) -> np.ndarray:
    """The linear operator behind a trace form: A -> sum_t X_t A Y_t."""
    if isinstance(spec, ValidatedSpec):
        spec = spec.spec
    if not isinstance(spec, TraceForm):
        raise SpecNotValidatedError("apply_operator is defined for trace-form specs only")
    a = _entries(A)
    if a.shape != (spec.n, spec.n):
        raise DimensionMismatchError(f"operand must be {spec.n}x{spec.n}, got {a.shape}")
    out = np.zeros_like(a)
    for X, Y in spec.factors:
        out += X @ a @ Y
    return out


def _trace_form_gram(spec: TraceForm) -> np.ndarray:
    # <E_ij, E_rs> = sum_t X_t[i,r] * Y_t[j,s]  (X symmetric), i.e. sum of Kroneckers
    g = np.zeros((spec.n**2, spec.n**2))
    for X, Y in spec.factors:
        g += np.kron(X, Y)
    return g


def validate(spec: InnerProductSpec, n: int | None = None) -> ValidatedSpec:
    """Check a spec's parameters and the definiteness of the induced form.

    Trace forms get the full audit: symmetry and PSD of every factor, positive
    squared norms of all canonical basis matrices, and positive definiteness
    of the induced Gram matrix (exact Cholesky up to n = 6, randomized probes
    beyond).  Raises NotSymmetricError / NotPSDError / FormNotDefiniteError.
    """
    if isinstance(spec, Frobenius):
        return ValidatedSpec(spec, n)
    if isinstance(spec, WeightedFrobenius):
        if n is not None and n != spec.n:
            raise DimensionMismatchError(f"weight vector has length {spec.n}, expected {n}")
        # induced Gram is diag(rho_i rho_j) with positive diagonal: definite
        return ValidatedSpec(spec, spec.n)
    if isinstance(spec, TraceForm):
        if n is not None and n != spec.n:
            raise DimensionMismatchError(f"trace form is {spec.n}-dimensional, expected {n}")
        for t, (X, Y) in enumerate(spec.factors):
            _check_symmetric(X, f"X[{t + 1}]")
            _check_symmetric(Y, f"Y[{t + 1}]")
            _check_psd(X, f"X[{t + 1}]")
            _check_psd(Y, f"Y[{t + 1}]")
        dim = spec.n
        diag = np.zeros((dim, dim))
        for X, Y in spec.factors:
            diag += np.outer(np.diag(X), np.diag(Y))
        if np.min(diag) <= EPS_PD:
            r, s = np.unravel_index(np.argmin(diag), diag.shape)
            raise FormNotDefiniteError(
                f"<E_{r + 1}{s + 1}, E_{r + 1}{s + 1}> = {diag[r, s]:g} <= {EPS_PD:g}; "
                "the induced form is only semi-definite"
            )
        if dim <= _EXACT_AUDIT_MAX_N:
            try:
                np.linalg.cholesky(_trace_form_gram(spec))
            except np.linalg.LinAlgError:
                raise FormNotDefiniteError(
                    "induced Gram matrix is not positive definite"
                ) from None
        else:
            rng = np.random.default_rng(0)
            for _ in range(_PROBE_COUNT):
                Z = rng.standard_normal((dim, dim))
                val = float(np.sum(apply_operator(spec, Z) * Z))
                if val <= EPS_PD * float(np.sum(Z * Z)):
                    raise FormNotDefiniteError(
                        "randomized probe found a non-positive direction of the form"
                    )
        return ValidatedSpec(spec, dim)
    if isinstance(spec, CoefficientForm):
        if n is not None and n != spec.n:
            raise DimensionMismatchError(f"coefficient form is {spec.n}-dimensional, expected {n}")
        _check_symmetric(spec.gamma, "gamma")
        try:
            np.linalg.cholesky(spec.gamma)
        except np.linalg.LinAlgError:
            raise FormNotDefiniteError("gamma is not positive definite") from None
        return ValidatedSpec(spec, spec.n)
    raise SpecNotValidatedError(f"unknown inner-product spec {type(spec).__name__}")


def _require_validated(vspec) -> ValidatedSpec:
    if not isinstance(vspec, ValidatedSpec):
        raise SpecNotValidatedError(
            f"expected a ValidatedSpec (call validate() first), got {type(vspec).__name__}"
        )
    return vspec


def evaluate(vspec: ValidatedSpec, A, B) -> float:
    """Value of the bilinear form on two real matrices."""
    vspec = _require_validated(vspec)
    a = _entries(A)
    b = _entries(B)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquareError(f"first operand has shape {a.shape}")
    if a.shape != b.shape:
        raise DimensionMismatchError(f"operand shapes differ: {a.shape} vs {b.shape}")
    if vspec.n is not None and a.shape[0] != vspec.n:
        raise DimensionMismatchError(
            f"operands are {a.shape[0]}x{a.shape[0]} but the form expects {vspec.n}x{vspec.n}"
        )
    spec = vspec.spec
    if isinstance(spec, Frobenius):
        return float(np.sum(a * b))
    if isinstance(spec, WeightedFrobenius):
        rho = spec.rho
        return float(np.sum((rho[:, None] * rho[None, :]) * a * b))
    if isinstance(spec, TraceForm):
        return float(np.sum(apply_operator(spec, a) * b))
    return float(np.ravel(a) @ spec.gamma @ np.ravel(b))


def norm(vspec: ValidatedSpec, A) -> float:
    """Norm induced by the form; tiny negative rounding is clamped to 0."""
    return math.sqrt(max(evaluate(vspec, A, A), 0.0))


def distance(vspec: ValidatedSpec, A, B) -> float:
    return norm(vspec, _entries(A) - _entries(B))
