"""Nonlinear metric projection onto the multiplicatively consistent set.

The weighted Frobenius distance from a PC matrix M to the ratio-form
matrices [x_i/x_j] is governed by

    g(x) = sum_ij rho_ij (m_ij - x_i/x_j)^2,   x_1 = 1, x_i > 0,

which, unlike its log-domain counterpart, has no closed-form minimizer.
This module provides the objective, its stationarity system for rank-one
weights (the scaled analytic gradient), and a damped Newton solver started
from the weighted geometric-mean vector.  The first coordinate is fixed at
1 by eliminating it; Newton iterates on x_2..x_n with a finite-difference
Jacobian of the analytic gradient and a halving line search on g.

Note on scaling: with weights rho_ij = rho_i*rho_j the stationarity
component returned by ``gradient`` equals (1/(2*rho_i)) * dg/dx_i.  It
vanishes exactly at the stationary points of g.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import core
from .closed_form import WeightVector, weighted_gm_priority
from .core import PCMatrix
from .errors import (
    DimensionMismatchError,
    NonPositiveCoordinateError,
    NonPositiveEntryError,
    NotSymmetricError,
)

logger = logging.getLogger("pcc.nonlinear")

#: iterates are capped so every coordinate stays above this floor
_X_FLOOR = 1e-12
#: relative slack on g when accepting a step that strictly reduces |grad|
_ENDGAME_SLACK = 1e-12


@dataclass(frozen=True)
class SolverOptions:
    """Knobs for newton_solve; defaults follow the solver contract."""

    tol_grad: float = 1e-10
    max_iter: int = 100
    max_halvings: int = 30
    multistart_count: int = 0
    rng_seed: int | None = None
    #: std-dev of the log-perturbations applied to multistart points
    multistart_sigma: float = 0.25


@dataclass(frozen=True, eq=False)
class NonlinearSolveReport:
    """Solution report: x_1 = 1 exactly, all coordinates positive.

    ``gradient_fallbacks`` lists the iterations where the Newton system was
    singular or its step unusable and a gradient-descent step was taken
    instead.  With multistart enabled, ``restart_index`` identifies the run
    that produced the lowest objective (0 = the unperturbed start).
    """

    x: np.ndarray
    objective_value: float
    gradient_max_norm: float
    iterations: int
    converged: bool
    start_point: np.ndarray
    gradient_fallbacks: tuple = ()
    restart_index: int = 0

    def __post_init__(self):
        for name in ("x", "start_point"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def _check_x(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != n:
        raise DimensionMismatchError(f"x has length {x.shape[0]}, matrix is {n}x{n}")
    if not np.all((x > 0) & np.isfinite(x)):
        raise NonPositiveCoordinateError("all coordinates of x must be positive and finite")
    if x[0] != 1.0:
        raise NonPositiveCoordinateError(f"the first coordinate must be fixed at 1, got {x[0]!r}")
    return x


def objective(M: PCMatrix, x, rho_grid) -> float:
    """g(x) = sum_ij rho_ij (m_ij - x_i/x_j)^2 over all pairs, x_1 = 1.

    ``rho_grid`` is a full symmetric matrix of positive weights (diagonal
    terms vanish since m_ii = 1 = x_i/x_i).
    """
    x = _check_x(x, M.n)
    grid = np.asarray(rho_grid, dtype=float)
    if grid.shape != (M.n, M.n):
        raise DimensionMismatchError(f"weight grid has shape {grid.shape}, expected {(M.n, M.n)}")
    if not np.all(grid > 0):
        i, j = np.argwhere(~(grid > 0))[0]
        raise NonPositiveEntryError(int(i) + 1, int(j) + 1, float(grid[i, j]), "weight grid")
    if np.max(np.abs(grid - grid.T)) > 1e-12 * max(1.0, float(np.max(np.abs(grid)))):
        raise NotSymmetricError("weight grid must be symmetric")
    U = x[:, None] / x[None, :]
    return float(np.sum(grid * (M.entries - U) ** 2))


def rank_one_grid(rho: WeightVector) -> np.ndarray:
    """The weight grid rho_i * rho_j induced by a weight vector."""
    return np.outer(rho.rho, rho.rho)


def gradient(M: PCMatrix, x, rho: WeightVector) -> np.ndarray:
    """Stationarity components for i = 2..n under rank-one weights.

    Component i is (1/x_i) * sum_j rho_j [ (x_j/x_i)(1/m_ij - x_j/x_i)
    - (x_i/x_j)(m_ij - x_i/x_j) ], which equals (1/(2*rho_i)) * dg/dx_i.
    """
    x = _check_x(x, M.n)
    if rho.n != M.n:
        raise DimensionMismatchError(f"weight vector has length {rho.n}, matrix is {M.n}x{M.n}")
    m = M.entries
    U = x[:, None] / x[None, :]          # U[i,j] = x_i/x_j
    bracket = U.T * (1.0 / m - U.T) - U * (m - U)
    comps = (bracket @ rho.rho) / x
    return comps[1:]


def _objective_fast(m: np.ndarray, grid: np.ndarray, x: np.ndarray) -> float:
    U = x[:, None] / x[None, :]
    return float(np.sum(grid * (m - U) ** 2))


def _solve_one(M: PCMatrix, rho: WeightVector, opts: SolverOptions,
               z0: np.ndarray, restart_index: int) -> NonlinearSolveReport:
    n = M.n
    grid = rank_one_grid(rho)
    m = M.entries

    def full(z):
        return np.concatenate([[1.0], z])

    def grad_at(z):
        return gradient(M, full(z), rho)

    start = full(z0)
    z = z0.copy()
    g_cur = _objective_fast(m, grid, full(z))
    F = grad_at(z)
    f_norm = float(np.max(np.abs(F)))
    fallbacks: list[int] = []
    it = 0
    while True:
        logger.debug("restart %d it %d: g=%.12g |grad|=%.3g", restart_index, it, g_cur, f_norm)
        if f_norm <= opts.tol_grad or it >= opts.max_iter:
            break
        dim = n - 1
        J = np.empty((dim, dim))
        for k in range(dim):
            h = 1e-6 * max(1.0, abs(z[k]))
            # the central stencil must not cross zero
            h = min(h, 0.49 * z[k])
            zp, zm = z.copy(), z.copy()
            zp[k] += h
            zm[k] -= h
            J[:, k] = (grad_at(zp) - grad_at(zm)) / (2.0 * h)

        newton_dir = None
        try:
            cand = np.linalg.solve(J, -F)
            if np.all(np.isfinite(cand)):
                newton_dir = cand
        except np.linalg.LinAlgError:
            pass
        descent_dir = -2.0 * rho.rho[1:] * F  # -dg/dx_i for i = 2..n

        directions = []
        if newton_dir is not None:
            directions.append(("newton", newton_dir))
        directions.append(("descent", descent_dir))

        accepted = False
        for tag, d in directions:
            alpha = 1.0
            neg = d < 0
            if np.any(neg):
                cap = float(np.min((z[neg] - _X_FLOOR) / (-d[neg])))
                alpha = min(1.0, 0.99 * cap)
            for _ in range(opts.max_halvings + 1):
                z_new = z + alpha * d
                if np.all(z_new > 0):
                    g_new = _objective_fast(m, grid, full(z_new))
                    if g_new < g_cur:
                        accepted = True
                    elif g_new <= g_cur * (1.0 + _ENDGAME_SLACK):
                        # objective at float resolution: accept on gradient progress
                        if float(np.max(np.abs(grad_at(z_new)))) < f_norm:
                            accepted = True
                    if accepted:
                        z = z_new
                        g_cur = min(g_new, g_cur)
                        break
                alpha *= 0.5
            if accepted:
                if tag == "descent" and newton_dir is not None:
                    fallbacks.append(it)
                break
        if not accepted:
            logger.debug("restart %d it %d: no acceptable step, stopping", restart_index, it)
            break
        F = grad_at(z)
        f_norm = float(np.max(np.abs(F)))
        it += 1

    return NonlinearSolveReport(
        x=full(z),
        objective_value=g_cur,
        gradient_max_norm=f_norm,
        iterations=it,
        converged=f_norm <= opts.tol_grad,
        start_point=start,
        gradient_fallbacks=tuple(fallbacks),
        restart_index=restart_index,
    )


def newton_solve(M: PCMatrix, rho: WeightVector,
                 opts: SolverOptions = SolverOptions()) -> NonlinearSolveReport:
    """Damped Newton on the stationarity system, from the weighted-GM start.

    The start point is the weighted geometric-mean priority vector rescaled
    to x_1 = 1 (already optimal for consistent input, so the solver returns
    in 0 iterations there).  Each iteration solves the finite-difference
    Jacobian system, caps the step so coordinates stay above 1e-12, and
    halves until the objective decreases; if the Newton system is singular
    or yields no acceptable step, a gradient-descent step is tried and
    recorded.  Non-convergence within the iteration budget is reported via
    ``converged=False``, not an exception.

    With ``opts.multistart_count`` = k > 0, k additional runs start from
    random log-perturbations of the start point (seeded rng) and the lowest
    objective wins, ties broken by restart index.
    """
    if rho.n != M.n:
        raise DimensionMismatchError(f"weight vector has length {rho.n}, matrix is {M.n}x{M.n}")
    w = weighted_gm_priority(M, rho).values
    z0 = w[1:] / w[0]
    reports = [_solve_one(M, rho, opts, z0, 0)]
    if opts.multistart_count > 0:
        rng = np.random.default_rng(opts.rng_seed)
        for r in range(1, opts.multistart_count + 1):
            z_pert = z0 * np.exp(rng.normal(0.0, opts.multistart_sigma, z0.shape[0]))
            reports.append(_solve_one(M, rho, opts, z_pert, r))
    best = reports[0]
    for rep in reports[1:]:
        if rep.objective_value < best.objective_value:
            best = rep
    return best
