"""Dense two-phase simplex for the small linear programs in this package.

Solves  min c.x  subject to  A x <= b,  x >= 0  (b of any sign).
Problems here have few rows (orders / demand items) and up to a few
thousand columns (cutting patterns), which suits a full-tableau method.
Rows are inf-norm scaled before solving so the fixed tolerances behave
across the mm/kg magnitudes used by callers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = 0
INFEASIBLE = 2
UNBOUNDED = 3
ITERATION_LIMIT = 4

_TOL = 1e-9
_BLAND_AFTER = 2000


@dataclass
class LpResult:
    status: int
    x: np.ndarray
    objective: float

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])
    basis[row] = col


def _run_simplex(
    tableau: np.ndarray,
    basis: np.ndarray,
    cost: np.ndarray,
    allowed: np.ndarray,
    max_iter: int,
) -> int:
    """Price with the given cost vector until optimal; returns a status code.

    `tableau` rows are the constraint rows plus rhs in the last column;
    the objective row is recomputed from `cost` and the current basis,
    which is slower per iteration but immune to drift.
    """
    m = tableau.shape[0]
    for iteration in range(max_iter):
        cb = cost[basis]
        # reduced costs: c_j - cb . B^-1 A_j ; tableau already holds B^-1 A
        reduced = cost - cb @ tableau[:, :-1]
        reduced[~allowed] = np.inf
        if iteration < _BLAND_AFTER:
            col = int(np.argmin(reduced))
            if reduced[col] >= -_TOL:
                return OPTIMAL
        else:
            negative = np.flatnonzero(reduced < -_TOL)
            if negative.size == 0:
                return OPTIMAL
            col = int(negative[0])
        column = tableau[:, col]
        positive = column > _TOL
        if not positive.any():
            return UNBOUNDED
        ratios = np.full(m, np.inf)
        ratios[positive] = tableau[positive, -1] / column[positive]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + _TOL)
        if iteration < _BLAND_AFTER:
            row = int(ties[0])
        else:
            # Bland's leaving rule: lowest basic-variable index among ties
            row = int(ties[np.argmin(basis[ties])])
        _pivot(tableau, basis, row, col)
    return ITERATION_LIMIT


def solve_lp(c, a_ub, b_ub, max_iter: int = 20000) -> LpResult:
    """Minimize c.x subject to a_ub x <= b_ub and x >= 0."""
    c = np.asarray(c, dtype=float)
    a = np.array(a_ub, dtype=float)
    b = np.array(b_ub, dtype=float)
    m, n = a.shape
    if m == 0:
        return LpResult(OPTIMAL if (c >= -_TOL).all() else UNBOUNDED, np.zeros(n), 0.0)

    # Row scaling keeps the fixed pivot tolerances meaningful.
    scale = np.maximum(np.abs(a).max(axis=1, initial=0.0), np.abs(b))
    scale[scale == 0.0] = 1.0
    a = a / scale[:, None]
    b = b / scale
    c_scale = np.abs(c).max() or 1.0
    c_work = c / c_scale

    negative = b < 0
    a[negative] *= -1.0
    b[negative] *= -1.0
    art_rows = np.flatnonzero(negative)
    k = art_rows.size

    # columns: structural (n) | slacks (m) | artificials (k) | rhs
    total = n + m + k
    tableau = np.zeros((m, total + 1))
    tableau[:, :n] = a
    tableau[np.arange(m), n + np.arange(m)] = np.where(negative, -1.0, 1.0)
    for j, r in enumerate(art_rows):
        tableau[r, n + m + j] = 1.0
    tableau[:, -1] = b

    basis = np.where(negative, 0, n + np.arange(m)).astype(int)
    basis[art_rows] = n + m + np.arange(k)

    allowed = np.ones(total, dtype=bool)
    if k:
        phase1_cost = np.zeros(total)
        phase1_cost[n + m :] = 1.0
        status = _run_simplex(tableau, basis, phase1_cost, allowed, max_iter)
        if status != OPTIMAL:
            return LpResult(status, np.zeros(n), np.nan)
        infeas = tableau[np.isin(basis, np.arange(n + m, total)), -1].sum() + 0.0
        if infeas > 1e-7:
            return LpResult(INFEASIBLE, np.zeros(n), np.nan)
        # pivot any lingering zero-level artificials out of the basis
        for row in np.flatnonzero(basis >= n + m):
            candidates = np.flatnonzero(np.abs(tableau[row, : n + m]) > _TOL)
            if candidates.size:
                _pivot(tableau, basis, int(row), int(candidates[0]))
        allowed[n + m :] = False

    phase2_cost = np.zeros(total)
    phase2_cost[:n] = c_work
    status = _run_simplex(tableau, basis, phase2_cost, allowed, max_iter)
    if status != OPTIMAL:
        return LpResult(status, np.zeros(n), np.nan)

    x = np.zeros(total)
    x[basis] = tableau[:, -1]
    x = np.maximum(x[:n], 0.0)
    return LpResult(OPTIMAL, x, float(c @ x))


def solve_covering_lp(costs, columns, demands, max_iter: int = 20000) -> LpResult:
    """Minimize costs.x subject to columns x >= demands, x >= 0."""
    a = -np.asarray(columns, dtype=float)
    b = -np.asarray(demands, dtype=float)
    return solve_lp(costs, a, b, max_iter=max_iter)
