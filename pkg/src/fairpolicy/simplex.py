"""Phase-1 simplex for small equality-constrained feasibility problems.

Finds x >= 0 with A x = b by minimizing the sum of artificial
variables.  Bland's rule picks pivots, which rules out cycling; the
systems solved here are tiny (a handful of rows), so simplicity wins
over speed.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalError

__all__ = ["solve_feasible"]

_MAX_PIVOTS = 10_000


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]


def solve_feasible(A, b, tol: float = 1e-9):
    """Return x >= 0 solving A x = b, or None when infeasible."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise ValueError(f"incompatible shapes {A.shape} and {b.shape}")
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # Columns: n structural, m artificial, then the right-hand side.
    tableau = np.zeros((m + 1, n + m + 1))
    tableau[:m, :n] = A
    tableau[:m, n : n + m] = np.eye(m)
    tableau[:m, -1] = b
    # Reduced costs for min(sum of artificials) with the artificial basis.
    tableau[m, :n] = -A.sum(axis=0)
    tableau[m, -1] = -b.sum()
    basis = list(range(n, n + m))

    for _ in range(_MAX_PIVOTS):
        enter = -1
        for j in range(n + m):
            if tableau[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = np.inf
        for i in range(m):
            coef = tableau[i, enter]
            if coef > tol:
                ratio = tableau[i, -1] / coef
                if ratio < best - 1e-12 or (
                    abs(ratio - best) <= 1e-12 and (leave < 0 or basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        if leave < 0:
            return None
        _pivot(tableau, leave, enter)
        basis[leave] = enter
    else:
        raise NumericalError("simplex did not terminate")

    if -tableau[m, -1] > tol:
        return None
    x = np.zeros(n)
    for i, var in enumerate(basis):
        if var < n:
            x[var] = tableau[i, -1]
    return x
