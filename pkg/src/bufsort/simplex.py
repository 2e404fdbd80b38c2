"""Dense two-phase primal simplex with Bland's rule.

Solves ``min c @ x`` subject to ``A_ub @ x <= b_ub``, ``A_eq @ x == b_eq``,
``x >= 0``.  Meant for desk-sized models; everything is a dense numpy
tableau.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LpInfeasible, SolverStalled

PIVOT_TOL = 1e-9


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    pivots: int


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list[int], tol: float):
        self.T = T
        self.basis = basis
        self.tol = tol
        self.pivots = 0

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        colvec = T[:, col].copy()
        colvec[row] = 0.0
        T -= np.outer(colvec, T[row])
        self.basis[row] = col
        self.pivots += 1

    def run(self, n_cols: int, max_pivots: int) -> None:
        """Minimize the objective held in the last row over columns < n_cols."""
        T, tol = self.T, self.tol
        m = T.shape[0] - 1
        while True:
            reduced = T[m, :n_cols]
            candidates = np.nonzero(reduced < -tol)[0]
            if candidates.size == 0:
                return
            col = int(candidates[0])
            column = T[:m, col]
            rows = np.nonzero(column > tol)[0]
            if rows.size == 0:
                raise LpInfeasible("objective is unbounded below")
            ratios = T[rows, -1] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + tol * max(1.0, abs(best))]
            row = int(min(ties, key=lambda r: self.basis[r]))
            if self.pivots >= max_pivots:
                raise SolverStalled(f"no optimum after {self.pivots} pivots")
            self.pivot(row, col)


def solve(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tol: float = PIVOT_TOL,
          max_pivots: int = 200_000) -> SimplexResult:
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    # columns: structural | slacks (one per ub row) | artificials
    A = np.zeros((m, n + m_ub))
    b = np.concatenate([b_ub, b_eq])
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1

    # a slack can start basic only where its row was not flipped
    need_art = [r for r in range(m) if r >= m_ub or flip[r]]
    n_struct = n + m_ub
    n_art = len(need_art)
    T = np.zeros((m + 1, n_struct + n_art + 1))
    T[:m, :n_struct] = A
    T[:m, -1] = b
    basis = [0] * m
    for r in range(m_ub):
        basis[r] = n + r
    for j, r in enumerate(need_art):
        T[r, n_struct + j] = 1.0
        basis[r] = n_struct + j

    tab = _Tableau(T, basis, tol)
    if n_art:
        T[m, n_struct:n_struct + n_art] = 1.0
        for r in need_art:
            T[m] -= T[r]
        tab.run(n_struct + n_art, max_pivots)
        if -T[m, -1] > 1e-7 * max(1.0, np.abs(b).max(initial=0.0)):
            raise LpInfeasible(f"phase 1 ended with infeasibility {-T[m, -1]:.3g}")
        # drive remaining artificials out of the basis; drop redundant rows
        keep = []
        for r in range(m):
            if tab.basis[r] >= n_struct:
                nz = np.nonzero(np.abs(T[r, :n_struct]) > tol)[0]
                if nz.size:
                    tab.pivot(r, int(nz[0]))
                    keep.append(r)
            else:
                keep.append(r)
        T = np.vstack([T[keep], T[m:m + 1]])
        T = np.delete(T, np.s_[n_struct:n_struct + n_art], axis=1)
        tab = _Tableau(T, [tab.basis[r] for r in keep], tol)
        tab.pivots = 0
        m = len(keep)

    T = tab.T
    T[m] = 0.0
    T[m, :n] = c
    for r, col in enumerate(tab.basis):
        if T[m, col] != 0.0:
            T[m] -= T[m, col] * T[r]
    tab.run(n_struct, max_pivots)

    x_full = np.zeros(n_struct)
    for r, col in enumerate(tab.basis):
        x_full[col] = T[r, -1]
    x = np.clip(x_full[:n], 0.0, None)
    return SimplexResult(x, float(c @ x), tab.pivots)
