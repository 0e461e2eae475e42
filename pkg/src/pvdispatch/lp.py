"""Dense bounded-variable primal simplex.

Solves::

    minimize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                lb <= x <= ub

with a two-phase method on an explicit tableau. Nonbasic variables sit at
either bound, so box constraints never become rows. Dantzig pricing is used
until a run of degenerate pivots is seen, after which Bland's rule takes over
until progress resumes. The final basic solution is recomputed from the
original data with a direct solve to strip accumulated pivoting error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
DEGENERATE_RUN = 50

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class NumericalFailure(RuntimeError):
    """Pivoting could not make progress."""


@dataclass
class LpResult:
    status: str
    fun: float
    x: np.ndarray | None
    nit: int = 0

    @property
    def success(self) -> bool:
        return self.status == OPTIMAL


def _normalize_bounds(bounds, n):
    if bounds is None:
        return np.zeros(n), np.full(n, np.inf)
    if isinstance(bounds, tuple) and len(bounds) == 2 and np.ndim(bounds[0]) == 1:
        lb = np.asarray(bounds[0], dtype=float).copy()
        ub = np.asarray(bounds[1], dtype=float).copy()
    else:
        pairs = list(bounds)
        if len(pairs) == 2 and np.ndim(pairs[0]) == 0 and n != 2:
            pairs = [tuple(pairs)] * n
        lb = np.array([-np.inf if p[0] is None else p[0] for p in pairs], dtype=float)
        ub = np.array([np.inf if p[1] is None else p[1] for p in pairs], dtype=float)
    if lb.shape != (n,) or ub.shape != (n,):
        raise ValueError("bounds do not match the number of variables")
    return lb, ub


class _Tableau:
    """Working state for one simplex solve; not shareable across threads."""

    def __init__(self, A, b, upper, basis):
        m, n = A.shape
        self.T = A.copy()
        self.b = b.copy()
        self.upper = upper
        self.basis = np.array(basis, dtype=np.intp)
        self.at_upper = np.zeros(n, dtype=bool)
        self.is_basic = np.zeros(n, dtype=bool)
        self.is_basic[self.basis] = True
        self.xB = b.copy()
        self.nit = 0

    def reduced_costs(self, cost):
        return cost - cost[self.basis] @ self.T

    def run(self, cost, max_iter):
        T, upper = self.T, self.upper
        m, n = T.shape
        d = self.reduced_costs(cost)
        degenerate = 0
        while True:
            if self.nit >= max_iter:
                raise NumericalFailure(f"simplex exceeded {max_iter} iterations")
            movable = ~self.is_basic & (upper > 0)
            score = np.where(self.at_upper, d, -d)
            score[~movable] = 0.0
            bland = degenerate >= DEGENERATE_RUN
            if bland:
                cand = np.flatnonzero(score > OPT_TOL)
                if cand.size == 0:
                    return OPTIMAL
                j = int(cand[0])
            else:
                j = int(np.argmax(score))
                if score[j] <= OPT_TOL:
                    return OPTIMAL
            self.nit += 1

            direction = -1.0 if self.at_upper[j] else 1.0
            alpha = T[:, j] * direction
            theta = upper[j]
            leave = -1
            leave_to_upper = False

            ub_basic = upper[self.basis]
            dec = alpha > PIVOT_TOL
            inc = (alpha < -PIVOT_TOL) & np.isfinite(ub_basic)
            ratios = np.full(m, np.inf)
            ratios[dec] = np.maximum(self.xB[dec], 0.0) / alpha[dec]
            ratios[inc] = np.maximum(ub_basic[inc] - self.xB[inc], 0.0) / -alpha[inc]
            rmin = ratios.min() if m else np.inf
            if rmin < theta:
                ties = np.flatnonzero(ratios <= rmin + 1e-12)
                if bland:
                    r = int(ties[np.argmin(self.basis[ties])])
                else:
                    r = int(ties[np.argmax(np.abs(alpha[ties]))])
                theta = ratios[r]
                leave = r
                leave_to_upper = bool(inc[r])
            if not np.isfinite(theta):
                return UNBOUNDED

            degenerate = degenerate + 1 if theta <= 1e-12 else 0
            self.xB -= theta * alpha
            if leave < 0:
                self.at_upper[j] = not self.at_upper[j]
                continue

            entering_value = upper[j] - theta if self.at_upper[j] else theta
            r = leave
            piv = T[r, j]
            if abs(piv) < PIVOT_TOL:
                raise NumericalFailure(f"pivot element {piv:.3e} too small")
            old = int(self.basis[r])
            self.is_basic[old] = False
            self.at_upper[old] = leave_to_upper
            self.basis[r] = j
            self.is_basic[j] = True
            self.at_upper[j] = False
            self.xB[r] = entering_value

            row = T[r] / piv
            T -= np.outer(T[:, j], row)
            T[r] = row
            d -= d[j] * row
            # keep the entering column exact
            T[:, j] = 0.0
            T[r, j] = 1.0
            d[j] = 0.0


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None, max_iter=None,
             initial_basis=None) -> LpResult:
    """Minimize ``c @ x`` subject to linear constraints and variable bounds.

    ``bounds`` is either a sequence of ``(lo, hi)`` pairs (``None`` for
    infinite), a single pair applied to every variable, or a tuple of two
    arrays ``(lb, ub)``. The default is ``x >= 0``.

    ``initial_basis`` optionally names one starting basic column per row,
    indexing ``x`` followed by the slacks of the ``A_ub`` rows. It is used
    only when every variable has a finite lower bound and the basis is
    nonsingular and primal feasible; phase one is then skipped.

    Returns an :class:`LpResult` with status ``"optimal"``, ``"infeasible"``
    or ``"unbounded"``. Raises :class:`NumericalFailure` if the pivoting
    stalls.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if A_ub.shape != (b_ub.size, n) or A_eq.shape != (b_eq.size, n):
        raise ValueError("constraint dimensions do not match")
    lb, ub = _normalize_bounds(bounds, n)
    for arr in (c, A_ub, b_ub, A_eq, b_eq):
        if not np.all(np.isfinite(arr)):
            raise ValueError("LP data must be finite")
    if np.any(lb > ub):
        return LpResult(INFEASIBLE, np.nan, None)

    # Substitute x = shift + M @ y with y >= 0 (free variables are split).
    cols, shift, upper = [], np.zeros(n), []
    for i in range(n):
        lo, hi = lb[i], ub[i]
        if np.isfinite(lo):
            shift[i] = lo
            cols.append((i, 1.0))
            upper.append(hi - lo)
        elif np.isfinite(hi):
            shift[i] = hi
            cols.append((i, -1.0))
            upper.append(np.inf)
        else:
            cols.append((i, 1.0))
            upper.append(np.inf)
            cols.append((i, -1.0))
            upper.append(np.inf)
    ny = len(cols)
    M = np.zeros((n, ny))
    for k, (i, s) in enumerate(cols):
        M[i, k] = s

    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    A = np.zeros((m, ny + m_ub))
    A[:m_ub, :ny] = A_ub @ M
    A[m_ub:, :ny] = A_eq @ M
    A[:m_ub, ny:] = np.eye(m_ub)
    b = np.concatenate([b_ub - A_ub @ shift, b_eq - A_eq @ shift])
    upper = np.concatenate([np.array(upper, dtype=float), np.full(m_ub, np.inf)])
    cost = np.concatenate([M.T @ c, np.zeros(m_ub)])

    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    if initial_basis is not None and ny == n:
        tab = _crash(A, b, upper, cost, initial_basis)
        if tab is not None:
            if max_iter is None:
                max_iter = 50 * (m + A.shape[1]) + 1000
            return _finish(tab, A, b, upper, cost, shift, M, ny, c, lb, ub, max_iter)

    # Rows whose slack can start basic need no artificial variable.
    basis = np.full(m, -1, dtype=np.intp)
    for r in range(m_ub):
        if not neg[r]:
            basis[r] = ny + r
    art_rows = np.flatnonzero(basis < 0)
    n_core = A.shape[1]
    n_art = art_rows.size
    if n_art:
        art = np.zeros((m, n_art))
        art[art_rows, np.arange(n_art)] = 1.0
        A = np.hstack([A, art])
        upper = np.concatenate([upper, np.full(n_art, np.inf)])
        basis[art_rows] = n_core + np.arange(n_art)
    ntot = A.shape[1]
    if max_iter is None:
        max_iter = 50 * (m + ntot) + 1000

    tab = _Tableau(A, b, upper, basis)
    if n_art:
        phase1 = np.zeros(ntot)
        phase1[n_core:] = 1.0
        status = tab.run(phase1, max_iter)
        if status != OPTIMAL:
            raise NumericalFailure("phase one did not terminate optimally")
        infeas = float(np.sum(np.where(tab.basis >= n_core, tab.xB, 0.0)))
        if infeas > FEAS_TOL * max(1.0, float(np.abs(b).max(initial=0.0))):
            return LpResult(INFEASIBLE, np.nan, None, tab.nit)
        # Artificials are pinned at zero from here on.
        upper[n_core:] = 0.0
        tab.at_upper[n_core:] = False
    cost_full = np.concatenate([cost, np.zeros(n_art)])
    return _finish(tab, A, b, upper, cost_full, shift, M, ny, c, lb, ub, max_iter)


def _finish(tab, A, b, upper, cost, shift, M, ny, c, lb, ub, max_iter) -> LpResult:
    status = tab.run(cost, max_iter)
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, -np.inf, None, tab.nit)
    y = _refine(A, b, upper, tab)
    x = shift + M @ y[:ny]
    x = np.clip(x, lb, ub)
    return LpResult(OPTIMAL, float(c @ x), x, tab.nit)


def _crash(A, b, upper, cost, basis):
    """Tableau for a user-supplied starting basis, or None if unusable."""
    basis = np.asarray(basis, dtype=np.intp)
    m = A.shape[0]
    if basis.shape != (m,) or len(set(basis.tolist())) != m:
        return None
    if basis.size and (basis.min() < 0 or basis.max() >= A.shape[1]):
        return None
    try:
        T = np.linalg.solve(A[:, basis], A)
        xB = np.linalg.solve(A[:, basis], b)
    except np.linalg.LinAlgError:
        return None
    if np.any(xB < -FEAS_TOL) or np.any(xB > upper[basis] + FEAS_TOL):
        return None
    tab = _Tableau(A, b, upper, basis)
    tab.T = T
    tab.xB = np.clip(xB, 0.0, upper[basis])
    return tab


def _refine(A, b, upper, tab):
    """Recompute the basic solution from the original constraint matrix."""
    n = A.shape[1]
    y = np.zeros(n)
    at_up = tab.at_upper & ~tab.is_basic
    y[at_up] = upper[at_up]
    basis = tab.basis
    if basis.size:
        rhs = b - A[:, ~tab.is_basic] @ y[~tab.is_basic]
        try:
            yB = np.linalg.solve(A[:, basis], rhs)
        except np.linalg.LinAlgError:
            yB = tab.xB
        if not np.all(np.isfinite(yB)):
            yB = tab.xB
        y[basis] = np.clip(yB, 0.0, upper[basis])
    return y
