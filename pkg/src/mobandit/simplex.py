"""Dense two-phase simplex solver with Bland's anti-cycling rule.

Problem sizes in this package are tiny (tens of rows) but solves number in
the millions per experiment, so the pivot loop is JIT-compiled when numba is
available (a pure-numpy fallback implements the identical pivot sequence).
Identical inputs produce bit-identical solutions, and the returned point is
an exact vertex of the feasible polytope: the final basic system is re-solved
once against the original constraint data for precision.

Conventions:
  maximize objective . x
  subject to  a . x  = b   for (a, b) in eq_constraints
              a . x <= b   for (a, b) in ineq_constraints
              x >= lower_bounds   (all finite)

Bland's rule: the entering column is the lowest-index one with a positive
reduced cost; among minimum-ratio rows the leaving variable is the basic
variable with the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap if not (args and callable(args[0])) else args[0]

__all__ = ["LinearProgram", "LPSolution", "solve_lp"]

_TOL_COST = 1e-9     # reduced-cost threshold for entering columns
_TOL_PIVOT = 1e-11   # smallest admissible pivot element
_MAX_PIVOTS = 100_000

_OPTIMAL, _INFEASIBLE, _UNBOUNDED, _STALLED = 0, 1, 2, 3


@dataclass
class LinearProgram:
    """Constraint lists may be sequences of (coefficients, rhs) pairs or a
    pre-stacked (matrix, rhs-vector) tuple; both describe the same rows."""

    objective: np.ndarray
    eq_constraints: object = ()
    ineq_constraints: object = ()
    lower_bounds: np.ndarray = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=np.float64)
        if self.lower_bounds is None:
            self.lower_bounds = np.zeros(self.objective.size)
        self.lower_bounds = np.asarray(self.lower_bounds, dtype=np.float64)
        if self.lower_bounds.shape != self.objective.shape:
            raise ValueError("lower_bounds must match objective length")
        if not np.all(np.isfinite(self.lower_bounds)):
            raise ValueError("lower_bounds must be finite")


@dataclass
class LPSolution:
    x: np.ndarray
    value: float
    status: str  # "optimal" | "infeasible" | "unbounded"


def _stack(constraints, n: int) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(constraints, tuple) and len(constraints) == 2 \
            and not isinstance(constraints[0], (list, tuple)):
        A = np.asarray(constraints[0], dtype=np.float64)
        b = np.asarray(constraints[1], dtype=np.float64)
        if A.ndim != 2 or A.shape[1] != n or A.shape[0] != b.size:
            raise ValueError("bad pre-stacked constraint arrays")
        return A, b
    rows = list(constraints)
    if not rows:
        return np.zeros((0, n)), np.zeros(0)
    A = np.stack([np.asarray(a, dtype=np.float64) for a, _ in rows])
    if A.shape[1] != n:
        raise ValueError("constraint row length does not match objective")
    b = np.array([float(b) for _, b in rows])
    return A, b


@njit(cache=True)
def _nb_pivot(T, r, j, nrows, width):
    piv = T[r, j]
    for jj in range(width):
        T[r, jj] /= piv
    for rr in range(nrows):
        if rr != r:
            f = T[rr, j]
            if f != 0.0:
                for jj in range(width):
                    T[rr, jj] -= f * T[r, jj]
                T[rr, j] = 0.0


@njit(cache=True)
def _nb_bland(T, basis, n_enter, m_active, obj_row, width):
    rhs = width - 1
    for _ in range(_MAX_PIVOTS):
        j = -1
        for jj in range(n_enter):
            if T[obj_row, jj] > _TOL_COST:
                j = jj
                break
        if j < 0:
            return _OPTIMAL
        rmin = np.inf
        found = False
        for r in range(m_active):
            a = T[r, j]
            if a > _TOL_PIVOT:
                ratio = T[r, rhs] / a
                if ratio < rmin:
                    rmin = ratio
                    found = True
        if not found:
            return _UNBOUNDED
        tie = rmin + 1e-12 * (1.0 + abs(rmin))
        rpick = -1
        bbest = 0
        for r in range(m_active):
            a = T[r, j]
            if a > _TOL_PIVOT and T[r, rhs] / a <= tie:
                if rpick < 0 or basis[r] < bbest:
                    rpick = r
                    bbest = basis[r]
        _nb_pivot(T, rpick, j, obj_row + 1, width)
        basis[rpick] = j
    return _STALLED


@njit(cache=True)
def _nb_kernel(T, basis, row_ids, A0, b0, c, n, mu, na, xout):
    """Run both phases in place; fill xout with the polished basic solution."""
    m = basis.shape[0]
    ncols = n + mu + na
    width = ncols + 1
    obj_row = m
    mm = m

    if na > 0:
        # Phase 1: maximize minus the sum of artificials.
        for jj in range(width):
            T[obj_row, jj] = 0.0
        for jj in range(n + mu, ncols):
            T[obj_row, jj] = -1.0
        for r in range(m):
            if basis[r] >= n + mu:
                for jj in range(width):
                    T[obj_row, jj] += T[r, jj]
        st = _nb_bland(T, basis, ncols, m, obj_row, width)
        if st != _OPTIMAL:
            return st
        infeas = 0.0
        scale = 1.0
        for r in range(m):
            if abs(b0[r]) > scale:
                scale = abs(b0[r])
            if basis[r] >= n + mu:
                infeas += T[r, ncols]
        if infeas > 1e-8 * scale:
            return _INFEASIBLE
        # Drive zero-valued artificials out of the basis where possible.
        for r in range(m):
            if basis[r] >= n + mu:
                jj = -1
                for j in range(n + mu):
                    if abs(T[r, j]) > 1e-9:
                        jj = j
                        break
                if jj >= 0:
                    _nb_pivot(T, r, jj, obj_row + 1, width)
                    basis[r] = jj
        # Swap redundant rows (still artificial-basic) below the active block.
        r = 0
        while r < mm:
            if basis[r] >= n + mu:
                if r != mm - 1:
                    for jj in range(width):
                        tmp = T[r, jj]
                        T[r, jj] = T[mm - 1, jj]
                        T[mm - 1, jj] = tmp
                    bt = basis[r]
                    basis[r] = basis[mm - 1]
                    basis[mm - 1] = bt
                    it = row_ids[r]
                    row_ids[r] = row_ids[mm - 1]
                    row_ids[mm - 1] = it
                mm -= 1
            else:
                r += 1

    # Phase 2: the real objective; artificial columns are barred from entering.
    for jj in range(width):
        T[obj_row, jj] = 0.0
    for jj in range(n):
        T[obj_row, jj] = c[jj]
    for r in range(mm):
        bv = basis[r]
        if bv < n and c[bv] != 0.0:
            f = c[bv]
            for jj in range(width):
                T[obj_row, jj] -= f * T[r, jj]
    st = _nb_bland(T, basis, n + mu, mm, obj_row, width)
    if st != _OPTIMAL:
        return st

    # Polish: solve the final basic system against the original data.
    B = np.empty((mm, mm + 1))
    for r in range(mm):
        orig = row_ids[r]
        for cidx in range(mm):
            B[r, cidx] = A0[orig, basis[cidx]]
        B[r, mm] = b0[orig]
    ok = True
    for col in range(mm):
        p = col
        big = abs(B[col, col])
        for r in range(col + 1, mm):
            if abs(B[r, col]) > big:
                big = abs(B[r, col])
                p = r
        if big < 1e-13:
            ok = False
            break
        if p != col:
            for jj in range(mm + 1):
                tmp = B[col, jj]
                B[col, jj] = B[p, jj]
                B[p, jj] = tmp
        for r in range(col + 1, mm):
            f = B[r, col] / B[col, col]
            if f != 0.0:
                for jj in range(col, mm + 1):
                    B[r, jj] -= f * B[col, jj]
    for jj in range(xout.shape[0]):
        xout[jj] = 0.0
    if ok:
        for col in range(mm - 1, -1, -1):
            acc = B[col, mm]
            for jj in range(col + 1, mm):
                acc -= B[col, jj] * xout[basis[jj]]
            xout[basis[col]] = acc / B[col, col]
    else:  # fall back to the tableau values
        for r in range(mm):
            xout[basis[r]] = T[r, ncols]
    return _OPTIMAL


def _solve_core(c: np.ndarray, A_eq: np.ndarray, b_eq: np.ndarray,
                A_ub: np.ndarray, b_ub: np.ndarray, lb: np.ndarray,
                ) -> tuple[np.ndarray, float, str]:
    n = c.size
    # Shift x = y + lb so that y >= 0.
    be = b_eq - A_eq @ lb if b_eq.size else b_eq
    bu = b_ub - A_ub @ lb if b_ub.size else b_ub
    me, mu = be.size, bu.size
    m = me + mu

    # Standard-form columns: y (n) | slacks (mu) | artificials (as needed).
    neg_ub = np.flatnonzero(bu < 0.0)
    na = me + neg_ub.size
    ncols = n + mu + na
    T = np.zeros((m + 1, ncols + 1))
    basis = np.empty(m, dtype=np.int64)
    if me:
        sign = np.where(be < 0.0, -1.0, 1.0)
        T[:me, :n] = A_eq * sign[:, None]
        T[:me, -1] = be * sign
    if mu:
        usign = np.where(bu < 0.0, -1.0, 1.0)
        T[me:m, :n] = A_ub * usign[:, None]
        T[me:m, -1] = bu * usign
        rows = np.arange(me, m)
        T[rows, n + np.arange(mu)] = usign
        basis[me:] = n + np.arange(mu)
    art_rows = np.concatenate([np.arange(me), me + neg_ub]).astype(np.int64)
    for k in range(na):
        r = art_rows[k]
        T[r, n + mu + k] = 1.0
        basis[r] = n + mu + k

    A0 = T[:m, :ncols].copy()
    b0 = T[:m, -1].copy()
    row_ids = np.arange(m, dtype=np.int64)
    xout = np.zeros(ncols)
    status = _nb_kernel(T, basis, row_ids, A0, b0,
                        np.ascontiguousarray(c, dtype=np.float64),
                        n, mu, na, xout)
    if status == _INFEASIBLE:
        return np.full(n, np.nan), np.nan, "infeasible"
    if status == _UNBOUNDED:
        return np.full(n, np.nan), np.nan, "unbounded"
    if status != _OPTIMAL:
        raise RuntimeError("simplex did not terminate (pivot cap hit)")
    x = xout[:n] + lb
    return x, float(c @ x), "optimal"


def solve_lp(lp: LinearProgram) -> LPSolution:
    n = lp.objective.size
    A_eq, b_eq = _stack(lp.eq_constraints, n)
    A_ub, b_ub = _stack(lp.ineq_constraints, n)
    x, value, status = _solve_core(lp.objective, A_eq, b_eq, A_ub, b_ub, lp.lower_bounds)
    return LPSolution(x=x, value=value, status=status)
