"""Surrogate-proportion LP: maximize the linearized objective over the
truncated simplex, exactly, via the dense simplex solver.

The epigraph form uses variables (s_1..s_K, t): maximize t subject to
sum(s) = 1, s_i >= eta/(K(1+eta)), and one constraint
t <= pair value + <pair gradient, s - w> per (sub-optimal arm, objective)
pair. The epigraph variable is conceptually free; it is given a computed
finite lower bound so the standard-form solver applies.
"""

from __future__ import annotations

import numpy as np

from .errors import LPInfeasible
from .instances import Instance
from .objective import PairStructure, eta_floor, pair_structure
from .simplex import LinearProgram, _solve_core

__all__ = ["build_surrogate_lp", "surrogate_proportion", "max_linearized"]


def _lp_arrays(pairs: PairStructure, w: np.ndarray, floor: float):
    """(objective, A_eq, b_eq, A_ub, b_ub, lower_bounds) of the epigraph LP."""
    K = pairs.K
    P = pairs.n_pairs
    gi, gb, base = pairs.linearize(w)

    A = np.zeros((P, K + 1))
    rows = np.arange(P)
    A[rows, pairs.sub] = -gi
    A[rows, pairs.best] = -gb
    A[:, K] = 1.0

    # Finite lower bound for the epigraph variable, strictly below any optimum
    # and below every row value at the floor corner (keeps phase 1 trivial).
    at_corner = float(np.min(base + (gi + gb) * floor))
    at_uniform = float(np.min(base + (gi + gb) / K))
    t_lb = min(at_corner, at_uniform) - 1.0

    obj = np.zeros(K + 1)
    obj[K] = 1.0
    eq_row = np.ones((1, K + 1))
    eq_row[0, K] = 0.0
    lower = np.full(K + 1, floor)
    lower[K] = t_lb
    return obj, eq_row, np.ones(1), A, base, lower


def build_surrogate_lp(inst: Instance, w: np.ndarray, eta: float) -> LinearProgram:
    """Epigraph LP whose optimum is the surrogate proportion at w."""
    if eta <= 0:
        raise ValueError("eta must be > 0")
    pairs = pair_structure(inst)
    obj, A_eq, b_eq, A_ub, b_ub, lower = _lp_arrays(
        pairs, np.asarray(w, dtype=np.float64), eta_floor(inst.K, eta))
    return LinearProgram(objective=obj, eq_constraints=(A_eq, b_eq),
                         ineq_constraints=(A_ub, b_ub), lower_bounds=lower)


def max_linearized(pairs: PairStructure, w: np.ndarray, floor: float) -> tuple[np.ndarray, float]:
    """argmax over {s: sum s = 1, s >= floor} of the linearized objective at w.

    floor = 0 optimizes over the full simplex. Returns (s, objective value).
    """
    obj, A_eq, b_eq, A_ub, b_ub, lower = _lp_arrays(pairs, w, floor)
    x, _, status = _solve_core(obj, A_eq, b_eq, A_ub, b_ub, lower)
    if status != "optimal":
        raise LPInfeasible(f"surrogate LP returned status {status!r}")
    K = pairs.K
    s = np.maximum(x[:K], floor)
    if abs(float(s.sum()) - 1.0) > 1e-9:
        raise LPInfeasible(f"surrogate LP output sums to {s.sum()!r}")
    return s, float(x[K])


def surrogate_proportion(inst: Instance, w: np.ndarray, eta: float) -> np.ndarray:
    """The surrogate proportion: exact maximizer of the linearization over the
    eta-truncated simplex. Every component is >= eta/(K(1+eta))."""
    if eta <= 0:
        raise ValueError("eta must be > 0")
    pairs = pair_structure(inst)
    w = np.asarray(w, dtype=np.float64)
    floor = eta_floor(inst.K, eta)
    s, value = max_linearized(pairs, w, floor)
    if abs(pairs.h_value(w, s) - value) > 1e-9:
        raise LPInfeasible("surrogate LP value disagrees with direct evaluation")
    return s
