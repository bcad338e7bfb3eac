"""Solvers for the max-min allocation problem: the iterate-and-average scheme
(one exact LP per iteration, iterates averaged) and a brute-force grid oracle
for cross-checking on small instances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooManyArms
from .instances import Instance
from .objective import PairStructure, eta_floor, pair_structure
from .surrogate import max_linearized

__all__ = [
    "AllocationResult",
    "optimize_allocation",
    "c_star_oracle_grid",
    "simplex_grid",
]


@dataclass
class AllocationResult:
    weight: np.ndarray
    value: float
    iterations: int


def optimize_allocation(inst: Instance, eta: float = None, iters: int = 1000,
                        init: np.ndarray = None, tie_mode: str = "lowest_index",
                        ) -> AllocationResult:
    """Iterate-and-average maximization of the min-pair objective.

    Starting from `init` (uniform by default), each iteration maximizes the
    linearization at the current weight over the simplex (eta absent) or its
    eta-truncation, and the returned weight is the running average of the
    maximizers. With eta set, the value converges to the best objective
    attainable on the truncated simplex.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    pairs = pair_structure(inst, tie_mode)
    floor = 0.0 if eta is None else eta_floor(inst.K, eta)
    uniform = np.full(inst.K, 1.0 / inst.K)
    w = uniform if init is None else np.asarray(init, dtype=np.float64)
    acc = np.zeros(inst.K)
    for k in range(1, iters + 1):
        w_eval = w
        if float((w[pairs.sub] + w[pairs.best]).min()) <= 0.0:
            # the running average can sit on a face where some pair has zero
            # combined mass and no gradient; linearize a hair inside instead
            w_eval = (1.0 - 1e-12) * w + 1e-12 * uniform
        s, _ = max_linearized(pairs, w_eval, floor)
        acc += s
        w = acc / k
    return AllocationResult(weight=w, value=pairs.g_min(w), iterations=iters)


def _composition_blocks(n: int, K: int):
    """Yield arrays of all length-K compositions of n, in lexicographic order."""
    if K == 1:
        yield np.array([[n]], dtype=np.int64)
        return
    if K == 2:
        i = np.arange(n + 1, dtype=np.int64)
        yield np.column_stack([i, n - i])
        return
    if K == 3:
        parts = []
        for i in range(n + 1):
            j = np.arange(n - i + 1, dtype=np.int64)
            parts.append(np.column_stack([np.full(j.size, i, dtype=np.int64), j, n - i - j]))
        yield np.vstack(parts)
        return
    # K == 4: stream one leading value at a time to bound memory.
    for i in range(n + 1):
        for block in _composition_blocks(n - i, 3):
            lead = np.full((block.shape[0], 1), i, dtype=np.int64)
            yield np.hstack([lead, block])


def simplex_grid(K: int, resolution: int, floor: float = 0.0) -> np.ndarray:
    """All weight vectors with coordinates that are multiples of 1/resolution,
    each coordinate >= floor. Small K only; used by tests and the grid oracle."""
    if K > 4:
        raise TooManyArms(f"grid enumeration supports K <= 4, got K={K}")
    m0 = int(np.ceil(floor * resolution - 1e-9)) if floor > 0 else 0
    rem = resolution - K * m0
    if rem < 0:
        raise ValueError("resolution too coarse for the requested floor")
    blocks = [blk + m0 for blk in _composition_blocks(rem, K)]
    return np.vstack(blocks) / resolution


def _g_many(pairs: PairStructure, W: np.ndarray) -> np.ndarray:
    wi = W[:, pairs.sub]
    wb = W[:, pairs.best]
    tot = wi + wb
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = pairs.coeff[None, :] * wi * wb / tot
    vals[tot == 0.0] = 0.0
    return np.min(vals, axis=1)


def c_star_oracle_grid(inst: Instance, eta: float = 0.0, resolution: int = 1000,
                       tie_mode: str = "lowest_index") -> AllocationResult:
    """Exhaustive grid maximization of the min-pair objective; independent of
    the LP route. K <= 4 keeps the enumeration tractable."""
    if inst.K > 4:
        raise TooManyArms(f"grid oracle supports K <= 4, got K={inst.K}")
    pairs = pair_structure(inst, tie_mode)
    m0 = 0
    if eta > 0:
        m0 = int(np.ceil(eta_floor(inst.K, eta) * resolution - 1e-9))
    rem = resolution - inst.K * m0
    if rem < 0:
        raise ValueError("resolution too coarse for the eta floor")
    best_val = -np.inf
    best_w = None
    count = 0
    for block in _composition_blocks(rem, inst.K):
        W = (block + m0) / resolution
        vals = _g_many(pairs, W)
        k = int(np.argmax(vals))
        count += W.shape[0]
        if vals[k] > best_val:
            best_val = float(vals[k])
            best_w = W[k].copy()
    return AllocationResult(weight=best_w, value=best_val, iterations=count)
