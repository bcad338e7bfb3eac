"""Chernoff-type stopping: the test statistic, both thresholds, and the
recommendation rule. Logarithms are natural throughout."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import UnvisitedArm

__all__ = [
    "StoppingConfig",
    "z_statistic",
    "f_eval",
    "f_inverse",
    "threshold",
    "recommend",
    "should_stop",
]


def z_statistic(counts: np.ndarray, means_hat: np.ndarray) -> float:
    """Min over (objective, sub-optimal arm) of the pairwise statistic
    N_i * N_b * gap^2 / (2 (N_i + N_b)), with b the lowest-index empirical
    argmax of the objective. Every arm must have been pulled at least once."""
    counts = np.asarray(counts, dtype=np.float64)
    if np.any(counts < 1):
        raise UnvisitedArm("every arm needs at least one pull before testing")
    means_hat = np.asarray(means_hat, dtype=np.float64)
    K, M = means_hat.shape
    best = np.argmax(means_hat, axis=0)
    z = np.inf
    for m in range(M):
        b = best[m]
        gap = means_hat[b, m] - means_hat[:, m]
        stat = counts * counts[b] * gap * gap / (2.0 * (counts + counts[b]))
        stat[b] = np.inf
        z = min(z, float(np.min(stat)))
    return z


def f_eval(x: float, mk: int) -> float:
    """Sum of the first `mk` Poisson(x) probabilities, by the multiplicative
    term recurrence (each term is at most 1, so no overflow at any mk)."""
    if x <= 0:
        raise ValueError("x must be > 0")
    term = math.exp(-x)
    total = term
    for i in range(1, mk):
        term *= x / i
        total += term
    return total if total < 1.0 else 1.0  # guard summation drift past 1


def f_inverse(delta: float, mk: int) -> float:
    """The unique x with f_eval(x, mk) = delta, by bracketing plus bisection.

    f decreases from 1 (x -> 0) to 0 (x -> inf), so a bracket always exists.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    lo = 0.0
    hi = 1.0
    while f_eval(hi, mk) > delta:
        lo = hi
        hi *= 2.0
    while hi - lo > 2e-13:
        mid = 0.5 * (lo + hi)
        if f_eval(mid, mk) > delta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


_f_inverse_cached = lru_cache(maxsize=None)(f_inverse)


@dataclass(frozen=True)
class StoppingConfig:
    mode: str          # "theoretical" | "practical"
    delta: float
    mk: int            # product of objective and arm counts

    def __post_init__(self):
        if self.mode not in ("theoretical", "practical"):
            raise ValueError(f"unknown threshold mode {self.mode!r}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.mk < 2:
            raise ValueError("mk must be >= 2")


def threshold(t: int, cfg: StoppingConfig) -> float:
    """Stopping threshold at step t: mk * log(t^2 + t) + f^{-1}(delta) in
    theoretical mode, log((1 + log t) / delta) in practical mode."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if cfg.mode == "theoretical":
        return cfg.mk * math.log(t * t + t) + _f_inverse_cached(cfg.delta, cfg.mk)
    return math.log((1.0 + math.log(t)) / cfg.delta)


def should_stop(z: float, t: int, cfg: StoppingConfig) -> bool:
    """Strict comparison: stop only when the statistic exceeds the threshold."""
    return z > threshold(t, cfg)


def recommend(means_hat: np.ndarray) -> tuple[int, ...]:
    """Per-objective lowest-index empirical argmax, 1-based."""
    means_hat = np.asarray(means_hat, dtype=np.float64)
    return tuple(int(b) + 1 for b in np.argmax(means_hat, axis=0))
