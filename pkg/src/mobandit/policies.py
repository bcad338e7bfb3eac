"""Arm-selection policies.

MoBaiState implements the buffer-tracked surrogate sampler: each step it
maximizes the linearized objective over the eta-truncated simplex (one exact
LP), adds the maximizer to a buffer, and pulls the arm with the largest
buffered mass. The empirical-means snapshot feeding the linearization is
refreshed only at power-of-two steps to keep the surrogate stable.

BaselinePolicy is the multi-objective D-tracking baseline: forced exploration
below sqrt(t/K), otherwise it re-estimates the oracle weight with a fixed
iteration budget and pulls the most under-pulled arm relative to it.

MO-SE runs successive elimination once per objective, resampling each round.

Policies only select and record; stopping is evaluated by the caller so the
stopping rule lives in one place.
"""

from __future__ import annotations

import time

import numpy as np

from .errors import ArmMismatch, CapExceeded, NotInitialized
from .instances import Instance
from .objective import eta_floor, pair_structure
from .allocation import optimize_allocation
from .surrogate import max_linearized

__all__ = ["MoBaiState", "BaselinePolicy", "dtrack_subroutine", "mose_run"]


class MoBaiState:
    """Per-trial mutable state of the surrogate-proportion policy."""

    def __init__(self, K: int, M: int, eta: float):
        if eta <= 0:
            raise ValueError("eta must be > 0")
        self.K = K
        self.M = M
        self.eta = eta
        self.t = 0
        self.counts = np.zeros(K, dtype=np.int64)
        self.reward_sums = np.zeros((K, M))
        self.buffer = np.zeros(K)
        self.snapshot = None          # Instance frozen at the last refresh
        self.pending_s = None
        self.opt_ns = 0               # cumulative LP wall time
        self._floor = eta_floor(K, eta)
        self._snapshot_l = 0
        self._pairs = None
        self._pending_arm = 0

    def means_hat(self) -> np.ndarray:
        return self.reward_sums / self.counts[:, None]

    def empirical_proportion(self) -> np.ndarray:
        return (self.counts + self.buffer) / self.t

    def select_arm(self) -> int:
        """Arm to pull at step t+1 (1-based). Valid once every arm has one pull."""
        if self.t < self.K:
            raise NotInitialized(f"only {self.t} of {self.K} arms pulled so far")
        step = self.t + 1
        l = 1 << (step.bit_length() - 1)  # largest power of two <= step
        if l != self._snapshot_l:
            self._snapshot_l = l
            self.snapshot = Instance(self.means_hat())
            self._pairs = pair_structure(self.snapshot, "lowest_index")
        w = (self.counts + self.buffer) / self.t
        t0 = time.perf_counter_ns()
        s, _ = max_linearized(self._pairs, w, self._floor)
        self.opt_ns += time.perf_counter_ns() - t0
        self.pending_s = s
        self._pending_arm = int(np.argmax(self.buffer + s)) + 1
        return self._pending_arm

    def observe(self, arm: int, reward: np.ndarray) -> None:
        """Record the reward of the arm just selected and roll the buffer."""
        if self.t < self.K:
            # initialization phase: arms 1..K pulled once, in order
            if arm != self.t + 1:
                raise ArmMismatch(f"initialization expects arm {self.t + 1}, got {arm}")
            self.counts[arm - 1] += 1
            self.reward_sums[arm - 1] += reward
            self.t += 1
            return
        if self.pending_s is None or arm != self._pending_arm:
            raise ArmMismatch(f"arm {arm} was not the last selected arm")
        i = arm - 1
        self.buffer += self.pending_s
        self.buffer[i] -= 1.0
        self.counts[i] += 1
        self.reward_sums[i] += reward
        self.t += 1
        self.pending_s = None

    def check_invariants(self, tol: float = 1e-9) -> None:
        """Raise if a buffer invariant fails; violations surface, never clamp."""
        if abs(float(self.buffer.sum())) > tol:
            raise AssertionError(f"buffer sum {self.buffer.sum()!r} not 0")
        if float(np.max(np.abs(self.buffer))) > 1.0 + tol:
            raise AssertionError(f"buffer magnitude exceeds 1: {self.buffer!r}")
        if self.t > self.K:
            w = self.empirical_proportion()
            if float(w.min()) < self._floor - 1e-12:
                raise AssertionError(f"empirical proportion leaves the eta region: {w!r}")


class MoBaiPolicy:
    """Harness-facing wrapper: serves the initialization pulls, then delegates."""

    def __init__(self, K: int, M: int, eta: float):
        self.state = MoBaiState(K, M, eta)

    @property
    def t(self):
        return self.state.t

    @property
    def counts(self):
        return self.state.counts

    @property
    def opt_ns(self):
        return self.state.opt_ns

    def means_hat(self):
        return self.state.means_hat()

    def select(self) -> int:
        if self.state.t < self.state.K:
            return self.state.t + 1
        return self.state.select_arm()

    def observe(self, arm: int, reward: np.ndarray) -> None:
        self.state.observe(arm, reward)


def dtrack_subroutine(inst_hat: Instance, iter_steps: int, init=None) -> np.ndarray:
    """Fixed-budget oracle-weight estimate: iterate-and-average over the full simplex."""
    return optimize_allocation(inst_hat, eta=None, iters=iter_steps, init=init).weight


class BaselinePolicy:
    """D-tracking adapted to per-objective best arms, with a fixed LP budget
    per tracking step. Forced-exploration ties are broken by a seeded uniform
    draw; tracking ties go to the lowest index."""

    def __init__(self, K: int, M: int, iter_steps: int, warm_start: bool,
                 rng: np.random.Generator):
        if iter_steps < 1:
            raise ValueError("iter_steps must be >= 1")
        self.K = K
        self.M = M
        self.iter_steps = iter_steps
        self.warm_start = warm_start
        self.rng = rng
        self.t = 0
        self.counts = np.zeros(K, dtype=np.int64)
        self.reward_sums = np.zeros((K, M))
        self.last_weight = None
        self.opt_ns = 0

    def means_hat(self) -> np.ndarray:
        return self.reward_sums / self.counts[:, None]

    def select(self) -> int:
        if self.t < self.K:
            return self.t + 1
        if float(self.counts.min()) < np.sqrt(self.t / self.K):
            cands = np.flatnonzero(self.counts == self.counts.min())
            if cands.size == 1:
                return int(cands[0]) + 1
            return int(cands[self.rng.integers(cands.size)]) + 1
        init = self.last_weight if self.warm_start else None
        t0 = time.perf_counter_ns()
        w = dtrack_subroutine(Instance(self.means_hat()), self.iter_steps, init)
        self.opt_ns += time.perf_counter_ns() - t0
        self.last_weight = w
        # Pull the arm lagging its target share the most (D-tracking step).
        scores = (self.t + 1) * w - self.counts
        return int(np.argmax(scores)) + 1

    def observe(self, arm: int, reward: np.ndarray) -> None:
        if self.t < self.K and arm != self.t + 1:
            raise ArmMismatch(f"initialization expects arm {self.t + 1}, got {arm}")
        self.counts[arm - 1] += 1
        self.reward_sums[arm - 1] += reward
        self.t += 1


def mose_run(inst: Instance, delta: float, env, pull_cap: int,
             ) -> tuple[tuple[int, ...], int]:
    """Successive elimination, one round per objective, no sample reuse
    across rounds. `env(arm)` returns the M-dimensional reward of a pull.

    Returns (survivor per objective, total pulls). Raises CapExceeded when
    the pull budget runs out mid-round.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    K, M = inst.K, inst.M
    t = 0
    survivors = []
    for m in range(M):
        active = list(range(K))
        sums = np.zeros(K)
        sweeps = 0  # every active arm holds exactly this many samples
        while len(active) > 1:
            for i in active:
                sums[i] += env(i + 1)[m]
            sweeps += 1
            t += len(active)
            if t > pull_cap:
                raise CapExceeded(t, pull_cap)
            # per-arm confidence radius: the divisor is the per-arm sample
            # count, not the total pull count, which is what makes the
            # elimination test valid for a mean of `sweeps` samples
            alpha = np.sqrt(2.0 * np.log(4.0 * M * K * t * t / delta) / sweeps)
            mu = sums[active] / sweeps
            top = float(mu.max())
            active = [i for i, mu_i in zip(active, mu) if top - mu_i <= 2.0 * alpha]
        survivors.append(active[0] + 1)
    return tuple(survivors), t
