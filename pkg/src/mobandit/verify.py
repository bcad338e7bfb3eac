"""Self-contained verification suite: every check compares a computed value
against an independent route (finite differences, grid enumeration, direct
inversion, or the plug-in identity). Run via `mobandit verify`."""

from __future__ import annotations

import numpy as np

from .allocation import simplex_grid
from .instances import Instance, gen_synthetic
from .objective import eta_floor, g, g_term, grad_g_term, pair_structure
from .policies import MoBaiPolicy
from .simulate import sample_rewards
from .stopping import f_eval, f_inverse, z_statistic
from .surrogate import max_linearized

__all__ = ["run_verification"]


def _check_gradient_fd(report) -> bool:
    rng = np.random.default_rng(20240901)
    worst = 0.0
    for _ in range(20):
        K = int(rng.integers(2, 6))
        M = int(rng.integers(1, 4))
        inst = Instance(rng.normal(0.0, 1.0, size=(K, M)))
        floor = eta_floor(K, 0.1)
        w = floor + (1.0 - K * floor) * rng.dirichlet(np.ones(K))
        pairs = pair_structure(inst)
        for p in rng.integers(0, pairs.n_pairs, size=3):
            i = int(pairs.sub[p]) + 1
            m = int(p) // (K - 1) + 1  # pairs are objective-major
            grad = grad_g_term(inst, w, i, m)
            for j in range(K):
                e = np.zeros(K)
                e[j] = 1e-6
                fd = (g_term(inst, w + e, i, m) - g_term(inst, w - e, i, m)) / 2e-6
                rel = abs(fd - grad[j]) / max(abs(grad[j]), 1e-12)
                worst = max(worst, rel)
    ok = worst < 1e-6
    report("gradient vs central finite differences", ok, f"worst rel err {worst:.3g}")
    return ok


def _check_lp_vs_grid(report) -> bool:
    rng = np.random.default_rng(20240902)
    ok = True
    worst_gap = 0.0
    for _ in range(10):
        K = int(rng.integers(2, 4))
        M = int(rng.integers(1, 3))
        inst = Instance(rng.normal(0.0, 1.0, size=(K, M)))
        eta = float(rng.uniform(0.05, 1.0))
        floor = eta_floor(K, eta)
        w = floor + (1.0 - K * floor) * rng.dirichlet(np.ones(K))
        pairs = pair_structure(inst)
        _, value = max_linearized(pairs, w, floor)
        grid = simplex_grid(K, 400, floor)
        hvals = pairs.h_many(w, grid)
        gi, gb = pairs.grad_coeffs(w)
        grad_inf = float(np.max(np.maximum(gi, gb)))
        hi = float(hvals.max())
        if value < hi - 1e-9 or value > hi + (1.0 / 400) * grad_inf + 1e-9:
            ok = False
        worst_gap = max(worst_gap, abs(value - hi))
    report("surrogate LP vs grid enumeration", ok, f"worst |lp - grid| {worst_gap:.3g}")
    return ok


def _check_f_roundtrip(report) -> bool:
    worst = 0.0
    for delta in (0.3, 0.1, 0.01, 1e-6):
        for mk in (2, 10, 200):
            x = f_inverse(delta, mk)
            worst = max(worst, abs(f_eval(x, mk) - delta))
    ok = worst <= 1e-10
    report("f roundtrip f(f_inverse(delta)) = delta", ok, f"worst abs err {worst:.3g}")
    return ok


def _check_z_identity(report) -> bool:
    inst = gen_synthetic(4, 2, seed=7)
    rng = np.random.default_rng(20240903)
    policy = MoBaiPolicy(inst.K, inst.M, eta=0.1)
    worst = 0.0
    for _ in range(2000):
        arm = policy.select()
        policy.observe(arm, sample_rewards(inst, arm, rng))
        if policy.t >= inst.K:
            z = z_statistic(policy.counts, policy.means_hat())
            emp = Instance(policy.means_hat())
            tg = policy.t * g(emp, policy.counts / policy.t)
            worst = max(worst, abs(z - tg))
    ok = worst <= 1e-9
    report("test statistic vs plug-in objective identity", ok, f"worst abs err {worst:.3g}")
    return ok


def run_verification(echo=print) -> bool:
    """Run every oracle check; True when all pass."""
    results = []

    def report(name, ok, detail):
        echo(f"[{'ok' if ok else 'FAIL'}] {name}: {detail}")

    results.append(_check_gradient_fd(report))
    results.append(_check_lp_vs_grid(report))
    results.append(_check_f_roundtrip(report))
    results.append(_check_z_identity(report))
    return all(results)
