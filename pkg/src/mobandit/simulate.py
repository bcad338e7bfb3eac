"""Trial execution and batch experiments.

A trial is fully determined by its config and seed: the seed feeds one
stream for rewards and an independent one for policy tie-breaks (spawned
from the same SeedSequence), so per-trial results are reproducible and
independent across trials regardless of worker count or completion order.
"""

from __future__ import annotations

import csv
import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .allocation import c_star_oracle_grid, optimize_allocation
from .errors import CapExceeded, MobanditError
from .instances import Instance, best_arms
from .objective import curvature_bound
from .policies import BaselinePolicy, MoBaiPolicy, mose_run
from .stopping import StoppingConfig, recommend, threshold, z_statistic

__all__ = [
    "TrialConfig",
    "TrialResult",
    "sample_rewards",
    "run_trial",
    "run_batch",
    "write_results_csv",
    "write_summary_csv",
    "summarize",
    "lowerbound_report",
    "RESULT_COLUMNS",
    "SUMMARY_COLUMNS",
]

RESULT_COLUMNS = ["trial", "policy", "eta", "iter", "delta", "threshold_mode",
                  "tau", "correct", "wall_opt_ns", "wall_total_ns", "seed"]
SUMMARY_COLUMNS = ["policy", "delta", "trials", "tau_mean", "tau_std",
                   "error_rate", "opt_ms_mean"]


@dataclass(frozen=True)
class TrialConfig:
    instance: Instance
    policy: str                   # "mobai" | "baseline" | "mose"
    delta: float
    seed: int
    eta: float = None             # mobai
    iter_steps: int = None        # baseline
    warm_start: bool = False      # baseline
    threshold_mode: str = "practical"
    pull_cap: int = 10_000_000
    non_stopping: bool = False    # run to pull_cap without testing

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")
        if self.policy == "mobai" and (self.eta is None or self.eta <= 0):
            raise ValueError("mobai requires eta > 0")
        if self.policy == "baseline" and (self.iter_steps is None or self.iter_steps < 1):
            raise ValueError("baseline requires iter_steps >= 1")
        if self.policy not in ("mobai", "baseline", "mose"):
            raise ValueError(f"unknown policy {self.policy!r}")


@dataclass
class TrialResult:
    trial: int
    tau: int
    recommendation: tuple
    correct: bool
    wall_opt_ns: int
    wall_total_ns: int
    seed: int
    capped: bool = False
    error: str = ""


def sample_rewards(inst: Instance, arm: int, rng: np.random.Generator) -> np.ndarray:
    """One pull of a 1-based arm: mean vector plus independent unit normals."""
    return inst.means[arm - 1] + rng.standard_normal(inst.M)


def run_trial(cfg: TrialConfig, trial_index: int = 0) -> TrialResult:
    t_start = time.perf_counter_ns()
    truth = cfg.instance
    K, M = truth.K, truth.M
    truth_best = best_arms(truth, "strict")
    ss = np.random.SeedSequence(cfg.seed)
    rew_rng, pol_rng = (np.random.default_rng(s) for s in ss.spawn(2))

    if cfg.policy == "mose":
        env = lambda arm: sample_rewards(truth, arm, rew_rng)
        try:
            rec, tau = mose_run(truth, cfg.delta, env, cfg.pull_cap)
            capped = False
        except CapExceeded:
            rec, tau, capped = (), cfg.pull_cap, True
        return TrialResult(
            trial=trial_index, tau=tau, recommendation=rec,
            correct=(rec == truth_best), wall_opt_ns=0,
            wall_total_ns=time.perf_counter_ns() - t_start,
            seed=cfg.seed, capped=capped,
        )

    if cfg.policy == "mobai":
        policy = MoBaiPolicy(K, M, cfg.eta)
    else:
        policy = BaselinePolicy(K, M, cfg.iter_steps, cfg.warm_start, pol_rng)
    stop_cfg = StoppingConfig(cfg.threshold_mode, cfg.delta, M * K)

    tau = None
    capped = False
    while policy.t < cfg.pull_cap:
        arm = policy.select()
        policy.observe(arm, sample_rewards(truth, arm, rew_rng))
        if not cfg.non_stopping and policy.t >= K:
            if z_statistic(policy.counts, policy.means_hat()) > threshold(policy.t, stop_cfg):
                tau = policy.t
                break
    if tau is None:
        tau = cfg.pull_cap
        capped = not cfg.non_stopping
    rec = recommend(policy.means_hat())
    return TrialResult(
        trial=trial_index, tau=tau, recommendation=rec,
        correct=(rec == truth_best), wall_opt_ns=policy.opt_ns,
        wall_total_ns=time.perf_counter_ns() - t_start,
        seed=cfg.seed, capped=capped,
    )


def _indexed_trial(args) -> TrialResult:
    cfg, i = args
    try:
        return run_trial(cfg, i)
    except Exception as exc:  # recorded, batch continues
        return TrialResult(trial=i, tau=-1, recommendation=(), correct=False,
                           wall_opt_ns=0, wall_total_ns=0, seed=cfg.seed,
                           error=f"{type(exc).__name__}: {exc}")


def run_batch(template: TrialConfig, trials: int, base_seed: int,
              workers: int = 1) -> list[TrialResult]:
    """Run `trials` independent trials; trial i uses seed base_seed + i.

    Results come back keyed by trial index, so aggregation and CSV output do
    not depend on completion order or on the worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    jobs = [(dataclasses.replace(template, seed=base_seed + i), i) for i in range(trials)]
    if workers <= 1:
        results = [_indexed_trial(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_indexed_trial, jobs))
    results.sort(key=lambda r: r.trial)
    return results


def _result_row(r: TrialResult, cfg: TrialConfig) -> list:
    return [
        r.trial,
        cfg.policy,
        repr(float(cfg.eta)) if cfg.policy == "mobai" else "",
        cfg.iter_steps if cfg.policy == "baseline" else "",
        repr(float(cfg.delta)),
        cfg.threshold_mode,
        r.tau,
        "true" if r.correct else "false",
        r.wall_opt_ns,
        r.wall_total_ns,
        r.seed,
    ]


def write_results_csv(path, results: list[TrialResult], cfg: TrialConfig) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for r in results:
            writer.writerow(_result_row(r, cfg))


def summarize(results: list[TrialResult], cfg: TrialConfig) -> dict:
    ok = [r for r in results if not r.error]
    taus = np.array([r.tau for r in ok], dtype=np.float64)
    n_err = sum(1 for r in results if not r.correct)
    return {
        "policy": cfg.policy,
        "delta": cfg.delta,
        "trials": len(results),
        "tau_mean": float(taus.mean()) if taus.size else float("nan"),
        "tau_std": float(taus.std(ddof=1)) if taus.size > 1 else 0.0,
        "error_rate": n_err / len(results),
        "opt_ms_mean": float(np.mean([r.wall_opt_ns for r in ok])) / 1e6 if ok else float("nan"),
    }


def write_summary_csv(path, summary: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_COLUMNS)
        writer.writerow([summary["policy"], repr(float(summary["delta"])),
                         summary["trials"], repr(summary["tau_mean"]),
                         repr(summary["tau_std"]), repr(summary["error_rate"]),
                         repr(summary["opt_ms_mean"])])


def lowerbound_report(inst: Instance, eta: float, iters: int,
                      grid_resolution: int = None,
                      deltas=(0.1, 0.05, 0.01, 0.001)) -> dict:
    """Identification-complexity constants of an instance.

    Reports the characteristic constant (iterated over the full simplex and,
    when requested and K <= 4, an exhaustive grid), its eta-truncated
    counterpart, the curvature bound, and the predicted optimal expected
    stopping-time slopes c* log(1/(4 delta)).
    """
    if eta <= 0:
        raise ValueError("eta must be > 0")
    res_gamma = optimize_allocation(inst, eta=None, iters=iters)
    res_eta = optimize_allocation(inst, eta=eta, iters=iters)
    if res_gamma.value <= 0 or res_eta.value <= 0:
        raise MobanditError("allocation optimizer returned a zero objective")
    report = {
        "K": inst.K,
        "M": inst.M,
        "eta": eta,
        "iters": iters,
        "c_star": 1.0 / res_gamma.value,
        "c_tilde": 1.0 / res_eta.value,
        "weight_gamma": res_gamma.weight,
        "weight_eta": res_eta.weight,
        "curvature_bound": curvature_bound(inst, eta),
        "slopes": {d: (1.0 / res_gamma.value) * math.log(1.0 / (4.0 * d)) for d in deltas},
    }
    if grid_resolution is not None and inst.K <= 4:
        report["c_star_grid"] = 1.0 / c_star_oracle_grid(inst, 0.0, grid_resolution).value
        report["c_tilde_grid"] = 1.0 / c_star_oracle_grid(inst, eta, grid_resolution).value
    c_star = report.get("c_star_grid", report["c_star"])
    c_tilde = report.get("c_tilde_grid", report["c_tilde"])
    # Truncation loses at most a (1+eta) factor; allow oracle tolerance.
    if c_tilde < c_star / (1.0 + eta) * (1.0 - 1e-2):
        raise MobanditError(
            f"c_tilde={c_tilde} below c_star/(1+eta)={c_star / (1 + eta)}")
    report["relaxation_ok"] = True
    return report


def format_lowerbound_report(report: dict) -> str:
    lines = [
        f"instance: K={report['K']} M={report['M']}  eta={report['eta']}  "
        f"iters={report['iters']}",
        f"c_star   (iterated, full simplex): {report['c_star']:.6g}",
        f"c_tilde  (iterated, eta-truncated): {report['c_tilde']:.6g}",
    ]
    if "c_star_grid" in report:
        lines.append(f"c_star   (grid oracle):             {report['c_star_grid']:.6g}")
        lines.append(f"c_tilde  (grid oracle):             {report['c_tilde_grid']:.6g}")
    lines.append(f"curvature bound:                    {report['curvature_bound']:.6g}")
    lines.append(f"relaxation check c_tilde >= c_star/(1+eta): "
                 f"{'ok' if report.get('relaxation_ok') else 'FAILED'}")
    lines.append("predicted optimal E[tau] slope c_star * log(1/(4 delta)):")
    for d, s in report["slopes"].items():
        lines.append(f"  delta={d:g}: {s:.6g}")
    return "\n".join(lines)
