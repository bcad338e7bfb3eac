"""Multi-objective best arm identification in the fixed-confidence regime:
the surrogate-proportion policy, a D-tracking baseline, successive
elimination, Chernoff-type stopping, complexity constants, and a seeded
Monte-Carlo experiment harness."""

from .allocation import AllocationResult, c_star_oracle_grid, optimize_allocation
from .instances import Instance, best_arms, gaps, gen_synthetic, load_instance_csv, save_instance_csv
from .objective import curvature_bound, eta_floor, g, g_term, grad_g_term, h, pair_structure
from .policies import BaselinePolicy, MoBaiState, dtrack_subroutine, mose_run
from .simplex import LinearProgram, LPSolution, solve_lp
from .simulate import (TrialConfig, TrialResult, lowerbound_report, run_batch,
                       run_trial, sample_rewards, summarize)
from .stopping import StoppingConfig, f_eval, f_inverse, recommend, threshold, z_statistic
from .surrogate import build_surrogate_lp, surrogate_proportion

__version__ = "0.1.0"
