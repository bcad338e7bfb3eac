"""The max-min identification objective and its linearization.

For a proportion w over arms, the objective value of a (sub-optimal arm,
objective) pair is

    coeff * w_i * w_b / (w_i + w_b),   coeff = gap^2 / 2,

where b is the best arm of the objective; the overall objective `g` is the
minimum over all pairs, with the convention 0/0 = 0. `h` is the minimum of
the per-pair first-order expansions around w, a piecewise-linear surrogate
that is affine in its second argument.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BestArmArgument, DegenerateDenominator
from .instances import Instance, _best_rows, gaps

__all__ = [
    "eta_floor",
    "PairStructure",
    "pair_structure",
    "g_term",
    "g",
    "grad_g_term",
    "h",
    "curvature_bound",
]


def eta_floor(K: int, eta: float) -> float:
    """Per-arm lower bound eta / (K * (1 + eta)) of the truncated simplex."""
    if eta < 0:
        raise ValueError("eta must be >= 0")
    return eta / (K * (1.0 + eta))


@dataclass(frozen=True)
class PairStructure:
    """Precomputed (sub-optimal arm, objective) pairs of an instance.

    Pairs are ordered objective-major, then by arm index; this ordering is
    the constraint order of the surrogate LP and is part of the package's
    determinism contract.
    """

    K: int
    sub: np.ndarray    # 0-based sub-optimal arm per pair
    best: np.ndarray   # 0-based best arm per pair
    coeff: np.ndarray  # gap^2 / 2 per pair

    @property
    def n_pairs(self) -> int:
        return self.sub.shape[0]

    def g_values(self, w: np.ndarray) -> np.ndarray:
        wi = w[self.sub]
        wb = w[self.best]
        tot = wi + wb
        out = np.zeros(self.n_pairs)
        nz = tot > 0.0
        out[nz] = self.coeff[nz] * wi[nz] * wb[nz] / tot[nz]
        return out

    def g_min(self, w: np.ndarray) -> float:
        return float(np.min(self.g_values(w)))

    def grad_coeffs(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Per-pair partials: d/dw_i and d/dw_b of the pair objective.

        All other partials vanish. Raises when some pair has w_i + w_b = 0,
        where the gradient is undefined.
        """
        gi, gb, _ = self.linearize(w)
        return gi, gb

    def linearize(self, w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-pair gradient coefficients and affine offsets at w, so that the
        linearized pair value at z is base + gi*z_i + gb*z_b."""
        wi = w[self.sub]
        wb = w[self.best]
        tot = wi + wb
        if np.any(tot <= 0.0):
            raise DegenerateDenominator("w_i + w_best = 0 for some pair")
        gval = self.coeff * wi * wb / tot
        sq = tot * tot
        gi = self.coeff * wb * wb / sq
        gb = self.coeff * wi * wi / sq
        return gi, gb, gval - gi * wi - gb * wb

    def h_value(self, w: np.ndarray, z: np.ndarray) -> float:
        gi, gb, base = self.linearize(w)
        return float(np.min(base + gi * z[self.sub] + gb * z[self.best]))

    def h_many(self, w: np.ndarray, Z: np.ndarray) -> np.ndarray:
        """h(w, z) for every row z of Z, vectorized."""
        gi, gb, base = self.linearize(w)
        vals = base[None, :] + Z[:, self.sub] * gi[None, :] + Z[:, self.best] * gb[None, :]
        return np.min(vals, axis=1)


def pair_structure(inst: Instance, tie_mode: str = "lowest_index") -> PairStructure:
    best = _best_rows(inst, tie_mode)
    gap = inst.means[best, np.arange(inst.M)][None, :] - inst.means
    sub_idx = []
    best_idx = []
    coeff = []
    for m in range(inst.M):
        for i in range(inst.K):
            if i == best[m]:
                continue
            sub_idx.append(i)
            best_idx.append(best[m])
            coeff.append(0.5 * gap[i, m] * gap[i, m])
    return PairStructure(
        K=inst.K,
        sub=np.array(sub_idx, dtype=np.intp),
        best=np.array(best_idx, dtype=np.intp),
        coeff=np.array(coeff),
    )


def _pair_check(inst: Instance, i: int, m: int, tie_mode: str) -> tuple[int, int, float]:
    """Resolve 1-based (i, m) to 0-based (row, best row) plus the pair coefficient."""
    best = _best_rows(inst, tie_mode)
    b = int(best[m - 1])
    if i - 1 == b:
        raise BestArmArgument(f"arm {i} is the best arm of objective {m}")
    gap = inst.means[b, m - 1] - inst.means[i - 1, m - 1]
    return i - 1, b, 0.5 * gap * gap


def g_term(inst: Instance, w: np.ndarray, i: int, m: int, tie_mode: str = "lowest_index") -> float:
    """Pair objective for 1-based arm i and objective m; 0 when w_i = w_best = 0."""
    row, b, coeff = _pair_check(inst, i, m, tie_mode)
    wi, wb = w[row], w[b]
    if wi == 0.0 and wb == 0.0:
        return 0.0
    return float(coeff * wi * wb / (wi + wb))


def g(inst: Instance, w: np.ndarray, tie_mode: str = "lowest_index") -> float:
    """Minimum of the pair objective over all (sub-optimal arm, objective) pairs."""
    return pair_structure(inst, tie_mode).g_min(np.asarray(w, dtype=np.float64))


def grad_g_term(inst: Instance, w: np.ndarray, i: int, m: int,
                tie_mode: str = "lowest_index") -> np.ndarray:
    """Gradient of the pair objective; nonzero only at arms i and best(m)."""
    row, b, coeff = _pair_check(inst, i, m, tie_mode)
    wi, wb = w[row], w[b]
    tot = wi + wb
    if tot <= 0.0:
        raise DegenerateDenominator(f"w_{i} + w_best = 0 for objective {m}")
    out = np.zeros(inst.K)
    out[row] = coeff * wb * wb / (tot * tot)
    out[b] = coeff * wi * wi / (tot * tot)
    return out


def h(inst: Instance, w: np.ndarray, z: np.ndarray, tie_mode: str = "lowest_index") -> float:
    """Minimum over pairs of the first-order expansion at w, evaluated at z."""
    return pair_structure(inst, tie_mode).h_value(
        np.asarray(w, dtype=np.float64), np.asarray(z, dtype=np.float64)
    )


def curvature_bound(inst: Instance, eta: float, tie_mode: str = "lowest_index") -> float:
    """Upper bound 2 * max gap^2 * (1+eta) * K / eta on the surrogate curvature constant."""
    if eta <= 0:
        raise ValueError("eta must be > 0")
    max_gap_sq = float(np.max(gaps(inst, tie_mode) ** 2))
    return 2.0 * max_gap_sq * (1.0 + eta) * inst.K / eta
