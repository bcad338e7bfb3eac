"""Problem instances: K x M mean matrices, best arms, gaps, generation and CSV I/O.

Arms and objectives are numbered 1..K and 1..M at the public interface;
array storage is 0-based internally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DuplicateMaximum, InvalidShape, ParseError, ShapeMismatch

__all__ = [
    "Instance",
    "best_arms",
    "gaps",
    "gen_synthetic",
    "load_instance_csv",
    "save_instance_csv",
]


@dataclass(frozen=True, eq=False)
class Instance:
    """A bandit instance: `means[i-1, m-1]` is the mean of arm i on objective m."""

    means: np.ndarray

    def __post_init__(self):
        means = np.asarray(self.means, dtype=np.float64)
        if means.ndim != 2:
            raise InvalidShape(f"means must be 2-D, got ndim={means.ndim}")
        if means.shape[0] < 2 or means.shape[1] < 1:
            raise InvalidShape(f"need K >= 2 arms and M >= 1 objectives, got {means.shape}")
        if not np.all(np.isfinite(means)):
            raise InvalidShape("means must be finite")
        means = means.copy()
        means.setflags(write=False)
        object.__setattr__(self, "means", means)

    @property
    def K(self) -> int:
        return self.means.shape[0]

    @property
    def M(self) -> int:
        return self.means.shape[1]


def _best_rows(inst: Instance, tie_mode: str) -> np.ndarray:
    """0-based row index of the best arm per objective."""
    if tie_mode not in ("strict", "lowest_index"):
        raise ValueError(f"unknown tie_mode {tie_mode!r}")
    best = np.argmax(inst.means, axis=0)  # first maximizer = lowest index
    if tie_mode == "strict":
        for m in range(inst.M):
            col = inst.means[:, m]
            if np.count_nonzero(col == col[best[m]]) > 1:
                raise DuplicateMaximum(m + 1)
    return best


def best_arms(inst: Instance, tie_mode: str = "strict") -> tuple[int, ...]:
    """Best arm of every objective, 1-based.

    `strict` demands a unique maximizer per objective (truth instances);
    `lowest_index` breaks exact ties toward the smallest arm index
    (empirical instances, where ties can occur at small t).
    """
    return tuple(int(b) + 1 for b in _best_rows(inst, tie_mode))


def gaps(inst: Instance, tie_mode: str = "strict") -> np.ndarray:
    """K x M matrix of sub-optimality gaps: best mean minus own mean, per objective."""
    best = _best_rows(inst, tie_mode)
    return inst.means[best, np.arange(inst.M)][None, :] - inst.means


def gen_synthetic(K: int, M: int, seed: int) -> Instance:
    """Synthetic instance where arm m is the best arm of objective m.

    Off-diagonal means are Uniform[0, 1]; means[m, m] is Uniform[1.2, 2],
    so every gap exceeds 0.2. Deterministic for a fixed seed.
    """
    if M > K:
        raise InvalidShape(f"need M <= K so that arm m can be best for objective m (K={K}, M={M})")
    rng = np.random.default_rng(seed)
    means = rng.uniform(0.0, 1.0, size=(K, M))
    means[np.arange(M), np.arange(M)] = rng.uniform(1.2, 2.0, size=M)
    return Instance(means)


def load_instance_csv(path, scale: float = 1.0) -> Instance:
    """Load an instance from CSV: header row `K,M`, then K rows of M decimals.

    All means are multiplied by `scale` (scale=10 reproduces the tenfold
    reward scaling used for the sorting-network data; any negation of raw
    values happens upstream of the file).
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(1, "empty file")
    header = lines[0].split(",")
    if len(header) != 2:
        raise ParseError(1, f"expected header 'K,M', got {lines[0]!r}")
    try:
        K, M = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError(1, f"non-integer header fields {lines[0]!r}") from None
    if len(lines) - 1 != K:
        raise ShapeMismatch(f"header declares K={K} rows, file has {len(lines) - 1}")
    means = np.empty((K, M))
    for r, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != M:
            raise ShapeMismatch(f"line {r}: expected {M} fields, got {len(fields)}")
        try:
            means[r - 2] = [float(f) for f in fields]
        except ValueError:
            raise ParseError(r, f"malformed number in {line!r}") from None
    return Instance(means * scale)


def save_instance_csv(inst: Instance, path) -> None:
    """Write the CSV format read by `load_instance_csv` (LF endings, '.' decimals)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{inst.K},{inst.M}\n")
        for row in inst.means:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
