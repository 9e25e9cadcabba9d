"""Bootstrap index plans and the one-sided Wilcoxon signed-rank test.

Bootstrap generator
-------------------
Every index is a pure function of ``(seed, sample, draw, n)``, so any single
bootstrap sample can be regenerated on its own, in any order, in any
language. All arithmetic is on unsigned 64-bit integers modulo 2**64::

    GOLDEN = 0x9E3779B97F4A7C15

    mix64(z):
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)

    key(seed, k)     = mix64(seed + (k + 1) * GOLDEN)      # k = sample, 0-based
    word(seed, k, j) = mix64(key(seed, k) + (j + 1) * GOLDEN)   # j = draw, 0-based
    index            = ((word >> 32) * n) >> 32            # requires n < 2**32

``seed`` is reduced modulo 2**64 first. The final step maps the top 32 bits
onto ``[0, n)`` by multiply-shift; its bias is at most n / 2**32.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.stats import rankdata

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

DEFAULT_B_SAMPLES = 500
EXACT_MAX_M = 25


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def sample_key(seed: int, sample: int) -> int:
    return mix64((seed & MASK64) + (sample + 1) * GOLDEN)


def sample_indices(seed: int, sample: int, n: int) -> np.ndarray:
    """Indices of bootstrap sample ``sample``; independent of every other sample."""
    if not (1 <= n < 2**32):
        raise ValueError(f"n must lie in [1, 2**32), got {n}")
    key = np.uint64(sample_key(seed, sample))
    draws = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GOLDEN) + key
    words = _mix64_array(draws)
    return ((words >> np.uint64(32)) * np.uint64(n) >> np.uint64(32)).astype(np.int64)


@dataclass(frozen=True, eq=False)
class BootstrapPlan:
    """``b_samples`` index sequences, each of length ``n``.

    ``seed`` is None for hand-built plans.
    """

    n: int
    b_samples: int
    seed: int | None
    indices: np.ndarray = field(repr=False)

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.shape != (self.b_samples, self.n):
            raise ValueError(f"indices must have shape {(self.b_samples, self.n)}, got {idx.shape}")
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise ValueError("bootstrap indices out of range")
        idx.flags.writeable = False
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_indices(cls, indices) -> "BootstrapPlan":
        idx = np.atleast_2d(np.asarray(indices, dtype=np.int64))
        return cls(n=idx.shape[1], b_samples=idx.shape[0], seed=None, indices=idx)

    def counts(self, sample: int) -> np.ndarray:
        """Multiplicity of every record in one sample."""
        return np.bincount(self.indices[sample], minlength=self.n)


def bootstrap_plan(n: int, b_samples: int = DEFAULT_B_SAMPLES, seed: int = 0) -> BootstrapPlan:
    if n < 1 or b_samples < 1:
        raise ValueError("n and b_samples must be >= 1")
    indices = np.empty((b_samples, n), dtype=np.int64)
    for k in range(b_samples):
        indices[k] = sample_indices(seed, k, n)
    return BootstrapPlan(n=n, b_samples=b_samples, seed=int(seed), indices=indices)


Alternative = Literal["greater", "less"]


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float
    p_value: float
    n_nonzero: int
    method: Literal["exact", "normal", "degenerate"]

    @property
    def degenerate(self) -> bool:
        return self.method == "degenerate"


@dataclass(frozen=True, eq=False)
class PairedSample:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("paired samples must be 1-d and of equal length")
        if a.size == 0:
            raise ValueError("paired samples must be non-empty")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("paired samples must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def signed_rank_distribution(doubled_ranks: np.ndarray) -> np.ndarray:
    """Count sign assignments per value of twice the positive-rank sum.

    Equivalent to enumerating all 2**m assignments, but by dynamic programming
    over the (integer) doubled ranks.
    """
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled_ranks:
        r = int(r)
        shifted = counts[: total + 1 - r].copy()
        counts[r:] += shifted
    return counts


def wilcoxon_one_sided(a, b, alternative: Alternative = "greater") -> WilcoxonResult:
    """One-sided signed-rank test on ``a - b``.

    ``alternative="greater"`` tests whether ``a`` tends to exceed ``b``. Zero
    differences are discarded; tied magnitudes share their average rank. The
    statistic is the rank sum of positive differences. Up to 25 non-zero
    differences the null distribution is exact, beyond that a tie-corrected
    normal approximation with continuity correction is used.
    """
    if alternative not in ("greater", "less"):
        raise ValueError(f"alternative must be 'greater' or 'less', got {alternative!r}")
    pairs = PairedSample(a, b)
    d = pairs.a - pairs.b
    d = d[d != 0.0]
    m = int(d.size)
    if m == 0:
        return WilcoxonResult(0.0, 1.0, 0, "degenerate")
    ranks = rankdata(np.abs(d))
    w = float(ranks[d > 0].sum())

    if m <= EXACT_MAX_M:
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        counts = signed_rank_distribution(doubled)
        w2 = int(round(2.0 * w))
        hits = counts[w2:].sum() if alternative == "greater" else counts[: w2 + 1].sum()
        return WilcoxonResult(w, float(hits) / float(2**m), m, "exact")

    mean = m * (m + 1) / 4.0
    _, tie_sizes = np.unique(ranks, return_counts=True)
    var = m * (m + 1) * (2 * m + 1) / 24.0 - float(np.sum(tie_sizes**3 - tie_sizes)) / 48.0
    sd = math.sqrt(var)
    if alternative == "greater":
        z = (w - mean - 0.5) / sd
        p = 0.5 * math.erfc(z / math.sqrt(2.0))
    else:
        z = (w - mean + 0.5) / sd
        p = 0.5 * math.erfc(-z / math.sqrt(2.0))
    return WilcoxonResult(w, p, m, "normal")
