"""Bootstrap ranking of confidence scoring functions.

Protocol: evaluate a metric on every bootstrap sample (averaging over
training runs), rank the CSFs within each sample, average the ranks, and
compare every pair of CSFs with a one-sided Wilcoxon signed-rank test on the
paired bootstrap values.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from .core import EvaluationSet
from .errors import AlignmentError, IdMismatch, MetricIncompatible, ScEvalError
from .metrics import get_metric
from .stats import BootstrapPlan, wilcoxon_one_sided

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.05
THREADS_ENV = "SC_EVAL_THREADS"


@dataclass(frozen=True, eq=False)
class ExperimentGrid:
    """Evaluation sets per CSF and training run, aligned on the same test samples.

    Input position ``i`` refers to the same test case in every set.
    """

    csf_ids: tuple[str, ...]
    runs: Mapping[str, tuple[EvaluationSet, ...]]
    run_ids: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    sample_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.csf_ids:
            raise AlignmentError("grid has no CSFs")
        if set(self.csf_ids) != set(self.runs):
            raise AlignmentError("csf_ids and runs disagree")
        sizes = {es.n for sets in self.runs.values() for es in sets}
        if any(len(self.runs[c]) == 0 for c in self.csf_ids):
            raise AlignmentError("every CSF needs at least one run")
        if len(sizes) != 1:
            raise AlignmentError(f"all sets must have equal size, got {sorted(sizes)}")
        if self.sample_ids is not None and len(self.sample_ids) != sizes.pop():
            raise AlignmentError("sample_ids length does not match set size")

    @classmethod
    def from_sets(cls, sets: Mapping[str, EvaluationSet | Sequence[EvaluationSet]]) -> "ExperimentGrid":
        runs = {
            k: (v,) if isinstance(v, EvaluationSet) else tuple(v) for k, v in sets.items()
        }
        return cls(csf_ids=tuple(runs), runs=runs)

    @property
    def n(self) -> int:
        return self.runs[self.csf_ids[0]][0].n

    @property
    def is_binary(self) -> bool:
        return all(es.is_binary for sets in self.runs.values() for es in sets)

    def subset(self, csf_ids: Sequence[str]) -> "ExperimentGrid":
        return ExperimentGrid(
            csf_ids=tuple(csf_ids),
            runs={c: self.runs[c] for c in csf_ids},
            run_ids={c: self.run_ids[c] for c in csf_ids if c in self.run_ids},
            sample_ids=self.sample_ids,
        )


@dataclass(frozen=True, eq=False)
class BootstrapMatrix:
    values: np.ndarray  # (B, C)
    metric_name: str
    csf_ids: tuple[str, ...]
    plan: BootstrapPlan


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def evaluate_bootstrap(
    grid: ExperimentGrid,
    metric: str,
    plan: BootstrapPlan,
    threads: int | None = None,
) -> BootstrapMatrix:
    """Metric value per bootstrap sample and CSF, averaged over runs.

    Each cell is written by exactly one task, so the result does not depend
    on the number of threads.
    """
    spec = get_metric(metric)
    if spec.binary_only and not grid.is_binary:
        raise MetricIncompatible(f"{metric} requires binary errors but the grid is not binary")
    if plan.n != grid.n:
        raise AlignmentError(f"plan covers {plan.n} samples, grid has {grid.n}")
    values = np.empty((plan.b_samples, len(grid.csf_ids)), dtype=np.float64)

    def row(k: int) -> None:
        counts = plan.counts(k)
        for c, csf in enumerate(grid.csf_ids):
            sets = grid.runs[csf]
            total = 0.0
            for es in sets:
                try:
                    total += spec.fn(es.resample(counts)).value
                except ScEvalError as exc:
                    raise type(exc)(f"{exc} (bootstrap sample {k}, csf {csf!r})") from exc
            values[k, c] = total / len(sets)

    n_threads = resolve_threads(threads)
    if n_threads == 1:
        for k in range(plan.b_samples):
            row(k)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            # list() re-raises the first worker exception
            list(pool.map(row, range(plan.b_samples)))
    values.flags.writeable = False
    return BootstrapMatrix(values, spec.name, grid.csf_ids, plan)


def _oriented(values: np.ndarray, lower_is_better: bool) -> np.ndarray:
    return values if lower_is_better else -values


def rank_then_aggregate(matrix: BootstrapMatrix | np.ndarray, lower_is_better: bool = True) -> np.ndarray:
    """Mean over bootstrap samples of each CSF's within-sample rank (1 = best)."""
    values = matrix.values if isinstance(matrix, BootstrapMatrix) else np.asarray(matrix, float)
    if values.ndim != 2 or values.shape[1] < 2:
        raise ValueError("ranking needs a (B, C) matrix with C >= 2")
    ranks = rankdata(_oriented(values, lower_is_better), method="average", axis=1)
    return ranks.mean(axis=0)


def significance_map(
    matrix: BootstrapMatrix | np.ndarray,
    alpha: float = DEFAULT_ALPHA,
    lower_is_better: bool = True,
) -> np.ndarray:
    """Entry ``(x, y)`` is True iff CSF ``y`` is significantly better than ``x``."""
    values = matrix.values if isinstance(matrix, BootstrapMatrix) else np.asarray(matrix, float)
    n_csf = values.shape[1]
    if n_csf < 2:
        raise ValueError("significance map needs at least two CSFs")
    alternative = "less" if lower_is_better else "greater"
    sig = np.zeros((n_csf, n_csf), dtype=bool)
    for x in range(n_csf):
        for y in range(n_csf):
            if x != y:
                p = wilcoxon_one_sided(values[:, y], values[:, x], alternative).p_value
                sig[x, y] = p < alpha
    return sig


@dataclass(frozen=True, eq=False)
class RankingReport:
    metric_name: str
    csf_ids: tuple[str, ...]
    mean_ranks: np.ndarray
    order: tuple[str, ...]
    significance: np.ndarray
    alpha: float
    lower_is_better: bool
    warnings: tuple[str, ...] = ()

    def rank_of(self, csf: str) -> float:
        return float(self.mean_ranks[self.csf_ids.index(csf)])

    def to_dict(self) -> dict:
        return {
            "metric": self.metric_name,
            "alpha": self.alpha,
            "lower_is_better": self.lower_is_better,
            "csf_ids": list(self.csf_ids),
            "mean_ranks": {c: float(r) for c, r in zip(self.csf_ids, self.mean_ranks)},
            "order": list(self.order),
            "significance": [[bool(v) for v in row] for row in self.significance],
            "warnings": list(self.warnings),
        }


def rank(matrix: BootstrapMatrix, alpha: float = DEFAULT_ALPHA, lower_is_better: bool | None = None) -> RankingReport:
    if lower_is_better is None:
        lower_is_better = get_metric(matrix.metric_name).lower_is_better
    mean_ranks = rank_then_aggregate(matrix, lower_is_better)
    sig = significance_map(matrix, alpha, lower_is_better)
    ids = matrix.csf_ids
    # stable: equal mean ranks keep input order
    pos = np.argsort(mean_ranks, kind="stable")
    order = tuple(ids[i] for i in pos)

    warnings = []
    for upper, lower in zip(pos[:-1], pos[1:]):
        # the worse-ranked neighbour is significantly better than the one above it
        if sig[upper, lower]:
            msg = (
                f"{ids[lower]} ranks below {ids[upper]} by mean rank but is "
                f"significantly better at alpha={alpha}"
            )
            logger.warning(msg)
            warnings.append(msg)
    return RankingReport(matrix.metric_name, ids, mean_ranks, order, sig, alpha, lower_is_better, tuple(warnings))


@dataclass(frozen=True)
class ComparisonSummary:
    metric_a: str
    metric_b: str
    top_k: int
    top_k_a: tuple[str, ...]
    top_k_b: tuple[str, ...]
    top_k_membership_changed: bool
    top_k_order_changed: bool
    position_changed: tuple[str, ...]
    kendall_tau: float

    @property
    def top_k_changed(self) -> bool:
        return self.top_k_membership_changed or self.top_k_order_changed

    def to_dict(self) -> dict:
        return {
            "metric_a": self.metric_a,
            "metric_b": self.metric_b,
            "top_k": self.top_k,
            "top_k_a": list(self.top_k_a),
            "top_k_b": list(self.top_k_b),
            "top_k_changed": self.top_k_changed,
            "top_k_membership_changed": self.top_k_membership_changed,
            "top_k_order_changed": self.top_k_order_changed,
            "position_changed": list(self.position_changed),
            "kendall_tau": self.kendall_tau,
        }


def kendall_tau(order_a: Sequence[str], order_b: Sequence[str]) -> float:
    """Kendall rank correlation between two total orders of the same items."""
    pos_b = {c: i for i, c in enumerate(order_b)}
    seq = [pos_b[c] for c in order_a]
    n = len(seq)
    if n < 2:
        return 1.0
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            if seq[i] < seq[j]:
                concordant += 1
            else:
                discordant += 1
    return (concordant - discordant) / (n * (n - 1) / 2)


def compare_rankings(report_a: RankingReport, report_b: RankingReport, top_k: int = 3) -> ComparisonSummary:
    if set(report_a.order) != set(report_b.order) or len(report_a.order) != len(report_b.order):
        raise IdMismatch("rankings cover different CSF sets")
    a, b = report_a.order, report_b.order
    top_a, top_b = a[:top_k], b[:top_k]
    changed = tuple(c for i, c in enumerate(a) if b[i] != c)
    return ComparisonSummary(
        metric_a=report_a.metric_name,
        metric_b=report_b.metric_name,
        top_k=top_k,
        top_k_a=top_a,
        top_k_b=top_b,
        top_k_membership_changed=set(top_a) != set(top_b),
        top_k_order_changed=top_a != top_b,
        position_changed=changed,
        kendall_tau=kendall_tau(a, b),
    )
