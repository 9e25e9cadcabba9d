"""Multi-threshold selective classification metrics.

All metrics operate on tie-group aggregates of an :class:`EvaluationSet`, so
record order inside a group of equal confidences never matters.

AUGRC is integrated with the trapezoid rule over the generalized risk curve
(anchored at the origin). On binary data this reproduces

    AUGRC = (1 - AUROC_f) * acc * (1 - acc) + (1 - acc)**2 / 2

exactly, with or without tied confidences, provided AUROC_f gives ties half
credit. AURC is the group-size weighted mean of selective risk at every
achievable coverage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .core import EvaluationSet, optimal_reordering
from .errors import DegenerateRange, NotBinary, RankOutOfRange, SingleClass

SCALE_MILLI = 1000

DEFAULT_REVIEW_FRACTION = 0.005


@dataclass(frozen=True)
class MetricResult:
    name: str
    value: float
    scale_hint: int = 1
    binary_only: bool = False
    degenerate: bool = False

    @property
    def scaled(self) -> float:
        return self.value * self.scale_hint

    def __float__(self) -> float:
        return self.value


def _trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1])) / 2.0)


def _require_binary(es: EvaluationSet, name: str) -> None:
    if not es.is_binary:
        raise NotBinary(f"{name} requires binary (0/1) errors")


def _augrc_value(es: EvaluationSet) -> float:
    # trapezoid over the generalized risk curve, one segment per tie group:
    # width s_k / n, heights E_{k-1} / n and E_k / n
    cum = np.cumsum(es.group_errors)
    return float(np.dot(es.group_sizes, 2.0 * cum - es.group_errors) / (2.0 * es.n * es.n))


def _aurc_value(es: EvaluationSet) -> float:
    counts = np.cumsum(es.group_sizes)
    errs = np.cumsum(es.group_errors)
    return float(np.sum(es.group_sizes * (errs / counts)) / es.n)


def augrc(es: EvaluationSet) -> MetricResult:
    """Area under the generalized risk coverage curve."""
    return MetricResult("augrc", _augrc_value(es), SCALE_MILLI)


def aurc(es: EvaluationSet) -> MetricResult:
    """Area under the selective risk coverage curve."""
    return MetricResult("aurc", _aurc_value(es), SCALE_MILLI)


def e_aurc(es: EvaluationSet) -> MetricResult:
    value = _aurc_value(es) - _aurc_value(optimal_reordering(es))
    return MetricResult("e_aurc", value, SCALE_MILLI)


def e_augrc(es: EvaluationSet) -> MetricResult:
    value = _augrc_value(es) - _augrc_value(optimal_reordering(es))
    return MetricResult("e_augrc", value, SCALE_MILLI)


def naurc(es: EvaluationSet) -> MetricResult:
    """e-AURC min-max scaled between the oracle ranking and a constant score.

    A constant confidence puts all samples into one tie group, whose AURC is
    the mean error.
    """
    best = _aurc_value(optimal_reordering(es))
    worst = es.total_error / es.n
    if worst - best <= 0.0:
        raise DegenerateRange("NAURC undefined: random and optimal AURC coincide")
    return MetricResult("naurc", (_aurc_value(es) - best) / (worst - best))


def pair_counts(es: EvaluationSet) -> tuple[float, float, float]:
    """Return (wins, n_correct, n_fail); a tie between a correct and a failed
    prediction counts as half a win."""
    fails = es.group_errors
    correct = es.group_sizes - fails
    n_fail = float(fails.sum())
    n_correct = float(correct.sum())
    fails_below = n_fail - np.cumsum(fails)
    wins = float(np.sum(correct * fails_below) + 0.5 * np.sum(correct * fails))
    return wins, n_correct, n_fail


def _auroc_f_value(es: EvaluationSet) -> float:
    wins, n_correct, n_fail = pair_counts(es)
    if n_correct == 0 or n_fail == 0:
        raise SingleClass("AUROC_f needs at least one correct and one failed prediction")
    return wins / (n_correct * n_fail)


def auroc_f(es: EvaluationSet) -> MetricResult:
    """Failure AUROC: probability that a correct prediction outranks a failure."""
    _require_binary(es, "auroc_f")
    return MetricResult("auroc_f", _auroc_f_value(es), binary_only=True)


def accuracy(es: EvaluationSet) -> MetricResult:
    _require_binary(es, "accuracy")
    return MetricResult("accuracy", 1.0 - es.total_error / es.n, binary_only=True)


def f1_auc(es: EvaluationSet) -> MetricResult:
    """Trapezoidal area over coverage of the F1 score of "correct and accepted"."""
    _require_binary(es, "f1_auc")
    correct = es.group_sizes - es.group_errors
    n_correct = correct.sum()
    if n_correct == 0:
        raise SingleClass("F1-AUC needs at least one correct prediction")
    accepted = np.cumsum(es.group_sizes)
    tp = np.cumsum(correct)
    precision = tp / accepted
    recall = tp / n_correct
    denom = precision + recall
    f1 = np.divide(2 * precision * recall, denom, out=np.zeros_like(denom), where=denom > 0)
    coverage = np.concatenate(([0.0], accepted / es.n))
    f1 = np.concatenate(([0.0], f1))
    return MetricResult("f1_auc", _trapezoid(f1, coverage), binary_only=True)


def oc_auroc_f(es: EvaluationSet, review_fraction: float = DEFAULT_REVIEW_FRACTION) -> MetricResult:
    """AUROC_f after an oracle has reviewed the least confident predictions.

    The ``ceil(review_fraction * n)`` lowest-confidence samples have their
    error set to zero; a tie group straddling the cut is reviewed entirely.
    If review removes every failure the value is 1 and ``degenerate`` is set.
    """
    _require_binary(es, "oc_auroc_f")
    if not (0.0 <= review_fraction < 1.0):
        raise ValueError(f"review_fraction must lie in [0, 1), got {review_fraction}")
    k = math.ceil(round(review_fraction * es.n, 9))
    errors = es.group_errors.copy()
    if k > 0:
        from_bottom = np.cumsum(es.group_sizes[::-1])
        n_groups = int(np.searchsorted(from_bottom, k, side="left")) + 1
        errors[errors.size - n_groups :] = 0.0
    if errors.sum() == 0 and es.group_errors.sum() > 0:
        return MetricResult("oc_auroc_f", 1.0, binary_only=True, degenerate=True)
    reviewed = _GroupView(es.group_sizes, errors)
    return MetricResult("oc_auroc_f", _auroc_f_value(reviewed), binary_only=True)  # type: ignore[arg-type]


@dataclass(frozen=True)
class _GroupView:
    group_sizes: np.ndarray
    group_errors: np.ndarray


def failure_contribution(n: int, rank: int, kind: Literal["aurc", "augrc"]) -> float:
    """Metric contribution of a single failure at ``rank`` (1 = most confident)
    in a tie-free ranking of ``n`` predictions."""
    if not (1 <= rank <= n):
        raise RankOutOfRange(f"rank must lie in 1..{n}, got {rank}")
    if kind == "aurc":
        return math.fsum(1.0 / t for t in range(rank, n + 1)) / n
    if kind == "augrc":
        return (n - rank + 0.5) / (n * n)
    raise ValueError(f"unknown kind {kind!r}")


@dataclass(frozen=True)
class MetricSpec:
    name: str
    fn: Callable[[EvaluationSet], MetricResult]
    lower_is_better: bool
    binary_only: bool


METRICS: dict[str, MetricSpec] = {
    spec.name: spec
    for spec in (
        MetricSpec("augrc", augrc, True, False),
        MetricSpec("aurc", aurc, True, False),
        MetricSpec("e_aurc", e_aurc, True, False),
        MetricSpec("e_augrc", e_augrc, True, False),
        MetricSpec("naurc", naurc, True, False),
        MetricSpec("auroc_f", auroc_f, False, True),
        MetricSpec("accuracy", accuracy, False, True),
        MetricSpec("f1_auc", f1_auc, False, True),
        MetricSpec("oc_auroc_f", oc_auroc_f, False, True),
    )
}

# accuracy-rejection curves carry the same information as AURC
METRICS["arc"] = MetricSpec("arc", aurc, True, False)


def get_metric(name: str) -> MetricSpec:
    try:
        return METRICS[name]
    except KeyError:
        valid = ", ".join(sorted(METRICS))
        raise ValueError(f"unknown metric {name!r}; valid names: {valid}") from None
