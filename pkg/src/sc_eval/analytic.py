"""Closed-form AUGRC relations and the optimal F1-AUC curve."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class ClosedFormInputs:
    acc: float
    auroc_f: float

    def __post_init__(self):
        for name in ("acc", "auroc_f"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise DomainError(f"{name} must lie in [0, 1], got {v}")


def augrc_closed_form(inputs: ClosedFormInputs) -> float:
    """AUGRC expressed through accuracy and failure AUROC.

    The second term is the AUGRC of an oracle ranking; the first is the
    ranking penalty scaled by the probability of drawing a correct/failed pair.
    """
    acc, auc = inputs.acc, inputs.auroc_f
    return (1.0 - auc) * acc * (1.0 - acc) + 0.5 * (1.0 - acc) ** 2


def augrc_gradients(inputs: ClosedFormInputs) -> tuple[float, float]:
    """Partial derivatives ``(d/dAUROC_f, d/dacc)`` of :func:`augrc_closed_form`."""
    acc, auc = inputs.acc, inputs.auroc_f
    return -acc * (1.0 - acc), 2.0 * auc * acc - acc - auc


def f1_auc_star(acc: float) -> float:
    """F1-AUC of an oracle ranking as a function of accuracy."""
    if acc <= 0.0:
        raise DomainError(f"acc must be > 0, got {acc}")
    return 2.0 * acc * (1.0 + math.log(0.25 * (1.0 + 1.0 / acc)))


def f1_auc_star_derivative(acc: float) -> float:
    if acc <= 0.0:
        raise DomainError(f"acc must be > 0, got {acc}")
    return 2.0 * (1.0 + math.log(0.25 * (1.0 + 1.0 / acc))) - 2.0 / (acc + 1.0)


def f1_auc_star_argmax(lo: float = 0.3, hi: float = 0.9, tol: float = 1e-9) -> float:
    """Accuracy at which the oracle F1-AUC peaks, by bisection on its derivative."""
    d_lo, d_hi = f1_auc_star_derivative(lo), f1_auc_star_derivative(hi)
    if not (d_lo > 0.0 > d_hi):
        raise DomainError(f"derivative does not change sign on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f1_auc_star_derivative(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
