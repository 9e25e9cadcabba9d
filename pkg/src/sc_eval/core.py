"""Evaluation sets and risk-coverage curves.

A prediction is accepted when its confidence is at or above a threshold.
Every distinct confidence value induces one achievable threshold, so curves
are sampled at tie-group boundaries only: a group of equal confidences is
accepted or rejected as a whole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, NamedTuple, Sequence

import numpy as np

from .errors import EmptyInput, NegativeError, NonFiniteValue, TargetOutOfRange

CurveKind = Literal["selective", "generalized"]


class SampleRecord(NamedTuple):
    """One prediction: its confidence score and the value of the error function."""

    confidence: float
    error: float


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


class EvaluationSet:
    """Confidence-sorted, validated collection of predictions.

    Records are held in descending confidence order. Equal confidences keep
    their input order (stable sort), which never affects a metric.

    Attributes
    ----------
    confidence, error : ndarray
        Sorted arrays, read-only.
    order : ndarray
        ``order[j]`` is the input position of the record at sorted position ``j``.
    group_starts : ndarray
        Start offset of every tie group in sorted order.
    group_sizes, group_errors : ndarray
        Record count and error sum per tie group.
    """

    def __init__(self, confidence, error, order):
        # callers guarantee sorted, validated input; use make_evaluation_set
        conf = _readonly(np.asarray(confidence, dtype=np.float64))
        err = _readonly(np.asarray(error, dtype=np.float64))
        self._arrays = (conf, err, _readonly(np.asarray(order, dtype=np.int64)))
        self._source = None
        self._gid = None
        self.n = int(conf.size)
        boundaries = np.flatnonzero(conf[1:] != conf[:-1]) + 1
        starts = np.concatenate(([0], boundaries)).astype(np.int64)
        self.group_sizes = _readonly(np.diff(np.append(starts, self.n)).astype(np.float64))
        self.group_errors = _readonly(np.add.reduceat(err, starts))
        self.is_binary = bool(np.all((err == 0.0) | (err == 1.0)))

    @classmethod
    def _weighted(cls, parent: "EvaluationSet", w: np.ndarray) -> "EvaluationSet":
        """Child set whose record arrays are only built when first accessed."""
        n_groups = parent.group_sizes.size
        gid = parent._group_ids()
        sizes = np.bincount(gid, weights=w, minlength=n_groups)
        errs = np.bincount(gid, weights=w * parent.error, minlength=n_groups)
        keep = np.flatnonzero(sizes)
        child = cls.__new__(cls)
        child._arrays = None
        child._source = (parent, w.astype(np.int64))
        child._gid = None
        child.n = int(w.sum())
        child.group_sizes = _readonly(sizes.take(keep))
        child.group_errors = _readonly(errs.take(keep))
        child.is_binary = parent.is_binary or bool(np.all(parent._binary_mask()[w > 0]))
        return child

    def _materialize(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self._arrays is None:
            parent, w = self._source
            self._arrays = tuple(
                _readonly(np.repeat(a, w)) for a in (parent.confidence, parent.error, parent.order)
            )
        return self._arrays

    def _group_ids(self) -> np.ndarray:
        gid = self._gid
        if gid is None:
            gid = np.repeat(np.arange(self.group_sizes.size), self.group_sizes.astype(np.int64))
            self._gid = gid
        return gid

    def _binary_mask(self) -> np.ndarray:
        return (self.error == 0.0) | (self.error == 1.0)

    @property
    def confidence(self) -> np.ndarray:
        return self._materialize()[0]

    @property
    def error(self) -> np.ndarray:
        return self._materialize()[1]

    @property
    def order(self) -> np.ndarray:
        return self._materialize()[2]

    @property
    def group_starts(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.group_sizes[:-1]))).astype(np.int64)

    @property
    def records(self) -> tuple[SampleRecord, ...]:
        return tuple(SampleRecord(float(c), float(e)) for c, e in zip(self.confidence, self.error))

    @property
    def tie_groups(self) -> list[range]:
        ends = np.append(self.group_starts[1:], self.n)
        return [range(int(s), int(e)) for s, e in zip(self.group_starts, ends)]

    @property
    def total_error(self) -> float:
        return float(self.group_errors.sum())

    def input_order(self) -> tuple[np.ndarray, np.ndarray]:
        """Return (confidence, error) in the order the records were supplied."""
        conf = np.empty_like(self.confidence)
        err = np.empty_like(self.error)
        conf[self.order] = self.confidence
        err[self.order] = self.error
        return conf, err

    def resample(self, counts: np.ndarray) -> "EvaluationSet":
        """Draw records with multiplicity.

        ``counts[i]`` is how often the record at input position ``i`` is
        selected. Sorted order is preserved, so no re-sort is needed; the
        selected records within one tie group come out in sorted-position
        order, which no metric can observe.
        """
        counts = np.asarray(counts)
        if counts.shape != (self.n,):
            raise ValueError(f"counts must have shape ({self.n},), got {counts.shape}")
        if counts.sum() == 0:
            raise EmptyInput("resample selects no records")
        return EvaluationSet._weighted(self, counts[self.order].astype(np.float64))

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EvaluationSet):
            return NotImplemented
        return np.array_equal(self.confidence, other.confidence) and np.array_equal(
            self.error, other.error
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"EvaluationSet(n={self.n}, groups={self.group_sizes.size}, binary={self.is_binary})"


def make_evaluation_set(
    records: Iterable[SampleRecord | tuple[float, float]] | None = None,
    *,
    confidence: Sequence[float] | np.ndarray | None = None,
    error: Sequence[float] | np.ndarray | None = None,
) -> EvaluationSet:
    """Validate predictions and sort them by descending confidence.

    Accepts either an iterable of ``(confidence, error)`` pairs or the two
    parallel arrays as keywords.
    """
    if records is not None:
        pairs = list(records)
        if not pairs:
            raise EmptyInput("at least one record is required")
        arr = np.asarray(pairs, dtype=np.float64).reshape(len(pairs), 2)
        conf, err = arr[:, 0], arr[:, 1]
    else:
        if confidence is None or error is None:
            raise TypeError("pass records or both confidence= and error=")
        conf = np.asarray(confidence, dtype=np.float64).ravel()
        err = np.asarray(error, dtype=np.float64).ravel()
        if conf.shape != err.shape:
            raise ValueError("confidence and error must have equal length")
    if conf.size == 0:
        raise EmptyInput("at least one record is required")
    if not np.all(np.isfinite(conf)):
        raise NonFiniteValue("confidence values must be finite")
    if not np.all(np.isfinite(err)):
        raise NonFiniteValue("error values must be finite")
    if np.any(err < 0):
        raise NegativeError("error values must be >= 0")
    order = np.argsort(-conf, kind="stable")
    return EvaluationSet(conf[order], err[order], order)


@dataclass(frozen=True, eq=False)
class RiskCoverageCurve:
    kind: CurveKind
    coverage: np.ndarray
    risk: np.ndarray

    @property
    def points(self) -> list[tuple[float, float]]:
        return [(float(c), float(r)) for c, r in zip(self.coverage, self.risk)]

    def __len__(self) -> int:
        return int(self.coverage.size)


def _cumulative(es: EvaluationSet) -> tuple[np.ndarray, np.ndarray]:
    return np.cumsum(es.group_sizes), np.cumsum(es.group_errors)


def generalized_risk_curve(es: EvaluationSet) -> RiskCoverageCurve:
    """Joint risk of failure and acceptance, anchored at (0, 0)."""
    counts, errs = _cumulative(es)
    n = es.n
    coverage = np.concatenate(([0.0], counts / n))
    risk = np.concatenate(([0.0], errs / n))
    return RiskCoverageCurve("generalized", _readonly(coverage), _readonly(risk))


def selective_risk_curve(es: EvaluationSet) -> RiskCoverageCurve:
    """Mean error among accepted predictions. No point at zero coverage."""
    counts, errs = _cumulative(es)
    return RiskCoverageCurve(
        "selective", _readonly(counts / es.n), _readonly(errs / counts)
    )


def selective_risk_at_coverage(es: EvaluationSet, target: float) -> float:
    """Selective risk at the smallest achievable coverage >= ``target``."""
    if not (0.0 < target <= 1.0):
        raise TargetOutOfRange(f"target coverage must lie in (0, 1], got {target}")
    counts, errs = _cumulative(es)
    # round first so that e.g. 0.3 * 10 asks for 3 samples, not 4
    need = math.ceil(round(target * es.n, 9))
    k = int(np.searchsorted(counts, need, side="left"))
    if k == counts.size - 1:
        return float(np.mean(es.error))
    return float(errs[k] / counts[k])


def optimal_reordering(es: EvaluationSet) -> EvaluationSet:
    """Same errors, ranked by an oracle: lowest error receives highest confidence."""
    err = np.sort(es.error, kind="stable")
    conf = np.arange(es.n, 0, -1, dtype=np.float64)
    return EvaluationSet(conf, err, np.arange(es.n))
