import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import random_binary_set
from sc_eval import (
    accuracy,
    augrc,
    aurc,
    auroc_f,
    e_augrc,
    e_aurc,
    f1_auc,
    failure_contribution,
    make_evaluation_set,
    naurc,
    oc_auroc_f,
    optimal_reordering,
)
from sc_eval.analytic import ClosedFormInputs, augrc_closed_form
from sc_eval.errors import DegenerateRange, NotBinary, RankOutOfRange, SingleClass
from sc_eval.metrics import METRICS, get_metric

ALL_OK = make_evaluation_set(confidence=[0.9, 0.8, 0.7, 0.6], error=[0, 0, 0, 0])
ALL_BAD = make_evaluation_set(confidence=[0.9, 0.8, 0.7, 0.6], error=[1, 1, 1, 1])


def single_failure(n, rank):
    err = [0.0] * n
    err[rank - 1] = 1.0
    return make_evaluation_set(confidence=np.arange(n, 0, -1), error=err)


def test_d4_values(d4):
    assert augrc(d4).value == 0.1875
    assert aurc(d4).value == pytest.approx(1 / 3, abs=1e-15)
    assert e_aurc(d4).value == pytest.approx(0.125, abs=1e-15)
    assert e_augrc(d4).value == pytest.approx(0.0625, abs=1e-15)
    assert naurc(d4).value == pytest.approx(0.125 / (0.5 - 5 / 24), abs=1e-15)
    assert auroc_f(d4).value == 0.75
    assert accuracy(d4).value == 0.5
    # oracle: F1 at the four prefixes is 2/3, 1/2, 4/5, 2/3
    assert f1_auc(d4).value == pytest.approx(23 / 40, abs=1e-15)


def test_scale_hints(d4):
    assert augrc(d4).scale_hint == 1000
    assert augrc(d4).scaled == 187.5
    assert auroc_f(d4).scale_hint == 1


def test_boundaries():
    assert augrc(ALL_OK).value == 0.0
    assert aurc(ALL_OK).value == 0.0
    assert augrc(ALL_BAD).value == 0.5
    assert aurc(ALL_BAD).value == 1.0
    assert e_aurc(ALL_OK).value == 0.0 and e_augrc(ALL_OK).value == 0.0
    assert accuracy(ALL_OK).value == 1.0 and accuracy(ALL_BAD).value == 0.0


def test_single_failure_aurc():
    expected = sum(1 / t for t in range(3, 11)) / 10
    assert aurc(single_failure(10, 3)).value == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.14289682, abs=1e-8)


def test_failure_contribution():
    assert failure_contribution(10, 3, "aurc") == pytest.approx(0.1428968253968254, abs=1e-15)
    assert failure_contribution(10, 3, "augrc") == 0.075
    assert float(oracles.augrc(list(range(10, 0, -1)), [0, 0, 1] + [0] * 7)) == 0.075
    for n in (1, 5, 17):
        assert failure_contribution(n, n, "aurc") == pytest.approx(1 / n**2)
    with pytest.raises(RankOutOfRange):
        failure_contribution(10, 11, "aurc")
    with pytest.raises(RankOutOfRange):
        failure_contribution(10, 0, "augrc")


def test_naurc_exceeds_one_for_inverted_ranking():
    # failures ranked first do worse than a constant score
    es = make_evaluation_set(confidence=[4, 3, 2, 1], error=[1, 0, 0, 0])
    assert naurc(es).value > 1


def test_naurc():
    assert naurc(optimal_reordering(make_evaluation_set(confidence=[1, 2, 3], error=[0, 1, 0]))).value == 0.0
    for es in (ALL_OK, ALL_BAD):
        with pytest.raises(DegenerateRange):
            naurc(es)


def test_auroc_f_cases():
    tied = make_evaluation_set([(0.5, 0), (0.5, 1)])
    assert auroc_f(tied).value == 0.5
    with pytest.raises(SingleClass):
        auroc_f(ALL_OK)
    with pytest.raises(NotBinary):
        auroc_f(make_evaluation_set([(0.5, 0.3), (0.4, 1)]))


def test_binary_only_metrics_reject_real_errors():
    es = make_evaluation_set([(0.5, 0.3), (0.4, 0.0)])
    for name, spec in METRICS.items():
        if spec.binary_only:
            with pytest.raises(NotBinary):
                spec.fn(es)
    # real-valued errors are fine for the risk-based metrics
    assert augrc(es).value == pytest.approx(oracles.augrc([0.5, 0.4], [0.3, 0.0]))


def test_f1_auc():
    two = make_evaluation_set(confidence=[2, 1], error=[0, 0])
    assert f1_auc(two).value == pytest.approx(7 / 12, abs=1e-15)
    big = make_evaluation_set(confidence=np.arange(20000, 0, -1), error=np.zeros(20000))
    assert f1_auc(big).value == pytest.approx(2 * (1 - math.log(2)), abs=1e-4)
    with pytest.raises(SingleClass):
        f1_auc(ALL_BAD)


def test_oc_auroc_f(d4):
    assert oc_auroc_f(d4, 0.25).value == pytest.approx(1 / 3, abs=1e-15)
    assert oc_auroc_f(d4, 0.0).value == auroc_f(d4).value
    cleared = oc_auroc_f(d4, 0.75)
    assert cleared.value == 1.0 and cleared.degenerate
    # a tie group straddling the cut is reviewed entirely
    es = make_evaluation_set(confidence=[0.9, 0.8, 0.2, 0.2], error=[0, 1, 0, 1])
    # one sample requested, both tied ones reviewed: correct {1, 3, 4} vs failure {2}
    assert oc_auroc_f(es, 0.25).value == pytest.approx(1 / 3, abs=1e-15)


def test_get_metric_unknown():
    with pytest.raises(ValueError, match="valid names"):
        get_metric("nope")


@given(st.integers(2, 40), st.data())
def test_oracle_agreement_with_ties(n, data):
    conf = data.draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
    err = data.draw(st.lists(st.sampled_from([0, 1]), min_size=n, max_size=n))
    es = make_evaluation_set(confidence=conf, error=err)
    assert augrc(es).value == pytest.approx(float(oracles.augrc(conf, err)), abs=1e-12)
    assert aurc(es).value == pytest.approx(float(oracles.aurc(conf, err)), abs=1e-12)
    if 0 < sum(err) < n:
        assert auroc_f(es).value == pytest.approx(float(oracles.auroc_f(conf, err)), abs=1e-12)
        assert f1_auc(es).value == pytest.approx(float(oracles.f1_auc(conf, err)), abs=1e-12)
        # the closed form holds with tied confidences too, given half credit for ties
        closed = augrc_closed_form(ClosedFormInputs(accuracy(es).value, auroc_f(es).value))
        assert augrc(es).value == pytest.approx(closed, abs=1e-12)


def test_optimal_augrc_closed_form(rng):
    for _ in range(200):
        es = random_binary_set(rng, int(rng.integers(2, 200)))
        acc = accuracy(es).value
        assert augrc(optimal_reordering(es)).value == pytest.approx(0.5 * (1 - acc) ** 2, abs=1e-15)
        expected = (1 - auroc_f(es).value) * acc * (1 - acc)
        assert e_augrc(es).value == pytest.approx(expected, abs=1e-12)


def test_additivity(rng):
    for _ in range(200):
        es = random_binary_set(rng, int(rng.integers(1, 120)))
        ranks = np.flatnonzero(es.error) + 1
        for kind, fn in (("augrc", augrc), ("aurc", aurc)):
            total = math.fsum(failure_contribution(es.n, int(r), kind) for r in ranks)
            assert fn(es).value == pytest.approx(total, abs=1e-12)


def test_adjacent_swap_improves_augrc(rng):
    for _ in range(100):
        es = random_binary_set(rng, int(rng.integers(3, 60)))
        err = es.error.copy()
        swaps = [i for i in range(es.n - 1) if err[i] == 1 and err[i + 1] == 0]
        if not swaps:
            continue
        i = swaps[int(rng.integers(len(swaps)))]
        better = err.copy()
        better[i], better[i + 1] = 0, 1
        improved = make_evaluation_set(confidence=es.confidence, error=better)
        assert auroc_f(improved).value > auroc_f(es).value
        assert augrc(improved).value < augrc(es).value


def test_fixing_an_error_never_hurts(rng):
    for _ in range(100):
        es = random_binary_set(rng, int(rng.integers(2, 60)))
        err = es.error.copy()
        i = int(rng.choice(np.flatnonzero(err)))
        err[i] = 0
        fixed = make_evaluation_set(confidence=es.confidence, error=err)
        assert augrc(fixed).value <= augrc(es).value


def test_augrc_determined_by_acc_and_auroc():
    # every 3-failure placement among 8 ranks, grouped by pair statistic
    n = 8
    by_auc = {}
    for fails in itertools.combinations(range(n), 3):
        err = np.zeros(n)
        err[list(fails)] = 1
        es = make_evaluation_set(confidence=np.arange(n, 0, -1), error=err)
        by_auc.setdefault(auroc_f(es).value, []).append(es)
    aurc_spread = False
    for group in by_auc.values():
        vals = [augrc(es).value for es in group]
        assert max(vals) - min(vals) <= 1e-12
        aurcs = [aurc(es).value for es in group]
        aurc_spread |= max(aurcs) - min(aurcs) > 1e-6
    assert aurc_spread


def test_bounds(rng):
    for _ in range(100):
        es = random_binary_set(rng, int(rng.integers(2, 80)), ties=bool(rng.integers(2)))
        assert 0 <= augrc(es).value <= 0.5
        assert 0 <= aurc(es).value <= 1
        assert 0 <= auroc_f(es).value <= 1
        assert naurc(es).value >= -1e-15
        assert 0 <= f1_auc(es).value <= 1
