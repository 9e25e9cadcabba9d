import math

import numpy as np
import pytest

from sc_eval.analytic import (
    ClosedFormInputs,
    augrc_closed_form,
    augrc_gradients,
    f1_auc_star,
    f1_auc_star_argmax,
    f1_auc_star_derivative,
)
from sc_eval.errors import DomainError


@pytest.mark.parametrize(
    "acc, auc, expected",
    [(0.5, 0.75, 0.1875), (1.0, 0.3, 0.0), (1.0, 1.0, 0.0), (0.0, 0.2, 0.5), (0.0, 1.0, 0.5)],
)
def test_closed_form(acc, auc, expected):
    assert augrc_closed_form(ClosedFormInputs(acc, auc)) == pytest.approx(expected, abs=1e-15)


def test_inputs_validated():
    with pytest.raises(DomainError):
        ClosedFormInputs(1.2, 0.5)
    with pytest.raises(DomainError):
        ClosedFormInputs(0.5, -0.1)


def test_gradients():
    assert augrc_gradients(ClosedFormInputs(0.5, 0.75)) == (-0.25, -0.5)
    for x in (0.0, 0.4, 1.0):
        d_auc, d_acc = augrc_gradients(ClosedFormInputs(1.0, x))
        assert d_auc == 0.0
        assert d_acc == pytest.approx(x - 1.0)


def test_gradients_negative_inside():
    for acc in np.linspace(0.01, 0.99, 50):
        for auc in np.linspace(0.0, 1.0, 51):
            d_auc, d_acc = augrc_gradients(ClosedFormInputs(acc, auc))
            assert d_auc < 0 and d_acc < 0


def test_f1_auc_star_values():
    assert f1_auc_star(1.0) == pytest.approx(2 * (1 - math.log(2)), abs=1e-12)
    assert f1_auc_star(0.5) == pytest.approx(1 + math.log(0.75), abs=1e-12)
    assert f1_auc_star(1e-9) < 1e-6
    with pytest.raises(DomainError):
        f1_auc_star(0.0)


def test_derivative_matches_finite_difference():
    h = 1e-6
    for a in np.linspace(0.05, 0.99, 40):
        fd = (f1_auc_star(a + h) - f1_auc_star(a - h)) / (2 * h)
        assert f1_auc_star_derivative(a) == pytest.approx(fd, abs=1e-6)


def test_argmax():
    a = f1_auc_star_argmax()
    # independently: scipy root of the derivative
    from scipy.optimize import brentq

    ref = brentq(f1_auc_star_derivative, 0.3, 0.9, xtol=1e-14)
    assert a == pytest.approx(ref, abs=1e-9)
    assert a == pytest.approx(0.5561852, abs=1e-7)
    assert f1_auc_star(a - 0.05) < f1_auc_star(a)
    assert f1_auc_star(a + 0.05) < f1_auc_star(a)


def test_argmax_bad_bracket():
    with pytest.raises(DomainError):
        f1_auc_star_argmax(0.6, 0.9)
