import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dpcflow.errors import DefinedOnEmpty, LengthMismatch
from dpcflow.metrics import (
    ConfusionMatrix,
    accuracy,
    confusion,
    false_positive_rate,
    g_mean,
    undefined_rates,
)

WORKED = ConfusionMatrix(tp=8, tn=90, fp=10, fn=2)


def test_confusion_counts():
    A, N = True, False
    assert confusion([A, N, N], [A, N, N]) == ConfusionMatrix(1, 2, 0, 0)
    assert confusion([N] * 10, [A] * 3 + [N] * 7) == ConfusionMatrix(0, 7, 0, 3)
    assert confusion([A] * 5, [N] * 5) == ConfusionMatrix(0, 0, 5, 0)
    with pytest.raises(LengthMismatch):
        confusion([A], [A, N])


def test_worked_cell():
    assert accuracy(WORKED) == pytest.approx(98 / 110)
    assert g_mean(WORKED) == pytest.approx(math.sqrt(0.8 * 0.9))
    assert false_positive_rate(WORKED) == pytest.approx(0.1)


def test_edges():
    perfect = ConfusionMatrix(3, 7, 0, 0)
    assert accuracy(perfect) == g_mean(perfect) == 1.0
    assert false_positive_rate(perfect) == 0.0
    assert accuracy(ConfusionMatrix(0, 0, 4, 6)) == 0.0
    assert g_mean(ConfusionMatrix(0, 7, 0, 3)) == 0.0
    assert false_positive_rate(ConfusionMatrix(2, 0, 5, 0)) == 1.0
    with pytest.raises(DefinedOnEmpty):
        accuracy(ConfusionMatrix(0, 0, 0, 0))


def test_undefined_flags():
    assert undefined_rates(ConfusionMatrix(0, 5, 1, 0)) == ("tpr",)
    assert undefined_rates(ConfusionMatrix(2, 0, 0, 1)) == ("tnr", "fpr")
    assert g_mean(ConfusionMatrix(0, 5, 1, 0)) == 0.0


counts = st.integers(0, 1000)


@given(counts, counts, counts, counts)
def test_g_mean_bounds(tp, tn, fp, fn):
    cm = ConfusionMatrix(tp, tn, fp, fn)
    g = g_mean(cm)
    assert 0 <= g <= 1
    if tp + fn and tn + fp:
        assert (g == 1.0) == (fp == 0 and fn == 0)
