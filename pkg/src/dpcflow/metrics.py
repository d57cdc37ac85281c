"""Binary detection metrics with Anomaly as the positive class."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DefinedOnEmpty, LengthMismatch


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self):
        return self.tp + self.tn + self.fp + self.fn


def confusion(pred, truth):
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise LengthMismatch(f"{pred.shape[0]} predictions for {truth.shape[0]} labels")
    return ConfusionMatrix(
        tp=int(np.count_nonzero(pred & truth)),
        tn=int(np.count_nonzero(~pred & ~truth)),
        fp=int(np.count_nonzero(pred & ~truth)),
        fn=int(np.count_nonzero(~pred & truth)),
    )


def _rate(num, den):
    return num / den if den else 0.0


def accuracy(cm):
    if cm.total == 0:
        raise DefinedOnEmpty("accuracy of an empty confusion matrix")
    return (cm.tp + cm.tn) / cm.total


def true_positive_rate(cm):
    return _rate(cm.tp, cm.tp + cm.fn)


def true_negative_rate(cm):
    return _rate(cm.tn, cm.tn + cm.fp)


def g_mean(cm):
    """Geometric mean of sensitivity and specificity.

    A rate whose class is absent counts as 0; see :func:`undefined_rates`.
    """
    return math.sqrt(true_positive_rate(cm) * true_negative_rate(cm))


def false_positive_rate(cm):
    return _rate(cm.fp, cm.fp + cm.tn)


def undefined_rates(cm):
    """Names of rates that fell back to 0 because their class was empty."""
    flags = []
    if cm.tp + cm.fn == 0:
        flags.append("tpr")
    if cm.tn + cm.fp == 0:
        flags += ["tnr", "fpr"]
    return tuple(flags)
