"""Classification metrics shared by model selection and fairness reports."""

import numpy as np

POSITIVE = 1   # depression
NEGATIVE = -1  # none


def binary_confusion(y_true, y_pred, positive=POSITIVE):
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    tp = int(np.sum((y_true == positive) & (y_pred == positive)))
    fn = int(np.sum((y_true == positive) & (y_pred != positive)))
    fp = int(np.sum((y_true != positive) & (y_pred == positive)))
    tn = int(np.sum((y_true != positive) & (y_pred != positive)))
    return tp, fp, tn, fn


def f1_score(tp, fp, fn):
    """F1 with the 0/0 -> 0 convention."""
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def macro_f1(y_true, y_pred):
    """Unweighted mean of the per-class F1 scores of a binary problem."""
    tp, fp, tn, fn = binary_confusion(y_true, y_pred)
    f1_pos = f1_score(tp, fp, fn)
    f1_neg = f1_score(tn, fn, fp)
    return (f1_pos + f1_neg) / 2.0
