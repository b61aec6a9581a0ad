"""Scores for estimated inclusion probabilities against a known truth."""

import numpy as np
from scipy.stats import rankdata


def _inputs(scores, truth):
    scores = np.asarray(scores, dtype=float).ravel()
    truth = np.asarray(truth).ravel()
    if scores.shape != truth.shape:
        raise ValueError("scores and truth differ in length")
    if not np.all((truth == 0) | (truth == 1)):
        raise ValueError("truth labels must be 0/1")
    return scores, truth.astype(bool)


def _both_classes(truth):
    if truth.all() or not truth.any():
        raise ValueError("truth must contain both positives and negatives")


def auc_pr(scores, truth):
    """Area under the step-interpolated precision-recall curve.

    Tied scores form a single threshold, so equal scores never get an
    arbitrary ordering.
    """
    scores, truth = _inputs(scores, truth)
    n_pos = int(truth.sum())
    if n_pos == 0:
        raise ValueError("auc_pr needs at least one positive")
    order = np.argsort(-scores, kind="mergesort")
    s_sorted = scores[order]
    tp = np.cumsum(truth[order])
    fp = np.cumsum(~truth[order])
    # last index of every block of tied scores
    last = np.flatnonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])
    tp, fp = tp[last], fp[last]
    precision = tp / (tp + fp)
    recall = tp / n_pos
    return float(np.sum(np.diff(np.r_[0.0, recall]) * precision))


def auc_roc(scores, truth):
    """Normalised Mann-Whitney U; ties count one half."""
    scores, truth = _inputs(scores, truth)
    _both_classes(truth)
    n_pos = int(truth.sum())
    n_neg = truth.size - n_pos
    ranks = rankdata(scores)
    u = ranks[truth].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def p_plus_minus(scores, truth):
    """Mean score over true positives and over true negatives."""
    scores, truth = _inputs(scores, truth)
    _both_classes(truth)
    return float(scores[truth].mean()), float(scores[~truth].mean())


def all_metrics(scores, truth):
    p_plus, p_minus = p_plus_minus(scores, truth)
    return {
        "auc_pr": auc_pr(scores, truth),
        "auc_roc": auc_roc(scores, truth),
        "p_plus": p_plus,
        "p_minus": p_minus,
    }
