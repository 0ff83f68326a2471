"""Classification and support-recovery measures."""

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata


def auc_counts(scores, labels):
    """(2U, 2 n_pos n_neg) as integers, where U is the Mann-Whitney count
    with ties worth one half. Their ratio is the AUC."""
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise ValueError("scores and labels differ in length")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = int((labels == -1).sum())
    if n_pos + n_neg != labels.shape[0]:
        raise ValueError("labels must be -1 or +1")
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative "
                         "label")
    # Doubled average ranks are integers, so the statistic is exact.
    twice_ranks = np.rint(2 * rankdata(scores)).astype(np.int64)
    twice_u = int(twice_ranks[pos].sum()) - n_pos * (n_pos + 1)
    return twice_u, 2 * n_pos * n_neg


def auc(scores, labels):
    """Area under the ROC curve via the Mann-Whitney rank sum.

    Tied scores count one half per positive/negative pair.
    """
    num, den = auc_counts(scores, labels)
    return num / den


@dataclass(frozen=True)
class EvalReport:
    auc: float | None
    f1: float | None
    support_size: int
    false_positives: int | None
    precision: float | None
    recall: float | None

    def to_dict(self):
        return asdict(self)


def support_scores(est_support, true_support):
    """(precision, recall, f1, false positives) of an estimated support."""
    est = {int(i) for i in est_support}
    true = {int(i) for i in true_support}
    hits = len(est & true)
    precision = hits / len(est) if est else 0.0
    recall = hits / len(true) if true else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall > 0 else 0.0)
    return precision, recall, f1, len(est - true)


def recovery_report(est, truth, scores=None, labels=None):
    """Support recovery of ``est`` against the planted ``truth``.

    ``est`` is a Solution or coefficient vector. AUC is filled in when
    ``scores`` and ``labels`` are given.
    """
    beta = np.asarray(getattr(est, "beta", est), dtype=float)
    truth = np.asarray(truth, dtype=float)
    if beta.shape != truth.shape:
        raise ValueError(f"estimate has length {beta.shape[0]}, truth has "
                         f"{truth.shape[0]}")
    prec, rec, f1, fp = support_scores(np.flatnonzero(beta),
                                       np.flatnonzero(truth))
    a = None if scores is None else auc(scores, labels)
    return EvalReport(a, f1, int(np.count_nonzero(beta)), fp, prec, rec)


def evaluate(beta, d, truth=None):
    """AUC of X beta on ``d`` plus recovery measures when ``truth`` is set."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (d.p,):
        raise ValueError(f"model has {beta.shape[0]} coefficients, data has "
                         f"{d.p} features")
    scores = d.matvec(beta)
    try:
        a = auc(scores, d.y)
    except ValueError:
        a = None
    if truth is None:
        return EvalReport(a, None, int(np.count_nonzero(beta)), None, None,
                          None)
    rep = recovery_report(beta, truth)
    return EvalReport(a, rep.f1, rep.support_size, rep.false_positives,
                      rep.precision, rep.recall)
