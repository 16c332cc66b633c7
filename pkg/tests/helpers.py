"""Shared test oracles."""

import numpy as np


def brute_force_restricted_auc(scores, active, fpr_max=0.05):
    """Exhaustive-threshold ROC construction with trapezoidal clipping.

    Independent of the production path: vertices come from explicit >=
    thresholding at every distinct score, integration from numpy trapezoid
    after inserting an interpolated boundary vertex.
    """
    scores = np.asarray(scores, dtype=float)
    active = np.asarray(active, dtype=bool)
    thresholds = np.unique(scores)[::-1]
    pos = scores[active]
    neg = scores[~active]
    tpr = [0.0]
    fpr = [0.0]
    for t in thresholds:
        tpr.append(np.mean(pos >= t))
        fpr.append(np.mean(neg >= t))
    fpr = np.asarray(fpr)
    tpr = np.asarray(tpr)
    keep = fpr <= fpr_max
    fx = np.append(fpr[keep], fpr_max)
    fy = np.append(tpr[keep], np.interp(fpr_max, fpr, tpr))
    return float(np.trapezoid(fy, fx)) / fpr_max
