"""Confidence-based label-free accuracy estimators: AC, DOC, ATC, IM.

All of them calibrate (at most) on the labeled initialization batch and then
read only the model's max-class confidence on the target batch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SourceCalibration:
    source_confidences: np.ndarray
    source_correct: np.ndarray
    source_accuracy: float
    atc_threshold: float
    n_classes: int


def calibrate(source_probs: np.ndarray, source_labels: np.ndarray) -> SourceCalibration:
    """Fit the shared calibration quantities on the initialization batch."""
    probs = np.asarray(source_probs, dtype=float)
    labels = np.asarray(source_labels, dtype=int)
    confs = probs.max(axis=0)
    correct = probs.argmax(axis=0) == labels
    acc = float(correct.mean())
    return SourceCalibration(confs, correct, acc, atc_fit(confs, acc), probs.shape[0])


def ac(target_probs: np.ndarray) -> float:
    """Average confidence: mean of the max class probability."""
    return float(np.asarray(target_probs, dtype=float).max(axis=0).mean())


def doc(cal: SourceCalibration, target_probs: np.ndarray) -> float:
    """Source accuracy shifted by the confidence gap, clamped to [0, 1]."""
    gap = ac(target_probs) - float(cal.source_confidences.mean())
    return float(np.clip(cal.source_accuracy + gap, 0.0, 1.0))


def atc_fit(source_confidences: np.ndarray, source_accuracy: float) -> float:
    """Confidence threshold whose exceedance rate matches source accuracy.

    Picks theta so that the fraction of source samples with confidence
    strictly above theta is as close to the accuracy as the empirical
    distribution allows.
    """
    confs = np.sort(np.asarray(source_confidences, dtype=float))
    n = len(confs)
    n_correct = int(round(source_accuracy * n))
    k = n - n_correct
    if k == 0:
        return float(confs[0] - 1.0)
    return float(confs[k - 1])


def atc_estimate(threshold: float, target_confidences: np.ndarray) -> float:
    """Fraction of target samples with confidence strictly above threshold."""
    confs = np.asarray(target_confidences, dtype=float)
    return float((confs > threshold).mean())


def im_estimate(
    cal: SourceCalibration,
    source_confidences: np.ndarray,
    target_confidences: np.ndarray,
    bins: int = 10,
) -> float:
    """Importance reweighting over equal-width confidence bins.

    Source per-bin accuracies are reweighted by the target bin frequencies;
    bins with no source mass fall back to the overall source accuracy.
    """
    if bins < 1:
        raise ValueError("bins must be >= 1")
    src = np.asarray(source_confidences, dtype=float)
    tgt = np.asarray(target_confidences, dtype=float)
    edges = np.linspace(1.0 / cal.n_classes, 1.0, bins + 1)
    s_bin = np.clip(np.digitize(src, edges) - 1, 0, bins - 1)
    t_bin = np.clip(np.digitize(tgt, edges) - 1, 0, bins - 1)
    per_bin = np.full(bins, cal.source_accuracy)
    for b in range(bins):
        mask = s_bin == b
        if mask.any():
            per_bin[b] = cal.source_correct[mask].mean()
    freq = np.bincount(t_bin, minlength=bins) / len(tgt)
    return float((freq * per_bin).sum())
