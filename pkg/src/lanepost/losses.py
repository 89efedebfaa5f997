"""Segmentation score-volume numerics: a soft dice loss that penalizes
false positives, its analytic gradient, and a pixelwise accuracy metric.

Volumes are (H, W, C) float arrays. Ground truth must be one-hot across
channels; predictions must lie in [0, 1]. For two-channel road masks,
channel 0 is background and channel 1 is lane marking.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LossParams",
    "penalized_ground_truth",
    "grid_mean",
    "penalized_dice_loss",
    "penalized_dice_loss_gradient",
    "pixel_accuracy",
]


@dataclass(frozen=True)
class LossParams:
    """alpha weights the false-positive penalty, epsilon smooths the ratio."""

    alpha: float = 1e-2
    epsilon: float = 1e-5

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


def _as_volume(v, name):
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 3 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty (H, W, C) volume, got shape {arr.shape}")
    return arr


def _check_one_hot(gt):
    if not np.all((gt == 0.0) | (gt == 1.0)):
        raise ValueError("ground truth must contain only 0 and 1")
    if not np.all(gt.sum(axis=2) == 1.0):
        raise ValueError("ground truth must be one-hot across channels")


def _check_prediction(pred):
    if not np.all(np.isfinite(pred)):
        raise ValueError("prediction contains non-finite values")
    if pred.min() < 0.0 or pred.max() > 1.0:
        raise ValueError("prediction values must lie in [0, 1]")


def _check_pair(gt, pred):
    gt = _as_volume(gt, "gt")
    pred = _as_volume(pred, "pred")
    if gt.shape != pred.shape:
        raise ValueError(f"shape mismatch: gt {gt.shape} vs pred {pred.shape}")
    _check_one_hot(gt)
    _check_prediction(pred)
    return gt, pred


def penalized_ground_truth(gt, alpha):
    """Replace every zero entry of a one-hot volume with -alpha.

    Entries that are 1 pass through unchanged, so the modified volume acts
    as a signed weight: overlap with true pixels counts positively, overlap
    with background counts against.
    """
    gt = _as_volume(gt, "gt")
    _check_one_hot(gt)
    out = gt.copy()
    out[gt == 0.0] = -alpha
    return out


def grid_mean(a):
    """Mean of a 2D grid: sum of entries over the element count."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValueError(f"expected a non-empty 2D grid, got shape {arr.shape}")
    return float(arr.mean())


def penalized_dice_loss(gt, pred, params: LossParams = LossParams()):
    """Soft dice loss with false positives pushed into the numerator.

    Per channel k, with ghat the penalized ground truth:

        term_k = (2 * mean(ghat_k * pred_k) + eps)
                 / (mean(gt_k * gt_k) + mean(pred_k * pred_k) + eps)

    and the loss is -sum_k term_k. A perfect binary prediction scores
    exactly -C for C channels; predicted mass on background pixels drags
    the numerator down through the -alpha entries of ghat.
    """
    gt, pred = _check_pair(gt, pred)
    ghat = penalized_ground_truth(gt, params.alpha)
    eps = params.epsilon
    loss = 0.0
    for k in range(gt.shape[2]):
        numerator = 2.0 * grid_mean(ghat[:, :, k] * pred[:, :, k]) + eps
        denominator = (
            grid_mean(gt[:, :, k] * gt[:, :, k])
            + grid_mean(pred[:, :, k] * pred[:, :, k])
            + eps
        )
        loss -= numerator / denominator
    return loss


def penalized_dice_loss_gradient(gt, pred, params: LossParams = LossParams()):
    """Analytic d(loss)/d(pred) of penalized_dice_loss, same shape as pred.

    Each channel's term is a quotient N_k / D_k where only
    N_k = 2*mean(ghat_k*pred_k) + eps and the mean(pred_k^2) part of D_k
    depend on pred, so

        d(loss)/d(pred_ijk) = (2 / (H*W)) * (N_k * pred_ijk - ghat_ijk * D_k) / D_k^2

    Channels never mix.
    """
    gt, pred = _check_pair(gt, pred)
    ghat = penalized_ground_truth(gt, params.alpha)
    eps = params.epsilon
    area = gt.shape[0] * gt.shape[1]
    grad = np.empty_like(pred)
    for k in range(gt.shape[2]):
        g = gt[:, :, k]
        gh = ghat[:, :, k]
        p = pred[:, :, k]
        numerator = 2.0 * grid_mean(gh * p) + eps
        denominator = grid_mean(g * g) + grid_mean(p * p) + eps
        grad[:, :, k] = (2.0 / area) * (numerator * p - gh * denominator) / denominator**2
    return grad


def pixel_accuracy(gt, pred):
    """Fraction of pixels whose argmax channel agrees between gt and pred.

    Argmax ties in pred resolve to the lowest channel index.
    """
    gt, pred = _check_pair(gt, pred)
    return float(np.mean(gt.argmax(axis=2) == pred.argmax(axis=2)))
