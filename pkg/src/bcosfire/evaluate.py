"""Segmentation thresholding and pixel-wise evaluation.

Thresholds sweep the fixed grid {0.00, 0.01, ..., 1.00} on normalized
responses; the selected threshold maximizes MCC (mean MCC across images in
dataset mode), ties broken toward the smallest threshold. Counting uses a
cumulative histogram over the grid, which reproduces the naive per-
threshold comparison exactly because bin edges are the grid floats
themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError, SizeMismatchError
from .imgio import BinaryMask
from .respond import ResponseMap

THRESHOLD_GRID = tuple(k / 100.0 for k in range(101))

_GRID = np.asarray(THRESHOLD_GRID)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricSet:
    tpr: float
    fpr: float
    se: float
    sp: float
    acc: float
    mcc: float


def threshold(resp: ResponseMap, t: float) -> BinaryMask:
    """Binary segmentation: pixel true iff response >= t."""
    if not 0.0 <= t <= 1.0:
        raise ParameterError(f"threshold must be in [0, 1], got {t}")
    return BinaryMask(resp.data >= t)


def _check_dims(a, b, what: str) -> None:
    if a.data.shape != b.data.shape:
        raise SizeMismatchError(
            f"{what} dimensions {b.data.shape} do not match {a.data.shape}"
        )


def confusion(seg: BinaryMask, gt: BinaryMask,
              mask: Optional[BinaryMask] = None) -> ConfusionCounts:
    """Count TP/FP/TN/FN over in-mask pixels; gt true is the line class."""
    _check_dims(seg, gt, "ground truth")
    s = seg.data
    g = gt.data
    if mask is not None:
        _check_dims(seg, mask, "mask")
        s = s[mask.data]
        g = g[mask.data]
    tp = int(np.count_nonzero(s & g))
    fp = int(np.count_nonzero(s & ~g))
    fn = int(np.count_nonzero(~s & g))
    tn = int(g.size - tp - fp - fn)
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def metrics(c: ConfusionCounts) -> MetricSet:
    """All rates from one confusion table; degenerate denominators give 0."""
    n = c.total
    if n == 0:
        raise ParameterError("no pixels to evaluate (empty mask?)")
    tp, fp, tn, fn = c.tp, c.fp, c.tn, c.fn
    tpr = tp / (tp + fn) if tp + fn else 0.0
    fpr = fp / (fp + tn) if fp + tn else 0.0
    sp = tn / (tn + fp) if tn + fp else 0.0
    acc = (tp + tn) / n
    s = (tp + fn) / n
    p = (tp + fp) / n
    if s in (0.0, 1.0) or p in (0.0, 1.0):
        mcc = 0.0
    else:
        mcc = (tp / n - s * p) / np.sqrt(p * s * (1.0 - s) * (1.0 - p))
    return MetricSet(tpr=tpr, fpr=fpr, se=tpr, sp=sp, acc=acc, mcc=float(mcc))


def _sweep_counts(resp: ResponseMap, gt: BinaryMask,
                  mask: Optional[BinaryMask]) -> np.ndarray:
    """Confusion counts at every grid threshold; shape (101, 4) as tp,fp,tn,fn."""
    _check_dims(resp.image, gt, "ground truth")
    v = resp.data
    if v.min() < 0.0 or v.max() > 1.0:
        raise ParameterError("response must be normalized to [0, 1]")
    g = gt.data
    if mask is not None:
        _check_dims(resp.image, mask, "mask")
        v = v[mask.data]
        g = g[mask.data]
    if v.size == 0:
        raise ParameterError("no pixels to evaluate (empty mask?)")
    v = v.reshape(-1)
    g = g.reshape(-1)
    # idx = number of grid values <= v; pixel predicted positive for t_k, k < idx
    idx = np.searchsorted(_GRID, v, side="right")
    npos = int(np.count_nonzero(g))
    nneg = v.size - npos
    hist_pos = np.bincount(idx[g], minlength=102)
    hist_neg = np.bincount(idx[~g], minlength=102)
    # tp at grid k = positives with idx > k
    tp = npos - np.cumsum(hist_pos)[:101]
    fp = nneg - np.cumsum(hist_neg)[:101]
    fn = npos - tp
    tn = nneg - fp
    return np.stack([tp, fp, tn, fn], axis=1)


def _mcc_curve(counts: np.ndarray) -> np.ndarray:
    """MCC at each grid threshold, same arithmetic as :func:`metrics`."""
    tp = counts[:, 0].astype(np.float64)
    fp = counts[:, 1].astype(np.float64)
    fn = counts[:, 3].astype(np.float64)
    n = counts.sum(axis=1).astype(np.float64)
    s = (tp + fn) / n
    p = (tp + fp) / n
    degenerate = (s == 0.0) | (s == 1.0) | (p == 0.0) | (p == 1.0)
    denom = np.sqrt(np.where(degenerate, 1.0, p * s * (1.0 - s) * (1.0 - p)))
    mcc = (tp / n - s * p) / denom
    return np.where(degenerate, 0.0, mcc)


def _metrics_at(counts: np.ndarray, k: int) -> MetricSet:
    tp, fp, tn, fn = (int(x) for x in counts[k])
    return metrics(ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn))


def best_threshold_per_image(resp: ResponseMap, gt: BinaryMask,
                             mask: Optional[BinaryMask] = None
                             ) -> tuple[float, MetricSet]:
    """Grid threshold maximizing MCC for one image (smallest t on ties)."""
    counts = _sweep_counts(resp, gt, mask)
    k = int(np.argmax(_mcc_curve(counts)))
    return THRESHOLD_GRID[k], _metrics_at(counts, k)


def mean_metrics(sets: Sequence[MetricSet]) -> MetricSet:
    """Fieldwise arithmetic mean."""
    if not sets:
        raise ParameterError("cannot average an empty metric list")
    n = len(sets)
    return MetricSet(
        tpr=sum(m.tpr for m in sets) / n,
        fpr=sum(m.fpr for m in sets) / n,
        se=sum(m.se for m in sets) / n,
        sp=sum(m.sp for m in sets) / n,
        acc=sum(m.acc for m in sets) / n,
        mcc=sum(m.mcc for m in sets) / n,
    )


def best_threshold_per_dataset(
    items: Sequence[tuple[ResponseMap, BinaryMask, Optional[BinaryMask]]],
) -> tuple[float, MetricSet, list[MetricSet]]:
    """Single grid threshold maximizing the mean MCC across images.

    Returns (threshold, mean metrics at it, per-image metrics at it).
    """
    if not items:
        raise ParameterError("dataset is empty")
    all_counts = [_sweep_counts(resp, gt, mask) for resp, gt, mask in items]
    curves = np.stack([_mcc_curve(c) for c in all_counts])
    k = int(np.argmax(curves.mean(axis=0)))
    per_image = [_metrics_at(c, k) for c in all_counts]
    return THRESHOLD_GRID[k], mean_metrics(per_image), per_image


def metrics_csv(rows: Sequence[tuple[str, float, MetricSet]]) -> str:
    """CSV with header image,threshold,tpr,fpr,se,sp,acc,mcc (6 decimals)."""
    out = ["image,threshold,tpr,fpr,se,sp,acc,mcc"]
    for name, t, m in rows:
        out.append(
            f"{name},{t:.2f},{m.tpr:.6f},{m.fpr:.6f},{m.se:.6f},"
            f"{m.sp:.6f},{m.acc:.6f},{m.mcc:.6f}"
        )
    return "\n".join(out) + "\n"
