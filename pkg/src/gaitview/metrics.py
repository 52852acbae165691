"""The four agreement metrics: DTW, max cross-correlation, KL divergence,
and information entropy, comparing a 2D feature signal against its 3D
counterpart.

All functions are pure and reentrant. Defaults: z-normalization on (pixel
and millimeter units are not directly comparable), 256 equal-width
histogram bins, base-2 logarithm, additive epsilon smoothing.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConstantSignal, DegenerateSignal, LengthMismatch, MetricError
from .features import FeatureName
from .signal_core import SideLabel, TimeSeries, TrialId, ViewLabel, resample_linear, znormalize

DEFAULT_HISTOGRAM_BINS = 256
DEFAULT_LOG_BASE = 2.0
DEFAULT_SMOOTHING_EPSILON = 1e-10


@dataclass(frozen=True)
class MetricConfig:
    normalize: bool = True
    histogram_bins: int = DEFAULT_HISTOGRAM_BINS
    log_base: float = DEFAULT_LOG_BASE
    smoothing_epsilon: float = DEFAULT_SMOOTHING_EPSILON
    dtw_distance: str = "absolute_difference"
    mcc_pearson: bool = False  # optional normalized variant; off in default reports

    def __post_init__(self):
        if self.histogram_bins < 2:
            raise ValueError("histogram_bins must be >= 2")
        if self.smoothing_epsilon <= 0:
            raise ValueError("smoothing_epsilon must be positive")
        if self.log_base <= 1:
            raise ValueError("log_base must be > 1")
        if self.dtw_distance != "absolute_difference":
            raise ValueError(f"unsupported dtw_distance {self.dtw_distance!r}")


@dataclass(frozen=True)
class MetricRecord:
    trial: TrialId
    feature: FeatureName
    side: SideLabel
    view: ViewLabel
    dtw: float
    mcc: float
    mcc_lag: int
    kld: float
    ie_2d: float
    ie_3d: float


def _prepared(ts: TimeSeries, cfg: MetricConfig) -> np.ndarray:
    if len(ts) == 0:
        raise DegenerateSignal("empty signal")
    if cfg.normalize:
        ts = znormalize(ts)
    return ts.samples


def dtw_distance(x: TimeSeries, y: TimeSeries, cfg: MetricConfig | None = None) -> float:
    """Dynamic-time-warping distance with |a - b| point cost.

    Full n x m recurrence D(i,j) = d(i,j) + min(D(i-1,j), D(i,j-1),
    D(i-1,j-1)); no warping window, no slope constraint.
    """
    cfg = cfg or MetricConfig()
    xs = _prepared(x, cfg)
    ys = _prepared(y, cfg)
    n, m = xs.size, ys.size
    if n == 0 or m == 0:
        raise DegenerateSignal("empty signal")
    # row 0: only horizontal predecessors
    prev = np.cumsum(np.abs(xs[0] - ys)).tolist()
    for i in range(1, n):
        cost = np.abs(xs[i] - ys).tolist()
        cur = [0.0] * m
        cur[0] = cost[0] + prev[0]
        up = prev
        left = cur[0]
        for j in range(1, m):
            a = up[j]
            b = up[j - 1]
            best = a if a < b else b
            if left < best:
                best = left
            left = cost[j] + best
            cur[j] = left
        prev = cur
    return float(prev[-1])


def max_cross_correlation(
    x: TimeSeries, y: TimeSeries, cfg: MetricConfig | None = None
) -> tuple[float, int]:
    """Maximum of the lagged inner product R(tau) = sum_t x_t * y_{t+tau}.

    Lags span -(N-1)..N-1 (negative lags shift x). Ties break toward the
    smallest |tau|, then toward negative tau. With cfg.mcc_pearson the
    peak value is normalized by the product of the signals' norms.
    """
    cfg = cfg or MetricConfig()
    if len(x) != len(y):
        raise LengthMismatch(f"lengths {len(x)} and {len(y)} differ")
    if len(x) < 2:
        raise DegenerateSignal("need >= 2 samples")
    xs = _prepared(x, cfg)
    ys = _prepared(y, cfg)
    n = xs.size
    r = np.correlate(ys, xs, mode="full")  # r[k] = sum_t x[t] y[t + (k - (n-1))]
    lags = np.arange(-(n - 1), n)
    order = np.lexsort((lags, np.abs(lags), -r))
    best = order[0]
    value = float(r[best])
    if cfg.mcc_pearson:
        denom = float(np.linalg.norm(xs) * np.linalg.norm(ys))
        if denom == 0.0:
            raise ConstantSignal("all-zero signal in normalized cross-correlation")
        value /= denom
    return value, int(lags[best])


def _histogram_mass(values: np.ndarray, edges: np.ndarray, eps: float) -> np.ndarray:
    counts, _ = np.histogram(values, bins=edges)
    mass = counts / counts.sum() + eps
    return mass / mass.sum()


def kl_divergence(x: TimeSeries, y: TimeSeries, cfg: MetricConfig | None = None) -> float:
    """KL divergence D(P || Q): P from the 3D signal x, Q from the 2D signal y.

    Histograms share equal-width bins spanning the pooled range of both
    signals; every bin gets epsilon mass before renormalization, so the
    divergence is finite even when Q has empty bins.
    """
    cfg = cfg or MetricConfig()
    xs = _prepared(x, cfg)
    ys = _prepared(y, cfg)
    lo = min(xs.min(), ys.min())
    hi = max(xs.max(), ys.max())
    if hi - lo == 0.0:
        raise ConstantSignal("pooled range of width zero")
    edges = np.linspace(lo, hi, cfg.histogram_bins + 1)
    p = _histogram_mass(xs, edges, cfg.smoothing_epsilon)
    q = _histogram_mass(ys, edges, cfg.smoothing_epsilon)
    val = float(np.sum(p * (np.log(p) - np.log(q)))) / math.log(cfg.log_base)
    return max(val, 0.0)


def information_entropy(x: TimeSeries, cfg: MetricConfig | None = None) -> float:
    """Shannon entropy of the signal's value histogram, in cfg.log_base units.

    A constant signal occupies a single bin and has entropy 0. Invariant
    to affine transforms of the samples (bins span the signal's own range).
    """
    cfg = cfg or MetricConfig()
    if len(x) == 0:
        raise DegenerateSignal("empty signal")
    xs = x.samples
    lo, hi = float(xs.min()), float(xs.max())
    if hi - lo == 0.0:
        return 0.0
    edges = np.linspace(lo, hi, cfg.histogram_bins + 1)
    counts, _ = np.histogram(xs, bins=edges)
    p = counts[counts > 0] / xs.size
    return float(-np.sum(p * np.log(p))) / math.log(cfg.log_base)


def compute_record(
    trial: TrialId,
    feature: FeatureName,
    side: SideLabel,
    view: ViewLabel,
    signal_2d: TimeSeries,
    signal_3d: TimeSeries,
    cfg: MetricConfig | None = None,
) -> MetricRecord:
    """All four metrics for one (trial, feature, side, view) pair.

    The 2D signal is resampled to the 3D length first; with cfg.normalize
    both signals are z-normalized once before the metrics run.
    """
    cfg = cfg or MetricConfig()
    try:
        sig2 = resample_linear(signal_2d, len(signal_3d))
        sig3 = signal_3d
        inner = cfg
        if cfg.normalize:
            sig2 = znormalize(sig2)
            sig3 = znormalize(sig3)
            inner = dataclasses.replace(cfg, normalize=False)
        dtw = dtw_distance(sig3, sig2, inner)
        mcc, lag = max_cross_correlation(sig3, sig2, inner)
        kld = kl_divergence(sig3, sig2, inner)
        ie2 = information_entropy(sig2, inner)
        ie3 = information_entropy(sig3, inner)
    except Exception as exc:
        raise MetricError(feature.value, side.value, view.value, exc) from exc
    return MetricRecord(
        trial=trial, feature=feature, side=side, view=view,
        dtw=dtw, mcc=mcc, mcc_lag=lag, kld=kld, ie_2d=ie2, ie_3d=ie3,
    )
