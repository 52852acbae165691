"""Paired nonparametric comparison of frontal vs lateral metric scores.

Wilcoxon signed-rank (exact by sign-assignment enumeration up to n = 25,
normal approximation with tie and continuity corrections above), Cliff's
delta with Small/Medium/Large labels at |delta| thresholds 0.33 and 0.474,
and Shapiro-Wilk normality annotation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sstats

from .errors import (
    AllZeroDifferences,
    ConstantSample,
    EmptySample,
    UnpairedSubject,
    UnsupportedSampleSize,
)
from .features import FeatureName
from .signal_core import SideLabel, ViewLabel

EXACT_N_MAX = 25
DELTA_MEDIUM = 0.33
DELTA_LARGE = 0.474

# direction of "better" per metric; IE has no direction in reports
METRIC_DIRECTION = {"dtw": "lower", "mcc": "higher", "kld": "lower", "ie": None}


@dataclass(frozen=True)
class PairedSample:
    values_a: tuple[float, ...]
    values_b: tuple[float, ...]

    def __post_init__(self):
        if len(self.values_a) != len(self.values_b):
            raise ValueError("paired samples must have equal length")
        if len(self.values_a) < 1:
            raise EmptySample("need at least one pair")

    @property
    def n(self) -> int:
        return len(self.values_a)


@dataclass(frozen=True)
class StatResult:
    feature: FeatureName
    side: SideLabel
    metric: str
    mean_sd_a: tuple[float, float]  # frontal
    mean_sd_b: tuple[float, float]  # lateral
    p_value: float
    cliffs_delta: float
    effect_label: str
    winner: str  # "frontal" | "lateral" | "tie" | "" (IE: no winner direction)


def _midranks(values: np.ndarray) -> np.ndarray:
    return sstats.rankdata(values, method="average")


def wilcoxon_signed_rank(
    s: PairedSample, method: str = "auto"
) -> tuple[float, float]:
    """Two-sided Wilcoxon signed-rank test; returns (W, p).

    W = min(W+, W-) over midranked |differences| after dropping zero
    differences. Exact p enumerates all 2^n sign assignments (n <= 25);
    larger n uses the normal approximation with tie correction and a
    continuity correction. The exact p is the fraction of assignments
    whose min(W+, W-) is <= the observed W.
    """
    if method not in ("auto", "exact", "approx"):
        raise ValueError(f"unknown method {method!r}")
    d = np.asarray(s.values_a, dtype=float) - np.asarray(s.values_b, dtype=float)
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        raise AllZeroDifferences("all paired differences are zero")
    ranks = _midranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)
    if method == "exact" or (method == "auto" and n <= EXACT_N_MAX):
        p = _exact_p(ranks, w)
    else:
        p = _approx_p(ranks, w, n)
    return w, p


def _exact_p(ranks: np.ndarray, w: float) -> float:
    # doubled midranks are exact integers, so the W+ null distribution is a
    # polynomial product over {0, 2r} per rank
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    dist = np.zeros(total + 1, dtype=np.float64)
    dist[0] = 1.0
    top = 0
    for r in doubled:
        nxt = dist.copy()
        nxt[r : top + r + 1] += dist[: top + 1]
        dist = nxt
        top += int(r)
    w2 = int(round(2.0 * w))
    low = dist[: w2 + 1].sum()  # W+ <= w
    hi_start = total - w2  # W- <= w  <=>  W+ >= total - w
    high = dist[hi_start:].sum() if hi_start <= total else 0.0
    overlap = 0.0
    if hi_start <= w2:  # the two tails intersect
        overlap = dist[hi_start : w2 + 1].sum()
    p = (low + high - overlap) / dist.sum()
    return min(1.0, float(p))


def _approx_p(ranks: np.ndarray, w: float, n: int) -> float:
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    var -= float(np.sum(tie_counts**3 - tie_counts)) / 48.0
    if var <= 0:
        return 1.0
    z = (w - mean + 0.5) / math.sqrt(var)  # continuity correction; W <= mean
    p = 2.0 * 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
    return min(1.0, float(p))


def effect_label(delta: float) -> str:
    mag = abs(delta)
    if mag >= DELTA_LARGE:
        return "large"
    if mag >= DELTA_MEDIUM:
        return "medium"
    return "small"


def cliffs_delta(s: PairedSample) -> tuple[float, str]:
    """Cliff's delta over all cross pairs, with its effect-size label."""
    a = np.asarray(s.values_a, dtype=float)
    b = np.asarray(s.values_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be non-empty")
    diff = a[:, None] - b[None, :]
    wins = int(np.count_nonzero(diff > 0))
    losses = int(np.count_nonzero(diff < 0))
    delta = (wins - losses) / (a.size * b.size)
    return float(delta), effect_label(delta)


def shapiro_wilk(values) -> tuple[float, float]:
    """Shapiro-Wilk normality test (report annotation only)."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 3 or arr.size > 5000:
        raise UnsupportedSampleSize(f"n = {arr.size} outside [3, 5000]")
    if np.all(arr == arr[0]):
        raise ConstantSample("all values equal")
    w, p = sstats.shapiro(arr)
    return float(w), float(p)


def _metric_value(record, metric: str) -> float:
    if metric == "ie":
        return record.ie_2d
    return getattr(record, metric)


def compare_views(
    records,
    feature: FeatureName,
    side: SideLabel,
    metric: str,
    alpha: float = 0.05,
) -> StatResult:
    """Paired frontal-vs-lateral comparison of one metric for one feature/side.

    A winner is declared only at p < alpha and in the metric's better
    direction; IE rows carry no winner.
    """
    if metric not in METRIC_DIRECTION:
        raise ValueError(f"unknown metric {metric!r}")
    per_view: dict[ViewLabel, dict[int, float]] = {ViewLabel.FRONTAL: {}, ViewLabel.LATERAL: {}}
    for rec in records:
        if rec.feature != feature or rec.side != side:
            continue
        if rec.view in per_view:
            per_view[rec.view][rec.trial.subject_index] = _metric_value(rec, metric)
    frontal, lateral = per_view[ViewLabel.FRONTAL], per_view[ViewLabel.LATERAL]
    subjects = sorted(set(frontal) | set(lateral))
    if not subjects:
        raise UnpairedSubject(f"no records for ({feature.value}, {side.value})")
    missing = [s for s in subjects if s not in frontal or s not in lateral]
    if missing:
        raise UnpairedSubject(
            f"subjects {missing} lack one view for ({feature.value}, {side.value}, {metric})"
        )
    a = tuple(frontal[s] for s in subjects)
    b = tuple(lateral[s] for s in subjects)
    sample = PairedSample(a, b)
    try:
        _, p = wilcoxon_signed_rank(sample)
    except AllZeroDifferences:
        p = 1.0
    delta, label = cliffs_delta(sample)
    mean_a, mean_b = float(np.mean(a)), float(np.mean(b))
    sd_a = float(np.std(a, ddof=1)) if len(a) > 1 else 0.0
    sd_b = float(np.std(b, ddof=1)) if len(b) > 1 else 0.0
    direction = METRIC_DIRECTION[metric]
    if direction is None:
        winner = ""
    elif p >= alpha or mean_a == mean_b:
        winner = "tie"
    elif (mean_a < mean_b) == (direction == "lower"):
        winner = "frontal"
    else:
        winner = "lateral"
    return StatResult(
        feature=feature, side=side, metric=metric,
        mean_sd_a=(mean_a, sd_a), mean_sd_b=(mean_b, sd_b),
        p_value=float(p), cliffs_delta=delta, effect_label=label, winner=winner,
    )
