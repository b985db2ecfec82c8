"""Retrieval-reliability metrics over a query's distance distribution.

Because scenario corpora are unlabeled, a query result cannot be graded
against ground truth. Instead, the shape of the sorted distance
distribution is judged: a trustworthy search shows a few very close
records, some clearly far ones, and a smooth middle, while near-constant
distances (low variance) mark a failed search.

Definitions, over distances sorted ascending D_1 <= ... <= D_N and gaps
G_n = D_{n+1} - D_n:

* largest gap      max(G_n), 0 when N == 1
* min distance     D_1
* max distance     D_N
* range            D_N - D_1
* std dev          population standard deviation of all D_n
* relative gap     100 * largest_gap / range (percent; 0 when range is 0)

Gaps are computed over the ascending sort: that is the only reading under
which the largest gap is meaningful, and the published relative-gap /
range identity confirms it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import EmptySeries


@dataclass(frozen=True)
class BandThresholds:
    """Similarity cutoffs for the three relevance bands."""

    high: float = 0.9
    low: float = 0.4

    def __post_init__(self):
        if not (-1.0 <= self.low < self.high <= 1.0):
            raise ValueError(f"need -1 <= low < high <= 1, got low={self.low} high={self.high}")


class RelevanceBand(str, Enum):
    HIGHLY_RELEVANT = "highly_relevant"
    MODERATELY_RELEVANT = "moderately_relevant"
    NON_RELEVANT = "non_relevant"


class Verdict(str, Enum):
    RELIABLE = "reliable"
    FAILED = "failed"
    INSUFFICIENT_DATA = "insufficient_data"


@dataclass(frozen=True)
class VerdictConfig:
    """Knobs for the reliability verdict. All defaults are configuration,
    not derived quantities; surface them rather than hard-coding."""

    min_high: int = 1
    min_low: int = 1
    min_records: int = 5
    variance_floor: float = 0.01
    cluster_gap_fraction: float = 0.15


@dataclass
class DistanceSeries:
    """Sorted per-record distances for one query, plus consecutive gaps."""

    query: str
    values: list[float]
    gaps: list[float] = field(default_factory=list)


@dataclass
class MetricsReport:
    largest_gap: float
    min_distance: float
    max_distance: float
    distance_range: float
    std_dev: float
    relative_gap_pct: float
    verdict: Verdict

    def as_dict(self) -> dict:
        return {
            "largest_gap": self.largest_gap,
            "min_distance": self.min_distance,
            "max_distance": self.max_distance,
            "distance_range": self.distance_range,
            "std_dev": self.std_dev,
            "relative_gap_pct": self.relative_gap_pct,
            "verdict": self.verdict.value,
        }


def make_series(distances: list[float], query: str = "") -> DistanceSeries:
    """Sort distances ascending and derive the consecutive gaps."""
    if not distances:
        raise EmptySeries("distance series needs at least one value")
    values = sorted(float(d) for d in distances)
    gaps = [b - a for a, b in zip(values, values[1:])]
    return DistanceSeries(query=query, values=values, gaps=gaps)


def band(similarity: float, thresholds: BandThresholds = BandThresholds()) -> RelevanceBand:
    """Three-way relevance split; both comparisons are strict, so boundary
    scores fall in the moderate band."""
    if similarity > thresholds.high:
        return RelevanceBand.HIGHLY_RELEVANT
    if similarity < thresholds.low:
        return RelevanceBand.NON_RELEVANT
    return RelevanceBand.MODERATELY_RELEVANT


def verdict(series: DistanceSeries,
            thresholds: BandThresholds = BandThresholds(),
            cfg: VerdictConfig = VerdictConfig()) -> Verdict:
    """Rule-based reliability judgment of one query's distance series.

    Reliable requires (a) at least ``min_high`` records above the high
    similarity cutoff, (b) at least ``min_low`` below the low cutoff, and
    (c) no visible cluster split inside the moderate band (no similarity
    gap wider than ``cluster_gap_fraction`` of the band width). Low
    variance always fails regardless of the band rules; too few records is
    judged before anything else.
    """
    n = len(series.values)
    if n < cfg.min_records:
        return Verdict.INSUFFICIENT_DATA

    values = np.asarray(series.values)
    dist_range = float(values[-1] - values[0])
    std_dev = float(np.std(values))
    if std_dev < cfg.variance_floor or dist_range == 0.0:
        return Verdict.FAILED

    similarities = 1.0 - values  # descending as distances ascend
    n_high = int(np.count_nonzero(similarities > thresholds.high))
    n_low = int(np.count_nonzero(similarities < thresholds.low))
    if n_high < cfg.min_high or n_low < cfg.min_low:
        return Verdict.FAILED

    moderate = np.sort(similarities[(similarities >= thresholds.low)
                                    & (similarities <= thresholds.high)])
    band_width = thresholds.high - thresholds.low
    max_allowed = cfg.cluster_gap_fraction * band_width
    if moderate.size >= 2:
        if float(np.max(np.diff(moderate))) > max_allowed:
            return Verdict.FAILED
    return Verdict.RELIABLE


def compute_metrics(series: DistanceSeries,
                    thresholds: BandThresholds = BandThresholds(),
                    cfg: VerdictConfig = VerdictConfig()) -> MetricsReport:
    """Evaluate all six metrics plus the verdict for one series."""
    values = series.values
    largest_gap = max(series.gaps) if series.gaps else 0.0
    min_d = values[0]
    max_d = values[-1]
    dist_range = max_d - min_d
    std_dev = float(np.std(np.asarray(values)))
    relative_gap = 100.0 * largest_gap / dist_range if dist_range > 0 else 0.0
    return MetricsReport(
        largest_gap=largest_gap,
        min_distance=min_d,
        max_distance=max_d,
        distance_range=dist_range,
        std_dev=std_dev,
        relative_gap_pct=relative_gap,
        verdict=verdict(series, thresholds, cfg),
    )


def _quartile(values: np.ndarray, pct: float) -> float:
    """Nearest-rank percentile (numpy's inverted CDF)."""
    return float(np.percentile(values, pct, method="inverted_cdf"))


def export_plot_data(series: DistanceSeries, report: MetricsReport,
                     thresholds: BandThresholds = BandThresholds()) -> dict:
    """Assemble the plot document consumed by consoles and the report path.

    Field order is stable: curve, bands, box, metrics, verdict. The box
    overlay uses nearest-rank quartiles.
    """
    values = np.asarray(series.values)
    similarities = 1.0 - values
    counts = {"high": 0, "moderate": 0, "low": 0}
    for s in similarities:
        b = band(float(s), thresholds)
        if b is RelevanceBand.HIGHLY_RELEVANT:
            counts["high"] += 1
        elif b is RelevanceBand.MODERATELY_RELEVANT:
            counts["moderate"] += 1
        else:
            counts["low"] += 1
    box = {
        "min": float(values[0]),
        "q1": _quartile(values, 25.0),
        "median": _quartile(values, 50.0),
        "q3": _quartile(values, 75.0),
        "max": float(values[-1]),
    }
    return {
        "curve": [float(v) for v in series.values],
        "bands": counts,
        "box": box,
        "metrics": {
            "largest_gap": report.largest_gap,
            "min_distance": report.min_distance,
            "max_distance": report.max_distance,
            "distance_range": report.distance_range,
            "std_dev": report.std_dev,
            "relative_gap_pct": report.relative_gap_pct,
        },
        "verdict": report.verdict.value,
    }
