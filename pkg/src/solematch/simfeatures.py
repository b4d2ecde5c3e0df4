"""Similarity metrics computed directly on aligned point clouds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyCloudError
from .pointcloud import NeighborIndex, PointCloud

OVERLAP_THRESHOLDS = (1.0, 2.0, 3.0, 5.0, 10.0)
JACCARD_DECIMALS = (0, 1, 2)


@dataclass(frozen=True)
class MinDistStats:
    """Summary of the nearest-neighbour distance distribution from Q into K*."""

    mean: float
    std: float
    p10: float
    p25: float
    p50: float
    p75: float
    p90: float

    def as_tuple(self) -> tuple:
        return (self.mean, self.std, self.p10, self.p25, self.p50, self.p75, self.p90)


def proportion_overlap(a: PointCloud, b: PointCloud, d: float, b_index: NeighborIndex | None = None) -> float:
    """Fraction of points in ``a`` within distance ``d`` (inclusive) of some point in ``b``."""
    if d <= 0:
        raise ValueError(f"overlap radius must be > 0, got {d}")
    if len(a) == 0:
        raise EmptyCloudError("proportion overlap of an empty cloud")
    if len(b) == 0:
        return 0.0
    index = b_index if b_index is not None else NeighborIndex(b)
    dists, _ = index.query(a.points)
    return float(np.mean(dists <= d))


def _round_half_away(values: np.ndarray, decimals: int) -> np.ndarray:
    # Locale- and bankers-free rounding: half always moves away from zero.
    scale = 10.0**decimals
    scaled = values * scale
    return np.copysign(np.floor(np.abs(scaled) + 0.5), scaled) / scale


def jaccard(a: PointCloud, b: PointCloud, decimals: int) -> float:
    """Jaccard index of the clouds after rounding coordinates to ``decimals`` places.

    Rounded points are deduplicated, so this is a true set intersection over
    union.  Two empty clouds score 0.
    """
    if decimals not in JACCARD_DECIMALS:
        raise ValueError(f"decimals must be one of {JACCARD_DECIMALS}, got {decimals}")
    sa = {tuple(p) for p in _round_half_away(a.points, decimals)}
    sb = {tuple(p) for p in _round_half_away(b.points, decimals)}
    union = sa | sb
    if not union:
        return 0.0
    return len(sa & sb) / len(union)


def min_dist_stats(q: PointCloud, k_star: PointCloud, k_index: NeighborIndex | None = None) -> MinDistStats:
    """Distribution summary of each Q point's distance to its closest K* point.

    Reports the mean, the population standard deviation, and the 10/25/50/75/90
    percentiles (linear interpolation).
    """
    if len(q) == 0 or len(k_star) == 0:
        raise EmptyCloudError("min-distance stats need two nonempty clouds")
    index = k_index if k_index is not None else NeighborIndex(k_star)
    dists, _ = index.query(q.points)
    p10, p25, p50, p75, p90 = np.percentile(dists, [10, 25, 50, 75, 90])
    return MinDistStats(
        mean=float(np.mean(dists)),
        std=float(np.std(dists)),
        p10=float(p10),
        p25=float(p25),
        p50=float(p50),
        p75=float(p75),
        p90=float(p90),
    )
