"""2D point clouds, rigid transforms, and nearest-neighbour queries.

Clouds are immutable wrappers around an (n, 2) float array.  The rigid
transform model is rotation about the origin followed by translation, which
is the only motion the registration stage is allowed to estimate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateCutError, EmptyCloudError

CUT_REGIONS = ("toe", "heel", "inside", "outside")
FEET = ("left", "right")


@dataclass(frozen=True)
class PointCloud:
    """Set of 2D coordinates; duplicates are permitted, order is meaningful."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must have shape (n, 2), got {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValueError("point coordinates must be finite")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    def bounds(self) -> tuple[float, float, float, float]:
        """(min_x, min_y, max_x, max_y); requires a nonempty cloud."""
        if len(self) == 0:
            raise EmptyCloudError("bounds of an empty cloud")
        return (
            float(self.x.min()),
            float(self.y.min()),
            float(self.x.max()),
            float(self.y.max()),
        )

    def to_csv(self, path) -> None:
        header = "x,y"
        np.savetxt(path, self.points, delimiter=",", header=header, comments="", fmt="%.10g")

    @classmethod
    def from_csv(cls, path) -> "PointCloud":
        pts = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if pts.size == 0:
            return cls(np.empty((0, 2)))
        return cls(pts)


@dataclass(frozen=True)
class RigidTransform:
    """Rotation ``theta`` (radians, about the origin) then translation (tx, ty)."""

    theta: float = 0.0
    tx: float = 0.0
    ty: float = 0.0

    def matrix(self) -> np.ndarray:
        c, s = np.cos(self.theta), np.sin(self.theta)
        return np.array([[c, -s], [s, c]])

    def compose(self, inner: "RigidTransform") -> "RigidTransform":
        """Transform equal to applying ``inner`` first, then ``self``."""
        r = self.matrix() @ np.array([inner.tx, inner.ty])
        return RigidTransform(self.theta + inner.theta, r[0] + self.tx, r[1] + self.ty)

    def to_json(self) -> str:
        return json.dumps({"theta": self.theta, "tx": self.tx, "ty": self.ty})

    @classmethod
    def from_json(cls, text: str) -> "RigidTransform":
        obj = json.loads(text)
        return cls(float(obj["theta"]), float(obj["tx"]), float(obj["ty"]))


IDENTITY = RigidTransform()


def apply(tf: RigidTransform, cloud: PointCloud) -> PointCloud:
    """Rotate each point about the origin by theta, then translate; order preserved."""
    rotated = cloud.points @ tf.matrix().T
    return PointCloud(rotated + np.array([tf.tx, tf.ty]))


def apply_to_array(tf: RigidTransform, pts: np.ndarray) -> np.ndarray:
    return pts @ tf.matrix().T + np.array([tf.tx, tf.ty])


def invert(tf: RigidTransform) -> RigidTransform:
    """Inverse transform, so ``invert(tf)`` composed with ``tf`` is the identity."""
    c, s = np.cos(-tf.theta), np.sin(-tf.theta)
    t = np.array([[c, -s], [s, c]]) @ np.array([tf.tx, tf.ty])
    return RigidTransform(-tf.theta, -t[0], -t[1])


class NeighborIndex:
    """KD-tree over a cloud answering exact nearest-neighbour queries.

    Single-point queries break distance ties by lowest insertion order so
    results are reproducible; bulk queries return exact minimum distances.
    """

    def __init__(self, cloud: PointCloud):
        if len(cloud) == 0:
            raise EmptyCloudError("cannot index an empty cloud")
        self._points = cloud.points
        self._tree = cKDTree(self._points)

    def __len__(self) -> int:
        return self._points.shape[0]

    def nearest(self, q) -> tuple[np.ndarray, float]:
        """Closest indexed point to ``q`` and its Euclidean distance."""
        q = np.asarray(q, dtype=np.float64)
        dist, idx = self._tree.query(q)
        # Resolve exact ties deterministically: lowest insertion order wins.
        candidates = self._tree.query_ball_point(q, dist + 0.0, p=2.0)
        if len(candidates) > 1:
            dists = np.sqrt(((self._points[candidates] - q) ** 2).sum(axis=1))
            tied = [c for c, d in zip(candidates, dists) if d == dist]
            if tied:
                idx = min(tied)
        return self._points[idx], float(dist)

    def query(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized nearest-neighbour distances and indices for many points."""
        dists, idx = self._tree.query(np.asarray(pts, dtype=np.float64))
        return dists, idx


def nearest(index: NeighborIndex, q) -> tuple[np.ndarray, float]:
    return index.nearest(q)


def downsample(cloud: PointCloud, rate: float, seed: int) -> PointCloud:
    """Uniform sample without replacement of ceil(rate * n) points.

    Deterministic for a fixed seed; selected points keep their original
    relative order.
    """
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    n = len(cloud)
    if n == 0:
        raise EmptyCloudError("cannot downsample an empty cloud")
    m = int(np.ceil(rate * n))
    rng = np.random.Generator(np.random.PCG64(seed))
    keep = np.sort(rng.choice(n, size=m, replace=False))
    return PointCloud(cloud.points[keep])


def quantile_midpoints(cloud: PointCloud) -> tuple[float, float]:
    """Center of the print as the mean of the 2.5% and 97.5% coordinate quantiles.

    Using interior quantiles instead of min/max keeps the cut line stable
    when scanner noise puts stray points far outside the print body.
    """
    if len(cloud) == 0:
        raise EmptyCloudError("cannot locate midpoints of an empty cloud")
    qx = np.quantile(cloud.x, [0.025, 0.975])
    qy = np.quantile(cloud.y, [0.025, 0.975])
    return float(qx.mean()), float(qy.mean())


def cut_partial(cloud: PointCloud, region: str, foot: str = "left") -> PointCloud:
    """Keep one side of the print, split at the quantile midpoint.

    Toe keeps y above the midpoint, heel keeps the rest.  Inside/outside cut
    at the x midpoint with the side resolved by foot: for a left foot the
    inside is x greater than the midpoint, mirrored for a right foot.
    """
    if region not in CUT_REGIONS:
        raise ValueError(f"region must be one of {CUT_REGIONS}, got {region!r}")
    if foot not in FEET:
        raise ValueError(f"foot must be one of {FEET}, got {foot!r}")
    mid_x, mid_y = quantile_midpoints(cloud)
    if region == "toe":
        mask = cloud.y > mid_y
    elif region == "heel":
        mask = cloud.y <= mid_y
    else:
        inside_is_right = foot == "left"
        if (region == "inside") == inside_is_right:
            mask = cloud.x > mid_x
        else:
            mask = cloud.x <= mid_x
    if not mask.any():
        raise DegenerateCutError(f"{region} cut discarded every point")
    return PointCloud(cloud.points[mask])


def reflect(cloud: PointCloud) -> PointCloud:
    """Mirror the cloud about its vertical (north/south) axis; y is unchanged."""
    if len(cloud) == 0:
        raise EmptyCloudError("cannot reflect an empty cloud")
    lo, hi = float(cloud.x.min()), float(cloud.x.max())
    pts = cloud.points.copy()
    pts[:, 0] = (lo + hi) - pts[:, 0]
    return PointCloud(pts)
