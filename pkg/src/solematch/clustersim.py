"""Cluster-structure comparison between two aligned point clouds.

Both clouds are partitioned into k clusters: the questioned cloud by k-means
seeded from Ward hierarchical clustering, and the aligned known cloud by
k-means seeded from the questioned cloud's final centroids.  Because the
second run starts exactly where the first one ended, clusters correspond by
index, and differences in centroid position, membership share, convergence
effort, and tightness become similarity metrics.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.spatial import cKDTree

from .errors import TooFewPointsError
from .pointcloud import PointCloud

CLUSTER_COUNTS = (20, 100)
WARD_SUBSAMPLE_LIMIT = 5000
DEFAULT_KMEANS_MAX_ITER = 300


@dataclass
class Clustering:
    k: int
    assignments: np.ndarray
    centroids: np.ndarray
    iterations: int
    empty_clusters: list = field(default_factory=list)
    objective_history: list = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return bool(self.empty_clusters)


@dataclass(frozen=True)
class ClusterMetrics:
    k: int
    cdm: float
    cpm: float
    im: int
    twrm: float
    degenerate: bool = False


def ward_centroids(cloud: PointCloud, k: int, seed: int = 0) -> np.ndarray:
    """Centroids of the k clusters found by Ward-linkage hierarchical clustering.

    Ward linkage needs quadratic memory, so clouds beyond the subsample limit
    are seeded from a uniform random subsample; the downstream k-means still
    runs on the full cloud.
    """
    n = len(cloud)
    if n < k:
        raise TooFewPointsError(f"need at least {k} points, have {n}")
    pts = cloud.points
    if n > WARD_SUBSAMPLE_LIMIT:
        rng = np.random.Generator(np.random.PCG64(seed))
        keep = np.sort(rng.choice(n, size=WARD_SUBSAMPLE_LIMIT, replace=False))
        pts = pts[keep]
    labels = fcluster(linkage(pts, method="ward"), t=k, criterion="maxclust")
    centroids = [pts[labels == u].mean(axis=0) for u in np.unique(labels)]
    # Tied merge heights (frequent on pixel lattices) can leave fewer than k
    # flat clusters; top up with farthest-point seeds so k-means gets k.
    while len(centroids) < k:
        dists, _ = cKDTree(np.asarray(centroids)).query(pts)
        centroids.append(pts[int(np.argmax(dists))])
    return np.asarray(centroids)


def _assign(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    _, idx = cKDTree(centroids).query(points)
    return idx


def kmeans(cloud: PointCloud, init_centroids: np.ndarray, max_iter: int = DEFAULT_KMEANS_MAX_ITER) -> Clustering:
    """Lloyd's algorithm from explicit starting centroids.

    Runs until assignments stop changing or the iteration cap is hit.  The
    iteration count is the number of assign-update rounds performed, at least
    1 even when the start is already converged.  A cluster that loses all its
    points keeps its previous centroid and is flagged.
    """
    init_centroids = np.asarray(init_centroids, dtype=np.float64)
    k = init_centroids.shape[0]
    n = len(cloud)
    if k > n:
        raise TooFewPointsError(f"k={k} exceeds cloud size {n}")
    pts = cloud.points
    centroids = init_centroids.copy()
    assignments = _assign(pts, centroids)
    iterations = 0
    empty: set[int] = set()
    history = []
    for _ in range(max_iter):
        iterations += 1
        for i in range(k):
            members = pts[assignments == i]
            if len(members) == 0:
                empty.add(i)
            else:
                centroids[i] = members.mean(axis=0)
        history.append(_within_ssd(pts, assignments, centroids))
        new_assignments = _assign(pts, centroids)
        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
    return Clustering(
        k=k,
        assignments=assignments,
        centroids=centroids,
        iterations=iterations,
        empty_clusters=sorted(empty),
        objective_history=history,
    )


def _within_ssd(pts: np.ndarray, assignments: np.ndarray, centroids: np.ndarray) -> float:
    diffs = pts - centroids[assignments]
    return float(np.sum(diffs**2))


def total_within_variation(pts: np.ndarray, clustering: Clustering) -> float:
    """Sum over clusters of mean squared point-to-centroid distance, per point.

    Dividing each cluster's contribution by its own size and the total by the
    cloud size keeps small clusters from dominating the statistic.
    """
    total = 0.0
    for i in range(clustering.k):
        members = pts[clustering.assignments == i]
        if len(members) == 0:
            continue
        total += float(np.mean(np.sum((members - clustering.centroids[i]) ** 2, axis=1)))
    return total / pts.shape[0]


def cluster_metrics(q: PointCloud, k_star: PointCloud, k: int, seed: int = 0) -> ClusterMetrics:
    """Compare the cluster structure of Q and the aligned K at a fixed k.

    Q is clustered by Ward-seeded k-means; K* is then clustered by k-means
    started from Q's final centroids, so clusters correspond by index.
    Returns the root mean squared centroid displacement (CDM), the RMSE of
    per-cluster membership proportions (CPM), the iteration count of the K*
    run (IM), and the relative change in normalized within-cluster variation
    (TWRM, positive when K* is tighter than Q).
    """
    if len(q) < k or len(k_star) < k:
        raise TooFewPointsError(f"both clouds need at least {k} points")
    seeds = ward_centroids(q, k, seed=seed)
    q_run = kmeans(q, seeds)
    k_run = kmeans(k_star, q_run.centroids)

    usable = [
        i
        for i in range(k)
        if i not in q_run.empty_clusters and i not in k_run.empty_clusters
    ]
    degenerate = len(usable) < k
    q_sizes = np.bincount(q_run.assignments, minlength=k)
    k_sizes = np.bincount(k_run.assignments, minlength=k)

    cen_sq = np.sum((q_run.centroids[usable] - k_run.centroids[usable]) ** 2, axis=1)
    cdm = float(np.sqrt(np.mean(cen_sq)))
    props_q = q_sizes[usable] / len(q)
    props_k = k_sizes[usable] / len(k_star)
    cpm = float(np.sqrt(np.mean((props_q - props_k) ** 2)))

    tw_q = total_within_variation(q.points, q_run)
    tw_k = total_within_variation(k_star.points, k_run)
    twrm = 0.0 if tw_q == 0 else (tw_q - tw_k) / tw_q

    return ClusterMetrics(k=k, cdm=cdm, cpm=cpm, im=k_run.iterations, twrm=float(twrm), degenerate=degenerate)


def wcv_sweep(cloud: PointCloud, ks=None, seed: int = 0) -> list[tuple[int, float]]:
    """Within-cluster variation at each candidate k, for elbow inspection.

    Default sweep is k = 10, 20, ..., 500 (capped at the cloud size).  Each
    run is seeded hierarchically like the production pipeline.
    """
    if ks is None:
        ks = range(10, 501, 10)
    ks = [k for k in ks]
    if any(k > len(cloud) for k in ks):
        raise TooFewPointsError("sweep k exceeds cloud size")
    out = []
    for k in ks:
        run = kmeans(cloud, ward_centroids(cloud, k, seed=seed))
        out.append((k, total_within_variation(cloud.points, run)))
    return out
