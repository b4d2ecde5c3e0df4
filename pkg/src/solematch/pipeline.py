"""End-to-end featurization of a questioned/known image pair.

Drives the whole front half of the pipeline: load and edge-detect both
scans, register the known print onto the questioned print, then compute all
35 similarity features on the aligned pair.  Undefined metrics are recorded
as missing rather than aborting the pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from . import clustersim, icp, imagemetrics, imgproc, pointcloud as pc, simfeatures
from .errors import TooFewPointsError, TooSmallError, UndefinedMetricError
from .features import FEATURE_COLUMNS, FeatureVector
from .icp import AlignmentResult, IcpConfig
from .imgproc import BinaryImage, GrayImage
from .pointcloud import NeighborIndex, PointCloud

#: Default darkness cutoff for edge-point extraction on the inverted edge
#: image.  255 - 230 = 25 is the minimum surviving kernel response; this
#: keeps degraded scans from losing their entire cloud while still ignoring
#: flat regions.  Binarization for image metrics keeps its own threshold.
EDGE_POINT_THRESHOLD = 230.0


@dataclass
class PairResult:
    features: FeatureVector
    alignment: AlignmentResult
    q_cloud: PointCloud
    k_star_cloud: PointCloud


def mirror_image(img: GrayImage) -> GrayImage:
    return GrayImage(img.pixels[:, ::-1])


def cut_image(img: BinaryImage, cloud: PointCloud, region: str, foot: str) -> BinaryImage:
    """Whiten the discarded side of a binarized print, using the cloud's cut line."""
    mid_x, mid_y = pc.quantile_midpoints(cloud)
    h, w = img.pixels.shape
    cols = np.arange(w)[None, :].repeat(h, axis=0)
    ys = (h - 1 - np.arange(h))[:, None].repeat(w, axis=1)
    if region == "toe":
        keep = ys > mid_y
    elif region == "heel":
        keep = ys <= mid_y
    else:
        inside_is_right = foot == "left"
        if (region == "inside") == inside_is_right:
            keep = cols > mid_x
        else:
            keep = cols <= mid_x
    return BinaryImage(np.where(keep, img.pixels, 1.0))


class PairFeaturizer(BaseEstimator):
    """Computes the 35-feature similarity vector for an image pair.

    Parameters mirror the pipeline's knobs: the darkness threshold used for
    point extraction, the binarization threshold for image metrics, cluster
    counts, overlap radii, and the registration configuration.  The object is
    stateless across pairs; ``seed`` only fixes the randomized pieces
    (downsampling, Ward subsampling) for reproducibility.
    """

    def __init__(
        self,
        darkness_threshold: float = EDGE_POINT_THRESHOLD,
        binarize_threshold: float = imgproc.DEFAULT_DARKNESS_THRESHOLD,
        cluster_counts: tuple = clustersim.CLUSTER_COUNTS,
        overlap_thresholds: tuple = simfeatures.OVERLAP_THRESHOLDS,
        icp_config: IcpConfig | None = None,
        seed: int = 0,
    ):
        self.darkness_threshold = darkness_threshold
        self.binarize_threshold = binarize_threshold
        self.cluster_counts = cluster_counts
        self.overlap_thresholds = overlap_thresholds
        self.icp_config = icp_config
        self.seed = seed

    def _config(self) -> IcpConfig:
        if self.icp_config is not None:
            return self.icp_config
        return IcpConfig(seed=self.seed)

    def extract_cloud(self, img: GrayImage) -> PointCloud:
        edges = imgproc.edge_detect(img)
        return imgproc.extract_points(edges, self.darkness_threshold)

    def featurize_images(
        self,
        q_img: GrayImage,
        k_img: GrayImage,
        q_cut: tuple[str, str] | None = None,
        reflect_k: bool = False,
    ) -> PairResult:
        """Full pipeline on two grayscale scans.

        ``q_cut`` is an optional (region, foot) pair that turns Q into a
        partial print before matching; ``reflect_k`` mirrors the known print
        about its vertical axis first (used when comparing opposite feet).
        """
        if reflect_k:
            k_img = mirror_image(k_img)
        q_cloud = self.extract_cloud(q_img)
        k_cloud = self.extract_cloud(k_img)

        jq = imgproc.binarize(q_img, self.binarize_threshold)
        jk = imgproc.binarize(k_img, self.binarize_threshold)
        if q_cut is not None:
            region, foot = q_cut
            jq = cut_image(jq, q_cloud, region, foot)
            q_cloud = pc.cut_partial(q_cloud, region, foot)

        alignment = icp.align(q_cloud, k_cloud, self._config())
        k_star = pc.apply(alignment.transform, k_cloud)
        features = self.similarity_features(q_cloud, k_star, jq, jk, alignment)
        return PairResult(features=features, alignment=alignment, q_cloud=q_cloud, k_star_cloud=k_star)

    def similarity_features(
        self,
        q_cloud: PointCloud,
        k_star: PointCloud,
        jq: BinaryImage,
        jk: BinaryImage,
        alignment: AlignmentResult,
    ) -> FeatureVector:
        """Assemble the 35 named features for an already-aligned pair."""
        row: dict[str, float] = {}
        row["q_points_count"] = float(len(q_cloud))
        row["k_points_count"] = float(len(k_star))

        k_index = NeighborIndex(k_star)
        q_index = NeighborIndex(q_cloud)
        stats = simfeatures.min_dist_stats(q_cloud, k_star, k_index=k_index)
        row["mean"], row["std"] = stats.mean, stats.std
        row["0.1"], row["0.25"], row["0.5"] = stats.p10, stats.p25, stats.p50
        row["0.75"], row["0.9"] = stats.p75, stats.p90

        for k in self.cluster_counts:
            try:
                cm = clustersim.cluster_metrics(q_cloud, k_star, k, seed=self.seed)
                cdm, cpm, im, twrm = cm.cdm, cm.cpm, float(cm.im), cm.twrm
            except TooFewPointsError:
                cdm = cpm = im = twrm = np.nan
            row[f"centroid_distance_n_clusters_{k}"] = cdm
            row[f"cluster_proportion_n_clusters_{k}"] = cpm
            row[f"iterations_k_n_clusters_{k}"] = im
            row[f"wcv_ratio_n_clusters_{k}"] = twrm

        for d in self.overlap_thresholds:
            row[f"q_pct_threshold_{d:g}"] = simfeatures.proportion_overlap(q_cloud, k_star, d, b_index=k_index)
            row[f"k_pct_threshold_{d:g}"] = simfeatures.proportion_overlap(k_star, q_cloud, d, b_index=q_index)

        jk_aligned = imagemetrics.rasterize_aligned(jk, alignment.transform, (jq.height, jq.width))
        corr = imagemetrics.phase_correlation(jq, jk_aligned)
        for name, fn in (
            ("peak_value", lambda: imagemetrics.peak_value(corr)),
            ("MSE", lambda: imagemetrics.mse(jq, jk_aligned)),
            ("SSIM", lambda: imagemetrics.ssim(jq, jk_aligned)),
            ("NCC", lambda: imagemetrics.ncc(jq, jk_aligned)),
            ("PSR", lambda: imagemetrics.psr(corr)),
        ):
            try:
                row[name] = fn()
            except (UndefinedMetricError, TooSmallError):
                row[name] = np.nan

        for decimals in simfeatures.JACCARD_DECIMALS:
            row[f"jaccard_index_{-decimals if decimals else 0}"] = simfeatures.jaccard(q_cloud, k_star, decimals)

        values = np.array([row[c] for c in FEATURE_COLUMNS])
        return FeatureVector(values)
