"""The similarity feature vector schema shared by the pipeline and the classifier.

Column names and order are a wire format: feature CSV files, trained model
files, and the HTTP API all use them verbatim, so they must never drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError

FEATURE_COLUMNS = (
    "q_points_count",
    "k_points_count",
    "mean",
    "std",
    "0.1",
    "0.25",
    "0.5",
    "0.75",
    "0.9",
    "centroid_distance_n_clusters_20",
    "cluster_proportion_n_clusters_20",
    "iterations_k_n_clusters_20",
    "wcv_ratio_n_clusters_20",
    "centroid_distance_n_clusters_100",
    "cluster_proportion_n_clusters_100",
    "iterations_k_n_clusters_100",
    "wcv_ratio_n_clusters_100",
    "q_pct_threshold_1",
    "k_pct_threshold_1",
    "q_pct_threshold_2",
    "k_pct_threshold_2",
    "q_pct_threshold_3",
    "k_pct_threshold_3",
    "q_pct_threshold_5",
    "k_pct_threshold_5",
    "q_pct_threshold_10",
    "k_pct_threshold_10",
    "peak_value",
    "MSE",
    "SSIM",
    "NCC",
    "PSR",
    "jaccard_index_0",
    "jaccard_index_-1",
    "jaccard_index_-2",
)

N_FEATURES = len(FEATURE_COLUMNS)

#: Extra bookkeeping columns carried alongside features in pair files.
PAIR_META_COLUMNS = ("label", "pair_id", "q_shoe_id", "k_shoe_id", "scenario")

#: Category indicator columns appended for the indicator-variable model variant.
INDICATOR_COLUMNS = ("category_pristine", "category_blurry", "category_partial")


@dataclass
class FeatureVector:
    """One pair's 35 similarity features plus a mask of undefined entries.

    Undefined metrics (degenerate images) are stored as NaN and flagged in
    ``missing``; the classifier imputes them from training medians.
    """

    values: np.ndarray
    missing: np.ndarray = field(default=None)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (N_FEATURES,):
            raise SchemaError(f"expected {N_FEATURES} features, got shape {vals.shape}")
        if self.missing is None:
            missing = np.isnan(vals)
        else:
            missing = np.asarray(self.missing, dtype=bool)
            if missing.shape != (N_FEATURES,):
                raise SchemaError(f"missing mask must have shape ({N_FEATURES},)")
        self.values = vals
        self.missing = missing

    @classmethod
    def from_dict(cls, mapping: dict) -> "FeatureVector":
        extra = set(mapping) - set(FEATURE_COLUMNS)
        if extra:
            raise SchemaError(f"unknown feature names: {sorted(extra)}")
        gone = set(FEATURE_COLUMNS) - set(mapping)
        if gone:
            raise SchemaError(f"missing feature names: {sorted(gone)}")
        vals = np.array([float(mapping[c]) for c in FEATURE_COLUMNS])
        return cls(vals)

    def to_dict(self) -> dict:
        return {c: float(v) for c, v in zip(FEATURE_COLUMNS, self.values)}

    def __getitem__(self, name: str) -> float:
        try:
            return float(self.values[FEATURE_COLUMNS.index(name)])
        except ValueError:
            raise SchemaError(f"unknown feature {name!r}") from None
