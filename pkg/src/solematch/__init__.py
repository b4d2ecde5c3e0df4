"""Outsole impression matching: alignment, similarity features, classification."""

from .errors import (
    DegenerateCutError,
    DegenerateLabelsError,
    EmptyCloudError,
    FormatError,
    PairingError,
    SchemaError,
    SolematchError,
    StateError,
    TooFewPointsError,
    TooSmallError,
    UndefinedMetricError,
)
from .features import FEATURE_COLUMNS, FeatureVector
from .forest import HyperGrid, RandomForestMatcher, grid_search_cv
from .icp import AlignmentResult, IcpConfig, align, icp_single, make_starts
from .imgproc import BinaryImage, GrayImage, binarize, edge_detect, extract_points, load_gray
from .pipeline import PairFeaturizer
from .pointcloud import NeighborIndex, PointCloud, RigidTransform

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult",
    "BinaryImage",
    "DegenerateCutError",
    "DegenerateLabelsError",
    "EmptyCloudError",
    "FEATURE_COLUMNS",
    "FeatureVector",
    "FormatError",
    "GrayImage",
    "HyperGrid",
    "IcpConfig",
    "NeighborIndex",
    "PairFeaturizer",
    "PairingError",
    "PointCloud",
    "RandomForestMatcher",
    "RigidTransform",
    "SchemaError",
    "SolematchError",
    "StateError",
    "TooFewPointsError",
    "TooSmallError",
    "UndefinedMetricError",
    "align",
    "binarize",
    "edge_detect",
    "extract_points",
    "grid_search_cv",
    "icp_single",
    "load_gray",
    "make_starts",
]
