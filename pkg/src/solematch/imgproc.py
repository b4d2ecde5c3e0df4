"""Grayscale image handling: loading, edge detection, and point extraction.

An outsole scan enters the pipeline as a grayscale image, is run through
Laplacian edge detection (edges come out dark on a light background), and the
dark pixels are lifted into a 2D point cloud for registration.  The full
image is separately binarized for the image-space similarity metrics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image
from scipy.ndimage import convolve

from .errors import FormatError
from .pointcloud import PointCloud

# 8-connected Laplacian, the classic find-edges kernel.
LAPLACIAN_KERNEL = np.array(
    [[-1.0, -1.0, -1.0],
     [-1.0, 8.0, -1.0],
     [-1.0, -1.0, -1.0]]
)

#: Grayscale cutoff separating dark (print) pixels from background.
DEFAULT_DARKNESS_THRESHOLD = 85.0


@dataclass(frozen=True)
class GrayImage:
    """Grayscale raster with intensities in [0, 255], row 0 at the top."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise FormatError(f"expected a 2D image with nonzero dims, got shape {px.shape}")
        if not np.isfinite(px).all():
            raise FormatError("image intensities must be finite")
        if px.min() < 0 or px.max() > 255:
            raise FormatError("image intensities must lie in [0, 255]")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class BinaryImage:
    """Raster of {0, 1} entries; 0 is black (print), 1 is white (background)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise FormatError(f"expected a 2D image with nonzero dims, got shape {px.shape}")
        if not np.isin(px, (0.0, 1.0)).all():
            raise FormatError("binary image entries must be 0 or 1")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def load_gray(path) -> GrayImage:
    """Load a raster file as grayscale.

    Color inputs are reduced with the standard ITU-R 601 luma weights
    (Pillow's ``L`` mode).  Raises IOError for unreadable files and
    FormatError for zero-dimension images.
    """
    try:
        with Image.open(path) as im:
            gray = im.convert("L")
            arr = np.asarray(gray, dtype=np.float64)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise IOError(f"cannot read image {path!r}: {exc}") from exc
    if arr.ndim != 2 or 0 in arr.shape:
        raise FormatError(f"image {path!r} has unusable dimensions {arr.shape}")
    return GrayImage(arr)


def edge_detect(img: GrayImage) -> GrayImage:
    """Laplacian edge detection followed by inversion.

    The kernel response is clamped to [0, 255] and inverted (255 - value) so
    detected edges become dark marks on a light background.  Borders are
    handled by edge replication, which avoids spurious responses along the
    image frame.
    """
    response = convolve(img.pixels, LAPLACIAN_KERNEL, mode="nearest")
    clamped = np.clip(response, 0.0, 255.0)
    return GrayImage(255.0 - clamped)


def extract_points(edge_img: GrayImage, darkness_threshold: float = DEFAULT_DARKNESS_THRESHOLD) -> PointCloud:
    """Collect the coordinates of pixels strictly darker than the threshold.

    Coordinates use a plane convention: x is the column index and y counts
    up from the bottom row, so the cloud lives in a standard math plane.
    A threshold of 256 selects every pixel; an empty result is legal.
    """
    if not 0 <= darkness_threshold <= 256:
        raise ValueError(f"darkness_threshold must be in [0, 256], got {darkness_threshold}")
    rows, cols = np.nonzero(edge_img.pixels < darkness_threshold)
    y = (edge_img.height - 1) - rows
    return PointCloud(np.column_stack([cols.astype(np.float64), y.astype(np.float64)]))


def binarize(img: GrayImage, threshold: float = DEFAULT_DARKNESS_THRESHOLD) -> BinaryImage:
    """Map intensities below the threshold to black (0) and the rest to white (1)."""
    if not 0 <= threshold <= 256:
        raise ValueError(f"threshold must be in [0, 256], got {threshold}")
    return BinaryImage(np.where(img.pixels < threshold, 0.0, 1.0))
