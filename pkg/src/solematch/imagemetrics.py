"""Image-space similarity metrics on binarized, alignment-registered prints.

These metrics run on the full binarized scans rather than the edge point
clouds, so they see everything the scanner captured, noise included.  The
known print's image is first redrawn in the questioned print's frame using
the transform found by registration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from . import pointcloud as pc
from .errors import TooSmallError, UndefinedMetricError
from .imgproc import BinaryImage
from .pointcloud import RigidTransform

SSIM_WINDOW = 7
PSR_EXCLUSION = 11  # square window around the peak left out of the sidelobe


@dataclass(frozen=True)
class PhaseCorrMap:
    """Inverse transform of the cross-power spectrum of two images."""

    r: np.ndarray
    peak_location: tuple[int, int]
    peak: float


def rasterize_aligned(k_img: BinaryImage, tf: RigidTransform, target_dims: tuple[int, int]) -> BinaryImage:
    """Redraw the black pixels of ``k_img`` under ``tf`` on a white canvas.

    Pixel centers are moved through the same plane coordinates the point
    clouds use (x right, y up from the bottom row), rounded to the nearest
    cell, and written into a canvas of ``target_dims`` (height, width).
    Pixels landing outside the canvas are dropped.
    """
    height, width = target_dims
    canvas = np.ones((height, width))
    rows, cols = np.nonzero(k_img.pixels == 0)
    if rows.size == 0:
        return BinaryImage(canvas)
    xy = np.column_stack([cols.astype(np.float64), (k_img.height - 1 - rows).astype(np.float64)])
    moved = pc.apply_to_array(tf, xy)
    x = np.floor(moved[:, 0] + 0.5).astype(int)
    y = np.floor(moved[:, 1] + 0.5).astype(int)
    r = height - 1 - y
    c = x
    keep = (r >= 0) & (r < height) & (c >= 0) & (c < width)
    canvas[r[keep], c[keep]] = 0.0
    return BinaryImage(canvas)


def _pad_to_common(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = max(a.shape[0], b.shape[0])
    n = max(a.shape[1], b.shape[1])
    out = []
    for img in (a, b):
        padded = np.ones((m, n))
        padded[: img.shape[0], : img.shape[1]] = img
        out.append(padded)
    return out[0], out[1]


def phase_correlation(jq: BinaryImage, jk: BinaryImage) -> PhaseCorrMap:
    """Phase correlation map of two binary images.

    Computes conj(F(jq)) * F(jk) entrywise and inverse-transforms, keeping
    the real part.  The spectrum is deliberately not normalized; scans with
    uniform illumination do not need it and the raw peak height carries
    signal strength.  Images are padded with white to common dimensions.
    """
    a, b = _pad_to_common(jq.pixels, jk.pixels)
    spectrum = np.conj(np.fft.fft2(a)) * np.fft.fft2(b)
    r = np.real(np.fft.ifft2(spectrum))
    loc = np.unravel_index(int(np.argmax(r)), r.shape)
    return PhaseCorrMap(r=r, peak_location=(int(loc[0]), int(loc[1])), peak=float(r[loc]))


def peak_value(corr: PhaseCorrMap) -> float:
    """Peak of the correlation map relative to its mean level."""
    mean = float(np.mean(corr.r))
    if mean == 0.0:
        raise UndefinedMetricError("phase correlation map has zero mean")
    return corr.peak / mean


def psr(corr: PhaseCorrMap) -> float:
    """Peak-to-sidelobe ratio of the correlation map.

    The sidelobe is everything outside an 11x11 window centered on the peak
    (wrapping at the borders, since the map is circular).  The ratio is the
    peak height above the sidelobe mean, in sidelobe standard deviations.
    """
    r = corr.r
    m, n = r.shape
    half = PSR_EXCLUSION // 2
    centered = np.roll(r, (m // 2 - corr.peak_location[0], n // 2 - corr.peak_location[1]), axis=(0, 1))
    mask = np.ones((m, n), dtype=bool)
    r0 = max(0, m // 2 - half)
    r1 = min(m, m // 2 + half + 1)
    c0 = max(0, n // 2 - half)
    c1 = min(n, n // 2 + half + 1)
    mask[r0:r1, c0:c1] = False
    sidelobe = centered[mask]
    if sidelobe.size == 0:
        raise UndefinedMetricError("no sidelobe region outside the exclusion window")
    spread = float(np.std(sidelobe))
    if spread == 0.0:
        raise UndefinedMetricError("sidelobe has zero spread")
    return (corr.peak - float(np.mean(sidelobe))) / spread


def ncc(jq: BinaryImage, jk_aligned: BinaryImage) -> float:
    """Pearson correlation of pixel intensities between two equally sized images."""
    a, b = jq.pixels, jk_aligned.pixels
    if a.shape != b.shape:
        raise ValueError(f"images must share dimensions, got {a.shape} vs {b.shape}")
    da = a - a.mean()
    db = b - b.mean()
    na = float(np.sqrt(np.sum(da**2)))
    nb = float(np.sqrt(np.sum(db**2)))
    if na == 0.0 or nb == 0.0:
        raise UndefinedMetricError("correlation undefined for a constant image")
    return float(np.sum(da * db) / (na * nb))


def mse(jq: BinaryImage, jk_aligned: BinaryImage) -> float:
    """Mean squared pixel difference; for binary images this is the disagreement rate."""
    a, b = jq.pixels, jk_aligned.pixels
    if a.shape != b.shape:
        raise ValueError(f"images must share dimensions, got {a.shape} vs {b.shape}")
    return float(np.mean((a - b) ** 2))


def ssim(jq: BinaryImage, jk_aligned: BinaryImage, data_range: float = 1.0) -> float:
    """Mean local structural similarity over sliding 7x7 windows.

    Uses uniform windows, the usual stabilizers C1 = (0.01 L)^2 and
    C2 = (0.03 L)^2 with L the dynamic range (1 for binary images), and
    unbiased local (co)variances.  Only windows fully inside the image
    contribute to the mean.
    """
    a, b = jq.pixels, jk_aligned.pixels
    if a.shape != b.shape:
        raise ValueError(f"images must share dimensions, got {a.shape} vs {b.shape}")
    if min(a.shape) < SSIM_WINDOW:
        raise TooSmallError(f"image smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window")
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2
    win = SSIM_WINDOW
    np_win = win * win
    cov_norm = np_win / (np_win - 1)

    ux = uniform_filter(a, size=win)
    uy = uniform_filter(b, size=win)
    uxx = uniform_filter(a * a, size=win)
    uyy = uniform_filter(b * b, size=win)
    uxy = uniform_filter(a * b, size=win)
    vx = cov_norm * (uxx - ux * ux)
    vy = cov_norm * (uyy - uy * uy)
    vxy = cov_norm * (uxy - ux * uy)

    s = ((2 * ux * uy + c1) * (2 * vxy + c2)) / ((ux**2 + uy**2 + c1) * (vx + vy + c2))
    pad = (win - 1) // 2
    return float(np.mean(s[pad:-pad, pad:-pad]))
