import numpy as np
import pytest
from PIL import Image


@pytest.fixture
def write_png(tmp_path):
    """Save an array (2D gray or 3D RGB) as a PNG and return the path."""

    def _write(arr, name="img.png"):
        arr = np.asarray(arr, dtype=np.uint8)
        path = tmp_path / name
        Image.fromarray(arr).save(path)
        return path

    return _write


def brute_force_nearest(points, query):
    """Oracle: exhaustive scan for the closest point and its distance."""
    diffs = points - np.asarray(query, dtype=np.float64)
    dists = np.sqrt((diffs**2).sum(axis=1))
    i = int(np.argmin(dists))
    return points[i], float(dists[i])
