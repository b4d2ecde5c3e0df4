import numpy as np
import pytest

from solematch import BinaryImage, RigidTransform, TooSmallError, UndefinedMetricError
from solematch.imagemetrics import (
    PhaseCorrMap,
    mse,
    ncc,
    peak_value,
    phase_correlation,
    psr,
    rasterize_aligned,
    ssim,
)

SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2


def random_binary(shape, seed, p=0.5):
    rng = np.random.default_rng(seed)
    return BinaryImage((rng.random(shape) >= p).astype(float))


def ssim_oracle(a, b, win=7):
    """Oracle: explicit loop over every fully interior window."""
    h, w = a.shape
    scores = []
    for r in range(h - win + 1):
        for c in range(w - win + 1):
            x = a[r : r + win, c : c + win].ravel()
            y = b[r : r + win, c : c + win].ravel()
            ux, uy = x.mean(), y.mean()
            vx, vy = x.var(ddof=1), y.var(ddof=1)
            vxy = ((x - ux) * (y - uy)).sum() / (x.size - 1)
            scores.append(
                ((2 * ux * uy + SSIM_C1) * (2 * vxy + SSIM_C2))
                / ((ux**2 + uy**2 + SSIM_C1) * (vx + vy + SSIM_C2))
            )
    return float(np.mean(scores))


def pearson_oracle(a, b):
    x, y = a.ravel(), b.ravel()
    return float(np.corrcoef(x, y)[0, 1])


class TestRasterizeAligned:
    def test_identity_is_a_no_op(self):
        img = random_binary((12, 9), 0)
        out = rasterize_aligned(img, RigidTransform(), (12, 9))
        np.testing.assert_array_equal(out.pixels, img.pixels)

    def test_pure_translation_shifts_columns(self):
        pixels = np.ones((4, 12))
        pixels[2, [1, 2, 3]] = 0.0
        out = rasterize_aligned(BinaryImage(pixels), RigidTransform(0, 5, 0), (4, 12))
        expected = np.ones((4, 12))
        expected[2, [6, 7, 8]] = 0.0
        np.testing.assert_array_equal(out.pixels, expected)

    def test_translation_clips_at_the_edge(self):
        pixels = np.ones((3, 6))
        pixels[1, [3, 4, 5]] = 0.0
        out = rasterize_aligned(BinaryImage(pixels), RigidTransform(0, 4, 0), (3, 6))
        assert (out.pixels == 1).all()

    def test_quarter_turn_about_origin(self):
        # black pixel at plane coords (1, 0) -> (0, 1)
        pixels = np.ones((3, 3))
        pixels[2, 1] = 0.0  # row 2 is y=0; col 1 is x=1
        out = rasterize_aligned(BinaryImage(pixels), RigidTransform(np.pi / 2, 0, 0), (3, 3))
        expected = np.ones((3, 3))
        expected[1, 0] = 0.0  # x=0, y=1
        np.testing.assert_array_equal(out.pixels, expected)


class TestPhaseCorrelation:
    def test_self_pair_peaks_at_origin(self):
        img = random_binary((16, 16), 1)
        corr = phase_correlation(img, img)
        assert corr.peak_location == (0, 0)

    def test_planted_circular_shift_recovered_exactly(self):
        img = random_binary((24, 20), 2)
        for shift in ((3, 5), (10, 0), (0, 7), (23, 19)):
            rolled = BinaryImage(np.roll(img.pixels, shift, axis=(0, 1)))
            corr = phase_correlation(img, rolled)
            assert corr.peak_location == shift

    def test_all_white_pair_is_flat(self):
        white = BinaryImage(np.ones((8, 8)))
        corr = phase_correlation(white, white)
        assert np.allclose(corr.r, corr.r[0, 0])

    def test_pads_to_common_dims(self):
        a = random_binary((10, 8), 3)
        b = random_binary((6, 12), 4)
        corr = phase_correlation(a, b)
        assert corr.r.shape == (10, 12)

    def test_peak_is_max_entry(self):
        a = random_binary((9, 9), 5)
        b = random_binary((9, 9), 6)
        corr = phase_correlation(a, b)
        assert corr.peak == corr.r.max()

    def test_pv_invariant_to_common_shift(self):
        a = random_binary((16, 16), 7)
        b = random_binary((16, 16), 8)
        pv0 = peak_value(phase_correlation(a, b))
        sa = BinaryImage(np.roll(a.pixels, (4, 9), axis=(0, 1)))
        sb = BinaryImage(np.roll(b.pixels, (4, 9), axis=(0, 1)))
        pv1 = peak_value(phase_correlation(sa, sb))
        assert abs(pv0 - pv1) < 1e-9


class TestPeakValue:
    def test_constant_map_gives_one(self):
        corr = PhaseCorrMap(r=np.full((5, 5), 3.0), peak_location=(0, 0), peak=3.0)
        assert peak_value(corr) == 1.0

    def test_single_spike_worked_example(self):
        r = np.zeros((10, 10))
        r[4, 7] = 10.0
        corr = PhaseCorrMap(r=r, peak_location=(4, 7), peak=10.0)
        assert peak_value(corr) == 100.0

    def test_zero_mean_is_undefined(self):
        r = np.array([[1.0, -1.0]])
        corr = PhaseCorrMap(r=r, peak_location=(0, 0), peak=1.0)
        with pytest.raises(UndefinedMetricError):
            peak_value(corr)

    def test_identical_images_beat_unrelated_ones(self):
        wins = 0
        for seed in range(10):
            img = random_binary((32, 32), seed + 100)
            other = random_binary((32, 32), seed + 200)
            pv_same = peak_value(phase_correlation(img, img))
            pv_diff = peak_value(phase_correlation(img, other))
            wins += pv_same > pv_diff
        assert wins >= 9


class TestPsr:
    def test_spike_on_flat_field_is_undefined(self):
        r = np.zeros((30, 30))
        r[3, 3] = 10.0
        with pytest.raises(UndefinedMetricError):
            psr(PhaseCorrMap(r=r, peak_location=(3, 3), peak=10.0))

    def test_spike_over_unit_noise(self):
        rng = np.random.default_rng(9)
        r = rng.normal(0, 1, size=(64, 64))
        r[10, 20] = 10.0
        value = psr(PhaseCorrMap(r=r, peak_location=(10, 20), peak=10.0))
        assert 8.0 < value < 12.0

    def test_sidelobe_excludes_peak_window(self):
        # entries adjacent to the peak do not contaminate the sidelobe
        r = np.zeros((40, 40))
        r[5, 5] = 100.0
        for dr in range(-5, 6):
            for dc in range(-5, 6):
                r[5 + dr, 5 + dc] = 50.0
        r[5, 5] = 100.0
        rng = np.random.default_rng(10)
        r += rng.normal(0, 0.5, size=r.shape)
        value = psr(PhaseCorrMap(r=r, peak_location=(5, 5), peak=float(r[5, 5])))
        assert value > 50  # sidelobe stats come from the noise, not the plateau


class TestNcc:
    def test_identical_images(self):
        img = random_binary((10, 10), 11)
        assert ncc(img, img) == pytest.approx(1.0)

    def test_complement_is_minus_one(self):
        img = random_binary((10, 10), 12)
        comp = BinaryImage(1.0 - img.pixels)
        assert ncc(img, comp) == pytest.approx(-1.0)

    def test_quarter_flipped_checkerboard_matches_pearson(self):
        board = (np.indices((8, 8)).sum(axis=0) % 2).astype(float)
        flipped = board.copy()
        rng = np.random.default_rng(13)
        cells = rng.choice(64, size=16, replace=False)
        flipped.ravel()[cells] = 1 - flipped.ravel()[cells]
        got = ncc(BinaryImage(board), BinaryImage(flipped))
        assert got == pytest.approx(pearson_oracle(board, flipped))

    def test_constant_image_undefined(self):
        with pytest.raises(UndefinedMetricError):
            ncc(BinaryImage(np.ones((5, 5))), random_binary((5, 5), 14))

    def test_symmetric(self):
        a, b = random_binary((9, 9), 15), random_binary((9, 9), 16)
        assert ncc(a, b) == pytest.approx(ncc(b, a))


class TestMse:
    def test_identical_is_zero(self):
        img = random_binary((7, 7), 17)
        assert mse(img, img) == 0.0

    def test_black_vs_white_is_one(self):
        assert mse(BinaryImage(np.zeros((4, 4))), BinaryImage(np.ones((4, 4)))) == 1.0

    def test_half_disagreement(self):
        a = np.zeros((2, 4))
        b = a.copy()
        b[:, :2] = 1.0
        assert mse(BinaryImage(a), BinaryImage(b)) == 0.5

    def test_equals_disagreement_fraction(self):
        a, b = random_binary((12, 12), 18), random_binary((12, 12), 19)
        assert mse(a, b) == pytest.approx(np.mean(a.pixels != b.pixels))

    def test_symmetric(self):
        a, b = random_binary((6, 9), 20), random_binary((6, 9), 21)
        assert mse(a, b) == mse(b, a)


class TestSsim:
    def test_identical_images(self):
        img = random_binary((16, 16), 22)
        assert ssim(img, img) == pytest.approx(1.0)

    def test_matches_windowed_oracle_on_8x8(self):
        a, b = random_binary((8, 8), 23), random_binary((8, 8), 24)
        assert ssim(a, b) == pytest.approx(ssim_oracle(a.pixels, b.pixels), abs=1e-12)

    def test_independent_images_near_zero(self):
        values = []
        for seed in range(20):
            a = random_binary((256, 256), 1000 + seed)
            b = random_binary((256, 256), 2000 + seed)
            values.append(ssim(a, b))
        assert max(abs(v) for v in values) < 0.1

    def test_too_small_image(self):
        with pytest.raises(TooSmallError):
            ssim(random_binary((5, 5), 25), random_binary((5, 5), 26))

    def test_symmetric(self):
        a, b = random_binary((14, 14), 27), random_binary((14, 14), 28)
        assert ssim(a, b) == pytest.approx(ssim(b, a))
