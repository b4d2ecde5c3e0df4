"""Deterministic synthetic outsole corpus generator.

Stands in for lab-collected scan datasets at desk scale.  Shoes of one model
share a base tread pattern (mirrored between feet); each individual shoe
gets its own randomly acquired characteristics: dark gouge dots in the
pattern gaps and nicks eroded out of the tread strokes.  Captures of a shoe
add scan placement jitter, wear that eats away at the marks, configurable
Gaussian blur, scanner contrast normalization, grain, and stray salt
clusters, then everything lands in a registry the evaluation kit can read.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import PairingError
from .evalkit import ShoeRecord, write_registry
from .imgproc import GrayImage

TREAD_INTENSITY = 40.0
BACKGROUND = 255.0
PATTERN_FAMILIES = ("grid", "waves", "hex")


@dataclass(frozen=True)
class SynthSpec:
    pattern_family: str = "grid"         # fallback when the model name names none
    pattern_period: int = 18
    stroke_width: int = 3
    canvas_height: int = 176
    canvas_width: int = 122
    rac_dot_count: int = 26
    rac_nick_count: int = 26
    rac_radius_range: tuple = (2.0, 2.8)
    rac_clearance: float = 3.5           # gap between a dot's rim and any stroke
    nick_length_range: tuple = (9.0, 14.0)
    void_count: int = 5                  # stroke-free areas in the tread (logo fields)
    void_radius_range: tuple = (12.0, 18.0)
    wear_field_amplitude: float = 25.0   # per-shoe regional tread darkness swing
    wear_field_scale: float = 16.0       # smoothing radius of that field, pixels
    jitter_sigma: float = 2.0           # translation, pixels
    rotation_jitter_deg: float = 1.5
    blur_sigma_per_level: float = 0.6
    base_psf_sigma: float = 1.2         # every scan has a finite point spread
    wear_erosion_fraction: float = 0.25  # RAC pixels lost per wear level
    grain_sigma: float = 1.0
    salt_cluster_count: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.pattern_family not in PATTERN_FAMILIES:
            raise ValueError(f"pattern_family must be one of {PATTERN_FAMILIES}")
        if self.blur_sigma_per_level < 0 or self.jitter_sigma < 0 or self.grain_sigma < 0:
            raise ValueError("noise scales must be nonnegative")
        if self.rac_dot_count < 0 or self.rac_nick_count < 0:
            raise ValueError("RAC counts must be nonnegative")

    def blur_sigma(self, level: int) -> float:
        """Total Gaussian sigma of a capture: scanner PSF plus paper diffusion."""
        return float(np.hypot(self.base_psf_sigma, self.blur_sigma_per_level * level))


@dataclass(frozen=True)
class RacMark:
    kind: str      # "dot" (added gouge) or "nick" (eroded tread)
    row: int
    col: int
    radius: float


@dataclass
class ShoeMaster:
    shoe_id: str
    model: str
    foot: str
    image: GrayImage
    racs: list = field(default_factory=list)
    spec: SynthSpec = field(default_factory=SynthSpec)


def _stable_int(*parts) -> int:
    text = "|".join(str(p) for p in parts)
    return zlib.crc32(text.encode())


def _ellipse_mask(h: int, w: int) -> np.ndarray:
    yy, xx = np.mgrid[0:h, 0:w]
    cy, cx = (h - 1) / 2, (w - 1) / 2
    ry, rx = h * 0.47, w * 0.47
    return ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0


def pattern_family_of(model: str, fallback: str = "grid") -> str:
    """Tread family encoded in the model name, e.g. 'waveB' -> waves."""
    lowered = model.lower()
    for fam in PATTERN_FAMILIES:
        if lowered.startswith(fam[:3]):
            return fam
    return fallback


def model_voids(spec: SynthSpec, model: str, foot: str = "L") -> list:
    """Stroke-free elliptical fields of a model (logo areas), as (row, col, ry, rx).

    Shared by every shoe of the model; mirrored for right feet like the
    pattern itself.  Marks placed inside stay isolated from all tread, which
    keeps them recognizable even in heavily blurred scans.
    """
    h, w = spec.canvas_height, spec.canvas_width
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((_stable_int(model), 23))))
    voids = []
    for _ in range(spec.void_count):
        for _attempt in range(200):
            row = float(rng.uniform(0.2 * h, 0.8 * h))
            col = float(rng.uniform(0.25 * w, 0.75 * w))
            ry = float(rng.uniform(*spec.void_radius_range))
            rx = float(rng.uniform(*spec.void_radius_range))
            if all((row - r) ** 2 + (col - c) ** 2 > (ry + r2 + 6) ** 2 for r, c, r2, _ in voids):
                voids.append((row, col, ry, rx))
                break
    if foot.upper().startswith("R"):
        voids = [(row, w - 1 - col, ry, rx) for row, col, ry, rx in voids]
    return voids


def base_pattern(spec: SynthSpec, model: str, foot: str = "L") -> np.ndarray:
    """Shared tread pattern of a model; right feet get the mirrored pattern."""
    h, w = spec.canvas_height, spec.canvas_width
    period = spec.pattern_period
    width = spec.stroke_width
    phase = _stable_int(model) % period
    yy, xx = np.mgrid[0:h, 0:w]
    fam = pattern_family_of(model, spec.pattern_family)
    if fam == "grid":
        vert = (xx + phase) % period < width
        horiz = (yy + phase) % int(period * 1.6) < width
        strokes = vert | horiz
    elif fam == "waves":
        amp = period / 3.0
        offset = amp * np.sin(2 * np.pi * (xx + phase) / (4.0 * period))
        strokes = (yy + offset + phase) % period < width
    else:  # hex: offset lattice of solid studs
        step = period
        row_band = (yy + phase) % (2 * step)
        shifted = np.where(row_band < step, xx, xx + step // 2)
        strokes = ((shifted + phase) % step < width + 1) & ((yy + phase) % step < width + 1)
    img = np.full((h, w), BACKGROUND)
    mask = _ellipse_mask(h, w)
    yy2, xx2 = np.mgrid[0:h, 0:w].astype(float)
    for row, col, ry, rx in model_voids(spec, model, "L"):
        mask &= ((yy2 - row) / ry) ** 2 + ((xx2 - col) / rx) ** 2 > 1.0
    img[strokes & mask] = TREAD_INTENSITY
    if foot.upper().startswith("R"):
        img = img[:, ::-1].copy()
    return img


def _disk(h, w, row, col, radius):
    r0, r1 = max(0, int(row - radius - 1)), min(h, int(row + radius + 2))
    c0, c1 = max(0, int(col - radius - 1)), min(w, int(col + radius + 2))
    yy, xx = np.mgrid[r0:r1, c0:c1]
    mask = (yy - row) ** 2 + (xx - col) ** 2 <= radius**2
    return (slice(r0, r1), slice(c0, c1)), mask


def generate_shoe(spec: SynthSpec, shoe_id: str, model: str = "gridA", foot: str = "L") -> ShoeMaster:
    """Master scan for one shoe: the model's tread plus that shoe's own marks.

    Deterministic in (spec, shoe_id).  Marks are kept mutually separated and
    clear of conflicting tread so each remains one connected component in the
    difference from the base pattern.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((spec.seed, _stable_int(shoe_id)))))
    img = base_pattern(spec, model, foot).copy()
    strokes = img == TREAD_INTENSITY
    h, w = img.shape
    inside = _ellipse_mask(h, w)

    # Regional wear: a smooth per-shoe field modulates how dark the tread
    # presses.  Low-frequency structure survives heavy blur, so it is what
    # keeps two different shoes of one model distinguishable in degraded
    # scans; it stays below the binarization threshold on clean ones.
    if spec.wear_field_amplitude > 0:
        field = ndimage.gaussian_filter(rng.standard_normal((h, w)), spec.wear_field_scale)
        peak = np.abs(field).max()
        if peak > 0:
            field = field / peak
        img[strokes] = np.clip(TREAD_INTENSITY + spec.wear_field_amplitude * field[strokes], 5.0, 75.0)
    min_sep = spec.nick_length_range[1]

    racs: list[RacMark] = []
    placed: list[tuple[float, float]] = []

    def far_enough(row, col):
        return all((row - r) ** 2 + (col - c) ** 2 >= min_sep**2 for r, c in placed)

    # Dots go in stroke-free spots: preferentially the model's void fields,
    # where even a blurred dot stays far from every stroke, otherwise the
    # regular pattern gaps.  A clearance check keeps them off the strokes.
    voids = model_voids(spec, model, foot)
    attempts = 0
    while len([m for m in racs if m.kind == "dot"]) < spec.rac_dot_count and attempts < 20000:
        attempts += 1
        if voids and rng.random() < 0.6:
            vrow, vcol, vry, vrx = voids[int(rng.integers(0, len(voids)))]
            margin = spec.rac_radius_range[1] + 2
            ang = rng.uniform(0, 2 * np.pi)
            rad = np.sqrt(rng.random())
            row = int(round(vrow + rad * (vry - margin) * np.sin(ang)))
            col = int(round(vcol + rad * (vrx - margin) * np.cos(ang)))
        else:
            row = int(rng.integers(4, h - 4))
            col = int(rng.integers(4, w - 4))
        if not (4 <= row < h - 4 and 4 <= col < w - 4):
            continue
        radius = float(rng.uniform(*spec.rac_radius_range))
        if not inside[row, col] or not far_enough(row, col):
            continue
        # Clearance keeps the dot's rim farther from every stroke than the
        # overlap radii used downstream, so a different shoe's tread cannot
        # explain these points away.
        reach = int(np.ceil(radius + spec.rac_clearance))
        neighborhood = strokes[max(0, row - reach) : row + reach + 1, max(0, col - reach) : col + reach + 1]
        if neighborhood.any():
            continue
        cells, mask = _disk(h, w, row, col, radius)
        img[cells][mask] = TREAD_INTENSITY
        racs.append(RacMark("dot", row, col, radius))
        placed.append((row, col))

    # Nicks erase a short run of one stroke, along the stroke's direction,
    # so each stays a single connected blob in the diff from the base.
    stroke_rows, stroke_cols = np.nonzero(strokes & inside)
    attempts = 0
    while len([m for m in racs if m.kind == "nick"]) < spec.rac_nick_count and attempts < 20000 and stroke_rows.size:
        attempts += 1
        pick = int(rng.integers(0, stroke_rows.size))
        row, col = int(stroke_rows[pick]), int(stroke_cols[pick])
        if not far_enough(row, col):
            continue
        length = float(rng.uniform(*spec.nick_length_range))
        half = int(length // 2)
        reach = 7
        horiz_run = strokes[row, max(0, col - reach) : col + reach + 1].sum()
        vert_run = strokes[max(0, row - reach) : row + reach + 1, col].sum()
        thick = spec.stroke_width // 2 + 1
        if horiz_run >= vert_run:
            r0, r1 = max(0, row - thick), min(h, row + thick + 1)
            c0, c1 = max(0, col - half), min(w, col + half + 1)
        else:
            r0, r1 = max(0, row - half), min(h, row + half + 1)
            c0, c1 = max(0, col - thick), min(w, col + thick + 1)
        box = np.zeros_like(strokes)
        box[r0:r1, c0:c1] = True
        erased = box & strokes
        if not erased[row, col]:
            continue
        # Near voids or crossings the box can clip disconnected stroke stubs;
        # keep only the piece the seed pixel sits on so one nick stays one blob.
        lbl, _ = ndimage.label(erased)
        erased = lbl == lbl[row, col]
        img[erased] = BACKGROUND
        racs.append(RacMark("nick", row, col, length / 2))
        placed.append((row, col))

    return ShoeMaster(shoe_id=shoe_id, model=model, foot=foot, image=GrayImage(img), racs=racs, spec=spec)


def _apply_wear(img: np.ndarray, master: ShoeMaster, wear_level: int, rng) -> np.ndarray:
    """Erode a wear-proportional fraction of each dot mark's pixels."""
    if wear_level <= 0:
        return img
    frac = min(0.9, master.spec.wear_erosion_fraction * wear_level)
    out = img.copy()
    h, w = out.shape
    for mark in master.racs:
        if mark.kind != "dot":
            continue
        cells, mask = _disk(h, w, mark.row, mark.col, mark.radius)
        rows, cols = np.nonzero(mask)
        n_gone = int(round(frac * rows.size))
        if n_gone == 0:
            continue
        gone = rng.choice(rows.size, size=n_gone, replace=False)
        region = out[cells]
        region[rows[gone], cols[gone]] = BACKGROUND
        out[cells] = region
    return out


def _jitter(img: np.ndarray, rng, spec: SynthSpec) -> np.ndarray:
    theta = np.deg2rad(rng.normal(0.0, spec.rotation_jitter_deg))
    shift = rng.normal(0.0, spec.jitter_sigma, size=2)
    h, w = img.shape
    center = np.array([(h - 1) / 2, (w - 1) / 2])
    c, s = np.cos(theta), np.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    offset = center - rot @ center - shift
    return ndimage.affine_transform(img, rot, offset=offset, order=1, mode="constant", cval=BACKGROUND)


def _partial_mask(img: np.ndarray, region: str, foot: str) -> np.ndarray:
    dark = img < 128
    if not dark.any():
        return img
    rows, cols = np.nonzero(dark)
    h = img.shape[0]
    ys = (h - 1) - rows
    mid_x = float(np.quantile(cols, [0.025, 0.975]).mean())
    mid_y = float(np.quantile(ys, [0.025, 0.975]).mean())
    out = img.copy()
    yy = (h - 1) - np.arange(h)[:, None]
    xx = np.arange(img.shape[1])[None, :]
    if region == "toe":
        keep = yy > mid_y
    elif region == "heel":
        keep = yy <= mid_y
    else:
        inside_is_right = foot.upper().startswith("L")
        if (region == "inside") == inside_is_right:
            keep = xx > mid_x
        else:
            keep = xx <= mid_x
    out[~np.broadcast_to(keep, img.shape)] = BACKGROUND
    return out


def _salt_noise(img: np.ndarray, rng, count: int) -> np.ndarray:
    if count <= 0:
        return img
    out = img.copy()
    h, w = out.shape
    for _ in range(count):
        row = int(rng.integers(2, h - 2))
        col = int(rng.integers(2, w - 2))
        n_px = int(rng.integers(4, 10))
        for _ in range(n_px):
            dr, dc = rng.integers(-2, 3, size=2)
            r, c = np.clip(row + dr, 0, h - 1), np.clip(col + dc, 0, w - 1)
            out[r, c] = TREAD_INTENSITY
    return out


def _contrast_normalize(img: np.ndarray) -> np.ndarray:
    """Scanner-style stretch of the robust intensity range back to [40, 255]."""
    lo, hi = np.percentile(img, [0.5, 99.5])
    if hi - lo < 1e-9:
        return img
    out = TREAD_INTENSITY + (img - lo) * (BACKGROUND - TREAD_INTENSITY) / (hi - lo)
    return np.clip(out, 0.0, 255.0)


def capture(
    master: ShoeMaster,
    replicate: int,
    blur_level: int = 0,
    wear_level: int = 0,
    partial_region: str | None = None,
) -> GrayImage:
    """One scan of a shoe: wear, placement jitter, optional cut, blur, grain, salt.

    Deterministic in (spec, shoe, replicate, wear); scan placement does not
    depend on the blur level, mirroring how one physical print can be
    rescanned through increasing diffusion layers.
    """
    spec = master.spec
    place_rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((spec.seed, _stable_int(master.shoe_id), replicate, wear_level, 7)))
    )
    noise_rng = np.random.Generator(
        np.random.PCG64(
            np.random.SeedSequence((spec.seed, _stable_int(master.shoe_id), replicate, wear_level, blur_level, 11))
        )
    )
    img = _apply_wear(master.image.pixels, master, wear_level, place_rng)
    img = _jitter(img, place_rng, spec)
    if partial_region is not None:
        img = _partial_mask(img, partial_region, master.foot)
    sigma = spec.blur_sigma(blur_level)
    if sigma > 0:
        img = ndimage.gaussian_filter(img, sigma=sigma)
    img = _contrast_normalize(img)
    if spec.grain_sigma > 0:
        img = img + noise_rng.normal(0.0, spec.grain_sigma, size=img.shape)
    img = _salt_noise(img, noise_rng, spec.salt_cluster_count)
    return GrayImage(np.clip(img, 0.0, 255.0))


# -- corpus generation -----------------------------------------------------


def generate_corpus(
    out_dir,
    n_persons: int = 15,
    models: tuple = ("gridA", "waveB"),
    sizes: tuple = ("9", "10"),
    feet: tuple = ("L", "R"),
    replicates: int = 2,
    blur_levels: tuple = (2, 4, 6, 8, 10),
    wear_visits: tuple = (2, 3),
    spec: SynthSpec | None = None,
    save_png: bool = True,
) -> tuple[Path, list]:
    """Generate shoes, captures, and a registry CSV under ``out_dir``.

    Per shoe: pristine visit-1 replicates at blur 0, one capture per blur
    level, and one worn capture per later visit.  Model and size rotate over
    persons so every class combination has multiple owners, which the
    non-mate constructions require.
    """
    if n_persons < 2:
        raise PairingError("need at least two persons for non-mated pairs")
    spec = spec or SynthSpec()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    image_dir = out_dir / "images"
    image_dir.mkdir(exist_ok=True)

    records = []
    for p in range(n_persons):
        person_id = f"P{p:03d}"
        model = models[p % len(models)]
        size = sizes[(p // len(models)) % len(sizes)]
        for foot in feet:
            shoe_id = f"S{p:03d}{foot}"
            master = generate_shoe(spec, shoe_id, model=model, foot=foot)

            def emit(visit, blur, rep, wear, region=None):
                img = capture(master, rep, blur_level=blur, wear_level=wear, partial_region=region)
                name = f"{shoe_id}_v{visit}_b{blur:02d}_r{rep}.png"
                path = image_dir / name
                if save_png:
                    Image.fromarray(img.pixels.astype(np.uint8)).save(path)
                records.append(
                    ShoeRecord(
                        shoe_id=shoe_id,
                        person_id=person_id,
                        model=model,
                        size=size,
                        foot=foot,
                        visit=visit,
                        blur_level=blur,
                        replicate=rep,
                        image_path=str(path),
                    )
                )

            for rep in range(replicates):
                emit(visit=1, blur=0, rep=rep, wear=0)
            for blur in blur_levels:
                emit(visit=1, blur=blur, rep=replicates, wear=0)
            for i, visit in enumerate(wear_visits):
                emit(visit=visit, blur=0, rep=0, wear=i + 1)

    registry_path = out_dir / "registry.csv"
    write_registry(records, registry_path)
    return registry_path, records
