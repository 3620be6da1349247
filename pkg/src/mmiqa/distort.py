"""Synthetic single-family distortions and paired-corpus generation.

Six families, each applied at one of a small set of severity levels:

    blur    Gaussian blur, sigma in {1.5, 3.0, 5.0}
    lowres  box downsample by {2, 3, 4} + bicubic upsample to original size
    noise   additive zero-mean Gaussian noise, sigma in {5, 15, 25}
    haze    constant-transmission veil, t in {0.8, 0.7, 0.6}, air-light 255
    under   gamma darkening, gamma in {1.2, 1.4}
    over    gamma brightening, gamma in {0.8, 0.6}

Strict mode confines levels to these sets; free-level mode accepts any
positive value with a warning (for sensitivity sweeps).
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import scipy.ndimage as ndi

from .errors import BadLevel, EmptyInput, ImageTooSmall
from .imgops import require_rgb


class Family(str, Enum):
    BLUR = "blur"
    LOWRES = "lowres"
    NOISE = "noise"
    HAZE = "haze"
    UNDER = "under"
    OVER = "over"


STRICT_LEVELS: dict[Family, tuple[float, ...]] = {
    Family.BLUR: (1.5, 3.0, 5.0),
    Family.LOWRES: (2.0, 3.0, 4.0),
    Family.NOISE: (5.0, 15.0, 25.0),
    Family.HAZE: (0.8, 0.7, 0.6),
    Family.UNDER: (1.2, 1.4),
    Family.OVER: (0.8, 0.6),
}


def check_level(family: Family, level: float, strict: bool = True) -> float:
    """Validate a severity level; free mode accepts any positive value."""
    level = float(level)
    if strict:
        if level not in STRICT_LEVELS[family]:
            raise BadLevel(
                f"level {level} not allowed for {family.value} in strict mode; "
                f"allowed: {STRICT_LEVELS[family]}"
            )
    elif not (np.isfinite(level) and level > 0):
        raise BadLevel(f"level must be positive and finite, got {level}")
    elif level not in STRICT_LEVELS[family]:
        warnings.warn(
            f"non-standard {family.value} level {level}", stacklevel=2
        )
    return level


@dataclass(frozen=True)
class DistortionSpec:
    """One distortion to apply: family, severity level, RNG seed (noise only)."""

    family: Family
    level: float
    rng_seed: int = 0

    def apply(self, img: np.ndarray) -> np.ndarray:
        return apply_distortion(img, self.family, self.level, self.rng_seed)


def _round_u8(arr: np.ndarray) -> np.ndarray:
    """Round half up and clamp to the 8-bit range."""
    return np.clip(np.floor(arr + 0.5), 0.0, 255.0).astype(np.uint8)


def apply_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Per-channel Gaussian blur, kernel radius ceil(3*sigma), replicated borders."""
    rgb = require_rgb(img)
    if not (np.isfinite(sigma) and sigma > 0):
        raise BadLevel(f"blur sigma must be positive, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    offs = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(offs**2) / (2.0 * sigma * sigma))
    kernel /= kernel.sum()
    out = rgb.astype(np.float64)
    out = ndi.correlate1d(out, kernel, axis=0, mode="nearest")
    out = ndi.correlate1d(out, kernel, axis=1, mode="nearest")
    return _round_u8(out)


def _box_downsample_axis(arr: np.ndarray, factor: int, axis: int) -> np.ndarray:
    """Average over blocks of `factor` samples; a trailing partial block is
    averaged over the samples it actually has."""
    n = arr.shape[axis]
    starts = np.arange(0, n, factor)
    sums = np.add.reduceat(arr, starts, axis=axis)
    counts = np.minimum(starts + factor, n) - starts
    shape = [1] * arr.ndim
    shape[axis] = len(starts)
    return sums / counts.reshape(shape)


def _catmull_rom_weights(t: np.ndarray) -> list[np.ndarray]:
    """Cubic convolution weights (a = -0.5) for taps at offsets -1, 0, 1, 2."""

    def w_near(x):  # |x| <= 1
        return (1.5 * x - 2.5) * x * x + 1.0

    def w_far(x):  # 1 < |x| <= 2
        return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0

    return [w_far(1.0 + t), w_near(t), w_near(1.0 - t), w_far(2.0 - t)]


def _cubic_resize_axis(arr: np.ndarray, out_len: int, axis: int) -> np.ndarray:
    """Bicubic (Catmull-Rom) resampling along one axis, clamped source taps."""
    in_len = arr.shape[axis]
    scale = in_len / out_len
    x = (np.arange(out_len, dtype=np.float64) + 0.5) * scale - 0.5
    i0 = np.floor(x).astype(np.int64)
    t = x - i0
    weights = _catmull_rom_weights(t)
    moved = np.moveaxis(arr, axis, 0)
    out = np.zeros((out_len,) + moved.shape[1:], dtype=np.float64)
    for tap, w in zip((-1, 0, 1, 2), weights):
        idx = np.clip(i0 + tap, 0, in_len - 1)
        out += w.reshape((-1,) + (1,) * (moved.ndim - 1)) * moved[idx]
    return np.moveaxis(out, 0, axis)


def apply_lowres(img: np.ndarray, factor: int) -> np.ndarray:
    """Box downsample by an integer factor, then bicubic upsample back.

    Output dimensions equal input dimensions.
    """
    rgb = require_rgb(img)
    if factor != int(factor) or int(factor) < 2:
        raise BadLevel(f"downsample factor must be an integer >= 2, got {factor}")
    factor = int(factor)
    h, w = rgb.shape[:2]
    if h < factor or w < factor:
        raise ImageTooSmall(f"image {h}x{w} smaller than factor {factor}")
    small = _box_downsample_axis(rgb.astype(np.float64), factor, axis=0)
    small = _box_downsample_axis(small, factor, axis=1)
    up = _cubic_resize_axis(small, h, axis=0)
    up = _cubic_resize_axis(up, w, axis=1)
    return _round_u8(up)


def apply_noise(img: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise per pixel and channel.

    Draws come from a Philox counter-based generator, so the same seed
    produces the same bytes on every platform.
    """
    rgb = require_rgb(img)
    if not (np.isfinite(sigma) and sigma >= 0):
        raise BadLevel(f"noise sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return rgb.copy()
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    noise = rng.normal(0.0, sigma, size=rgb.shape)
    return _round_u8(rgb.astype(np.float64) + noise)


def apply_haze(img: np.ndarray, t: float) -> np.ndarray:
    """Constant-transmission atmospheric veil: out = t * in + (1 - t) * 255."""
    rgb = require_rgb(img)
    if not (np.isfinite(t) and 0.0 < t <= 1.0):
        raise BadLevel(f"transmission must be in (0, 1], got {t}")
    return _round_u8(t * rgb.astype(np.float64) + (1.0 - t) * 255.0)


def apply_gamma(img: np.ndarray, gamma: float) -> np.ndarray:
    """Power-law tone mapping: out = 255 * (in / 255) ** gamma.

    gamma > 1 darkens (underexposure), gamma < 1 brightens (overexposure).
    """
    rgb = require_rgb(img)
    if not (np.isfinite(gamma) and gamma > 0):
        raise BadLevel(f"gamma must be positive, got {gamma}")
    return _round_u8(255.0 * (rgb.astype(np.float64) / 255.0) ** gamma)


def apply_distortion(
    img: np.ndarray, family: Family, level: float, seed: int = 0
) -> np.ndarray:
    """Dispatch to the family-specific operator."""
    family = Family(family)
    if family is Family.BLUR:
        return apply_blur(img, level)
    if family is Family.LOWRES:
        return apply_lowres(img, int(level))
    if family is Family.NOISE:
        return apply_noise(img, level, seed)
    if family is Family.HAZE:
        return apply_haze(img, level)
    return apply_gamma(img, level)  # UNDER / OVER


@dataclass(frozen=True)
class ManifestRecord:
    clean_path: str
    distorted_path: str
    family: str
    level: float
    seed: int


@dataclass(frozen=True)
class CorpusManifest:
    """Index of a generated corpus: one record per distorted image."""

    records: tuple[ManifestRecord, ...]

    HEADER = ("clean_path", "distorted_path", "family", "level", "seed")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.HEADER)
            for r in self.records:
                writer.writerow(
                    [r.clean_path, r.distorted_path, r.family, repr(r.level), r.seed]
                )

    @classmethod
    def read_csv(cls, path) -> "CorpusManifest":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader, ()))
            if header != cls.HEADER:
                raise EmptyInput(
                    f"manifest header {header} does not match {cls.HEADER}"
                )
            records = tuple(
                ManifestRecord(row[0], row[1], row[2], float(row[3]), int(row[4]))
                for row in reader
                if row
            )
        return cls(records)


FAMILY_ORDER = (
    Family.BLUR, Family.LOWRES, Family.NOISE, Family.HAZE, Family.UNDER, Family.OVER
)

_IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg"}


def _record_rng(seed: int, image_index: int, family_index: int) -> np.random.Generator:
    # Stream derived from (global seed, image index, family) so parallel
    # generation order cannot change outputs.
    ss = np.random.SeedSequence([int(seed), int(image_index), int(family_index)])
    return np.random.Generator(np.random.Philox(ss))


def build_corpus(
    clean_dir,
    out_dir,
    seed: int,
    strict_levels: bool = True,
    family: Family | None = None,
    level: float | None = None,
) -> CorpusManifest:
    """Write one distorted PNG per family for every clean image.

    Levels are drawn uniformly from each family's allowed set using a
    per-(seed, image, family) generator; passing ``family`` and ``level``
    instead applies that single distortion to every image (validated
    against ``strict_levels``).  Returns the manifest, which is also
    written to ``out_dir/manifest.csv``.
    """
    from .image_io import load_rgb, save_png

    clean_dir = Path(clean_dir)
    out_dir = Path(out_dir)
    paths = sorted(
        p for p in clean_dir.iterdir()
        if p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES
    )
    if not paths:
        raise EmptyInput(f"no decodable images in {clean_dir}")
    if family is not None:
        if level is None:
            raise BadLevel("a family override requires a level")
        level = check_level(Family(family), level, strict_levels)
        families = (Family(family),)
    else:
        if level is not None:
            raise BadLevel("a level override requires a family")
        families = FAMILY_ORDER

    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for idx, path in enumerate(paths):
        img = load_rgb(path)
        for fam in families:
            fam_idx = FAMILY_ORDER.index(fam)
            rng = _record_rng(seed, idx, fam_idx)
            levels = STRICT_LEVELS[fam]
            chosen = level if level is not None else levels[rng.integers(len(levels))]
            record_seed = int(rng.integers(2**63))
            distorted = apply_distortion(img, fam, chosen, record_seed)
            name = f"{idx:05d}_{path.stem}_{fam.value}.png"
            dest = out_dir / name
            save_png(distorted, dest)
            records.append(
                ManifestRecord(str(path), str(dest), fam.value, float(chosen), record_seed)
            )
    manifest = CorpusManifest(tuple(records))
    manifest.write_csv(out_dir / "manifest.csv")
    return manifest
