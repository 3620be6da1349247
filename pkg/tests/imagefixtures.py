"""Deterministic synthetic images used as test fixtures.

detail_rich() produces a sharp, textured scene with full tonal coverage:
a neutral left-to-right ramp (so every histogram band is populated),
scattered mid-contrast rectangles, two fine checkerboard patches (fragile
under downsampling), thin lines, and light pixel texture.  smooth()
produces a low-frequency scene with almost no median-filter residual.
"""

import numpy as np


def _rng(*entropy) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(entropy))))


def _finish(img: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)


def detail_rich(seed: int, size: int = 256) -> np.ndarray:
    """Sharp, detail-rich RGB fixture; deterministic per (seed, size)."""
    rng = _rng(0xF1D0, seed)
    h = w = size
    cols = np.arange(w, dtype=np.float64)
    base = 255.0 * cols / (w - 1)
    img = np.repeat(base[None, :, None], h, axis=0)
    img = np.repeat(img, 3, axis=2)

    for _ in range(40):
        rh = int(rng.integers(6, max(8, h // 4)))
        rw = int(rng.integers(6, max(8, w // 4)))
        r0 = int(rng.integers(0, h - rh))
        c0 = int(rng.integers(0, w - rw))
        img[r0:r0 + rh, c0:c0 + rw] = rng.uniform(15.0, 240.0, size=3)

    rows_idx = np.arange(h)[:, None]
    cols_idx = np.arange(w)[None, :]
    cb1 = ((rows_idx + cols_idx) % 2).astype(np.float64)
    r0, c0 = h // 6, w // 6
    patch = (slice(r0, r0 + h // 5), slice(c0, c0 + w // 5))
    img[patch] = (112.0 + 32.0 * cb1[patch])[..., None]

    cb2 = (((rows_idx // 2) + (cols_idx // 2)) % 2).astype(np.float64)
    patch2 = (slice(2 * h // 3, 2 * h // 3 + h // 5), slice(w // 2, w // 2 + w // 5))
    img[patch2] = (90.0 + 70.0 * cb2[patch2])[..., None]

    # 2-px-thick high-contrast lines: strong Canny edges on both flanks, but
    # invisible to the 3x3 median residual (so they do not inflate N)
    for i in range(26):
        level = 25.0 if i % 2 == 0 else 230.0
        if rng.random() < 0.5:
            r = int(rng.integers(0, h - 2))
            c0 = int(rng.integers(0, w // 2))
            img[r:r + 2, c0:c0 + int(rng.integers(w // 3, w))] = level
        else:
            c = int(rng.integers(0, w - 2))
            r0 = int(rng.integers(0, h // 2))
            img[r0:r0 + int(rng.integers(h // 3, h)), c:c + 2] = level

    img += rng.normal(0.0, 1.5, size=img.shape)
    return _finish(img)


def smooth(seed: int, size: int = 128) -> np.ndarray:
    """Low-frequency RGB fixture with near-zero median residual."""
    rng = _rng(0x5800, seed)
    h = w = size
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    phase_x, phase_y = rng.uniform(0, 2 * np.pi, size=2)
    field = (
        128.0
        + 55.0 * np.sin(2 * np.pi * xx / w * 1.5 + phase_x)
        * np.sin(2 * np.pi * yy / h * 1.2 + phase_y)
    )
    img = np.stack([field, field, field], axis=-1)
    return _finish(img)


def random_rgb(rng: np.random.Generator, h: int, w: int) -> np.ndarray:
    """Uniform random RGB image from the given generator."""
    return rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
