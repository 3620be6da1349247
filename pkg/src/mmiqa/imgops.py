"""Low-level raster primitives shared by all cue extractors.

Conventions used throughout the package:

* grayscale images are 2-D ``uint8`` arrays, RGB images are ``(H, W, 3)``
  ``uint8`` arrays, filter responses are ``float64`` arrays;
* borders are handled by edge replication;
* 3x3 kernels are applied in correlation orientation (no kernel flip).
  The Laplacian stencil is symmetric and the Sobel kernels are
  antisymmetric, so the only observable effect is a gradient sign flip,
  which is squared away downstream.

All functions are pure and deterministic: identical inputs produce
identical output bytes on every run.
"""

from __future__ import annotations

import numpy as np
import scipy.ndimage as ndi

from .errors import EvenStructuringElement, ImageTooSmall

# 3x3 four-neighbour Laplacian stencil.
LAPLACIAN_3X3 = np.array(
    [[0.0, 1.0, 0.0],
     [1.0, -4.0, 1.0],
     [0.0, 1.0, 0.0]]
)

# Standard 3x3 Sobel kernels; SOBEL_X responds to horizontal intensity
# change (vertical edges), SOBEL_Y is its transpose.
SOBEL_X = np.array(
    [[-1.0, 0.0, 1.0],
     [-2.0, 0.0, 2.0],
     [-1.0, 0.0, 1.0]]
)
SOBEL_Y = SOBEL_X.T.copy()


def require_rgb(img: np.ndarray) -> np.ndarray:
    """Validate an RGB image: uint8, shape (H, W, 3), H and W >= 3."""
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) RGB array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {arr.dtype}")
    if arr.shape[0] < 3 or arr.shape[1] < 3:
        raise ImageTooSmall(f"RGB image must be at least 3x3, got {arr.shape[:2]}")
    return arr


def require_gray(img: np.ndarray, min_side: int = 1) -> np.ndarray:
    """Validate a grayscale image: uint8, 2-D, sides >= min_side."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"expected 2-D grayscale array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 pixels, got {arr.dtype}")
    if arr.shape[0] < min_side or arr.shape[1] < min_side:
        raise ImageTooSmall(
            f"grayscale image must be at least {min_side}x{min_side}, got {arr.shape}"
        )
    return arr


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """BT.601 luma: Y = round(0.299 R + 0.587 G + 0.114 B), round half up."""
    rgb = require_rgb(img).astype(np.float64)
    y = 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
    return np.clip(np.floor(y + 0.5), 0.0, 255.0).astype(np.uint8)


def convolve3(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Same-size 3x3 filtering with edge-replicated borders.

    out[r, c] = sum_{i,j} kernel[i, j] * img[r+i-1, c+j-1]
    """
    gray = require_gray(img)
    if gray.shape[0] < 3 or gray.shape[1] < 3:
        raise ImageTooSmall(f"need at least 3x3 for a 3x3 kernel, got {gray.shape}")
    k = np.asarray(kernel, dtype=np.float64)
    if k.shape != (3, 3):
        raise ValueError(f"kernel must be 3x3, got {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("kernel coefficients must be finite")
    return ndi.correlate(gray.astype(np.float64), k, mode="nearest")


# Median-of-9 exchange network (19 compare/swaps); after applying the
# swaps in order, slot 4 holds the median.
_MEDIAN9_SWAPS = (
    (1, 2), (4, 5), (7, 8), (0, 1), (3, 4), (6, 7), (1, 2), (4, 5), (7, 8),
    (0, 3), (5, 8), (4, 7), (3, 6), (1, 4), (2, 5), (4, 7), (4, 2), (6, 4),
    (4, 2),
)


def median3(img: np.ndarray) -> np.ndarray:
    """Each pixel replaced by the median of its replicated-border 3x3 window."""
    gray = require_gray(img)
    if gray.shape[0] < 3 or gray.shape[1] < 3:
        raise ImageTooSmall(f"need at least 3x3 for a 3x3 median, got {gray.shape}")
    h, w = gray.shape
    padded = np.pad(gray, 1, mode="edge")
    slots = [padded[r:r + h, c:c + w] for r in (0, 1, 2) for c in (0, 1, 2)]
    for a, b in _MEDIAN9_SWAPS:
        lo = np.minimum(slots[a], slots[b])
        hi = np.maximum(slots[a], slots[b])
        slots[a], slots[b] = lo, hi
    return slots[4]


def erode(img: np.ndarray, side: int) -> np.ndarray:
    """Each pixel replaced by the minimum over a replicated-border side x side window."""
    gray = require_gray(img)
    if side != int(side) or side < 1:
        raise ValueError(f"window side must be a positive integer, got {side}")
    side = int(side)
    if side % 2 == 0:
        raise EvenStructuringElement(f"window side must be odd, got {side}")
    if side == 1:
        return gray.copy()
    # Flat rectangular erosion is separable; two 1-D passes are exact.
    out = ndi.minimum_filter1d(gray, side, axis=0, mode="nearest")
    return ndi.minimum_filter1d(out, side, axis=1, mode="nearest")


def histogram256(img: np.ndarray) -> np.ndarray:
    """Exact occurrence count of each intensity level 0..255."""
    gray = require_gray(img)
    return np.bincount(gray.ravel(), minlength=256)


def dft_magnitude(img: np.ndarray) -> np.ndarray:
    """Coefficient-wise modulus of the unnormalized 2-D DFT.

    Computed at the native M x N size (any M, N): no padding, no centering
    shift, DC term at (0, 0).
    """
    gray = require_gray(img)
    return np.abs(np.fft.fft2(gray.astype(np.float64)))
