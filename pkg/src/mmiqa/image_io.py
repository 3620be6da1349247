"""Image file decode/encode used by the command-line tools.

Decoding always yields an 8-bit RGB array: 16-bit sources are
right-shifted by 8, grayscale sources are replicated to three channels,
alpha channels are dropped, and palette images are expanded.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError


def load_rgb(path) -> np.ndarray:
    """Decode a PNG/JPEG file to (H, W, 3) uint8."""
    path = Path(path)
    try:
        with Image.open(path) as im:
            im.load()
            return _to_rgb_array(im)
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc


def _to_rgb_array(im: Image.Image) -> np.ndarray:
    mode = im.mode
    if mode in ("I;16", "I;16B", "I;16L", "I"):
        # 16-bit sources are right-shifted by 8 to the 8-bit range
        arr = np.asarray(im, dtype=np.int64)
        gray = np.clip(arr >> 8, 0, 255).astype(np.uint8)
        return np.stack([gray] * 3, axis=-1)
    if mode == "L":
        gray = np.asarray(im, dtype=np.uint8)
        return np.stack([gray] * 3, axis=-1)
    if mode == "LA":
        gray = np.asarray(im.convert("L"), dtype=np.uint8)
        return np.stack([gray] * 3, axis=-1)
    if mode == "RGBA":
        return np.asarray(im, dtype=np.uint8)[..., :3].copy()
    if mode != "RGB":
        im = im.convert("RGB")
    return np.asarray(im, dtype=np.uint8).copy()


def save_png(img: np.ndarray, path) -> None:
    """Encode an (H, W, 3) uint8 array as PNG (lossless)."""
    Image.fromarray(img, mode="RGB").save(Path(path), format="PNG")


def resize_rgb(img: np.ndarray, width: int, height: int) -> np.ndarray:
    """Bicubic resize to (height, width); Pillow semantics."""
    im = Image.fromarray(img, mode="RGB").resize((width, height), Image.BICUBIC)
    return np.asarray(im, dtype=np.uint8).copy()
