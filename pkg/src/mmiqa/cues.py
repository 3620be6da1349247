"""Primitive distortion cues measured on a single image.

Eight measurements: two sharpness scores (Laplacian variance, Tenengrad
energy), Canny edge density, log-compressed spectral energy, a
median-residual noise estimate, clipped-shadow/highlight percentages,
and a dark-channel haze proxy.  All cues except the haze proxy are
computed on the BT.601 grayscale conversion of the input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.ndimage as ndi

from . import imgops

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


def _gaussian5x5(sigma: float = 1.0) -> np.ndarray:
    offs = np.arange(-2.0, 3.0)
    g = np.exp(-(offs**2) / (2.0 * sigma * sigma))
    k = np.outer(g, g)
    return k / k.sum()


_CANNY_SMOOTH = _gaussian5x5(1.0)


@dataclass(frozen=True)
class CannyParams:
    """Hysteresis thresholds for the edge detector (defaults 100/200)."""

    t_low: float = 100.0
    t_high: float = 200.0

    def __post_init__(self):
        if not (0.0 <= self.t_low <= self.t_high):
            raise ValueError(
                f"need 0 <= t_low <= t_high, got ({self.t_low}, {self.t_high})"
            )


@dataclass(frozen=True)
class ExposureThresholds:
    """Histogram tail boundaries; levels t_under and t_over belong to neither tail."""

    t_under: int = 30
    t_over: int = 225

    def __post_init__(self):
        if not (0 <= self.t_under < self.t_over <= 255):
            raise ValueError(
                f"need 0 <= t_under < t_over <= 255, got ({self.t_under}, {self.t_over})"
            )


@dataclass(frozen=True)
class CueVector:
    """The eight primitive measurements for one image."""

    lap_var: float       # variance of the 3x3 Laplacian response, intensity^2
    tenengrad: float     # mean squared Sobel gradient magnitude
    edge_density: float  # fraction of Canny edge pixels, in [0, 1]
    fft_energy: float    # mean log(1 + |DFT coefficient|)
    noise: float         # RMS of the median-filter residual
    under_pct: float     # % of pixels below the shadow threshold
    over_pct: float      # % of pixels above the highlight threshold
    haze: float          # mean eroded dark channel, in [0, 255]

    def __post_init__(self):
        values = (self.lap_var, self.tenengrad, self.edge_density, self.fft_energy,
                  self.noise, self.under_pct, self.over_pct, self.haze)
        if not all(np.isfinite(v) for v in values):
            raise ValueError(f"cue values must be finite, got {values}")
        bounds = (
            ("lap_var", self.lap_var, 0.0, np.inf),
            ("tenengrad", self.tenengrad, 0.0, np.inf),
            ("edge_density", self.edge_density, 0.0, 1.0),
            ("fft_energy", self.fft_energy, 0.0, np.inf),
            ("noise", self.noise, 0.0, np.inf),
            ("under_pct", self.under_pct, 0.0, 100.0),
            ("over_pct", self.over_pct, 0.0, 100.0),
            ("haze", self.haze, 0.0, 255.0),
        )
        for name, value, lo, hi in bounds:
            if not (lo <= value <= hi):
                raise ValueError(f"{name}={value} outside [{lo}, {hi}]")
        if self.under_pct + self.over_pct > 100.0 + 1e-9:
            raise ValueError("under_pct + over_pct cannot exceed 100")


def laplacian_variance(img: np.ndarray) -> float:
    """Sample variance (divisor MN-1) of the same-size 3x3 Laplacian response.

    Insensitive to global intensity offsets: the stencil sums to zero and
    edge replication preserves constants.
    """
    resp = imgops.convolve3(img, imgops.LAPLACIAN_3X3)
    return float(resp.var(ddof=1))


def tenengrad(img: np.ndarray) -> float:
    """Mean over all pixels of Gx^2 + Gy^2 from the 3x3 Sobel pair."""
    gx = imgops.convolve3(img, imgops.SOBEL_X)
    gy = imgops.convolve3(img, imgops.SOBEL_Y)
    return float(np.mean(gx * gx + gy * gy))


def edge_density(img: np.ndarray, params: CannyParams | None = None) -> float:
    """Fraction of pixels marked edge by the Canny detector.

    Fixed pipeline: 5x5 Gaussian pre-smoothing (sigma 1.0), Sobel
    gradients, L2 magnitude, 4-direction non-maximum suppression (ties
    kept, replicated-border neighbours), then double-threshold hysteresis
    (strict > comparisons) with 8-connected linking.
    """
    p = params or CannyParams()
    gray = imgops.require_gray(img)
    if gray.shape[0] < 3 or gray.shape[1] < 3:
        raise imgops.ImageTooSmall(f"need at least 3x3, got {gray.shape}")

    smoothed = ndi.correlate(gray.astype(np.float64), _CANNY_SMOOTH, mode="nearest")
    gx = ndi.correlate(smoothed, imgops.SOBEL_X, mode="nearest")
    gy = ndi.correlate(smoothed, imgops.SOBEL_Y, mode="nearest")
    mag = np.sqrt(gx * gx + gy * gy)

    # Quantize the gradient direction into 4 sectors and keep local maxima
    # along the gradient.  Rows grow downward, so sector 1 (around 45
    # degrees) compares the down-right / up-left neighbours.
    angle = np.mod(np.degrees(np.arctan2(gy, gx)), 180.0)
    h, w = mag.shape
    padded = np.pad(mag, 1, mode="edge")

    def shifted(dr: int, dc: int) -> np.ndarray:
        return padded[1 + dr:1 + dr + h, 1 + dc:1 + dc + w]

    sectors = [
        (angle < 22.5) | (angle >= 157.5),
        (angle >= 22.5) & (angle < 67.5),
        (angle >= 67.5) & (angle < 112.5),
        (angle >= 112.5) & (angle < 157.5),
    ]
    fwd = [shifted(0, 1), shifted(1, 1), shifted(1, 0), shifted(1, -1)]
    bwd = [shifted(0, -1), shifted(-1, -1), shifted(-1, 0), shifted(-1, 1)]
    n1 = np.select(sectors, fwd)
    n2 = np.select(sectors, bwd)
    nms = np.where((mag >= n1) & (mag >= n2), mag, 0.0)

    candidate = nms > p.t_low
    strong = nms > p.t_high
    labels, _ = ndi.label(candidate, structure=_EIGHT_CONNECTED)
    strong_ids = np.unique(labels[strong])
    edges = np.isin(labels, strong_ids[strong_ids > 0])
    return float(edges.sum() / edges.size)


def fft_energy(img: np.ndarray) -> float:
    """Log-compressed average spectral magnitude: mean of log(1 + |DFT|)."""
    return float(np.mean(np.log1p(imgops.dft_magnitude(img))))


def noise_estimate(img: np.ndarray) -> float:
    """RMS of the residual between the image and its 3x3 median filter.

    The residual is taken in real arithmetic (no 8-bit clamping).
    """
    gray = imgops.require_gray(img)
    med = imgops.median3(gray)
    resid = gray.astype(np.float64) - med.astype(np.float64)
    return float(np.sqrt(np.mean(resid * resid)))


def exposure_tails(
    img: np.ndarray, thresholds: ExposureThresholds | None = None
) -> tuple[float, float]:
    """Percentages of pixels in the shadow and highlight histogram tails.

    Returns (under_pct, over_pct) where under counts levels 0..t_under-1
    and over counts levels t_over+1..255, from the raw histogram.
    """
    t = thresholds or ExposureThresholds()
    counts = imgops.histogram256(img)
    n = img.size
    under = 100.0 * float(counts[: t.t_under].sum()) / n
    over = 100.0 * float(counts[t.t_over + 1:].sum()) / n
    return under, over


def haze_proxy(img: np.ndarray, side: int = 15) -> float:
    """Mean of the eroded dark channel, in [0, 255].

    The dark channel is the per-pixel minimum over R, G, B; erosion uses a
    flat side x side rectangle.  Large values indicate veiling light.
    """
    rgb = imgops.require_rgb(img)
    dark = rgb.min(axis=2)
    return float(imgops.erode(dark, side).mean())


def extract_cues(
    img: np.ndarray,
    canny: CannyParams | None = None,
    exposure: ExposureThresholds | None = None,
    haze_side: int = 15,
) -> CueVector:
    """Compute all eight primitive cues for one RGB image.

    A single grayscale conversion is shared by all luminance cues; the
    haze proxy reads the RGB input directly.
    """
    rgb = imgops.require_rgb(img)
    gray = imgops.to_grayscale(rgb)
    under, over = exposure_tails(gray, exposure)
    return CueVector(
        lap_var=laplacian_variance(gray),
        tenengrad=tenengrad(gray),
        edge_density=edge_density(gray, canny),
        fft_energy=fft_energy(gray),
        noise=noise_estimate(gray),
        under_pct=under,
        over_pct=over,
        haze=haze_proxy(rgb, haze_side),
    )
