"""Composite cues, normalized quality terms, and the fused quality score.

The pipeline runs in four stages: grayscale conversion, primitive cue
extraction, composite cue construction (Blur%, LowRes%), and weighted
fusion of eight normalized terms into Q in [0, 100].

Term order.  Quality terms and fusion weights share one fixed order:

    (blur, lowres, noise, under, over, haze, edge, fft)

The default weights (0.30, 0.20, 0.15, 0.08, 0.07, 0.05, 0.10, 0.05)
correspond to that order; keep the two aligned when overriding either.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cues import CannyParams, CueVector, ExposureThresholds, extract_cues
from .errors import BadWeights, EvenStructuringElement

QTERM_ORDER = ("blur", "lowres", "noise", "under", "over", "haze", "edge", "fft")

DEFAULT_WEIGHTS = (0.30, 0.20, 0.15, 0.08, 0.07, 0.05, 0.10, 0.05)

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class FusionConfig:
    """Every calibration constant of the scoring pipeline, overridable.

    The ref_* values are reference levels for visually good images;
    values beyond them are clipped during normalization.
    """

    ref_lapvar: float = 1000.0       # Laplacian variance of a sharp image
    ref_tenengrad: float = 6000.0    # Tenengrad energy of a sharp image
    ref_edge_blur: float = 0.05      # edge density used by Blur% / LowRes%
    ref_fft_lowres: float = 8.0      # FFT energy used by LowRes%
    ref_noise: float = 15.0          # noise level treated as fully degraded
    ref_haze: float = 100.0          # haze proxy treated as fully degraded
    ref_edge_q: float = 0.2          # edge density of a detail-rich image
    ref_fft_q: float = 9.0           # FFT energy of a detail-rich image
    weights: tuple[float, ...] = DEFAULT_WEIGHTS
    canny: CannyParams = field(default_factory=CannyParams)
    exposure: ExposureThresholds = field(default_factory=ExposureThresholds)
    haze_side: int = 15

    def __post_init__(self):
        refs = {
            "ref_lapvar": self.ref_lapvar,
            "ref_tenengrad": self.ref_tenengrad,
            "ref_edge_blur": self.ref_edge_blur,
            "ref_fft_lowres": self.ref_fft_lowres,
            "ref_noise": self.ref_noise,
            "ref_haze": self.ref_haze,
            "ref_edge_q": self.ref_edge_q,
            "ref_fft_q": self.ref_fft_q,
        }
        for name, value in refs.items():
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value}")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        _check_weights(self.weights)
        if self.haze_side < 1 or self.haze_side != int(self.haze_side):
            raise ValueError(f"haze_side must be a positive integer, got {self.haze_side}")
        if self.haze_side % 2 == 0:
            raise EvenStructuringElement(f"haze_side must be odd, got {self.haze_side}")


@dataclass(frozen=True)
class CompositeCues:
    """Blur% and LowRes% degradation percentages, both in [0, 100]."""

    blur_pct: float
    lowres_pct: float


@dataclass(frozen=True)
class QualityBreakdown:
    """Everything the pipeline measured for one image.

    q_terms follows QTERM_ORDER; q_total = 100 * sum(w_i * q_i) for the
    config in force, clamped to [0, 100].
    """

    cues: CueVector
    composites: CompositeCues
    q_terms: tuple[float, ...]
    q_total: float


def _check_weights(weights) -> None:
    if len(weights) != len(QTERM_ORDER):
        raise BadWeights(f"expected {len(QTERM_ORDER)} weights, got {len(weights)}")
    if any(w < 0 or not np.isfinite(w) for w in weights):
        raise BadWeights(f"weights must be finite and non-negative, got {weights}")
    total = float(sum(weights))
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise BadWeights(f"weights must sum to 1 (got {total!r})")


def _deficit(value: float, ref: float) -> float:
    """clamp((ref - value) / ref, 0, 1): 0 at/above the reference, 1 at zero."""
    return min(1.0, max(0.0, (ref - value) / ref))


def blur_percent(c: CueVector, cfg: FusionConfig) -> float:
    """Average deficit of the three sharpness cues, scaled to [0, 100]."""
    a_lap = _deficit(c.lap_var, cfg.ref_lapvar)
    a_ten = _deficit(c.tenengrad, cfg.ref_tenengrad)
    a_edge = _deficit(c.edge_density, cfg.ref_edge_blur)
    return 100.0 * (a_lap + a_ten + a_edge) / 3.0


def lowres_percent(c: CueVector, cfg: FusionConfig) -> float:
    """Average deficit of edge density and FFT energy, scaled to [0, 100]."""
    b_edge = _deficit(c.edge_density, cfg.ref_edge_blur)
    b_fft = _deficit(c.fft_energy, cfg.ref_fft_lowres)
    return 100.0 * (b_edge + b_fft) / 2.0


def normalize_terms(
    c: CueVector, comp: CompositeCues, cfg: FusionConfig
) -> tuple[float, ...]:
    """Map cues onto eight quality terms in [0, 1] (1 = no degradation)."""
    q_blur = 1.0 - comp.blur_pct / 100.0
    q_lowres = 1.0 - comp.lowres_pct / 100.0
    q_noise = 1.0 - min(c.noise / cfg.ref_noise, 1.0)
    q_under = 1.0 - c.under_pct / 100.0
    q_over = 1.0 - c.over_pct / 100.0
    q_haze = 1.0 - min(c.haze / cfg.ref_haze, 1.0)
    q_edge = min(c.edge_density / cfg.ref_edge_q, 1.0)
    q_fft = min(c.fft_energy / cfg.ref_fft_q, 1.0)
    return (q_blur, q_lowres, q_noise, q_under, q_over, q_haze, q_edge, q_fft)


def fuse(q_terms, cfg: FusionConfig) -> float:
    """Weighted sum Q = 100 * sum(w_i * q_i), guaranteed in [0, 100]."""
    _check_weights(cfg.weights)
    q = 100.0 * sum(w * q for w, q in zip(cfg.weights, q_terms))
    return min(100.0, max(0.0, q))


def score_image(img: np.ndarray, cfg: FusionConfig | None = None) -> QualityBreakdown:
    """Run the full pipeline on one RGB image."""
    cfg = cfg or FusionConfig()
    c = extract_cues(img, cfg.canny, cfg.exposure, cfg.haze_side)
    comp = CompositeCues(
        blur_pct=blur_percent(c, cfg),
        lowres_pct=lowres_percent(c, cfg),
    )
    q_terms = normalize_terms(c, comp, cfg)
    return QualityBreakdown(
        cues=c,
        composites=comp,
        q_terms=q_terms,
        q_total=fuse(q_terms, cfg),
    )
