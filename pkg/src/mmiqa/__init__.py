"""mmiqa: training-free no-reference image quality assessment.

Converts an RGB image into eight interpretable distortion cues and fuses
them into a single quality score in [0, 100]; ships tooling to
synthesize distorted corpora and to evaluate rank/linear correlation
against human opinion scores.
"""

from .cues import CannyParams, CueVector, ExposureThresholds, extract_cues
from .distort import (
    DistortionSpec,
    Family,
    apply_blur,
    apply_distortion,
    apply_gamma,
    apply_haze,
    apply_lowres,
    apply_noise,
    build_corpus,
)
from .evaluate import (
    CorrelationReport,
    LogisticParams,
    PredictionRecord,
    bootstrap_ci,
    classification_metrics,
    delta_diagnostic,
    fit_logistic5,
    plcc,
    srcc,
)
from .score import (
    CompositeCues,
    FusionConfig,
    QualityBreakdown,
    blur_percent,
    fuse,
    lowres_percent,
    normalize_terms,
    score_image,
)

__version__ = "0.1.0"

__all__ = [
    "CannyParams",
    "CompositeCues",
    "CorrelationReport",
    "CueVector",
    "DistortionSpec",
    "ExposureThresholds",
    "Family",
    "FusionConfig",
    "LogisticParams",
    "PredictionRecord",
    "QualityBreakdown",
    "apply_blur",
    "apply_distortion",
    "apply_gamma",
    "apply_haze",
    "apply_lowres",
    "apply_noise",
    "blur_percent",
    "bootstrap_ci",
    "build_corpus",
    "classification_metrics",
    "delta_diagnostic",
    "extract_cues",
    "fit_logistic5",
    "fuse",
    "lowres_percent",
    "normalize_terms",
    "plcc",
    "score_image",
    "srcc",
]
