"""Pan-sharpening toolkit.

Guided re-colorization, color-aware perceptual losses over loadable
convolutional feature banks, and the ERGAS / SCC / QNR quality metrics,
with a batch CLI (``pansharp`` / ``python -m pansharp``).
"""

from .featbank import ConvStage, FeatureBank, FeatureMaps, extract, load_bank, max_pool, save_bank
from .kernels import BACKEND
from .losses import (
    CapWeights,
    LossParams,
    LossReport,
    cap_loss,
    cap_weights,
    fidelity_loss,
    l1_loss,
    perceptual_loss,
    rc_loss,
    total_loss,
)
from .metrics import MetricsParams, MetricsReport, ergas, evaluate, qnr, scc, uiq
from .raster import (
    Raster,
    box_filter,
    downscale_area,
    from_ycbcr,
    gray_inverted,
    high_freq,
    to_ycbcr,
    upscale_bilinear,
    zero_fraction,
)
from .recolor import RecolorParams, hf_guided, luma_guided, rc_stage_inputs, recolorize

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CapWeights",
    "ConvStage",
    "FeatureBank",
    "FeatureMaps",
    "LossParams",
    "LossReport",
    "MetricsParams",
    "MetricsReport",
    "Raster",
    "RecolorParams",
    "box_filter",
    "cap_loss",
    "cap_weights",
    "downscale_area",
    "ergas",
    "evaluate",
    "extract",
    "fidelity_loss",
    "from_ycbcr",
    "gray_inverted",
    "hf_guided",
    "high_freq",
    "l1_loss",
    "load_bank",
    "luma_guided",
    "max_pool",
    "perceptual_loss",
    "qnr",
    "rc_loss",
    "rc_stage_inputs",
    "recolorize",
    "save_bank",
    "scc",
    "to_ycbcr",
    "total_loss",
    "uiq",
    "upscale_bilinear",
    "zero_fraction",
]
