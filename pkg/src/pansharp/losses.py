"""Loss computations over feature banks: the color-aware perceptual (CAP)
weights and loss, the plain perceptual and l1 losses, the combined fidelity
loss, and the re-colorization (RC) self-supervision loss.

All norms are normalized to per-element means so magnitudes are independent
of image resolution; layer terms are summed in layer order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .featbank import FeatureBank, FeatureMaps, extract, max_pool
from .raster import Raster, downscale_area, gray_inverted, replicate_channels, upscale_bilinear
from .recolor import RecolorParams, luma_guided, recolorize


@dataclass(frozen=True)
class CapWeights:
    """Per-layer, per-feature-channel weights in (0, 1]."""

    per_layer: tuple[np.ndarray, ...]

    def __post_init__(self):
        layers = tuple(np.asarray(w, dtype=np.float64) for w in self.per_layer)
        for w in layers:
            if w.ndim != 1:
                raise ValueError("each layer's weights must be a flat channel vector")
            if not ((w > 0).all() and (w <= 1).all()):
                raise ValueError("cap weights must lie in (0, 1]")
        object.__setattr__(self, "per_layer", layers)

    def __len__(self) -> int:
        return len(self.per_layer)


@dataclass(frozen=True)
class LossParams:
    """Scalar knobs of the loss suite with their standard defaults."""

    gamma: float = 4.0
    alpha_cap: float = 0.9
    alpha_ms: float = 0.01
    alpha_l1: float = 1.0
    pool_sizes: tuple[int, ...] = (7, 5, 3)
    downscale_factor: int = 4

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if min(self.alpha_cap, self.alpha_ms, self.alpha_l1) < 0:
            raise ValueError("alpha weights must be >= 0")
        if any(m < 1 for m in self.pool_sizes):
            raise ValueError(f"pool sizes must be >= 1, got {self.pool_sizes}")
        if self.downscale_factor < 1:
            raise ValueError(f"downscale factor must be >= 1, got {self.downscale_factor}")
        object.__setattr__(self, "pool_sizes", tuple(int(m) for m in self.pool_sizes))


@dataclass(frozen=True)
class LossReport:
    """Named scalar breakdown; fidelity and total obey exact recombination."""

    cap: float
    perceptual_ms: float
    l1_ms: float
    fidelity: float
    rc: float
    total: float
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "cap": self.cap,
            "perceptual_ms": self.perceptual_ms,
            "l1_ms": self.l1_ms,
            "fidelity": self.fidelity,
            "rc": self.rc,
            "total": self.total,
        }
        out.update(self.params)
        return out


def _check_tap_shapes(fa: FeatureMaps, fb: FeatureMaps) -> None:
    if len(fa) != len(fb):
        raise ValueError(f"tap count mismatch: {len(fa)} vs {len(fb)}")
    for i, (a, b) in enumerate(zip(fa.taps, fb.taps)):
        if a.shape != b.shape:
            raise ValueError(f"tap {i} shape mismatch: {a.shape} vs {b.shape}")


def perceptual_loss(fa: FeatureMaps, fb: FeatureMaps) -> float:
    """Sum over layers of the mean squared feature difference."""
    _check_tap_shapes(fa, fb)
    total = 0.0
    for a, b in zip(fa.taps, fb.taps):
        d = a.astype(np.float64) - b.astype(np.float64)
        total += float(np.mean(d * d))
    return total


def l1_loss(a: Raster, b: Raster) -> float:
    """Mean absolute difference over all elements."""
    if a.shape != b.shape:
        raise ValueError(f"l1_loss: shape mismatch {a.shape} vs {b.shape}")
    return float(np.mean(np.abs(a.data.astype(np.float64) - b.data.astype(np.float64))))


def cap_weights(bank: FeatureBank, ms: Raster, gamma: float) -> CapWeights:
    """Per-channel color sensitivity weights.

    Compares the bank's features of the MS image against those of its
    inverted grayscale; channels whose activations move a lot are color
    (and gradient-direction) sensitive and get exponentially down-weighted:
    w = exp(-gamma * mean_spatial |diff|). gamma=0 yields all-ones weights.
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    inv = replicate_channels(gray_inverted(ms), 3)
    f_inv = extract(bank, inv)
    f_ms = extract(bank, ms)
    layers = []
    for a, b in zip(f_inv.taps, f_ms.taps):
        mad = np.abs(a.astype(np.float64) - b.astype(np.float64)).mean(axis=(1, 2))
        layers.append(np.exp(-gamma * mad))
    return CapWeights(tuple(layers))


def cap_loss(
    bank: FeatureBank,
    weights: CapWeights,
    pan: Raster,
    ps: Raster,
    pool_sizes: tuple[int, ...] = (7, 5, 3),
) -> float:
    """Weighted, shift-tolerant l1 feature distance between PAN and PS.

    Both images pass through the bank (PAN replicated to 3 channels); each
    tap is max-pooled (stride 1, valid region) by its pool size, and the
    per-channel weights scale the absolute differences before averaging.
    """
    if pan.shape[1:] != ps.shape[1:]:
        raise ValueError(f"cap_loss: spatial mismatch {pan.shape} vs {ps.shape}")
    if len(weights) != bank.tap_count or len(pool_sizes) != bank.tap_count:
        raise ValueError(
            f"need {bank.tap_count} weight layers and pool sizes, "
            f"got {len(weights)} and {len(pool_sizes)}"
        )
    f_pan = extract(bank, pan)
    f_ps = extract(bank, ps)
    total = 0.0
    for w, m, a, b in zip(weights.per_layer, pool_sizes, f_pan.taps, f_ps.taps):
        if w.shape[0] != a.shape[0]:
            raise ValueError(f"weight/channel mismatch: {w.shape[0]} vs {a.shape[0]}")
        pa = max_pool(a, m, 1).astype(np.float64)
        pb = max_pool(b, m, 1).astype(np.float64)
        total += float(np.mean(w[:, None, None] * np.abs(pa - pb)))
    return total


def fidelity_loss(
    bank: FeatureBank,
    pan: Raster,
    ps: Raster,
    ms: Raster,
    params: LossParams = LossParams(),
) -> LossReport:
    """CAP term at PAN resolution plus perceptual and l1 color-fidelity
    terms at MS resolution (rc term left at zero)."""
    r = params.downscale_factor
    if ps.height != ms.height * r or ps.width != ms.width * r:
        raise ValueError(
            f"ps {ps.shape} is not {r}x the MS resolution {ms.shape}"
        )
    w = cap_weights(bank, ms, params.gamma)
    cap = cap_loss(bank, w, pan, ps, params.pool_sizes)
    ps_down = downscale_area(ps, r)
    lp = perceptual_loss(extract(bank, ms), extract(bank, ps_down))
    l1 = l1_loss(ms, ps_down)
    fidelity = params.alpha_cap * cap + params.alpha_ms * lp + params.alpha_l1 * l1
    return LossReport(cap, lp, l1, fidelity, 0.0, fidelity, report_params(params))


def rc_loss(ps: Raster, ms_up: Raster, params: RecolorParams = RecolorParams()) -> float:
    """Mean absolute gap between PS and its luma-guided re-colorization."""
    if ps.shape != ms_up.shape:
        raise ValueError(f"rc_loss: shape mismatch {ps.shape} vs {ms_up.shape}")
    yrc = luma_guided(recolorize(ps, ms_up, params), ps)
    return float(np.mean(np.abs(ps.data.astype(np.float64) - yrc.data.astype(np.float64))))


def total_loss(
    bank: FeatureBank,
    pan: Raster,
    ps: Raster,
    ms: Raster,
    params: LossParams = LossParams(),
    recolor_params: RecolorParams = RecolorParams(),
) -> LossReport:
    """Fidelity loss plus the RC self-supervision term."""
    base = fidelity_loss(bank, pan, ps, ms, params)
    ms_up = upscale_bilinear(ms, params.downscale_factor)
    rc = rc_loss(ps, ms_up, recolor_params)
    return LossReport(
        base.cap,
        base.perceptual_ms,
        base.l1_ms,
        base.fidelity,
        rc,
        base.fidelity + rc,
        report_params(params, recolor_params),
    )


def weights_as_lists(weights: CapWeights) -> list[list[float]]:
    """JSON-friendly dump: one list of channel weights per layer."""
    return [[float(v) for v in layer] for layer in weights.per_layer]


def report_params(params: LossParams, recolor_params: RecolorParams | None = None) -> dict:
    out = {
        "gamma": params.gamma,
        "alpha_cap": params.alpha_cap,
        "alpha_ms": params.alpha_ms,
        "alpha_l1": params.alpha_l1,
        "pool_sizes": list(params.pool_sizes),
        "downscale_factor": params.downscale_factor,
    }
    if recolor_params is not None:
        out["window"] = recolor_params.window
        out["hf_filter_size"] = recolor_params.hf_filter_size
    return out
