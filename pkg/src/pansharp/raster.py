"""Planar float image container and the pixel-level primitives built on it.

A :class:`Raster` stores ``channels x height x width`` float32 data with a
nominal value domain of [0, 1] (intermediate results such as high-frequency
residuals may leave that range). All operations are pure functions: they
never mutate their inputs and are deterministic, so they can run concurrently
on shared rasters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# BT.601 full-range luma coefficients; chroma planes are offset by +0.5 so
# gray inputs map to Cb = Cr = 0.5 in the [0, 1] domain.
_KR, _KG, _KB = 0.299, 0.587, 0.114


@dataclass(frozen=True)
class Raster:
    """Planar multi-channel image: ``data`` has shape (channels, height, width)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 3:
            raise ValueError(f"raster data must be 3-D (C,H,W), got ndim={arr.ndim}")
        c, h, w = arr.shape
        if c < 1 or h < 1 or w < 1:
            raise ValueError(f"raster dimensions must be >= 1, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("raster data contains NaN or Inf")
        object.__setattr__(self, "data", arr)

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Raster":
        """Build a raster from a (C,H,W) or (H,W) array, copying as float32."""
        a = np.asarray(arr, dtype=np.float32)
        if a.ndim == 2:
            a = a[None, :, :]
        return cls(a.copy())

    @classmethod
    def constant(cls, value: float, channels: int, height: int, width: int) -> "Raster":
        return cls(np.full((channels, height, width), value, dtype=np.float32))


def _require_channels(img: Raster, n: int, what: str) -> None:
    if img.channels != n:
        raise ValueError(f"{what} requires {n} channels, got {img.channels}")


def upscale_bilinear(src: Raster, factor: int) -> Raster:
    """Bilinear upscale by an integer factor using half-pixel centers.

    Output pixel (x, y) samples the source at
    ((x + 0.5) / factor - 0.5, (y + 0.5) / factor - 0.5), with sample
    coordinates clamped to the image borders. factor=1 returns an
    identical copy.
    """
    if factor < 1:
        raise ValueError(f"upscale factor must be >= 1, got {factor}")
    if factor == 1:
        return Raster(src.data.copy())
    c, h, w = src.shape
    oh, ow = h * factor, w * factor

    def axis_weights(n_out, n_src):
        pos = (np.arange(n_out, dtype=np.float64) + 0.5) / factor - 0.5
        pos = np.clip(pos, 0.0, n_src - 1.0)
        i0 = np.floor(pos).astype(np.intp)
        i1 = np.minimum(i0 + 1, n_src - 1)
        return i0, i1, pos - i0

    y0, y1, wy = axis_weights(oh, h)
    x0, x1, wx = axis_weights(ow, w)

    d = src.data.astype(np.float64)
    top = d[:, y0, :][:, :, x0] * (1.0 - wx) + d[:, y0, :][:, :, x1] * wx
    bot = d[:, y1, :][:, :, x0] * (1.0 - wx) + d[:, y1, :][:, :, x1] * wx
    out = top * (1.0 - wy)[None, :, None] + bot * wy[None, :, None]
    return Raster(out.astype(np.float32))


def downscale_area(src: Raster, factor: int) -> Raster:
    """Downscale by averaging each factor x factor block (mean-preserving)."""
    if factor < 1:
        raise ValueError(f"downscale factor must be >= 1, got {factor}")
    c, h, w = src.shape
    if h % factor or w % factor:
        raise ValueError(f"dimensions {h}x{w} not divisible by factor {factor}")
    if factor == 1:
        return Raster(src.data.copy())
    blocks = src.data.reshape(c, h // factor, factor, w // factor, factor)
    out = blocks.astype(np.float64).mean(axis=(2, 4))
    return Raster(out.astype(np.float32))


def box_filter(src: Raster, size: int) -> Raster:
    """Per-channel mean over a size x size window, borders edge-replicated.

    size must be odd; size=1 is the identity.
    """
    if size < 1 or size % 2 == 0:
        raise ValueError(f"box filter size must be odd and >= 1, got {size}")
    if size == 1:
        return Raster(src.data.copy())
    r = size // 2
    win = np.lib.stride_tricks.sliding_window_view
    # Separable window sums in float64; one division at the end keeps the
    # result exact on constant inputs after the float32 cast.
    rows = np.pad(src.data, ((0, 0), (0, 0), (r, r)), mode="edge")
    s = win(rows, size, axis=2).sum(axis=-1, dtype=np.float64)
    s = np.pad(s, ((0, 0), (r, r), (0, 0)), mode="edge")
    s = win(s, size, axis=1).sum(axis=-1, dtype=np.float64)
    return Raster((s / (size * size)).astype(np.float32))


def high_freq(src: Raster, size: int) -> Raster:
    """High-frequency residual: src minus its box-filtered version.

    Output values may be negative.
    """
    return Raster(src.data - box_filter(src, size).data)


def gray_inverted(ms: Raster) -> Raster:
    """Inverted grayscale of an RGB image: 1 - (R + G + B) / 3."""
    _require_channels(ms, 3, "gray_inverted")
    d = ms.data.astype(np.float64)
    out = 1.0 - (d[0] + d[1] + d[2]) / 3.0
    return Raster(out.astype(np.float32)[None])


def to_ycbcr(rgb: Raster) -> Raster:
    """RGB -> YCbCr (BT.601 full range, chroma offset +0.5)."""
    _require_channels(rgb, 3, "to_ycbcr")
    r, g, b = (rgb.data[i].astype(np.float64) for i in range(3))
    y = _KR * r + _KG * g + _KB * b
    cb = 0.5 + (b - y) / (2.0 * (1.0 - _KB))
    cr = 0.5 + (r - y) / (2.0 * (1.0 - _KR))
    return Raster(np.stack([y, cb, cr]).astype(np.float32))


def from_ycbcr(ycc: Raster) -> Raster:
    """YCbCr -> RGB, inverse of :func:`to_ycbcr` (round trip within 1e-5)."""
    _require_channels(ycc, 3, "from_ycbcr")
    y, cb, cr = (ycc.data[i].astype(np.float64) for i in range(3))
    r = y + 2.0 * (1.0 - _KR) * (cr - 0.5)
    b = y + 2.0 * (1.0 - _KB) * (cb - 0.5)
    g = (y - _KR * r - _KB * b) / _KG
    return Raster(np.stack([r, g, b]).astype(np.float32))


def zero_fraction(src: Raster) -> float:
    """Fraction of pixel locations where every channel is exactly 0."""
    all_zero = np.all(src.data == 0.0, axis=0)
    return float(all_zero.sum()) / (src.height * src.width)


def replicate_channels(src: Raster, n: int) -> Raster:
    """Replicate a single-channel raster to n identical channels."""
    if src.channels == n:
        return src
    if src.channels != 1:
        raise ValueError(f"cannot replicate {src.channels}-channel raster to {n}")
    return Raster(np.repeat(src.data, n, axis=0))
