"""Loadable convolutional feature banks and feature extraction.

A feature bank is a strictly sequential stack of conv/activation/pool
stages with designated tap points, serialized in the FBANK1 binary format.
Running a bank over an image yields the per-tap feature maps that the
perceptual losses consume; no deep-learning runtime is involved.

FBANK1 layout (little-endian):
  magic "FBANK1\\0\\0" | u32 input_channels | 3*f32 mean | 3*f32 std |
  u32 stage_count | u32 tap_count | tap indices (u32 each) | stages.
Each stage: u32 in_ch | u32 out_ch | u32 k | u8 activation (0=identity,
1=relu) | u8 has_pool | [u32 pool_size, u32 pool_stride] |
f32 weights (out, in, kh, kw row-major) | f32 bias (out).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import FormatError
from .raster import Raster, replicate_channels

MAGIC = b"FBANK1\x00\x00"

_ACT_IDENTITY = 0
_ACT_RELU = 1
_ACT_NAMES = {_ACT_IDENTITY: "identity", _ACT_RELU: "relu"}
_ACT_CODES = {v: k for k, v in _ACT_NAMES.items()}


@dataclass(frozen=True)
class ConvStage:
    """One conv/activation[/pool] unit of a bank."""

    kernel: np.ndarray  # (out, in, k, k) float32
    bias: np.ndarray  # (out,) float32
    activation: str = "relu"
    post_pool: tuple[int, int] | None = None  # (size, stride)

    def __post_init__(self):
        k = np.ascontiguousarray(self.kernel, dtype=np.float32)
        b = np.ascontiguousarray(self.bias, dtype=np.float32)
        if k.ndim != 4 or k.shape[2] != k.shape[3]:
            raise ValueError(f"kernel must be (out, in, k, k), got {k.shape}")
        if k.shape[2] % 2 == 0 or k.shape[2] < 1:
            raise ValueError(f"kernel size must be odd, got {k.shape[2]}")
        if b.shape != (k.shape[0],):
            raise ValueError(f"bias shape {b.shape} != ({k.shape[0]},)")
        if not (np.isfinite(k).all() and np.isfinite(b).all()):
            raise ValueError("non-finite stage weights")
        if self.activation not in _ACT_CODES:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.post_pool is not None:
            size, stride = self.post_pool
            if size < 1 or stride < 1:
                raise ValueError(f"bad pool {self.post_pool}")
        object.__setattr__(self, "kernel", k)
        object.__setattr__(self, "bias", b)

    @property
    def in_channels(self) -> int:
        return self.kernel.shape[1]

    @property
    def out_channels(self) -> int:
        return self.kernel.shape[0]

    @property
    def kernel_size(self) -> int:
        return self.kernel.shape[2]


@dataclass(frozen=True)
class FeatureBank:
    """Sequential conv stack with tap points and input normalization."""

    stages: tuple[ConvStage, ...]
    taps: tuple[int, ...]
    mean: np.ndarray = field(default_factory=lambda: np.zeros(3, dtype=np.float32))
    std: np.ndarray = field(default_factory=lambda: np.ones(3, dtype=np.float32))
    input_channels: int = 3

    def __post_init__(self):
        stages = tuple(self.stages)
        taps = tuple(int(t) for t in self.taps)
        mean = np.ascontiguousarray(self.mean, dtype=np.float32)
        std = np.ascontiguousarray(self.std, dtype=np.float32)
        if not stages:
            raise ValueError("bank has no stages")
        if not taps:
            raise ValueError("bank has no taps")
        if list(taps) != sorted(set(taps)):
            raise ValueError(f"tap indices must be strictly increasing, got {taps}")
        if taps[0] < 0 or taps[-1] >= len(stages):
            raise ValueError(f"tap index out of range: {taps}")
        if mean.shape != (3,) or std.shape != (3,):
            raise ValueError("mean/std must have 3 entries")
        if not (np.isfinite(mean).all() and np.isfinite(std).all()):
            raise ValueError("non-finite normalization constants")
        if (std <= 0).any():
            raise ValueError("std values must be > 0")
        if self.input_channels != 3:
            raise ValueError(f"input_channels must be 3, got {self.input_channels}")
        if stages[0].in_channels != self.input_channels:
            raise ValueError(
                f"first stage expects {stages[0].in_channels} channels, "
                f"bank input is {self.input_channels}"
            )
        for i in range(1, len(stages)):
            if stages[i].in_channels != stages[i - 1].out_channels:
                raise ValueError(
                    f"channel chain broken at stage {i}: "
                    f"{stages[i - 1].out_channels} -> {stages[i].in_channels}"
                )
        object.__setattr__(self, "stages", stages)
        object.__setattr__(self, "taps", taps)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @property
    def tap_count(self) -> int:
        return len(self.taps)

    def tap_channels(self) -> list[int]:
        return [self.stages[t].out_channels for t in self.taps]


@dataclass(frozen=True)
class FeatureMaps:
    """Per-tap activation tensors, each (channels, height, width) float32."""

    taps: tuple[np.ndarray, ...]

    def __post_init__(self):
        taps = tuple(np.asarray(t, dtype=np.float32) for t in self.taps)
        if not taps:
            raise ValueError("empty feature maps")
        for t in taps:
            if t.ndim != 3:
                raise ValueError(f"tap tensor must be 3-D, got {t.shape}")
            if not np.isfinite(t).all():
                raise ValueError("non-finite feature values")
        object.__setattr__(self, "taps", taps)

    def __len__(self) -> int:
        return len(self.taps)


class _Reader:
    def __init__(self, payload: bytes):
        self.buf = payload
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise FormatError("truncated FBANK1 payload")
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u8(self) -> int:
        return self.take(1)[0]

    def f32(self, n: int) -> np.ndarray:
        return np.frombuffer(self.take(4 * n), dtype="<f4").astype(np.float32)


def load_bank(payload: bytes) -> FeatureBank:
    """Parse an FBANK1 payload; raises FormatError on malformed input."""
    rd = _Reader(payload)
    if rd.take(len(MAGIC)) != MAGIC:
        raise FormatError("bad FBANK1 magic")
    input_channels = rd.u32()
    mean = rd.f32(3)
    std = rd.f32(3)
    stage_count = rd.u32()
    tap_count = rd.u32()
    if stage_count == 0 or stage_count > 1_000_000:
        raise FormatError(f"implausible stage count {stage_count}")
    if tap_count == 0 or tap_count > stage_count:
        raise FormatError(f"implausible tap count {tap_count}")
    taps = tuple(rd.u32() for _ in range(tap_count))
    stages = []
    for i in range(stage_count):
        in_ch = rd.u32()
        out_ch = rd.u32()
        k = rd.u32()
        if in_ch == 0 or out_ch == 0 or k == 0 or k % 2 == 0:
            raise FormatError(f"bad stage {i} header (in={in_ch}, out={out_ch}, k={k})")
        act = rd.u8()
        if act not in _ACT_NAMES:
            raise FormatError(f"unknown activation code {act} in stage {i}")
        has_pool = rd.u8()
        if has_pool not in (0, 1):
            raise FormatError(f"bad has_pool flag {has_pool} in stage {i}")
        pool = None
        if has_pool:
            pool = (rd.u32(), rd.u32())
            if pool[0] < 1 or pool[1] < 1:
                raise FormatError(f"bad pool parameters {pool} in stage {i}")
        weights = rd.f32(out_ch * in_ch * k * k).reshape(out_ch, in_ch, k, k)
        bias = rd.f32(out_ch)
        if not (np.isfinite(weights).all() and np.isfinite(bias).all()):
            raise FormatError(f"non-finite weight in stage {i}")
        stages.append(ConvStage(weights, bias, _ACT_NAMES[act], pool))
    if rd.pos != len(payload):
        raise FormatError(f"{len(payload) - rd.pos} trailing bytes after last stage")
    try:
        return FeatureBank(tuple(stages), taps, mean, std, input_channels)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def save_bank(bank: FeatureBank) -> bytes:
    """Serialize a bank; load_bank(save_bank(b)) round-trips byte-identically."""
    parts = [
        MAGIC,
        struct.pack("<I", bank.input_channels),
        bank.mean.astype("<f4").tobytes(),
        bank.std.astype("<f4").tobytes(),
        struct.pack("<II", len(bank.stages), len(bank.taps)),
        struct.pack(f"<{len(bank.taps)}I", *bank.taps),
    ]
    for st in bank.stages:
        parts.append(
            struct.pack(
                "<IIIBB",
                st.in_channels,
                st.out_channels,
                st.kernel_size,
                _ACT_CODES[st.activation],
                0 if st.post_pool is None else 1,
            )
        )
        if st.post_pool is not None:
            parts.append(struct.pack("<II", *st.post_pool))
        parts.append(st.kernel.astype("<f4").tobytes())
        parts.append(st.bias.astype("<f4").tobytes())
    return b"".join(parts)


def max_pool(feature_map: np.ndarray, size: int, stride: int = 1) -> np.ndarray:
    """Channelwise sliding-window max over the valid region (no padding)."""
    if size < 1 or stride < 1:
        raise ValueError(f"pool size/stride must be >= 1, got {size}/{stride}")
    x = np.ascontiguousarray(feature_map, dtype=np.float32)
    if x.ndim != 3:
        raise ValueError(f"feature map must be (C, H, W), got {x.shape}")
    if size == 1 and stride == 1:
        return x.copy()
    return kernels.maxpool_valid(x, size, stride)


def extract(bank: FeatureBank, image: Raster) -> FeatureMaps:
    """Run the bank over an image and collect the tap outputs.

    Single-channel images are replicated to the bank's 3 input channels.
    The input is normalized by (x - mean) / std; convolutions preserve
    spatial size with edge-replicated borders; in-bank pools use their
    stored size/stride over the valid region.
    """
    img = replicate_channels(image, bank.input_channels)
    if img.channels != bank.input_channels:
        raise ValueError(
            f"image has {img.channels} channels, bank expects {bank.input_channels}"
        )
    x = (img.data.astype(np.float64) - bank.mean.astype(np.float64)[:, None, None]) / (
        bank.std.astype(np.float64)[:, None, None]
    )
    x = np.ascontiguousarray(x, dtype=np.float32)
    taps: list[np.ndarray] = []
    want = set(bank.taps)
    for i, st in enumerate(bank.stages):
        x = kernels.conv2d_replicate(x, st.kernel, st.bias)
        if st.activation == "relu":
            np.maximum(x, 0.0, out=x)
        if st.post_pool is not None:
            size, stride = st.post_pool
            if x.shape[1] < size or x.shape[2] < size:
                raise ValueError(
                    f"image too small for stage {i} pool: {x.shape[1]}x{x.shape[2]} < {size}"
                )
            x = kernels.maxpool_valid(x, size, stride)
        if i in want:
            taps.append(x.copy())
    return FeatureMaps(tuple(taps))
