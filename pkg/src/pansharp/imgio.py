"""Image and tensor file I/O.

PNG (8- or 16-bit, 1 or 3 channels) is the interchange format; RAWTEN is a
lossless little-endian float32 sidecar for tensors and exact-valued images.

RAWTEN layout: magic "RTEN1\\0\\0\\0" | u32 channels | u32 height |
u32 width | f32 payload (channel-major, row-major).
"""

from __future__ import annotations

import struct
from pathlib import Path

import cv2
import numpy as np

from .errors import FormatError
from .raster import Raster

RAWTEN_MAGIC = b"RTEN1\x00\x00\x00"


def write_rawten_bytes(tensor: np.ndarray) -> bytes:
    t = np.ascontiguousarray(tensor, dtype=np.float32)
    if t.ndim != 3:
        raise ValueError(f"RAWTEN tensors are 3-D (C,H,W), got {t.shape}")
    c, h, w = t.shape
    return RAWTEN_MAGIC + struct.pack("<III", c, h, w) + t.astype("<f4").tobytes()


def read_rawten_bytes(payload: bytes) -> np.ndarray:
    if len(payload) < 20:
        raise FormatError("truncated RAWTEN header")
    if payload[:8] != RAWTEN_MAGIC:
        raise FormatError("bad RAWTEN magic")
    c, h, w = struct.unpack("<III", payload[8:20])
    expected = 20 + 4 * c * h * w
    if len(payload) != expected:
        raise FormatError(f"RAWTEN payload is {len(payload)} bytes, expected {expected}")
    data = np.frombuffer(payload[20:], dtype="<f4").astype(np.float32)
    return data.reshape(c, h, w)


def write_rawten(path: str | Path, tensor: np.ndarray) -> None:
    Path(path).write_bytes(write_rawten_bytes(tensor))


def read_rawten(path: str | Path) -> np.ndarray:
    return read_rawten_bytes(Path(path).read_bytes())


def read_image(path: str | Path) -> Raster:
    """Read a PNG (or RAWTEN by extension) into a [0,1] float raster."""
    path = Path(path)
    if path.suffix.lower() == ".rten":
        return Raster(read_rawten(path))
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise FormatError(f"cannot read image: {path}")
    if raw.dtype == np.uint8:
        scale = 255.0
    elif raw.dtype == np.uint16:
        scale = 65535.0
    else:
        raise FormatError(f"unsupported pixel type {raw.dtype} in {path}")
    if raw.ndim == 2:
        planes = raw[None, :, :]
    elif raw.ndim == 3 and raw.shape[2] == 3:
        planes = cv2.cvtColor(raw, cv2.COLOR_BGR2RGB).transpose(2, 0, 1)
    else:
        raise FormatError(f"expected 1 or 3 channels, got shape {raw.shape} in {path}")
    return Raster((planes.astype(np.float64) / scale).astype(np.float32))


def write_image(path: str | Path, img: Raster, bits: int = 16) -> None:
    """Write a raster as PNG (clamped to [0,1]) or RAWTEN by extension."""
    path = Path(path)
    if path.suffix.lower() == ".rten":
        write_rawten(path, img.data)
        return
    if bits not in (8, 16):
        raise ValueError(f"bits must be 8 or 16, got {bits}")
    if img.channels not in (1, 3):
        raise ValueError(f"PNG output needs 1 or 3 channels, got {img.channels}")
    scale = 255.0 if bits == 8 else 65535.0
    dtype = np.uint8 if bits == 8 else np.uint16
    q = np.rint(np.clip(img.data.astype(np.float64), 0.0, 1.0) * scale).astype(dtype)
    if img.channels == 1:
        pixels = q[0]
    else:
        pixels = cv2.cvtColor(q.transpose(1, 2, 0), cv2.COLOR_RGB2BGR)
    if not cv2.imwrite(str(path), pixels):
        raise OSError(f"failed to write image: {path}")
