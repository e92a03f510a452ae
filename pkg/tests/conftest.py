import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pansharp.featbank import ConvStage, FeatureBank
from pansharp.raster import Raster


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


def random_raster(rng, channels, height, width, lo=0.0, hi=1.0) -> Raster:
    data = rng.uniform(lo, hi, size=(channels, height, width)).astype(np.float32)
    return Raster(data)


def quantized_raster(rng, channels, height, width, levels=5) -> Raster:
    """Small palette so exact color duplicates (distance ties) are frequent."""
    data = rng.integers(0, levels, size=(channels, height, width)) / (levels - 1)
    return Raster(data.astype(np.float32))


def identity_bank() -> FeatureBank:
    """1x1 conv selecting channel 0, identity activation, no pooling."""
    kernel = np.zeros((1, 3, 1, 1), dtype=np.float32)
    kernel[0, 0, 0, 0] = 1.0
    stage = ConvStage(kernel, np.zeros(1, dtype=np.float32), "identity", None)
    return FeatureBank((stage,), (0,))


def random_bank(rng, widths=(4, 6), kernel=3, taps=None, relu=True, pools=None) -> FeatureBank:
    """Small random bank: widths are per-stage output channel counts."""
    stages = []
    in_ch = 3
    pools = pools or [None] * len(widths)
    for out_ch, pool in zip(widths, pools):
        w = rng.normal(0.0, 0.4, size=(out_ch, in_ch, kernel, kernel)).astype(np.float32)
        b = rng.normal(0.0, 0.1, size=out_ch).astype(np.float32)
        stages.append(ConvStage(w, b, "relu" if relu else "identity", pool))
        in_ch = out_ch
    taps = tuple(range(len(stages))) if taps is None else tuple(taps)
    return FeatureBank(tuple(stages), taps)
