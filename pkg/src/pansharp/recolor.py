"""Guided re-colorization: replace each pixel's color with the closest real
color found in a local window of the upscaled MS image, plus the luma- and
high-frequency-guided refinements that restore detail afterwards.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .raster import Raster, box_filter, from_ycbcr, to_ycbcr


@dataclass(frozen=True)
class RecolorParams:
    """window: search window side (odd); hf_filter_size: averaging filter side."""

    window: int = 3
    hf_filter_size: int = 5

    def __post_init__(self):
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 1, got {self.window}")
        if self.hf_filter_size < 1 or self.hf_filter_size % 2 == 0:
            raise ValueError(f"hf_filter_size must be odd and >= 1, got {self.hf_filter_size}")


def _require_same_shape(a: Raster, b: Raster, what: str) -> None:
    if a.shape != b.shape:
        raise ValueError(f"{what}: shape mismatch {a.shape} vs {b.shape}")


def recolorize(ps: Raster, ms_up: Raster, params: RecolorParams,
               threads: int = 1, tile_rows: int = 256) -> Raster:
    """Pick, for every pixel, the window candidate of ms_up whose color is
    closest (Euclidean over all channels) to the ps pixel.

    Every output color literally occurs in ms_up inside the corresponding
    window; candidate windows are clipped at image borders, never padded.
    Ties go to the candidate nearest the window center, then first in
    row-major order. Deterministic and independent of threads/tile_rows.
    """
    _require_same_shape(ps, ms_up, "recolorize")
    off_y, off_x = kernels.window_offsets(params.window)
    out = np.empty_like(ps.data)
    h = ps.height
    bands = [(y, min(y + max(1, tile_rows), h)) for y in range(0, h, max(1, tile_rows))]
    if threads > 1 and len(bands) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(kernels.recolor_rows, ps.data, ms_up.data, off_y, off_x, a, b, out)
                for a, b in bands
            ]
            for f in futures:
                f.result()
    else:
        for a, b in bands:
            kernels.recolor_rows(ps.data, ms_up.data, off_y, off_x, a, b, out)
    return Raster(out)


def luma_guided(rc: Raster, ps: Raster) -> Raster:
    """Keep rc's chroma but take the Y channel from ps (both 3-channel)."""
    _require_same_shape(rc, ps, "luma_guided")
    ycc = to_ycbcr(rc).data.copy()
    ycc[0] = to_ycbcr(ps).data[0]
    return from_ycbcr(Raster(ycc))


def hf_guided(rc: Raster, ps: Raster, params: RecolorParams) -> Raster:
    """Recombine ps's high frequencies with rc's low frequencies:
    ps - box(ps, s) + box(rc, s)."""
    _require_same_shape(rc, ps, "hf_guided")
    s = params.hf_filter_size
    out = ps.data - box_filter(ps, s).data + box_filter(rc, s).data
    return Raster(out)


def rc_stage_inputs(ps0: Raster, ms_up: Raster,
                    params: RecolorParams) -> tuple[Raster, Raster, Raster]:
    """Assemble the (re-colorized, upscaled-MS, high-frequency) input triple
    used by a downstream refinement trainer."""
    _require_same_shape(ps0, ms_up, "rc_stage_inputs")
    rc0 = recolorize(ps0, ms_up, params)
    hf = Raster(ps0.data - box_filter(ps0, params.hf_filter_size).data)
    return rc0, ms_up, hf
