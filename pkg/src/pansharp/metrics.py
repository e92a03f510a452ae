"""Pan-sharpening quality metrics: ERGAS (spectral), SCC (spatial), and the
no-reference QNR with its D_lambda / D_s components built on the universal
image-quality index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import MetricError
from .raster import Raster, downscale_area

# 3x3 high-pass kernel used by SCC: center 4, 4-neighbors -1, corners 0.
_SCC_KERNEL = "laplacian4"


@dataclass(frozen=True)
class MetricsParams:
    ratio: int = 4
    q_block: int = 32
    p: float = 1.0
    q: float = 1.0
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.ratio < 1:
            raise ValueError(f"ratio must be >= 1, got {self.ratio}")
        if self.q_block < 1:
            raise ValueError(f"q_block must be >= 1, got {self.q_block}")
        if min(self.p, self.q) <= 0 or min(self.alpha, self.beta) < 0:
            raise ValueError("p, q must be > 0 and alpha, beta >= 0")


@dataclass(frozen=True)
class MetricsReport:
    ergas: float | None
    scc: float | None
    qnr: float | None
    d_lambda: float | None
    d_s: float | None
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "ergas": self.ergas,
            "scc": self.scc,
            "qnr": self.qnr,
            "d_lambda": self.d_lambda,
            "d_s": self.d_s,
            "parameters": dict(self.parameters),
        }


def ergas(reference: Raster, test: Raster, ratio: float) -> float:
    """Relative dimensionless global error in synthesis.

    100 * ratio * sqrt(mean_k(RMSE_k^2 / mu_k^2)) with mu_k the mean of
    reference band k and ratio the high/low resolution quotient (e.g. 1/4).
    """
    if reference.shape != test.shape:
        raise ValueError(f"ergas: shape mismatch {reference.shape} vs {test.shape}")
    ref = reference.data.astype(np.float64)
    tst = test.data.astype(np.float64)
    acc = 0.0
    for k in range(reference.channels):
        mu = ref[k].mean()
        if mu == 0.0:
            raise MetricError(f"reference band {k} has zero mean")
        mse = np.mean((ref[k] - tst[k]) ** 2)
        acc += mse / (mu * mu)
    return float(100.0 * ratio * np.sqrt(acc / reference.channels))


def _highpass(plane: np.ndarray) -> np.ndarray:
    """Apply the SCC Laplacian (edge-replicated borders) to one plane."""
    p = np.pad(plane.astype(np.float64), 1, mode="edge")
    return 4.0 * p[1:-1, 1:-1] - p[:-2, 1:-1] - p[2:, 1:-1] - p[1:-1, :-2] - p[1:-1, 2:]


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    am = a - a.mean()
    bm = b - b.mean()
    va = np.mean(am * am)
    vb = np.mean(bm * bm)
    if va == 0.0 or vb == 0.0:
        raise MetricError("zero-variance high-pass plane")
    return float(np.mean(am * bm) / np.sqrt(va * vb))


def scc(pan: Raster, ps: Raster) -> float:
    """Spatial correlation coefficient.

    High-pass filters every PS band and the PAN image, then averages the
    per-band Pearson correlations against the filtered PAN.
    """
    if pan.channels != 1:
        raise ValueError(f"scc: pan must be single-channel, got {pan.channels}")
    if pan.shape[1:] != ps.shape[1:]:
        raise ValueError(f"scc: spatial mismatch {pan.shape} vs {ps.shape}")
    hp_pan = _highpass(pan.data[0])
    vals = [_pearson(_highpass(ps.data[k]), hp_pan) for k in range(ps.channels)]
    return float(np.mean(vals))


def _tile_stats(plane: np.ndarray, block: int):
    """Per-tile mean/variance/pixels over non-overlapping block x block tiles."""
    h, w = plane.shape
    th, tw = h // block, w // block
    tiles = plane[: th * block, : tw * block].reshape(th, block, tw, block)
    tiles = tiles.transpose(0, 2, 1, 3).reshape(th * tw, block * block).astype(np.float64)
    mu = tiles.mean(axis=1)
    var = tiles.var(axis=1)
    return tiles, mu, var


def uiq(a: Raster, b: Raster, block: int) -> float:
    """Universal image-quality index averaged over non-overlapping tiles.

    Per tile, Q = 4*cov*mu_a*mu_b / ((var_a+var_b)(mu_a^2+mu_b^2)). When a
    factor of the denominator vanishes the tile degenerates: identical
    tiles score 1, otherwise the surviving factor's similarity is used
    (2*cov/(var_a+var_b) or 2*mu_a*mu_b/(mu_a^2+mu_b^2)); tiles with no
    usable factor are skipped.
    """
    if a.channels != 1 or b.channels != 1:
        raise ValueError("uiq operates on single-channel rasters")
    if a.shape != b.shape:
        raise ValueError(f"uiq: shape mismatch {a.shape} vs {b.shape}")
    if a.height < block or a.width < block:
        raise MetricError(f"image {a.height}x{a.width} smaller than one {block} block")
    ta, mu_a, var_a = _tile_stats(a.data[0], block)
    tb, mu_b, var_b = _tile_stats(b.data[0], block)
    cov = ((ta - mu_a[:, None]) * (tb - mu_b[:, None])).mean(axis=1)

    var_sum = var_a + var_b
    mu_sum = mu_a * mu_a + mu_b * mu_b
    qs: list[float] = []
    for i in range(ta.shape[0]):
        if var_sum[i] > 0.0 and mu_sum[i] > 0.0:
            qs.append(4.0 * cov[i] * mu_a[i] * mu_b[i] / (var_sum[i] * mu_sum[i]))
        elif np.array_equal(ta[i], tb[i]):
            qs.append(1.0)
        elif var_sum[i] > 0.0:
            qs.append(2.0 * cov[i] / var_sum[i])
        elif mu_sum[i] > 0.0:
            qs.append(2.0 * mu_a[i] * mu_b[i] / mu_sum[i])
        # both factors degenerate and tiles differ: tile carries no signal
    if not qs:
        raise MetricError("all tiles degenerate in uiq")
    return float(np.mean(qs))


def _effective_block(requested: int, *rasters: Raster) -> int:
    """Largest power-of-two block that fits every raster, capped at requested."""
    limit = min(min(r.height, r.width) for r in rasters)
    block = 1
    while block * 2 <= min(requested, limit):
        block *= 2
    return block


def qnr(
    ps: Raster,
    ms: Raster,
    pan: Raster,
    ratio: int,
    params: MetricsParams | None = None,
) -> tuple[float, float, float, int]:
    """No-reference quality: returns (qnr, d_lambda, d_s, block_used).

    D_lambda compares inter-band UIQ structure between PS and MS; D_s
    compares each band's UIQ against PAN (full resolution) and against the
    area-downscaled PAN (MS resolution).
    """
    params = params or MetricsParams(ratio=ratio)
    if pan.channels != 1:
        raise ValueError(f"qnr: pan must be single-channel, got {pan.channels}")
    if ps.channels != ms.channels:
        raise ValueError(f"qnr: band mismatch {ps.channels} vs {ms.channels}")
    if ps.shape[1:] != pan.shape[1:]:
        raise ValueError(f"qnr: ps/pan spatial mismatch {ps.shape} vs {pan.shape}")
    if ps.height != ms.height * ratio or ps.width != ms.width * ratio:
        raise ValueError(f"qnr: ps {ps.shape} is not {ratio}x ms {ms.shape}")

    pan_low = downscale_area(pan, ratio)
    block = _effective_block(params.q_block, ps, ms, pan, pan_low)
    c = ps.channels

    def band(r: Raster, i: int) -> Raster:
        return Raster(r.data[i : i + 1])

    if c > 1:
        acc = 0.0
        for i in range(c):
            for j in range(c):
                if i == j:
                    continue
                q_ps = uiq(band(ps, i), band(ps, j), block)
                q_ms = uiq(band(ms, i), band(ms, j), block)
                acc += abs(q_ps - q_ms) ** params.p
        d_lambda = (acc / (c * (c - 1))) ** (1.0 / params.p)
    else:
        d_lambda = 0.0

    acc = 0.0
    for i in range(c):
        q_hi = uiq(band(ps, i), pan, block)
        q_lo = uiq(band(ms, i), pan_low, block)
        acc += abs(q_hi - q_lo) ** params.q
    d_s = (acc / c) ** (1.0 / params.q)

    value = (1.0 - d_lambda) ** params.alpha * (1.0 - d_s) ** params.beta
    return float(value), float(d_lambda), float(d_s), block


def evaluate(
    ps: Raster,
    ms: Raster,
    pan: Raster,
    params: MetricsParams = MetricsParams(),
    ergas_reference: Raster | None = None,
    ergas_ratio: float | None = None,
) -> MetricsReport:
    """Full metric suite for one (PS, MS, PAN) triple.

    ERGAS defaults to the reduced-resolution protocol (MS as reference
    against the area-downscaled PS) unless an explicit full-resolution
    reference is supplied. ergas_ratio defaults to 1/ratio.
    """
    ratio = params.ratio
    er_ratio = ergas_ratio if ergas_ratio is not None else 1.0 / ratio
    if ergas_reference is not None:
        ergas_value = ergas(ergas_reference, ps, er_ratio)
    else:
        ergas_value = ergas(ms, downscale_area(ps, ratio), er_ratio)
    scc_value = scc(pan, ps)
    qnr_value, d_lambda, d_s, block = qnr(ps, ms, pan, ratio, params)
    return MetricsReport(
        ergas=ergas_value,
        scc=scc_value,
        qnr=qnr_value,
        d_lambda=d_lambda,
        d_s=d_s,
        parameters={
            "ratio": ratio,
            "scc_kernel": _SCC_KERNEL,
            "q_block": block,
            "p": params.p,
            "q": params.q,
            "alpha": params.alpha,
            "beta": params.beta,
            "ergas_ratio": er_ratio,
        },
    )
