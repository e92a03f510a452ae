"""Pure-numpy implementations of the hot kernels.

Fallback backend used when the compiled extension is unavailable. Every
function here must be numerically interchangeable with its counterpart in
``_native``: the recolor scan is bit-identical (float64 channel-ordered
distance accumulation, same candidate priority), the convolution agrees to
float32 rounding.
"""

from __future__ import annotations

import numpy as np

_win = np.lib.stride_tricks.sliding_window_view


def recolor_rows(ps, ms, off_y, off_x, y0, y1, out):
    """Windowed nearest-color scan for output rows [y0, y1).

    Offsets arrive sorted by candidate priority; a strict less-than update
    keeps the highest-priority candidate on distance ties.
    """
    c, h, w = ps.shape
    nb = y1 - y0
    best = np.full((nb, w), np.inf)
    ps64 = ps[:, y0:y1, :].astype(np.float64)
    for dy, dx in zip(off_y, off_x):
        ylo = max(y0, -int(dy))
        yhi = min(y1, h - int(dy))
        xlo = max(0, -int(dx))
        xhi = min(w, w - int(dx))
        if ylo >= yhi or xlo >= xhi:
            continue
        cand = ms[:, ylo + dy : yhi + dy, xlo + dx : xhi + dx]
        d = np.zeros((yhi - ylo, xhi - xlo))
        for ch in range(c):
            t = cand[ch].astype(np.float64) - ps64[ch, ylo - y0 : yhi - y0, xlo:xhi]
            d += t * t
        better = d < best[ylo - y0 : yhi - y0, xlo:xhi]
        best[ylo - y0 : yhi - y0, xlo:xhi][better] = d[better]
        for ch in range(c):
            out[ch, ylo:yhi, xlo:xhi][better] = cand[ch][better]


def conv2d_replicate(x, weights, bias, band_rows=0):
    """Spatial-size-preserving convolution with edge-replicated borders.

    x: (Cin, H, W) float32; weights: (Cout, Cin, k, k); bias: (Cout,).
    Accumulates in float64, returns float32. Processes the image in row
    bands to bound the size of the sliding-window workspace.
    """
    cin, h, w = x.shape
    cout, cin_w, k, _ = weights.shape
    if cin_w != cin:
        raise ValueError(f"weight input channels {cin_w} != image channels {cin}")
    r = k // 2
    padded = np.pad(x, ((0, 0), (r, r), (r, r)), mode="edge")
    w64 = weights.astype(np.float64).reshape(cout, cin * k * k)
    if band_rows <= 0:
        budget = 64 << 20
        band_rows = max(1, budget // (cin * k * k * (w + 2 * r) * 8))
    out = np.empty((cout, h, w), dtype=np.float32)
    for a in range(0, h, band_rows):
        b = min(a + band_rows, h)
        block = padded[:, a : b + 2 * r, :].astype(np.float64)
        v = _win(block, (k, k), axis=(1, 2))  # (Cin, rows, W, k, k)
        v = v.transpose(1, 2, 0, 3, 4).reshape((b - a) * w, cin * k * k)
        acc = v @ w64.T + bias.astype(np.float64)
        out[:, a:b, :] = acc.T.reshape(cout, b - a, w).astype(np.float32)
    return out


def maxpool_valid(x, size, stride):
    """Channelwise sliding-window maximum over the valid region."""
    c, h, w = x.shape
    if size > h or size > w:
        raise ValueError(f"pool window {size} exceeds input {h}x{w}")
    v = _win(x, (size, size), axis=(1, 2))[:, ::stride, ::stride]
    return np.ascontiguousarray(v.max(axis=(-2, -1)))
