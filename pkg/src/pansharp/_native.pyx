# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels (recolor scan, convolution,
max pooling). Signature-compatible with ``_kernels_py``; selected by
``pansharp.kernels`` at import time."""

import numpy as np

from libc.math cimport INFINITY


def recolor_rows(float[:, :, ::1] ps, float[:, :, ::1] ms,
                 int[::1] off_y, int[::1] off_x,
                 Py_ssize_t y0, Py_ssize_t y1,
                 float[:, :, ::1] out):
    """Windowed nearest-color scan for output rows [y0, y1).

    Offsets arrive sorted by candidate priority; the strict less-than
    update keeps the highest-priority candidate on distance ties.
    Distances accumulate in float64 over channels in index order, matching
    the numpy backend bit for bit.
    """
    cdef Py_ssize_t c = ps.shape[0]
    cdef Py_ssize_t h = ps.shape[1]
    cdef Py_ssize_t w = ps.shape[2]
    cdef Py_ssize_t nk = off_y.shape[0]
    cdef Py_ssize_t y, x, k, ch, qy, qx, by, bx
    cdef double d, t, best

    with nogil:
        for y in range(y0, y1):
            for x in range(w):
                best = INFINITY
                by = -1
                bx = -1
                for k in range(nk):
                    qy = y + off_y[k]
                    qx = x + off_x[k]
                    if qy < 0 or qy >= h or qx < 0 or qx >= w:
                        continue
                    d = 0.0
                    for ch in range(c):
                        t = <double> ms[ch, qy, qx] - <double> ps[ch, y, x]
                        d += t * t
                    if d < best:
                        best = d
                        by = qy
                        bx = qx
                for ch in range(c):
                    out[ch, y, x] = ms[ch, by, bx]


def conv2d_replicate(float[:, :, ::1] x, float[:, :, :, ::1] weights,
                     float[::1] bias, band_rows=0):
    """Spatial-size-preserving convolution with edge-replicated borders.

    x: (Cin, H, W); weights: (Cout, Cin, k, k); bias: (Cout,).
    Accumulates in float64, returns float32. band_rows is accepted for
    signature parity with the numpy backend and ignored.
    """
    cdef Py_ssize_t cin = x.shape[0]
    cdef Py_ssize_t h = x.shape[1]
    cdef Py_ssize_t w = x.shape[2]
    cdef Py_ssize_t cout = weights.shape[0]
    cdef Py_ssize_t k = weights.shape[2]
    cdef Py_ssize_t r = k // 2
    cdef Py_ssize_t co, ci, y, xx, ky, kx, sy, sx
    cdef double acc

    if weights.shape[1] != cin:
        raise ValueError(f"weight input channels {weights.shape[1]} != image channels {cin}")

    out_arr = np.empty((cout, h, w), dtype=np.float32)
    cdef float[:, :, ::1] out = out_arr

    with nogil:
        for co in range(cout):
            for y in range(h):
                for xx in range(w):
                    acc = <double> bias[co]
                    for ci in range(cin):
                        for ky in range(k):
                            sy = y + ky - r
                            if sy < 0:
                                sy = 0
                            elif sy >= h:
                                sy = h - 1
                            for kx in range(k):
                                sx = xx + kx - r
                                if sx < 0:
                                    sx = 0
                                elif sx >= w:
                                    sx = w - 1
                                acc += (<double> weights[co, ci, ky, kx]
                                        * <double> x[ci, sy, sx])
                    out[co, y, xx] = <float> acc
    return out_arr


def maxpool_valid(float[:, :, ::1] x, Py_ssize_t size, Py_ssize_t stride):
    """Channelwise sliding-window maximum over the valid region."""
    cdef Py_ssize_t c = x.shape[0]
    cdef Py_ssize_t h = x.shape[1]
    cdef Py_ssize_t w = x.shape[2]
    if size > h or size > w:
        raise ValueError(f"pool window {size} exceeds input {h}x{w}")
    cdef Py_ssize_t oh = (h - size) // stride + 1
    cdef Py_ssize_t ow = (w - size) // stride + 1
    cdef Py_ssize_t ch, oy, ox, wy, wx
    cdef float m, v

    out_arr = np.empty((c, oh, ow), dtype=np.float32)
    cdef float[:, :, ::1] out = out_arr

    with nogil:
        for ch in range(c):
            for oy in range(oh):
                for ox in range(ow):
                    m = x[ch, oy * stride, ox * stride]
                    for wy in range(size):
                        for wx in range(size):
                            v = x[ch, oy * stride + wy, ox * stride + wx]
                            if v > m:
                                m = v
                    out[ch, oy, ox] = m
    return out_arr
