"""Cross-checks between the compiled and pure-numpy kernel backends."""

import numpy as np
import pytest

from conftest import quantized_raster, random_raster
from pansharp.kernels import available_backends, window_offsets

BACKENDS = available_backends()
needs_native = pytest.mark.skipif(
    "native" not in BACKENDS, reason="compiled extension not built"
)


def _run_recolor(impl, ps, ms, window):
    off_y, off_x = window_offsets(window)
    out = np.empty_like(ps)
    impl.recolor_rows(ps, ms, off_y, off_x, 0, ps.shape[1], out)
    return out


@needs_native
class TestBackendParity:
    def test_recolor_bit_identical(self, rng):
        for w in (1, 3, 5, 7):
            ps = random_raster(rng, 3, 15, 11).data
            ms = random_raster(rng, 3, 15, 11).data
            a = _run_recolor(BACKENDS["python"], ps, ms, w)
            b = _run_recolor(BACKENDS["native"], ps, ms, w)
            assert np.array_equal(a, b)

    def test_recolor_bit_identical_with_ties(self, rng):
        for w in (3, 5):
            ps = quantized_raster(rng, 3, 12, 12).data
            ms = quantized_raster(rng, 3, 12, 12, levels=3).data
            a = _run_recolor(BACKENDS["python"], ps, ms, w)
            b = _run_recolor(BACKENDS["native"], ps, ms, w)
            assert np.array_equal(a, b)

    def test_conv_close(self, rng):
        x = random_raster(rng, 3, 10, 10).data
        weights = rng.normal(0, 0.5, size=(5, 3, 3, 3)).astype(np.float32)
        bias = rng.normal(0, 0.1, size=5).astype(np.float32)
        a = BACKENDS["python"].conv2d_replicate(x, weights, bias)
        b = BACKENDS["native"].conv2d_replicate(x, weights, bias)
        assert np.abs(a.astype(np.float64) - b.astype(np.float64)).max() <= 1e-6

    def test_maxpool_bit_identical(self, rng):
        x = random_raster(rng, 4, 9, 9).data
        for size, stride in ((1, 1), (3, 1), (2, 2), (3, 2)):
            a = BACKENDS["python"].maxpool_valid(x, size, stride)
            b = BACKENDS["native"].maxpool_valid(x, size, stride)
            assert np.array_equal(a, b)


class TestRowBandSplitting:
    def test_partial_rows_match_full(self, rng):
        ps = random_raster(rng, 3, 13, 9).data
        ms = random_raster(rng, 3, 13, 9).data
        off_y, off_x = window_offsets(5)
        for impl in BACKENDS.values():
            full = np.empty_like(ps)
            impl.recolor_rows(ps, ms, off_y, off_x, 0, 13, full)
            banded = np.empty_like(ps)
            for y0 in range(0, 13, 3):
                impl.recolor_rows(ps, ms, off_y, off_x, y0, min(y0 + 3, 13), banded)
            assert np.array_equal(full, banded)


class TestWindowOffsets:
    def test_priority_order(self):
        off_y, off_x = window_offsets(3)
        assert (off_y[0], off_x[0]) == (0, 0)
        cheby = np.maximum(np.abs(off_y), np.abs(off_x))
        assert (np.diff(cheby) >= 0).all()

    def test_rejects_even(self):
        with pytest.raises(ValueError):
            window_offsets(4)
