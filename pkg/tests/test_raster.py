import numpy as np
import pytest

from conftest import random_raster
from oracles import block_mean_oracle, box_filter_oracle
from pansharp.raster import (
    Raster,
    box_filter,
    downscale_area,
    from_ycbcr,
    gray_inverted,
    high_freq,
    to_ycbcr,
    upscale_bilinear,
    zero_fraction,
)


class TestRasterType:
    def test_rejects_nan(self):
        bad = np.ones((1, 2, 2), dtype=np.float32)
        bad[0, 0, 0] = np.nan
        with pytest.raises(ValueError):
            Raster(bad)

    def test_rejects_wrong_ndim(self):
        with pytest.raises(ValueError):
            Raster(np.ones((2, 2), dtype=np.float32))

    def test_rejects_empty_axis(self):
        with pytest.raises(ValueError):
            Raster(np.ones((0, 2, 2), dtype=np.float32))

    def test_shape_accessors(self, rng):
        r = random_raster(rng, 3, 4, 5)
        assert (r.channels, r.height, r.width) == (3, 4, 5)
        assert r.data.dtype == np.float32


class TestUpscaleBilinear:
    def test_constant_stays_constant(self):
        r = Raster.constant(0.37, 3, 4, 4)
        u = upscale_bilinear(r, 4)
        assert u.shape == (3, 16, 16)
        assert np.array_equal(u.data, np.full((3, 16, 16), np.float32(0.37)))

    def test_factor_one_is_identity(self, rng):
        r = random_raster(rng, 3, 5, 7)
        u = upscale_bilinear(r, 1)
        assert np.array_equal(u.data, r.data)

    def test_half_pixel_columns(self):
        r = Raster.from_array(np.array([[0.0, 1.0], [0.0, 1.0]], dtype=np.float32))
        u = upscale_bilinear(r, 2)
        expected = np.array([0.0, 0.25, 0.75, 1.0], dtype=np.float32)
        for row in range(4):
            assert np.array_equal(u.data[0, row], expected)

    def test_rejects_factor_zero(self, rng):
        with pytest.raises(ValueError):
            upscale_bilinear(random_raster(rng, 1, 2, 2), 0)

    def test_preserves_bounds(self, rng):
        r = random_raster(rng, 3, 6, 6)
        u = upscale_bilinear(r, 3)
        assert u.data.min() >= r.data.min()
        assert u.data.max() <= r.data.max()


class TestDownscaleArea:
    def test_constant(self):
        r = Raster.constant(0.25, 2, 8, 8)
        d = downscale_area(r, 4)
        assert np.array_equal(d.data, np.full((2, 2, 2), np.float32(0.25)))

    def test_two_by_two_mean(self):
        r = Raster.from_array(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.float32))
        d = downscale_area(r, 2)
        assert d.shape == (1, 1, 1)
        assert d.data[0, 0, 0] == np.float32(0.5)

    def test_matches_block_mean_oracle(self, rng):
        r = random_raster(rng, 2, 8, 8)
        d = downscale_area(r, 4)
        expected = block_mean_oracle(r.data, 4)
        np.testing.assert_allclose(d.data, expected, atol=1e-7)

    def test_rejects_non_divisible(self, rng):
        with pytest.raises(ValueError):
            downscale_area(random_raster(rng, 1, 6, 6), 4)

    def test_preserves_global_mean(self, rng):
        r = random_raster(rng, 3, 16, 16)
        d = downscale_area(r, 4)
        a = float(r.data.astype(np.float64).mean())
        b = float(d.data.astype(np.float64).mean())
        assert abs(a - b) <= 1e-6 * abs(a)


class TestBoxFilter:
    def test_size_one_identity(self, rng):
        r = random_raster(rng, 2, 5, 5)
        assert np.array_equal(box_filter(r, 1).data, r.data)

    def test_constant_idempotent(self):
        r = Raster.constant(0.1, 1, 9, 9)
        f = box_filter(r, 5)
        assert np.array_equal(f.data, r.data)

    def test_impulse_five(self):
        arr = np.zeros((1, 5, 5), dtype=np.float32)
        arr[0, 2, 2] = 1.0
        f = box_filter(Raster(arr), 5)
        np.testing.assert_allclose(f.data, np.full((1, 5, 5), 1.0 / 25.0), atol=1e-7)

    def test_matches_direct_oracle(self, rng):
        r = random_raster(rng, 3, 7, 6)
        f = box_filter(r, 3)
        np.testing.assert_allclose(f.data, box_filter_oracle(r.data, 3), atol=1e-6)

    def test_rejects_even_or_zero_size(self, rng):
        r = random_raster(rng, 1, 4, 4)
        for size in (0, 2, 4):
            with pytest.raises(ValueError):
                box_filter(r, size)

    def test_stays_within_bounds(self, rng):
        r = random_raster(rng, 3, 12, 12)
        f = box_filter(r, 5)
        assert f.data.min() >= r.data.min() - 1e-6
        assert f.data.max() <= r.data.max() + 1e-6


class TestHighFreq:
    def test_constant_is_zero(self):
        r = Raster.constant(0.8, 3, 6, 6)
        assert np.array_equal(high_freq(r, 3).data, np.zeros((3, 6, 6), dtype=np.float32))

    def test_reconstruction(self, rng):
        r = random_raster(rng, 3, 10, 10)
        back = high_freq(r, 5).data + box_filter(r, 5).data
        np.testing.assert_allclose(back, r.data, atol=1e-6)

    def test_impulse_three(self):
        arr = np.zeros((1, 7, 7), dtype=np.float32)
        arr[0, 3, 3] = 1.0
        hf = high_freq(Raster(arr), 3)
        assert abs(hf.data[0, 3, 3] - (1 - 1 / 9)) < 1e-6
        assert abs(hf.data[0, 3, 2] - (-1 / 9)) < 1e-6


class TestGrayInverted:
    def test_white_goes_to_zero(self):
        r = Raster.constant(1.0, 3, 3, 3)
        assert np.array_equal(gray_inverted(r).data, np.zeros((1, 3, 3), dtype=np.float32))

    def test_half_gray_self_inverse(self):
        r = Raster.constant(0.5, 3, 4, 4)
        assert np.array_equal(gray_inverted(r).data, r.data[:1])

    def test_pure_red(self):
        arr = np.zeros((3, 2, 2), dtype=np.float32)
        arr[0] = 1.0
        g = gray_inverted(Raster(arr))
        np.testing.assert_allclose(g.data, np.full((1, 2, 2), 2.0 / 3.0), atol=1e-7)

    def test_rejects_single_channel(self):
        with pytest.raises(ValueError):
            gray_inverted(Raster.constant(0.0, 1, 2, 2))


class TestYCbCr:
    def test_gray_maps_to_luma(self):
        r = Raster.constant(0.6, 3, 3, 3)
        ycc = to_ycbcr(r)
        np.testing.assert_allclose(ycc.data[0], 0.6, atol=1e-6)
        np.testing.assert_allclose(ycc.data[1], 0.5, atol=1e-6)
        np.testing.assert_allclose(ycc.data[2], 0.5, atol=1e-6)

    def test_round_trip(self, rng):
        r = random_raster(rng, 3, 8, 8)
        back = from_ycbcr(to_ycbcr(r))
        assert np.abs(back.data - r.data).max() <= 1e-5

    def test_pure_red_luma(self):
        arr = np.zeros((3, 1, 1), dtype=np.float32)
        arr[0] = 1.0
        assert abs(to_ycbcr(Raster(arr)).data[0, 0, 0] - 0.299) < 1e-6

    def test_rejects_wrong_channels(self):
        with pytest.raises(ValueError):
            to_ycbcr(Raster.constant(0.5, 1, 2, 2))
        with pytest.raises(ValueError):
            from_ycbcr(Raster.constant(0.5, 4, 2, 2))


class TestZeroFraction:
    def test_all_zero(self):
        assert zero_fraction(Raster.constant(0.0, 3, 4, 4)) == 1.0

    def test_threshold_cases(self, rng):
        data = rng.uniform(0.1, 1.0, size=(3, 16, 16)).astype(np.float32)
        flat = data.reshape(3, -1)
        flat[:, :13] = 0.0
        frac13 = zero_fraction(Raster(flat.reshape(3, 16, 16)))
        assert frac13 == 13 / 256
        assert frac13 > 0.05
        flat[:, 12] = 0.5
        frac12 = zero_fraction(Raster(flat.reshape(3, 16, 16)))
        assert frac12 == 12 / 256
        assert frac12 <= 0.05

    def test_needs_all_channels_zero(self, rng):
        data = rng.uniform(0.1, 1.0, size=(3, 5, 5)).astype(np.float32)
        data[0] = 0.0
        assert zero_fraction(Raster(data)) == 0.0

    def test_channel_permutation_invariant(self, rng):
        data = rng.uniform(0, 1, size=(3, 6, 6)).astype(np.float32)
        data[:, data[0] < 0.3] = 0.0
        base = zero_fraction(Raster(data))
        assert zero_fraction(Raster(data[[2, 0, 1]])) == base
