import numpy as np
import pytest

from conftest import quantized_raster, random_raster
from oracles import box_filter_oracle, recolor_oracle
from pansharp.raster import Raster, box_filter, to_ycbcr
from pansharp.recolor import (
    RecolorParams,
    hf_guided,
    luma_guided,
    rc_stage_inputs,
    recolorize,
)


class TestRecolorize:
    def test_window_one_returns_ms(self, rng):
        ps = random_raster(rng, 3, 8, 8)
        ms = random_raster(rng, 3, 8, 8)
        out = recolorize(ps, ms, RecolorParams(window=1))
        assert np.array_equal(out.data, ms.data)

    def test_identical_inputs_fixed_point(self, rng):
        ps = random_raster(rng, 3, 8, 8)
        out = recolorize(ps, ps, RecolorParams(window=5))
        assert np.array_equal(out.data, ps.data)

    def test_hand_candidates(self):
        # Window around the center pixel holds one near-match among
        # far-off colors; the near-match must win.
        ms = np.zeros((3, 3, 3), dtype=np.float32)
        colors = [
            (0.9, 0.1, 0.1), (0.1, 0.9, 0.1), (0.1, 0.1, 0.9),
            (0.9, 0.9, 0.1), (0.9, 0.1, 0.9), (0.1, 0.9, 0.9),
            (0.52, 0.48, 0.5), (0.9, 0.9, 0.9), (0.1, 0.1, 0.1),
        ]
        for i, col in enumerate(colors):
            ms[:, i // 3, i % 3] = col
        ps = Raster.constant(0.5, 3, 3, 3)
        out = recolorize(ps, Raster(ms), RecolorParams(window=3))
        np.testing.assert_allclose(out.data[:, 1, 1], [0.52, 0.48, 0.5], atol=1e-7)

    def test_matches_oracle_random(self, rng):
        for w in (1, 3, 5):
            ps = random_raster(rng, 3, 12, 12)
            ms = random_raster(rng, 3, 12, 12)
            out = recolorize(ps, ms, RecolorParams(window=w))
            assert np.array_equal(out.data, recolor_oracle(ps.data, ms.data, w))

    def test_matches_oracle_with_ties(self, rng):
        # Quantized palettes produce exact duplicate candidates, so the
        # tie-break order decides; results must still agree bit for bit.
        for w in (3, 5, 7):
            ps = quantized_raster(rng, 3, 10, 10)
            ms = quantized_raster(rng, 3, 10, 10, levels=3)
            out = recolorize(ps, ms, RecolorParams(window=w))
            assert np.array_equal(out.data, recolor_oracle(ps.data, ms.data, w))

    def test_idempotent(self, rng):
        ps = quantized_raster(rng, 3, 9, 9)
        ms = quantized_raster(rng, 3, 9, 9, levels=4)
        params = RecolorParams(window=3)
        once = recolorize(ps, ms, params)
        twice = recolorize(once, ms, params)
        assert np.array_equal(once.data, twice.data)

    def test_real_color_guarantee(self, rng):
        ps = random_raster(rng, 3, 7, 7)
        ms = random_raster(rng, 3, 7, 7)
        w = 5
        out = recolorize(ps, ms, RecolorParams(window=w))
        r = w // 2
        for y in range(7):
            for x in range(7):
                win = ms.data[:, max(0, y - r) : y + r + 1, max(0, x - r) : x + r + 1]
                match = (win == out.data[:, y, x][:, None, None]).all(axis=0)
                assert match.any()

    def test_never_worse_than_center(self, rng):
        ps = random_raster(rng, 3, 8, 8)
        ms = random_raster(rng, 3, 8, 8)
        out = recolorize(ps, ms, RecolorParams(window=5))
        d_out = ((out.data.astype(np.float64) - ps.data) ** 2).sum(axis=0)
        d_center = ((ms.data.astype(np.float64) - ps.data) ** 2).sum(axis=0)
        assert (d_out <= d_center + 1e-12).all()

    def test_thread_and_tile_invariance(self, rng):
        ps = random_raster(rng, 3, 33, 17)
        ms = random_raster(rng, 3, 33, 17)
        params = RecolorParams(window=3)
        base = recolorize(ps, ms, params)
        for threads, tile_rows in ((1, 4), (4, 4), (8, 1), (2, 7)):
            alt = recolorize(ps, ms, params, threads=threads, tile_rows=tile_rows)
            assert np.array_equal(base.data, alt.data)

    def test_rejects_bad_inputs(self, rng):
        ps = random_raster(rng, 3, 4, 4)
        with pytest.raises(ValueError):
            recolorize(ps, random_raster(rng, 3, 5, 4), RecolorParams(window=3))
        with pytest.raises(ValueError):
            RecolorParams(window=2)
        with pytest.raises(ValueError):
            RecolorParams(window=3, hf_filter_size=4)


class TestLumaGuided:
    def test_same_inputs_identity(self, rng):
        ps = random_raster(rng, 3, 6, 6)
        out = luma_guided(ps, ps)
        assert np.abs(out.data - ps.data).max() <= 1e-5

    def test_gray_levels(self):
        rc = Raster.constant(0.2, 3, 4, 4)
        ps = Raster.constant(0.7, 3, 4, 4)
        out = luma_guided(rc, ps)
        np.testing.assert_allclose(out.data, 0.7, atol=1e-5)

    def test_luma_matches_ps(self, rng):
        rc = random_raster(rng, 3, 8, 8)
        ps = random_raster(rng, 3, 8, 8)
        out = luma_guided(rc, ps)
        assert np.abs(to_ycbcr(out).data[0] - to_ycbcr(ps).data[0]).max() <= 1e-5

    def test_chroma_matches_rc(self, rng):
        rc = random_raster(rng, 3, 8, 8)
        ps = random_raster(rng, 3, 8, 8)
        out = luma_guided(rc, ps)
        assert np.abs(to_ycbcr(out).data[1:] - to_ycbcr(rc).data[1:]).max() <= 1e-5

    def test_rejects_mismatch(self, rng):
        with pytest.raises(ValueError):
            luma_guided(random_raster(rng, 3, 4, 4), random_raster(rng, 3, 4, 5))


class TestHfGuided:
    def test_rc_equals_ps_identity(self, rng):
        ps = random_raster(rng, 3, 9, 9)
        out = hf_guided(ps, ps, RecolorParams())
        assert np.abs(out.data - ps.data).max() <= 1e-6

    def test_constant_shift_passthrough(self, rng):
        ps = random_raster(rng, 3, 9, 9, lo=0.0, hi=0.5)
        rc = Raster(ps.data + np.float32(0.25))
        out = hf_guided(rc, ps, RecolorParams())
        np.testing.assert_allclose(out.data, ps.data + 0.25, atol=1e-6)

    def test_matches_direct_filter_oracle(self, rng):
        ps = random_raster(rng, 3, 11, 11)
        rc = random_raster(rng, 3, 11, 11)
        out = hf_guided(rc, ps, RecolorParams(hf_filter_size=5))
        expected = ps.data - box_filter_oracle(ps.data, 5) + box_filter_oracle(rc.data, 5)
        np.testing.assert_allclose(out.data, expected, atol=1e-5)

    def test_low_frequency_identity(self, rng):
        ps = random_raster(rng, 3, 10, 10)
        rc = random_raster(rng, 3, 10, 10)
        out = hf_guided(rc, ps, RecolorParams(hf_filter_size=5))
        lhs = out.data - box_filter(rc, 5).data
        rhs = ps.data - box_filter(ps, 5).data
        assert np.abs(lhs - rhs).max() <= 1e-6


class TestStageInputs:
    def test_equal_inputs(self, rng):
        ps = random_raster(rng, 3, 8, 8)
        rc0, ms_up, hf = rc_stage_inputs(ps, ps, RecolorParams(window=3))
        assert np.array_equal(rc0.data, ps.data)
        assert ms_up is ps
        np.testing.assert_allclose(hf.data, ps.data - box_filter(ps, 5).data, atol=0)

    def test_constant_has_zero_hf(self):
        ps = Raster.constant(0.4, 3, 6, 6)
        _, _, hf = rc_stage_inputs(ps, ps, RecolorParams())
        assert np.array_equal(hf.data, np.zeros_like(ps.data))

    def test_rc0_matches_oracle(self, rng):
        ps = random_raster(rng, 3, 8, 8)
        ms = random_raster(rng, 3, 8, 8)
        rc0, _, _ = rc_stage_inputs(ps, ms, RecolorParams(window=3))
        assert np.array_equal(rc0.data, recolor_oracle(ps.data, ms.data, 3))
