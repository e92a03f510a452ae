import numpy as np
import pytest

from conftest import random_raster
from pansharp.errors import FormatError
from pansharp.imgio import (
    read_image,
    read_rawten,
    read_rawten_bytes,
    write_image,
    write_rawten,
    write_rawten_bytes,
)
from pansharp.raster import Raster


class TestRawten:
    def test_round_trip(self, rng):
        t = random_raster(rng, 3, 5, 7).data
        assert np.array_equal(read_rawten_bytes(write_rawten_bytes(t)), t)

    def test_file_round_trip(self, rng, tmp_path):
        t = random_raster(rng, 2, 4, 4).data
        path = tmp_path / "t.rten"
        write_rawten(path, t)
        assert np.array_equal(read_rawten(path), t)

    def test_bad_magic(self):
        with pytest.raises(FormatError):
            read_rawten_bytes(b"XTEN1\x00\x00\x00" + b"\x00" * 12)

    def test_wrong_length(self, rng):
        payload = write_rawten_bytes(random_raster(rng, 1, 2, 2).data)
        with pytest.raises(FormatError):
            read_rawten_bytes(payload + b"\x00\x00\x00\x00")
        with pytest.raises(FormatError):
            read_rawten_bytes(payload[:-1])


class TestPng:
    def test_16bit_rgb_round_trip(self, rng, tmp_path):
        img = random_raster(rng, 3, 6, 9)
        path = tmp_path / "x.png"
        write_image(path, img, bits=16)
        back = read_image(path)
        assert back.shape == img.shape
        assert np.abs(back.data - img.data).max() <= 1.0 / 65535.0

    def test_16bit_gray_round_trip(self, rng, tmp_path):
        img = random_raster(rng, 1, 5, 5)
        path = tmp_path / "g.png"
        write_image(path, img)
        back = read_image(path)
        assert back.channels == 1
        assert np.abs(back.data - img.data).max() <= 1.0 / 65535.0

    def test_8bit_round_trip(self, rng, tmp_path):
        img = random_raster(rng, 3, 4, 4)
        path = tmp_path / "x8.png"
        write_image(path, img, bits=8)
        back = read_image(path)
        assert np.abs(back.data - img.data).max() <= 1.0 / 255.0

    def test_exact_zero_survives(self, tmp_path):
        data = np.zeros((3, 4, 4), dtype=np.float32)
        data[:, 2:, :] = 0.5
        path = tmp_path / "z.png"
        write_image(path, Raster(data))
        back = read_image(path)
        assert (back.data[:, :2, :] == 0.0).all()

    def test_rten_extension_is_lossless(self, rng, tmp_path):
        img = random_raster(rng, 3, 4, 4)
        path = tmp_path / "x.rten"
        write_image(path, img)
        assert np.array_equal(read_image(path).data, img.data)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormatError):
            read_image(tmp_path / "nope.png")

    def test_clamps_out_of_range(self, tmp_path):
        data = np.array([[[-0.5, 1.5]]], dtype=np.float32)
        path = tmp_path / "c.png"
        write_image(path, Raster(data))
        back = read_image(path)
        assert back.data[0, 0, 0] == 0.0
        assert back.data[0, 0, 1] == 1.0
