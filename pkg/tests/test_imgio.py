import io

import numpy as np
import png
import pytest

from core.exceptions import ImageIOError, MalformedImageError, UnsupportedFormatError
from core.imgio import ImageFileFormat, decode_image, detect_format, encode_image, load_image, save_image
from core.imgio.pnm import PnmHeaderParser
from tests.conftest import random_image


class TestImageFileFormat:
    def test_from_path(self):
        assert ImageFileFormat.from_path("a.PNG") is ImageFileFormat.PNG
        assert ImageFileFormat.from_path("a.pgm") is ImageFileFormat.PPM_BINARY
        with pytest.raises(ValueError):
            ImageFileFormat.from_path("a.jpg")

    def test_suffix_for_channels(self):
        assert ImageFileFormat.PPM_BINARY.suffix_for(1) == ".pgm"
        assert ImageFileFormat.PPM_BINARY.suffix_for(3) == ".ppm"
        assert ImageFileFormat.PNG.suffix_for(1) == ".png"


class TestPnm:
    def test_header_layout(self, rgb_image):
        data = encode_image(rgb_image, ImageFileFormat.PPM_BINARY)
        assert data.startswith(b"P6\n32 24\n255\n")
        assert len(data) == len(b"P6\n32 24\n255\n") + 32 * 24 * 3

    def test_grayscale_uses_p5(self, gray_image):
        assert encode_image(gray_image, ImageFileFormat.PPM_BINARY).startswith(b"P5\n")

    def test_comments_in_header(self):
        data = b"P5\n# made by hand\n2 1\n# maxval next\n255\n\x01\x02"
        img = decode_image(data)
        assert img.pixels[:, :, 0].tolist() == [[1, 2]]

    def test_parser_returns_payload_offset(self):
        magic, w, h, maxval, offset = PnmHeaderParser.parse(b"P6 3 2 255 " + b"\x00" * 18)
        assert (magic, w, h, maxval, offset) == ("P6", 3, 2, 255, 11)

    def test_sixteen_bit_rejected(self):
        with pytest.raises(UnsupportedFormatError):
            decode_image(b"P5\n1 1\n65535\n\x00\x00")

    def test_short_read(self):
        with pytest.raises(MalformedImageError, match="short read"):
            decode_image(b"P6\n2 2\n255\n\x00\x00\x00")

    def test_bad_header_number(self):
        with pytest.raises(MalformedImageError):
            decode_image(b"P6\nx 2\n255\n")


class TestPng:
    def _png_bytes(self, rows, **kwargs):
        buf = io.BytesIO()
        png.Writer(**kwargs).write(buf, rows)
        return buf.getvalue()

    def test_alpha_rejected(self):
        data = self._png_bytes([[1, 2, 3, 4]], width=1, height=1, greyscale=False, alpha=True, bitdepth=8)
        with pytest.raises(UnsupportedFormatError, match="alpha"):
            decode_image(data)

    def test_sixteen_bit_rejected(self):
        data = self._png_bytes([[1000]], width=1, height=1, greyscale=True, bitdepth=16)
        with pytest.raises(UnsupportedFormatError):
            decode_image(data)

    def test_truncated_png(self, rgb_image):
        data = encode_image(rgb_image, ImageFileFormat.PNG)
        with pytest.raises(MalformedImageError):
            decode_image(data[:40])

    def test_gray_round_trip(self, gray_image):
        assert decode_image(encode_image(gray_image, ImageFileFormat.PNG)) == gray_image


class TestFiles:
    def test_detect_format(self, rgb_image):
        assert detect_format(encode_image(rgb_image, ImageFileFormat.PNG)) is ImageFileFormat.PNG
        with pytest.raises(UnsupportedFormatError):
            detect_format(b"GIF89a")

    def test_load_trusts_content_not_suffix(self, tmp_path, rgb_image):
        path = tmp_path / "actually_png.ppm"
        path.write_bytes(encode_image(rgb_image, ImageFileFormat.PNG))
        assert load_image(path) == rgb_image

    def test_missing_file(self, tmp_path):
        with pytest.raises(ImageIOError):
            load_image(tmp_path / "missing.png")

    @pytest.mark.parametrize("fmt, suffix", [(ImageFileFormat.PPM_BINARY, ".ppm"), (ImageFileFormat.PNG, ".png")])
    def test_save_load_round_trip(self, tmp_path, fmt, suffix):
        for i in range(20):
            img = random_image(1 + i * 3, 1 + (i * 7) % 19, 3 if i % 2 else 1, seed=i)
            path = save_image(img, tmp_path / f"img{i}{suffix}")
            assert load_image(path) == img


@pytest.mark.slow
@pytest.mark.parametrize("fmt", list(ImageFileFormat))
def test_round_trip_100_images(tmp_path, fmt):
    rng = np.random.default_rng(9)
    for i in range(100):
        img = random_image(1 + int(rng.integers(0, 64)), 1 + int(rng.integers(0, 64)), 3, seed=i)
        path = save_image(img, tmp_path / f"{i}{fmt.suffix_for(3)}", fmt)
        assert load_image(path) == img


def test_p6_two_by_two():
    samples = bytes(range(12))
    img = decode_image(b"P6\n2 2\n255\n" + samples)
    assert (img.width, img.height, img.channels) == (2, 2, 3)
    assert img.data == samples
