import numpy as np
import pytest

from core.schemas import Image, Partition, Rect
from core.viz import draw_border_overlay, side_by_side


def _halves():
    return Partition(image_width=10, image_height=6, rects=[Rect.of(0, 0, 5, 6), Rect.of(5, 0, 5, 6)])


class TestDrawBorderOverlay:
    def test_shared_edge_drawn_once(self):
        black = Image(pixels=np.zeros((6, 10, 3), dtype=np.uint8))
        out = draw_border_overlay(black, _halves(), (255, 0, 0))
        red = np.all(out.pixels == np.array([255, 0, 0], dtype=np.uint8), axis=2)
        assert int(red[3, 4]) + int(red[3, 5]) == 1
        assert int(red.sum()) == 32

    def test_grayscale_uses_max_component(self):
        gray = Image(pixels=np.zeros((6, 10, 1), dtype=np.uint8))
        out = draw_border_overlay(gray, _halves(), (40, 200, 10))
        assert out.pixels[0, 0, 0] == 200
        assert out.pixels[3, 3, 0] == 0

    def test_input_untouched(self):
        black = Image(pixels=np.zeros((6, 10, 3), dtype=np.uint8))
        draw_border_overlay(black, _halves())
        assert not black.pixels.any()

    def test_size_mismatch(self, rgb_image):
        with pytest.raises(ValueError):
            draw_border_overlay(rgb_image, _halves())


def test_side_by_side_layout():
    left = Image(pixels=np.full((4, 3, 1), 7, dtype=np.uint8))
    right = Image(pixels=np.full((2, 5, 1), 9, dtype=np.uint8))
    canvas = side_by_side(left, right, gap=2, fill=255)
    assert canvas.pixels.shape == (4, 3 + 2 + 5, 1)
    assert canvas.pixels[:, 3:5].min() == 255
    assert canvas.pixels[3, 6, 0] == 255
    assert canvas.pixels[0, 6, 0] == 9
