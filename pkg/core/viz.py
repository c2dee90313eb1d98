from typing import Sequence

import numpy as np

from core import config
from core.geometry import border_mask
from core.schemas import Image, Partition


def draw_border_overlay(
    img: Image,
    partition: Partition,
    color: Sequence[int] = config.VIZ_BORDER_COLOR,
) -> Image:
    """分割の 1px 枠線（共有辺は 1 本）を color で上書きした画像を返す（グレースケールは color の最大値）。"""
    if (img.width, img.height) != (partition.image_width, partition.image_height):
        raise ValueError("画像と分割のサイズが一致しません")
    out = img.pixels.copy()
    mask = border_mask(partition)
    fill = list(color) if img.channels == 3 else [max(color)]
    out[mask] = np.asarray(fill, dtype=np.uint8)
    return Image(pixels=out)


def side_by_side(
    left: Image,
    right: Image,
    gap: int = config.VIZ_GAP_PX,
    fill: int = config.VIZ_GAP_FILL,
) -> Image:
    """左右に並べる（元画像 | 拡張後）。高さが違う場合は下を fill で埋める。"""
    if left.channels != right.channels:
        raise ValueError("チャンネル数が一致しません")
    height = max(left.height, right.height)
    canvas = np.full((height, left.width + gap + right.width, left.channels), fill, dtype=np.uint8)
    canvas[:left.height, :left.width] = left.pixels
    canvas[:right.height, left.width + gap:] = right.pixels
    return Image(pixels=canvas)
