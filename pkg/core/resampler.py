"""バイキュービック（シャープ化付き）による矩形ブロックのリサイズ"""

from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from core import config
from core.schemas import Image, Rect


class PatchView(BaseModel):
    """画像の一部（region）への参照。画素はコピーしない。"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    image: Image
    region: Rect

    @model_validator(mode="after")
    def validate_region(self):
        if not self.region.fits_in(self.image.width, self.image.height):
            raise ValueError(
                f"region {self.region.as_tuple()} が画像 {self.image.width}x{self.image.height} の外にはみ出しています"
            )
        return self

    @property
    def pixels(self) -> np.ndarray:
        rows, cols = self.region.slices()
        return self.image.pixels[rows, cols]


def cubic_kernel(t: float, a: float = config.CUBIC_SHARPNESS) -> float:
    """
    3次畳み込みカーネルの重み。

    |t| <= 1: (a+2)|t|^3 - (a+3)|t|^2 + 1
    1 < |t| < 2: a|t|^3 - 5a|t|^2 + 8a|t| - 4a
    それ以外: 0
    """
    t = abs(t)
    if t <= 1.0:
        return (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0
    if t < 2.0:
        return a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a
    return 0.0


def _cubic_kernel_array(t: np.ndarray, a: float) -> np.ndarray:
    # cubic_kernel と同じ演算順序（スカラー版とビット単位で一致させる）
    t = np.abs(t)
    near = (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0
    far = a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a
    return np.where(t <= 1.0, near, np.where(t < 2.0, far, 0.0))


def axis_taps(src_extent: int, dst_extent: int, a: float = config.CUBIC_SHARPNESS) -> Tuple[np.ndarray, np.ndarray]:
    """
    1軸分の 4 タップのインデックスと重みを返す。

    座標は画素中心を揃える: src = (dst + 0.5) * (src_extent / dst_extent) - 0.5

    Returns:
        (indices, weights) いずれも形状 (dst_extent, 4)。インデックスは端の画素に
        クランプ済み（隣の矩形の画素を持ち込まない）。
    """
    scale = src_extent / dst_extent
    src = (np.arange(dst_extent, dtype=np.float64) + 0.5) * scale - 0.5
    base = np.floor(src).astype(np.int64)
    offsets = np.arange(-1, 3, dtype=np.int64)
    taps = base[:, None] + offsets[None, :]
    weights = _cubic_kernel_array(src[:, None] - taps.astype(np.float64), a)
    indices = np.clip(taps, 0, src_extent - 1)
    return indices, weights


def _round_half_away(values: np.ndarray) -> np.ndarray:
    return np.where(values >= 0, np.floor(values + 0.5), -np.floor(-values + 0.5))


def resize_pixels(block: np.ndarray, out_w: int, out_h: int, a: float = config.CUBIC_SHARPNESS) -> np.ndarray:
    """
    H×W×C の uint8 ブロックを out_h×out_w×C にリサイズします。

    横方向 → 縦方向の順に浮動小数で畳み込み、最後に四捨五入（0から遠い方）して
    [0, 255] にクランプする。同じ寸法なら単なるコピー。
    """
    if out_w < 1 or out_h < 1:
        raise ValueError(f"出力サイズは1以上である必要があります: {out_w}x{out_h}")
    if block.ndim == 2:
        block = block[:, :, np.newaxis]
    src_h, src_w = block.shape[:2]
    if (src_w, src_h) == (out_w, out_h):
        return np.array(block, dtype=np.uint8, copy=True)

    src = block.astype(np.float64)

    idx_x, w_x = axis_taps(src_w, out_w, a)
    rows = w_x[None, :, 0, None] * src[:, idx_x[:, 0], :]
    for k in range(1, 4):
        rows += w_x[None, :, k, None] * src[:, idx_x[:, k], :]

    idx_y, w_y = axis_taps(src_h, out_h, a)
    out = w_y[:, 0, None, None] * rows[idx_y[:, 0], :, :]
    for k in range(1, 4):
        out += w_y[:, k, None, None] * rows[idx_y[:, k], :, :]

    return np.clip(_round_half_away(out), 0, 255).astype(np.uint8)


def resize_patch(src: PatchView, out_w: int, out_h: int) -> np.ndarray:
    """パッチを out_h × out_w × channels のブロックにリサイズする。"""
    return resize_pixels(src.pixels, out_w, out_h)


def weights_sum(src_extent: int, dst_extent: int) -> np.ndarray:
    """出力位置ごとの 4 タップ重みの和（1 からのずれの確認用）"""
    _, weights = axis_taps(src_extent, dst_extent)
    return weights.sum(axis=1)
