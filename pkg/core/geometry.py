from typing import List

import numpy as np

from core.schemas import Partition, PartitionReport, Rect, ViolationKind


def rect_area(r: Rect) -> int:
    """矩形の画素数 |R|"""
    return r.w * r.h


def coverage_raster(p: Partition) -> np.ndarray:
    """各画素が何個の矩形に含まれるかを数えた H×W 配列（画像外の部分は切り捨てる）。"""
    raster = np.zeros((p.image_height, p.image_width), dtype=np.int32)
    for r in p.rects:
        raster[r.y:min(r.bottom, p.image_height), r.x:min(r.right, p.image_width)] += 1
    return raster


def _claimants(p: Partition, x: int, y: int) -> List[int]:
    return [i for i, r in enumerate(p.rects) if r.x <= x < r.right and r.y <= y < r.bottom]


def validate_partition(p: Partition) -> PartitionReport:
    """矩形が画像を重なり・隙間なく覆っているかを検証する。

    チェック順は 画像外 → 重なり → 隙間。最初に見つかった違反（行優先で最初の画素）を返す。
    """
    for i, r in enumerate(p.rects):
        if not r.fits_in(p.image_width, p.image_height):
            return PartitionReport(
                ok=False,
                kind=ViolationKind.OUT_OF_BOUNDS,
                message=(
                    f"rect {i} {r.as_tuple()} が画像 {p.image_width}x{p.image_height} からはみ出しています"
                ),
                rect_indices=(i,),
            )

    raster = coverage_raster(p)

    overlaps = np.argwhere(raster > 1)
    if overlaps.size:
        y, x = (int(v) for v in overlaps[0])
        owners = _claimants(p, x, y)
        return PartitionReport(
            ok=False,
            kind=ViolationKind.OVERLAP,
            message=f"rect {owners[0]} と rect {owners[1]} が重なっています（行 {y}, 列 {x}）",
            pixel=(x, y),
            rect_indices=(owners[0], owners[1]),
        )

    gaps = np.argwhere(raster == 0)
    if gaps.size:
        y, x = (int(v) for v in gaps[0])
        uncovered_rows = np.flatnonzero((raster == 0).any(axis=1))
        return PartitionReport(
            ok=False,
            kind=ViolationKind.GAP,
            message=(
                f"画素 ({x}, {y}) がどの矩形にも含まれていません"
                f"（未被覆の行: {int(uncovered_rows[0])}〜{int(uncovered_rows[-1])}）"
            ),
            pixel=(x, y),
        )

    return PartitionReport(ok=True, message="ok")


def hidden_pixels(r: Rect, image_width: int, image_height: int) -> int:
    """border_mask で枠線にならない矩形内の画素数"""
    hidden = (r.w - 1) * (r.h - 1)
    at_right = r.right == image_width and r.w >= 2
    at_bottom = r.bottom == image_height and r.h >= 2
    if at_right:
        hidden -= r.h - 1
    if at_bottom:
        hidden -= r.w - 1
    if at_right and at_bottom:
        hidden += 1
    return hidden


def partition_perimeter(p: Partition) -> int:
    """枠線の画素数。隣り合う矩形の共有辺は 1 本として数える。"""
    total = p.image_width * p.image_height
    return total - sum(hidden_pixels(r, p.image_width, p.image_height) for r in p.rects)


def border_mask(p: Partition) -> np.ndarray:
    """1px 枠線を True にした H×W マスク。

    各矩形は上端の行と左端の列だけを描き、画像の最終行と最終列で外周を閉じる。
    共有辺は 2px にならない。
    """
    mask = np.zeros((p.image_height, p.image_width), dtype=bool)
    for r in p.rects:
        mask[r.y, r.x:r.right] = True
        mask[r.y:r.bottom, r.x] = True
    mask[-1, :] = True
    mask[:, -1] = True
    return mask
