from enum import Enum
from typing import List, Optional, Tuple

from core.exceptions import InfeasiblePartitionError, InvalidOffsetError
from core.logging_config import logger
from core.rng import RandomStream, randbelow
from core.schemas import Partition, Rect


class SplitDirection(Enum):
    # vertical は縦に切る（幅を分ける）、horizontal は横に切る（高さを分ける）
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


def split_extent(r: Rect, direction: SplitDirection) -> int:
    """分割方向に沿った辺の長さ"""
    return r.w if direction is SplitDirection.VERTICAL else r.h


def split_rect(r: Rect, direction: SplitDirection, offset: int) -> Tuple[Rect, Rect]:
    """
    矩形を2つに分割します。

    Args:
        r: 分割する矩形
        direction: VERTICAL なら幅を、HORIZONTAL なら高さを分割
        offset: r の原点からの相対位置（1 〜 extent-1）

    Returns:
        (原点を保つ子, 原点 + offset から始まる子)
    """
    extent = split_extent(r, direction)
    if not 1 <= offset <= extent - 1:
        raise InvalidOffsetError(
            f"offset {offset} は範囲外です（extent={extent}, 許容範囲 1〜{extent - 1}）"
        )
    if direction is SplitDirection.VERTICAL:
        return (
            Rect(x=r.x, y=r.y, w=offset, h=r.h),
            Rect(x=r.x + offset, y=r.y, w=r.w - offset, h=r.h),
        )
    return (
        Rect(x=r.x, y=r.y, w=r.w, h=offset),
        Rect(x=r.x, y=r.y + offset, w=r.w, h=r.h - offset),
    )


def sample_offset(extent: int, rng: RandomStream) -> int:
    """[1, extent-1] から一様に分割位置を選ぶ。

    extent が偶数で中央に当たった場合は1回だけ引き直し、再び中央なら +1 ずらす。
    extent == 2 は等分しか存在しないので引き直さない。
    """
    offset = 1 + randbelow(rng, extent - 1)
    if extent % 2 == 0 and extent > 2 and offset == extent // 2:
        offset = 1 + randbelow(rng, extent - 1)
        if offset == extent // 2:
            offset = offset + 1 if offset + 1 <= extent - 1 else extent - 1
    return offset


def _feasible_directions(r: Rect) -> List[SplitDirection]:
    return [d for d in (SplitDirection.VERTICAL, SplitDirection.HORIZONTAL) if split_extent(r, d) >= 2]


def generate_partition(width: int, height: int, n: int, rng: RandomStream) -> Partition:
    """
    画像全体から始めて、ランダムな矩形をランダムな方向・位置で分割し、n 個の矩形にします。

    1イテレーションあたりの乱数消費順: (1) 分割可能な矩形のインデックス、
    (2) 分割可能な方向、(3) 分割位置。
    """
    if n < 2:
        raise ValueError(f"目標矩形数は2以上である必要があります: {n}")
    if width < 1 or height < 1:
        raise ValueError(f"画像サイズが不正です: {width}x{height}")

    rects: List[Rect] = [Rect(x=0, y=0, w=width, h=height)]
    while len(rects) < n:
        # 1x1 の矩形はこれ以上分割できないので候補から外す
        pool = [i for i, r in enumerate(rects) if r.w > 1 or r.h > 1]
        if not pool:
            raise InfeasiblePartitionError(
                f"{width}x{height} の画像を {n} 個の矩形に分割できません（現在 {len(rects)} 個）"
            )
        idx = pool[randbelow(rng, len(pool))]
        target = rects[idx]

        directions = _feasible_directions(target)
        direction = directions[randbelow(rng, len(directions))]

        offset = sample_offset(split_extent(target, direction), rng)
        rects[idx:idx + 1] = split_rect(target, direction, offset)

    logger.debug("partition %dx%d -> %d rects", width, height, len(rects))
    return Partition(image_width=width, image_height=height, rects=rects)


def normalized_ratio(aspect_ratio: float) -> float:
    """G と 1/G の小さい方（向きに依存しない閾値）"""
    if aspect_ratio <= 0:
        raise ValueError(f"アスペクト比は正である必要があります: {aspect_ratio}")
    return min(aspect_ratio, 1.0 / aspect_ratio)


def satisfies_aspect(r: Rect, g: float) -> bool:
    """min(w,h)/max(w,h) >= g なら制約を満たす（g は normalized_ratio 済み）"""
    return min(r.w, r.h) / max(r.w, r.h) >= g


def _refine_offset(extent: int) -> int:
    # 中央で分割。偶数なら等分を避けて +1（extent == 2 は等分しかない）
    offset = extent // 2
    if extent % 2 == 0 and offset + 1 <= extent - 1:
        offset += 1
    return offset


def refine_partition(
    p: Partition,
    aspect_ratio: float,
    steps: int,
    rng: Optional[RandomStream] = None,
) -> Partition:
    """
    アスペクト比の制約を満たさない矩形を、長辺の中央で最大 steps 回まで再分割します。

    毎ステップ先頭から走査し、最初に違反している矩形を分割する。分割位置は決定的なので
    rng は消費しない（呼び出し側の乱数列の位置を変えないため、引数としてのみ受け取る）。
    """
    if steps < 0:
        raise ValueError(f"リファイン回数は0以上である必要があります: {steps}")
    g = normalized_ratio(aspect_ratio)
    rects = list(p.rects)
    budget = steps

    while budget > 0:
        idx = next((i for i, r in enumerate(rects) if not satisfies_aspect(r, g)), None)
        if idx is None:
            break
        target = rects[idx]
        direction = SplitDirection.VERTICAL if target.w >= target.h else SplitDirection.HORIZONTAL
        offset = _refine_offset(split_extent(target, direction))
        rects[idx:idx + 1] = split_rect(target, direction, offset)
        budget -= 1

    logger.debug("refine: %d -> %d rects (%d steps used)", len(p.rects), len(rects), steps - budget)
    if budget == steps:
        return p
    return Partition(image_width=p.image_width, image_height=p.image_height, rects=rects)
