from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import NotAppliedError
from core.geometry import rect_area
from core.logging_config import logger
from core.partitioner import generate_partition, refine_partition
from core.resampler import resize_pixels
from core.rng import RandomStream, fisher_yates, make_rng, random_unit, stream_for
from core.schemas import (
    AugmentationRecord,
    Image,
    Partition,
    Permutation,
    Rect,
    ResizeParams,
    UnpropParams,
)

# (矩形数, rng) -> Permutation。テストでは恒等置換などを注入する
PermutationFn = Callable[[int, RandomStream], Permutation]


def apply_permutation(img: Image, partition: Partition, permutation: Permutation) -> Image:
    """
    矩形 j の内容を、矩形 mapping[j] の寸法にリサイズして書き込みます。

    分割の形状は変わらず、内容だけが移動する（出力サイズ = 入力サイズ）。
    """
    if (img.width, img.height) != (partition.image_width, partition.image_height):
        raise ValueError(
            f"画像サイズ {img.width}x{img.height} と分割 {partition.image_width}x{partition.image_height} が一致しません"
        )
    if len(permutation) != len(partition):
        raise ValueError(f"置換の長さが矩形数と一致しません: {len(permutation)} != {len(partition)}")

    src = img.pixels
    out = np.empty_like(src)
    for j, target in enumerate(permutation.mapping):
        s = partition.rects[j]
        d = partition.rects[target]
        s_rows, s_cols = s.slices()
        d_rows, d_cols = d.slices()
        out[d_rows, d_cols] = resize_pixels(src[s_rows, s_cols], d.w, d.h)
    return Image(pixels=out)


def plan_unprop(
    width: int,
    height: int,
    params: UnpropParams,
    rng: RandomStream,
    permutation_fn: PermutationFn = fisher_yates,
) -> AugmentationRecord:
    """
    画素に触れずに、ゲート判定・分割・置換だけを決めます。

    乱数の消費順: ゲート P' → 分割生成 → 置換。P' はスキップ時も必ず最初に引く。
    """
    p_prime = random_unit(rng)
    if not p_prime < params.apply_prob:
        return AugmentationRecord(applied=False, params=params)

    partition = generate_partition(width, height, params.target_rects, rng)
    partition = refine_partition(partition, params.aspect_ratio, params.refine_steps, rng)
    permutation = permutation_fn(len(partition), rng)
    return AugmentationRecord(applied=True, params=params, partition=partition, permutation=permutation)


def unprop(
    img: Image,
    params: UnpropParams,
    rng: RandomStream,
    permutation_fn: PermutationFn = fisher_yates,
) -> Tuple[Image, AugmentationRecord]:
    """
    Unproportional mosaicing を1枚の画像に適用します。

    Returns:
        (出力画像, 適用記録)。確率 1-P で入力をそのまま返し applied=False。
    """
    record = plan_unprop(img.width, img.height, params, rng, permutation_fn)
    if not record.applied:
        return img, record
    return apply_permutation(img, record.partition, record.permutation), record


# ------------------------------------------------------------
# Grid shuffle baseline
# ------------------------------------------------------------

def grid_partition(width: int, height: int, rows: int, cols: int) -> Partition:
    """等幅・等高のグリッド。余りの画素は最終行・最終列のセルに含める。"""
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError(f"グリッドは2セル以上である必要があります: {rows}x{cols}")
    if width < cols or height < rows:
        raise ValueError(f"画像 {width}x{height} は {rows}x{cols} のグリッドに分割できません")

    cell_w, cell_h = width // cols, height // rows
    rects: List[Rect] = []
    for r in range(rows):
        h = cell_h if r < rows - 1 else height - cell_h * (rows - 1)
        for c in range(cols):
            w = cell_w if c < cols - 1 else width - cell_w * (cols - 1)
            rects.append(Rect(x=c * cell_w, y=r * cell_h, w=w, h=h))
    return Partition(image_width=width, image_height=height, rects=rects)


def shuffle_grid_cells(
    img: Image,
    rows: int,
    cols: int,
    rng: RandomStream,
    permutation_fn: PermutationFn = fisher_yates,
) -> Tuple[Image, Partition, Permutation]:
    """grid_shuffle の詳細版（マニフェストや可視化用に分割と置換も返す）"""
    partition = grid_partition(img.width, img.height, rows, cols)
    permutation = permutation_fn(len(partition), rng)
    return apply_permutation(img, partition, permutation), partition, permutation


def grid_shuffle(img: Image, rows: int, cols: int, rng: RandomStream) -> Image:
    """rows×cols のグリッドのセル内容を一様ランダムに入れ替える。"""
    out, _, _ = shuffle_grid_cells(img, rows, cols, rng)
    return out


# ------------------------------------------------------------
# Augmentation (in)consistency
# ------------------------------------------------------------

def resize_params(partition: Partition, permutation: Permutation) -> List[ResizeParams]:
    """各矩形の θ（元の寸法 → 移動先の寸法）"""
    params = []
    for j, target in enumerate(permutation.mapping):
        s, d = partition.rects[j], partition.rects[target]
        params.append(ResizeParams(src_w=s.w, src_h=s.h, dst_w=d.w, dst_h=d.h))
    return params


def _require_applied(rec: AugmentationRecord) -> None:
    if not rec.applied:
        raise NotAppliedError("拡張が適用されていないレコードです（applied=false）")


def is_augmentation_inconsistent(rec: AugmentationRecord) -> bool:
    """異なる θ を持つ矩形の組が存在すれば True（幾何的な整合性が崩れている）。"""
    _require_applied(rec)
    scales = {p.scale for p in resize_params(rec.partition, rec.permutation)}
    return len(scales) > 1


def geometric_order_violations(rec: AugmentationRecord) -> List[Tuple[int, int]]:
    """|R_i| <= |R_j| なのに拡張後 |a(R_i)| > |a(R_j)| となる (i, j) の組"""
    _require_applied(rec)
    rects = rec.partition.rects
    src_areas = [rect_area(r) for r in rects]
    dst_areas = [rect_area(rects[t]) for t in rec.permutation.mapping]
    violations = []
    for i in range(len(rects)):
        for j in range(len(rects)):
            if i != j and src_areas[i] <= src_areas[j] and dst_areas[i] > dst_areas[j]:
                violations.append((i, j))
    return violations


def is_intensity_consistent(
    before: Image,
    after: Image,
    pairs: Optional[Sequence[Tuple[Tuple[int, int], Tuple[int, int]]]] = None,
    rng: Optional[RandomStream] = None,
    samples: int = 1000,
) -> bool:
    """
    画素値の大小関係が保たれているかを画素ペアで調べます。

    Args:
        before, after: 同じ寸法の画像
        pairs: ((x1, y1), (x2, y2)) のリスト。None なら rng で samples 組を抽出
    """
    if before.pixels.shape != after.pixels.shape:
        raise ValueError("比較する画像の寸法が一致しません")

    if pairs is None:
        rng = rng if rng is not None else make_rng(0)
        xs = rng.integers(0, before.width, size=(samples, 2))
        ys = rng.integers(0, before.height, size=(samples, 2))
    else:
        if not pairs:
            return True
        xs = np.array([[p1[0], p2[0]] for p1, p2 in pairs])
        ys = np.array([[p1[1], p2[1]] for p1, p2 in pairs])

    b1 = before.pixels[ys[:, 0], xs[:, 0]].astype(np.int16)
    b2 = before.pixels[ys[:, 1], xs[:, 1]].astype(np.int16)
    a1 = after.pixels[ys[:, 0], xs[:, 0]].astype(np.int16)
    a2 = after.pixels[ys[:, 1], xs[:, 1]].astype(np.int16)
    broken = (b1 <= b2) & (a1 > a2)
    return not bool(broken.any())


def inconsistency_rate(
    trials: int,
    params: UnpropParams,
    seed: int,
    width: int = 64,
    height: int = 64,
) -> float:
    """常に適用した（P=1）記録 trials 件のうち、幾何的に不整合なものの割合"""
    forced = params.model_copy(update={"apply_prob": 1.0})
    inconsistent = 0
    for t in range(trials):
        rec = plan_unprop(width, height, forced, stream_for(seed, t))
        inconsistent += is_augmentation_inconsistent(rec)
    rate = inconsistent / trials if trials else 0.0
    logger.debug("inconsistency rate %.4f over %d trials", rate, trials)
    return rate


class UnpropTransform:
    """
    学習パイプライン用の呼び出し可能オブジェクト（H×W×C または H×W の uint8 配列を入出力）。

    自身の乱数列を持つので、同じ params.seed なら同じ順序で同じ結果になる。
    """

    def __init__(self, params: Optional[UnpropParams] = None, **overrides):
        base = params or UnpropParams()
        self.params = UnpropParams(**{**base.model_dump(), **overrides}) if overrides else base
        self._rng = make_rng(self.params.seed)
        self.last_record: Optional[AugmentationRecord] = None

    def __call__(self, array: np.ndarray) -> np.ndarray:
        squeeze = np.asarray(array).ndim == 2
        out, self.last_record = unprop(Image(pixels=array), self.params, self._rng)
        return out.pixels[:, :, 0].copy() if squeeze else out.pixels.copy()

    def __repr__(self) -> str:
        p = self.params
        return (
            f"UnpropTransform(aspect_ratio={p.aspect_ratio}, target_rects={p.target_rects}, "
            f"refine_steps={p.refine_steps}, apply_prob={p.apply_prob})"
        )
