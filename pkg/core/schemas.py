from enum import Enum
from fractions import Fraction
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core import config
from core.exceptions import PartitionValidationError


class Image(BaseModel):
    """H×W×C の 8bit 画素バッファ（C は 1 または 3）。

    pixels は読み取り専用の uint8 配列として保持する。
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pixels: np.ndarray

    @field_validator("pixels", mode="before")
    @classmethod
    def validate_pixels(cls, v) -> np.ndarray:
        arr = np.asarray(v)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3:
            raise ValueError(f"画素配列は H×W×C である必要があります: shape={arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"幅・高さは1以上である必要があります: shape={arr.shape}")
        if arr.shape[2] not in (1, 3):
            raise ValueError(f"チャンネル数は1または3のみ対応しています: {arr.shape[2]}")
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError(f"整数型の画素のみ対応しています: {arr.dtype}")
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("画素値は0〜255の範囲である必要があります")
        out = np.array(arr, dtype=np.uint8, copy=True, order="C")
        out.setflags(write=False)
        return out

    @classmethod
    def from_bytes(cls, width: int, height: int, channels: int, data: bytes) -> "Image":
        """行優先の生バイト列から Image を作る。"""
        expected = width * height * channels
        if width < 1 or height < 1:
            raise ValueError(f"幅・高さは1以上である必要があります: {width}x{height}")
        if len(data) != expected:
            raise ValueError(f"データ長が一致しません: {len(data)} != {expected}")
        arr = np.frombuffer(data, dtype=np.uint8).reshape(height, width, channels)
        return cls(pixels=arr)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def channels(self) -> int:
        return int(self.pixels.shape[2])

    @property
    def data(self) -> bytes:
        return self.pixels.tobytes()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    __hash__ = None


class Rect(BaseModel):
    """左上 (x, y) と幅・高さ (w, h) で表す軸平行矩形。座標は常に絶対座標。"""

    model_config = ConfigDict(frozen=True)

    x: int = Field(ge=0)
    y: int = Field(ge=0)
    w: int = Field(ge=1)
    h: int = Field(ge=1)

    @classmethod
    def of(cls, x: int, y: int, w: int, h: int) -> "Rect":
        return cls(x=x, y=y, w=w, h=h)

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    @property
    def dims(self) -> Tuple[int, int]:
        return (self.w, self.h)

    def fits_in(self, width: int, height: int) -> bool:
        return self.right <= width and self.bottom <= height

    def slices(self) -> Tuple[slice, slice]:
        """numpy の [行, 列] インデックス用スライス"""
        return slice(self.y, self.bottom), slice(self.x, self.right)

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.x, self.y, self.w, self.h)


class Partition(BaseModel):
    """画像を覆う矩形の順序付きリスト。

    タイル張りの検証は validate_partition で行う（破損した分割も報告できるように、
    通常の構築では検証しない）。検証付きで作る場合は checked() を使う。
    """

    model_config = ConfigDict(frozen=True)

    image_width: int = Field(ge=1)
    image_height: int = Field(ge=1)
    rects: List[Rect]

    @classmethod
    def checked(cls, image_width: int, image_height: int, rects: List[Rect]) -> "Partition":
        from core.geometry import validate_partition

        partition = cls(image_width=image_width, image_height=image_height, rects=list(rects))
        if len(partition.rects) < 2:
            raise PartitionValidationError(f"矩形は2つ以上必要です: {len(partition.rects)}")
        report = validate_partition(partition)
        if not report.ok:
            raise PartitionValidationError(report.message)
        return partition

    def __len__(self) -> int:
        return len(self.rects)


class ViolationKind(str, Enum):
    GAP = "gap"
    OVERLAP = "overlap"
    OUT_OF_BOUNDS = "out_of_bounds"


class PartitionReport(BaseModel):
    """validate_partition の結果。例外ではなく値として違反を返す。"""

    ok: bool
    kind: Optional[ViolationKind] = None
    message: str = ""
    pixel: Optional[Tuple[int, int]] = None  # (x, y)
    rect_indices: Optional[Tuple[int, ...]] = None

    def __bool__(self) -> bool:
        return self.ok


class UnpropParams(BaseModel):
    """アスペクト比 G・目標矩形数 N・リファイン回数 J・適用確率 P とシード"""

    model_config = ConfigDict(frozen=True)

    aspect_ratio: float = Field(default=config.DEFAULT_ASPECT_RATIO, gt=0, allow_inf_nan=False)
    target_rects: int = Field(default=config.DEFAULT_TARGET_RECTS, ge=2)
    refine_steps: int = Field(default=config.DEFAULT_REFINE_STEPS, ge=0)
    apply_prob: float = Field(default=config.DEFAULT_APPLY_PROB, ge=0.0, le=1.0)
    seed: int = Field(default=config.DEFAULT_SEED, ge=0, le=config.SEED_MAX)

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "UnpropParams":
        if name not in config.PRESETS:
            raise ValueError(f"未知のプリセットです: {name}（{', '.join(sorted(config.PRESETS))}）")
        values = dict(config.PRESETS[name])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class Permutation(BaseModel):
    """矩形インデックスの全単射。mapping[j] は矩形 j の内容の移動先。"""

    model_config = ConfigDict(frozen=True)

    mapping: List[int]

    @field_validator("mapping")
    @classmethod
    def validate_bijection(cls, v: List[int]) -> List[int]:
        if sorted(v) != list(range(len(v))):
            raise ValueError(f"mapping が全単射になっていません: {v}")
        return v

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(mapping=list(range(n)))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.mapping))

    def __len__(self) -> int:
        return len(self.mapping)


class ResizeParams(BaseModel):
    """1つの矩形内容に掛かる θ（元の寸法 → 移動先の寸法）"""

    model_config = ConfigDict(frozen=True)

    src_w: int = Field(ge=1)
    src_h: int = Field(ge=1)
    dst_w: int = Field(ge=1)
    dst_h: int = Field(ge=1)

    @property
    def scale(self) -> Tuple[Fraction, Fraction]:
        return (Fraction(self.dst_w, self.src_w), Fraction(self.dst_h, self.src_h))

    def is_identity(self) -> bool:
        return self.src_w == self.dst_w and self.src_h == self.dst_h


class AugmentationRecord(BaseModel):
    """1回の unprop 適用の記録"""

    applied: bool
    params: UnpropParams
    partition: Optional[Partition] = None
    permutation: Optional[Permutation] = None

    @model_validator(mode="after")
    def validate_applied_fields(self):
        if not self.applied:
            if self.partition is not None or self.permutation is not None:
                raise ValueError("適用されていないレコードに分割・置換は持てません")
            return self
        if self.partition is None or self.permutation is None:
            raise ValueError("適用済みレコードには分割と置換が必要です")
        if len(self.permutation) != len(self.partition):
            raise ValueError(
                f"置換の長さが矩形数と一致しません: {len(self.permutation)} != {len(self.partition)}"
            )
        return self


# ------------------------------------------------------------
# Run manifest
# ------------------------------------------------------------

class GridSpec(BaseModel):
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)


class ManifestEntry(BaseModel):
    index: int = Field(ge=0)
    input_path: str
    output_path: Optional[str] = None
    stream_seed: int = Field(ge=0, le=config.SEED_MAX)
    applied: bool = False
    image_width: Optional[int] = None
    image_height: Optional[int] = None
    rects: Optional[List[Rect]] = None
    permutation: Optional[List[int]] = None
    output_sha256: Optional[str] = None
    error: Optional[str] = None

    def to_partition(self) -> Partition:
        if not self.rects or self.image_width is None or self.image_height is None:
            raise ValueError(f"エントリ {self.index} に分割情報がありません")
        return Partition(image_width=self.image_width, image_height=self.image_height, rects=self.rects)


class RunManifest(BaseModel):
    tool_version: str
    command: str
    mode: Literal["unprop", "grid"] = "unprop"
    params: UnpropParams
    grid: Optional[GridSpec] = None
    entries: List[ManifestEntry] = Field(default_factory=list)


# ------------------------------------------------------------
# Benchmark report
# ------------------------------------------------------------

class ProbePoint(BaseModel):
    p: float = Field(ge=0.0, le=1.0)
    mean_ms: float = Field(ge=0.0)
    std_ms: Optional[float] = None
    reps: int = Field(ge=1)


class BenchReport(BaseModel):
    tool_version: str
    image_size: int = Field(ge=1)
    channels: int
    warmup: int = Field(ge=0)
    probes: List[ProbePoint]
    slope: float
    intercept: float
    r_squared: float
    baseline_ms: Optional[float] = None

    @field_validator("probes")
    @classmethod
    def validate_increasing(cls, v: List[ProbePoint]) -> List[ProbePoint]:
        if not v:
            raise ValueError("probe が1つもありません")
        for prev, cur in zip(v, v[1:]):
            if not cur.p > prev.p:
                raise ValueError(f"probe の P は狭義単調増加である必要があります: {prev.p} -> {cur.p}")
        return v


# ------------------------------------------------------------
# Verification summary
# ------------------------------------------------------------

class VerifySummary(BaseModel):
    trials: int = Field(ge=1)
    tiling_failures: int = 0
    count_failures: int = 0
    first_failure: Optional[str] = None
    inconsistent_fraction: float
    applied_fraction: float
    min_inconsistent_fraction: float

    @property
    def passed(self) -> bool:
        return (
            self.tiling_failures == 0
            and self.count_failures == 0
            and self.inconsistent_fraction > self.min_inconsistent_fraction
        )
