import hashlib
import json
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ValidationError

from core import __version__
from core.augment import apply_permutation
from core.exceptions import ManifestError
from core.imgio import ImageFileFormat, load_image, save_image
from core.logging_config import logger
from core.schemas import BenchReport, Image, Permutation, RunManifest


def pixel_digest(img: Image) -> str:
    """寸法 + 画素列の SHA-256（ファイル形式に依存しない出力の同一性確認用）"""
    h = hashlib.sha256()
    h.update(f"{img.width}x{img.height}x{img.channels}:".encode("ascii"))
    h.update(img.data)
    return h.hexdigest()


def write_manifest(manifest: RunManifest, path) -> Path:
    """マニフェストを JSON として保存します。"""
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    return p


def read_manifest(path) -> RunManifest:
    """保存された JSON からマニフェストを復元します。"""
    p = Path(path)
    try:
        content = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ManifestError(f"マニフェストを読み込めません: {p}: {e}") from e
    try:
        return RunManifest.model_validate_json(content)
    except ValidationError as e:
        raise ManifestError(f"マニフェストの形式が不正です: {p}: {e}") from e


class ReplayResult(BaseModel):
    index: int
    output_path: Optional[str] = None
    matches: Optional[bool] = None  # 記録された digest が無い場合は None


def replay_manifest(manifest: RunManifest, out_dir=None) -> List[ReplayResult]:
    """
    記録された分割と置換を入力画像に再適用し、出力が一致するか確認します。

    out_dir を指定すると再生成した画像も書き出す。
    """
    if manifest.tool_version != __version__:
        logger.warning(
            "マニフェストのバージョン %s は現在の %s と異なります", manifest.tool_version, __version__
        )

    results = []
    for entry in manifest.entries:
        if entry.error:
            logger.info("entry %d はエラーで記録されているためスキップします", entry.index)
            continue
        img = load_image(entry.input_path)
        if entry.applied:
            if entry.permutation is None:
                raise ManifestError(f"entry {entry.index} に置換がありません")
            try:
                partition = entry.to_partition()
                permutation = Permutation(mapping=entry.permutation)
            except (ValueError, ValidationError) as e:
                raise ManifestError(f"entry {entry.index} の分割情報が不正です: {e}") from e
            out = apply_permutation(img, partition, permutation)
        else:
            out = img

        matches = None
        if entry.output_sha256:
            matches = pixel_digest(out) == entry.output_sha256

        written = None
        if out_dir is not None and entry.output_path:
            target = Path(out_dir) / Path(entry.output_path).name
            save_image(out, target, ImageFileFormat.from_path(target))
            written = str(target)

        results.append(ReplayResult(index=entry.index, output_path=written, matches=matches))
    return results


def export_schemas(out_dir) -> List[Path]:
    """RunManifest / BenchReport の JSON Schema を書き出す。"""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    for name, model in (("run_manifest", RunManifest), ("bench_report", BenchReport)):
        p = d / f"{name}.schema.json"
        p.write_text(json.dumps(model.model_json_schema(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
        written.append(p)
    return written
