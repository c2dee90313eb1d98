from pathlib import Path

import numpy as np
import pytest

from core.imgio import ImageFileFormat, save_image
from core.rng import make_rng
from core.schemas import Image

SHIPPED_SCHEMA_DIR = Path(__file__).resolve().parent.parent / "schemas"

_JSON_TYPES = {
    "object": lambda v: isinstance(v, dict),
    "array": lambda v: isinstance(v, list),
    "string": lambda v: isinstance(v, str),
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
    "boolean": lambda v: isinstance(v, bool),
    "null": lambda v: v is None,
}


@pytest.fixture(autouse=True)
def _clear_seed_env(monkeypatch):
    # ローカルの .env / 環境変数に結果が左右されないようにする
    monkeypatch.delenv("UNPROP_SEED", raising=False)


def random_image(width: int, height: int, channels: int = 3, seed: int = 0) -> Image:
    rng = make_rng(seed)
    return Image(pixels=rng.integers(0, 256, size=(height, width, channels), dtype=np.uint8))


@pytest.fixture
def rgb_image() -> Image:
    return random_image(32, 24, 3, seed=1)


@pytest.fixture
def gray_image() -> Image:
    return random_image(20, 16, 1, seed=2)


@pytest.fixture
def image_dir(tmp_path):
    """PPM 3枚と PGM 1枚を置いた入力ディレクトリ"""
    d = tmp_path / "inputs"
    for i in range(3):
        save_image(random_image(24 + i, 20, 3, seed=10 + i), d / f"img{i}.ppm", ImageFileFormat.PPM_BINARY)
    save_image(random_image(18, 22, 1, seed=20), d / "gray.pgm", ImageFileFormat.PPM_BINARY)
    return d


def schema_errors(instance, schema: dict, root: dict = None, path: str = "$") -> list:
    """JSON Schema のうち型・必須キー・enum・数値範囲・$ref・anyOf だけを見る簡易チェック"""
    root = root if root is not None else schema
    if "$ref" in schema:
        name = schema["$ref"].rsplit("/", 1)[-1]
        return schema_errors(instance, root["$defs"][name], root, path)
    if "anyOf" in schema:
        if any(not schema_errors(instance, branch, root, path) for branch in schema["anyOf"]):
            return []
        return [f"{path}: anyOf のどれにも一致しません"]

    expected = schema.get("type")
    if expected and not _JSON_TYPES[expected](instance):
        return [f"{path}: {expected} ではありません: {instance!r}"]
    errors = []
    if "enum" in schema and instance not in schema["enum"]:
        errors.append(f"{path}: {instance!r} は {schema['enum']} に含まれません")
    if expected in ("integer", "number"):
        if "minimum" in schema and instance < schema["minimum"]:
            errors.append(f"{path}: {instance} < {schema['minimum']}")
        if "maximum" in schema and instance > schema["maximum"]:
            errors.append(f"{path}: {instance} > {schema['maximum']}")
        if "exclusiveMinimum" in schema and instance <= schema["exclusiveMinimum"]:
            errors.append(f"{path}: {instance} <= {schema['exclusiveMinimum']}")
    if expected == "object":
        errors += [f"{path}: {key} がありません" for key in schema.get("required", []) if key not in instance]
        for key, sub in schema.get("properties", {}).items():
            if key in instance:
                errors += schema_errors(instance[key], sub, root, f"{path}.{key}")
    if expected == "array" and "items" in schema:
        for i, item in enumerate(instance):
            errors += schema_errors(item, schema["items"], root, f"{path}[{i}]")
    return errors
