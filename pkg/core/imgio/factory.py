from __future__ import annotations

from pathlib import Path

from core.exceptions import ImageIOError, UnsupportedFormatError
from core.logging_config import logger
from core.schemas import Image

from .png_codec import PngCodec
from .pnm import PnmCodec
from .types import ImageCodec, ImageFileFormat

_CODECS: dict[ImageFileFormat, ImageCodec] = {
    ImageFileFormat.PNG: PngCodec(),
    ImageFileFormat.PPM_BINARY: PnmCodec(),
}


def codec_for(fmt: ImageFileFormat) -> ImageCodec:
    return _CODECS[fmt]


def detect_format(data: bytes) -> ImageFileFormat:
    """Identify the format from magic bytes (the file suffix is not trusted)."""
    for fmt, codec in _CODECS.items():
        if codec.sniff(data[:8]):
            return fmt
    raise UnsupportedFormatError(f"unrecognized image data (leading bytes {data[:8]!r})")


def decode_image(data: bytes) -> Image:
    return codec_for(detect_format(data)).decode(data)


def encode_image(img: Image, fmt: ImageFileFormat) -> bytes:
    return codec_for(fmt).encode(img)


def load_image(path: str | Path) -> Image:
    """Read a PNG (8-bit gray/RGB) or binary PGM/PPM file."""
    p = Path(path)
    try:
        data = p.read_bytes()
    except OSError as e:
        raise ImageIOError(f"cannot read {p}: {e}") from e
    img = decode_image(data)
    logger.debug("loaded %s (%dx%dx%d)", p, img.width, img.height, img.channels)
    return img


def save_image(img: Image, path: str | Path, fmt: ImageFileFormat | None = None) -> Path:
    """Write img; the format defaults to the one implied by the path suffix."""
    p = Path(path)
    fmt = fmt or ImageFileFormat.from_path(p)
    data = encode_image(img, fmt)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_bytes(data)
    except OSError as e:
        raise ImageIOError(f"cannot write {p}: {e}") from e
    return p
