from __future__ import annotations

import io
import zlib

import numpy as np
import png

from core.exceptions import MalformedImageError, UnsupportedFormatError
from core.schemas import Image

from .types import ImageCodec, ImageFileFormat

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


class PngCodec(ImageCodec):
    """8-bit grayscale / RGB PNG via pypng. Alpha, palette and 16-bit are rejected."""

    format = ImageFileFormat.PNG

    @staticmethod
    def sniff(head: bytes) -> bool:
        return head[:8] == _PNG_SIGNATURE

    def decode(self, data: bytes) -> Image:
        try:
            width, height, rows, info = png.Reader(bytes=data).read()
            if info.get("palette"):
                raise UnsupportedFormatError("palette PNGs are not supported")
            if info.get("alpha"):
                raise UnsupportedFormatError("PNGs with an alpha channel are not supported")
            if info.get("bitdepth") != 8:
                raise UnsupportedFormatError(f"only 8-bit PNGs are supported (got {info.get('bitdepth')})")
            planes = int(info.get("planes", 1))
            arr = np.vstack([np.asarray(row, dtype=np.uint8) for row in rows])
        except (png.Error, zlib.error) as e:
            raise MalformedImageError(f"broken PNG: {e}") from e
        return Image(pixels=arr.reshape(height, width, planes))

    def encode(self, img: Image) -> bytes:
        writer = png.Writer(
            width=img.width,
            height=img.height,
            greyscale=img.channels == 1,
            bitdepth=8,
        )
        rows = img.pixels.reshape(img.height, img.width * img.channels).tolist()
        buf = io.BytesIO()
        writer.write(buf, rows)
        return buf.getvalue()
