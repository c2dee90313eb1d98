from __future__ import annotations

from typing import Tuple

import numpy as np

from core.exceptions import MalformedImageError, UnsupportedFormatError
from core.schemas import Image

from .types import ImageCodec, ImageFileFormat

_WHITESPACE = b" \t\r\n\x0b\x0c"


class PnmHeaderParser:
    """Binary PGM (P5) / PPM (P6) header reader. Comments (#...) are skipped."""

    @staticmethod
    def parse(data: bytes) -> Tuple[str, int, int, int, int]:
        """
        Returns:
            (magic, width, height, maxval, payload offset)
        """
        if len(data) < 2 or data[:2] not in (b"P5", b"P6"):
            raise UnsupportedFormatError(f"not a binary PGM/PPM file (magic={data[:2]!r})")
        magic = data[:2].decode("ascii")

        pos = 2
        fields = []
        while len(fields) < 3:
            token, pos = PnmHeaderParser._next_token(data, pos)
            if not token.isdigit():
                raise MalformedImageError(f"malformed {magic} header: expected a number, got {token!r}")
            fields.append(int(token))

        # Exactly one whitespace byte separates maxval from the raster.
        if pos >= len(data) or data[pos] not in _WHITESPACE:
            raise MalformedImageError(f"malformed {magic} header: missing separator before pixel data")
        pos += 1

        width, height, maxval = fields
        if width < 1 or height < 1:
            raise MalformedImageError(f"malformed {magic} header: size {width}x{height}")
        if maxval != 255:
            raise UnsupportedFormatError(f"only maxval 255 is supported (got {maxval})")
        return magic, width, height, maxval, pos

    @staticmethod
    def _next_token(data: bytes, pos: int) -> Tuple[str, int]:
        n = len(data)
        while pos < n:
            if data[pos] in _WHITESPACE:
                pos += 1
            elif data[pos:pos + 1] == b"#":
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                break
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise MalformedImageError("malformed PNM header: unexpected end of header")
        return data[start:pos].decode("ascii", errors="replace"), pos


class PnmCodec(ImageCodec):
    """P6 for RGB, P5 for grayscale, maxval 255. Byte-lossless."""

    format = ImageFileFormat.PPM_BINARY

    @staticmethod
    def sniff(head: bytes) -> bool:
        return head[:2] in (b"P5", b"P6")

    def decode(self, data: bytes) -> Image:
        magic, width, height, _, offset = PnmHeaderParser.parse(data)
        channels = 3 if magic == "P6" else 1
        expected = width * height * channels
        payload = data[offset:offset + expected]
        if len(payload) < expected:
            raise MalformedImageError(
                f"short read: {magic} {width}x{height} needs {expected} bytes, got {len(payload)}"
            )
        arr = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
        return Image(pixels=arr)

    def encode(self, img: Image) -> bytes:
        magic = b"P6" if img.channels == 3 else b"P5"
        header = magic + f"\n{img.width} {img.height}\n255\n".encode("ascii")
        return header + img.data
