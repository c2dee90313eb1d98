from __future__ import annotations

from abc import ABC, abstractmethod
from enum import Enum
from pathlib import Path

from core.schemas import Image


class ImageFileFormat(Enum):
    PNG = "png"
    PPM_BINARY = "ppm_binary"

    @classmethod
    def from_path(cls, path: str | Path) -> "ImageFileFormat":
        """Pick the format from a file suffix (.png, .ppm/.pgm/.pnm)."""
        suffix = Path(path).suffix.lower()
        if suffix == ".png":
            return cls.PNG
        if suffix in {".ppm", ".pgm", ".pnm"}:
            return cls.PPM_BINARY
        raise ValueError(f"unknown image suffix: {suffix!r} (expected .png, .ppm, .pgm)")

    def suffix_for(self, channels: int) -> str:
        if self is ImageFileFormat.PNG:
            return ".png"
        return ".pgm" if channels == 1 else ".ppm"


class ImageCodec(ABC):
    """Encode/decode a single 8-bit gray or RGB image to/from bytes."""

    format: ImageFileFormat

    @abstractmethod
    def decode(self, data: bytes) -> Image: ...

    @abstractmethod
    def encode(self, img: Image) -> bytes: ...

    @staticmethod
    @abstractmethod
    def sniff(head: bytes) -> bool:
        """True when the leading bytes look like this codec's format."""
