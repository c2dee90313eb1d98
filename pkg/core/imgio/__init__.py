"""Image file I/O (PNG via pypng, binary PGM/PPM).

PGM/PPM keep golden-file tests bit-exact; PNG is for everyday use.
"""

from .factory import codec_for, decode_image, detect_format, encode_image, load_image, save_image
from .types import ImageFileFormat
