"""Grayscale image loading and saving (PNG and binary PGM)."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from additive_unet.errors import DataError, ImageFormatError

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
IMAGE_SUFFIXES = (".png", ".pgm")

# ITU-R BT.601 luma weights
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_SIXTEEN_BIT_MODES = {"I", "I;16", "I;16B", "I;16L", "I;16N"}


@dataclass
class GrayImage:
    """Single-channel image with pixels in [0, 1], row-major [height, width]."""

    pixels: np.ndarray

    def __post_init__(self):
        self.pixels = np.asarray(self.pixels, dtype=np.float64)
        if self.pixels.ndim != 2:
            raise ValueError(f"GrayImage needs a 2-D pixel array, got shape {self.pixels.shape}")
        if self.pixels.size and (self.pixels.min() < 0.0 or self.pixels.max() > 1.0):
            raise ValueError("GrayImage pixels must lie in [0, 1]")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @classmethod
    def clipped(cls, pixels: np.ndarray) -> GrayImage:
        return cls(np.clip(pixels, 0.0, 1.0))


def _sniff(path: str) -> str:
    with open(path, "rb") as f:
        head = f.read(8)
    if head.startswith(PNG_SIGNATURE):
        return "png"
    if head[:2] == b"P5":
        return "pgm"
    raise ImageFormatError(f"{path}: unsupported image format (expected PNG or binary PGM)")


def load_image(path: str) -> GrayImage:
    """
    Load a PNG or binary PGM file as a grayscale image in [0, 1].

    8-bit samples are divided by 255, 16-bit samples by 65535. Color images
    are reduced with the 0.299/0.587/0.114 luma weights.

    Raises:
        DataError: If the file does not exist.
        ImageFormatError: If the format is unsupported or the file is truncated.
    """
    if not os.path.isfile(path):
        raise DataError(f"image not found: {path}")
    kind = _sniff(path)
    try:
        with Image.open(path) as img:
            img.load()
            mode = img.mode
            if mode in ("1", "P", "LA", "PA", "RGBA", "CMYK", "YCbCr"):
                img = img.convert("L" if mode in ("1", "LA") else "RGB")
                mode = img.mode
            array = np.asarray(img)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as e:
        raise ImageFormatError(f"{path}: cannot decode {kind.upper()} ({e})")

    if mode == "L":
        pixels = array.astype(np.float64) / 255.0
    elif mode in _SIXTEEN_BIT_MODES:
        pixels = array.astype(np.float64) / 65535.0
    elif mode == "RGB":
        rgb = array.astype(np.float64) / 255.0
        r, g, b = LUMA_WEIGHTS
        pixels = r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]
    else:
        raise ImageFormatError(f"{path}: unsupported pixel mode {mode}")
    return GrayImage(np.clip(pixels, 0.0, 1.0))


def save_image(img: GrayImage, path: str) -> str:
    """Write an 8-bit PGM (``.pgm``) or PNG (anything else) file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    quantized = np.round(np.clip(img.pixels, 0.0, 1.0) * 255.0).astype(np.uint8)
    fmt = "PPM" if path.lower().endswith(".pgm") else "PNG"
    Image.fromarray(quantized).save(path, format=fmt)
    return path


def list_images(directory: str) -> list[str]:
    """PNG/PGM files directly inside `directory`, in lexicographic order."""
    if not os.path.isdir(directory):
        raise DataError(f"image directory not found: {directory}")
    names = sorted(
        name for name in os.listdir(directory) if name.lower().endswith(IMAGE_SUFFIXES)
    )
    if not names:
        raise DataError(f"no PNG/PGM images in {directory}")
    return [os.path.join(directory, name) for name in names]


def image_id(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]
