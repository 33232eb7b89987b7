"""Procedural test images, so training and tests need no dataset."""

from __future__ import annotations

from enum import Enum

import numpy as np

from additive_unet.data.images import GrayImage


class SynthKind(str, Enum):
    GRADIENT = "gradient"
    CHECKERS = "checkers"
    GAUSSIAN_BLOBS = "gaussian_blobs"
    STRIPES = "stripes"


def _normalize(values: np.ndarray) -> np.ndarray:
    low, high = values.min(), values.max()
    if high == low:
        return np.zeros_like(values)
    return (values - low) / (high - low)


def synth_image(
    kind: SynthKind | str,
    h: int,
    w: int,
    seed: int = 0,
    period: int = 8,
    frequency: float = 0.125,
) -> GrayImage:
    """
    Build a deterministic structured image.

    Args:
        kind: gradient, checkers, gaussian_blobs or stripes.
        h: Height, at least 16.
        w: Width, at least 16.
        seed: Seed for the randomized kinds (blobs).
        period: Square side for checkers.
        frequency: Stripe frequency in cycles per pixel along the columns.
    """
    kind = SynthKind(kind)
    if h < 16 or w < 16:
        raise ValueError(f"synthetic images must be at least 16x16, got {h}x{w}")
    rows, cols = np.mgrid[0:h, 0:w].astype(np.float64)

    if kind is SynthKind.GRADIENT:
        pixels = (rows / (h - 1) + cols / (w - 1)) / 2.0
    elif kind is SynthKind.CHECKERS:
        pixels = ((rows // period + cols // period) % 2).astype(np.float64)
    elif kind is SynthKind.STRIPES:
        pixels = 0.5 + 0.5 * np.cos(2.0 * np.pi * frequency * cols)
    else:
        rng = np.random.default_rng(seed)
        field = np.zeros((h, w))
        for _ in range(6):
            cy, cx = rng.uniform(0, h), rng.uniform(0, w)
            spread = rng.uniform(min(h, w) / 16.0, min(h, w) / 4.0)
            amplitude = rng.uniform(-1.0, 1.0)
            field += amplitude * np.exp(
                -((rows - cy) ** 2 + (cols - cx) ** 2) / (2.0 * spread**2)
            )
        # hard-edged rectangles add the high-frequency content
        for _ in range(3):
            top, left = rng.integers(0, h - 4), rng.integers(0, w - 4)
            bottom = top + rng.integers(4, max(5, h // 3))
            right = left + rng.integers(4, max(5, w // 3))
            field[top:bottom, left:right] += rng.uniform(-0.6, 0.6)
        pixels = _normalize(field)
    return GrayImage(np.clip(pixels, 0.0, 1.0))


def synth_dataset(count: int, h: int, w: int, seed: int = 0) -> list[tuple[str, GrayImage]]:
    """`count` images cycling through every kind with seeded variations.

    Returns (image_id, image) pairs named ``synth_000``, ``synth_001``, ...
    """
    rng = np.random.default_rng([seed, 0x5EED])
    kinds = list(SynthKind)
    images = []
    for i in range(count):
        kind = kinds[i % len(kinds)]
        image = synth_image(
            kind,
            h,
            w,
            seed=int(rng.integers(0, 2**31)),
            period=int(rng.integers(3, 12)),
            frequency=float(rng.uniform(0.02, 0.2)),
        )
        images.append((f"synth_{i:03d}", image))
    return images
