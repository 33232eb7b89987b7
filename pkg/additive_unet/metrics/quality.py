"""PSNR and SSIM on [0, 1] grayscale images."""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import correlate2d

from additive_unet.data.images import GrayImage
from additive_unet.errors import ShapeError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _pixels(image: GrayImage | np.ndarray) -> np.ndarray:
    if isinstance(image, GrayImage):
        return image.pixels
    return np.asarray(image, dtype=np.float64)


def _pair(ref, test) -> tuple[np.ndarray, np.ndarray]:
    a, b = _pixels(ref), _pixels(test)
    if a.shape != b.shape:
        raise ShapeError(f"image shapes differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(ref: GrayImage | np.ndarray, test: GrayImage | np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB with peak 1; +inf for identical images."""
    a, b = _pair(ref, test)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Normalized 2-D Gaussian weights."""
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    g = np.exp(-(offsets**2) / (2.0 * sigma**2))
    window = np.outer(g, g)
    return window / window.sum()


def ssim_map(ref, test) -> np.ndarray:
    """Local SSIM over every fully contained 11x11 window (valid region)."""
    a, b = _pair(ref, test)
    if min(a.shape) < SSIM_WINDOW:
        raise ShapeError(
            f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {a.shape}"
        )
    window = gaussian_window()
    c1 = (SSIM_K1 * 1.0) ** 2
    c2 = (SSIM_K2 * 1.0) ** 2

    def local(values: np.ndarray) -> np.ndarray:
        return correlate2d(values, window, mode="valid")

    mu_a, mu_b = local(a), local(b)
    var_a = local(a * a) - mu_a * mu_a
    var_b = local(b * b) - mu_b * mu_b
    cov = local(a * b) - mu_a * mu_b
    numerator = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    denominator = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return numerator / denominator


def ssim(ref: GrayImage | np.ndarray, test: GrayImage | np.ndarray) -> float:
    """
    Mean structural similarity.

    Gaussian window 11x11 with sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1,
    averaged over the valid region.
    """
    return float(np.mean(ssim_map(ref, test)))
