"""Random crops and additive white Gaussian noise."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from additive_unet.data.images import GrayImage
from additive_unet.tensor import Tensor

Seed = int | Sequence[int]


def noise_seed(run_seed: int, *keys: int) -> list[int]:
    """Entropy for one noise stream, derived from the run seed and stream keys.

    Streams keyed by (run_seed, batch_index, ...) are independent of the
    order they are generated in.
    """
    return [int(run_seed), *(int(k) for k in keys)]


@dataclass
class PatchBatch:
    """Clean/noisy pairs [B, 1, P, P]; noisy = clean + N(0, (sigma_255/255)^2), unclipped."""

    clean: Tensor
    noisy: Tensor
    sigma_255: float
    seed: Seed

    def __len__(self) -> int:
        return self.clean.shape[0]


def patch_corners(
    height: int, width: int, size: int, count: int, seed: Seed
) -> list[tuple[int, int]]:
    """Uniformly random top-left corners of `size` x `size` crops."""
    if size < 1 or size > min(height, width):
        raise ValueError(
            f"patch size {size} does not fit a {height}x{width} image"
        )
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, height - size + 1, size=count)
    cols = rng.integers(0, width - size + 1, size=count)
    return [(int(r), int(c)) for r, c in zip(rows, cols)]


def extract_patches(img: GrayImage, size: int, count: int, seed: Seed) -> list[GrayImage]:
    """
    Crop `count` random square patches from `img`.

    Raises:
        ValueError: If `size` exceeds the smaller image dimension.
    """
    corners = patch_corners(img.height, img.width, size, count, seed)
    return [GrayImage(img.pixels[r : r + size, c : c + size].copy()) for r, c in corners]


def stack_patches(patches: Sequence[GrayImage]) -> np.ndarray:
    return np.stack([p.pixels for p in patches])[:, None, :, :]


def corrupt(clean, sigma_255: float, realizations: int = 1, seed: Seed = 0) -> PatchBatch:
    """
    Add white Gaussian noise with standard deviation sigma_255 / 255.

    Args:
        clean: Tensor or array of shape [B, 1, P, P] (a single [P, P] patch or
            a list of GrayImage is also accepted).
        sigma_255: Noise level on the 0-255 scale.
        realizations: Independent noise draws per clean patch; the returned
            batch holds B * realizations samples, patch-major.
        seed: Seed (or seed sequence) for the noise generator. Gaussian
            samples come from numpy's PCG64 generator via `standard_normal`.

    Returns:
        PatchBatch with the clean patches repeated per realization.

    Raises:
        ValueError: If sigma_255 <= 0 or realizations < 1.
    """
    if not sigma_255 > 0:
        raise ValueError(f"sigma must be > 0, got {sigma_255}")
    if realizations < 1:
        raise ValueError(f"realizations must be >= 1, got {realizations}")

    if isinstance(clean, Tensor):
        array = clean.data
    elif isinstance(clean, (list, tuple)) and clean and isinstance(clean[0], GrayImage):
        array = stack_patches(clean)
    else:
        array = np.asarray(clean, dtype=np.float64)
    if array.ndim == 2:
        array = array[None, None]
    if array.ndim != 4 or array.shape[1] != 1:
        raise ValueError(f"expected clean patches [B,1,P,P], got {array.shape}")

    repeated = np.repeat(array, realizations, axis=0)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(repeated.shape) * (sigma_255 / 255.0)
    return PatchBatch(
        clean=Tensor(repeated),
        noisy=Tensor(repeated + noise),
        sigma_255=float(sigma_255),
        seed=seed,
    )
