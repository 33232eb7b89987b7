"""Image ingestion, patch extraction, noise and synthetic images."""

from additive_unet.data.fetch import KODAK_NAMES, fetch_dataset
from additive_unet.data.images import (
    GrayImage,
    image_id,
    list_images,
    load_image,
    save_image,
)
from additive_unet.data.patches import (
    PatchBatch,
    corrupt,
    extract_patches,
    noise_seed,
    patch_corners,
    stack_patches,
)
from additive_unet.data.synth import SynthKind, synth_dataset, synth_image

__all__ = [
    # Images
    "GrayImage",
    "load_image",
    "save_image",
    "list_images",
    "image_id",
    # Patches and noise
    "PatchBatch",
    "extract_patches",
    "patch_corners",
    "stack_patches",
    "corrupt",
    "noise_seed",
    # Synthetic data
    "SynthKind",
    "synth_image",
    "synth_dataset",
    # Download
    "fetch_dataset",
    "KODAK_NAMES",
]
