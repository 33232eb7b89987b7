"""Whole-image denoising and scoring of a model against clean references."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from additive_unet.data import GrayImage, corrupt, noise_seed
from additive_unet.errors import NumericError
from additive_unet.metrics.quality import psnr, ssim
from additive_unet.metrics.report import MetricsRow
from additive_unet.model import ModelParams, forward
from additive_unet.tensor import Tensor

# stream key separating evaluation noise from training noise
EVAL_STREAM = 0xE7A1


@dataclass
class EvalImage:
    """A clean reference and its (unclipped) noisy observation."""

    image_id: str
    clean: GrayImage
    noisy: np.ndarray


def sigma_key(sigma: float) -> int:
    return int(round(sigma * 1000))


def make_eval_set(
    images: list[tuple[str, GrayImage]], sigma: float, seed: int
) -> list[EvalImage]:
    """
    Corrupt every image once at `sigma`.

    sigma == 0 skips corruption and feeds the clean image as the observation.
    """
    out = []
    for index, (image_id, clean) in enumerate(images):
        if sigma == 0:
            noisy = clean.pixels.copy()
        else:
            stream = noise_seed(seed, EVAL_STREAM, sigma_key(sigma), index)
            noisy = corrupt(clean.pixels, sigma, 1, stream).noisy.data[0, 0]
        out.append(EvalImage(image_id=image_id, clean=clean, noisy=noisy))
    return out


def denoise(params: ModelParams, noisy: np.ndarray) -> GrayImage:
    """Run the model on one full image and clip the result to [0, 1]."""
    output = forward(params, Tensor(noisy[None, None])).data[0, 0]
    if not np.all(np.isfinite(output)):
        raise NumericError(f"{params.config.label} produced non-finite output")
    return GrayImage.clipped(output)


def evaluate_model(
    params: ModelParams,
    eval_set: list[EvalImage],
    sigma: float,
    model_id: str | None = None,
) -> list[MetricsRow]:
    model_id = model_id or params.config.label
    rows = []
    for item in eval_set:
        restored = denoise(params, item.noisy)
        rows.append(
            MetricsRow(
                model_id=model_id,
                sigma=sigma,
                image_id=item.image_id,
                psnr_db=psnr(item.clean, restored),
                ssim=ssim(item.clean, restored),
            )
        )
    return rows


def evaluate_noisy(eval_set: list[EvalImage], sigma: float) -> list[MetricsRow]:
    """Score the clipped noisy observations themselves (model_id ``noisy``)."""
    rows = []
    for item in eval_set:
        observed = GrayImage.clipped(item.noisy)
        rows.append(
            MetricsRow(
                model_id="noisy",
                sigma=sigma,
                image_id=item.image_id,
                psnr_db=psnr(item.clean, observed),
                ssim=ssim(item.clean, observed),
            )
        )
    return rows


def mean_scores(rows: list[MetricsRow]) -> tuple[float, float]:
    n = len(rows)
    return sum(r.psnr_db for r in rows) / n, sum(r.ssim for r in rows) / n
