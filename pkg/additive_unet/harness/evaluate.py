"""Evaluation and qualitative denoising commands."""

from __future__ import annotations

import os
import time
from dataclasses import asdict

from additive_unet.config import get_messages
from additive_unet.data import GrayImage, fetch_dataset, image_id, list_images, load_image, save_image
from additive_unet.errors import DataError
from additive_unet.harness.config import EvalConfig
from additive_unet.harness.manifest import RunManifest, metrics_entries
from additive_unet.harness.train import load_images
from additive_unet.metrics import (
    MetricsReport,
    denoise,
    evaluate_model,
    evaluate_noisy,
    format_sigma,
    make_eval_set,
    write_rows_csv,
    write_table_csv,
)
from additive_unet.model import Checkpoint, load_checkpoint
from additive_unet.run_logger import RunLogger

PER_IMAGE_FILE = "metrics_per_image.csv"
TABLE_FILE = "metrics_table.csv"
EVAL_MANIFEST_FILE = "eval_manifest.json"


def _model_ids(paths: list[str], checkpoints: list[Checkpoint]) -> list[str]:
    """Model labels; repeated labels get the checkpoint's file stem appended."""
    labels = [c.config.label for c in checkpoints]
    ids = []
    for path, label in zip(paths, labels):
        if labels.count(label) > 1:
            parent = os.path.basename(os.path.dirname(os.path.abspath(path)))
            label = f"{label} [{parent}/{image_id(path)}]"
        ids.append(label)
    return ids


def cmd_eval(
    checkpoints: list[str],
    eval_config: EvalConfig,
    output_dir: str,
    verbose: bool = True,
    lang: str = "en",
) -> MetricsReport:
    """
    Score each checkpoint at every configured sigma.

    Writes per-image and aggregate CSVs plus an eval manifest to `output_dir`;
    with `write_images` the denoised outputs go under `output_dir/images`.
    Every model sees the same noisy observations for a given sigma.
    """
    msgs = get_messages(lang)
    if not checkpoints:
        raise DataError("eval needs at least one checkpoint")
    if not eval_config.has_images:
        raise DataError("eval needs dataset_dir or synth images")

    started = time.perf_counter()
    loaded = [load_checkpoint(p) for p in checkpoints]
    model_ids = _model_ids(checkpoints, loaded)
    images = load_images(eval_config.dataset_dir, eval_config.synth)

    run_config = {
        "checkpoints": [os.path.abspath(p) for p in checkpoints],
        "model_ids": model_ids,
        "eval": asdict(eval_config),
    }
    logger = RunLogger(output_dir)
    logger.start_session("eval", run_config)

    if verbose:
        print("=" * 50)
        print(f"{msgs['eval']}: {len(loaded)} x {len(eval_config.sigma_list)} x {len(images)}")
        print("=" * 50)

    report = MetricsReport()
    for sigma in eval_config.sigma_list:
        eval_set = make_eval_set(images, sigma, eval_config.seed)
        if eval_config.include_noisy:
            report.extend(evaluate_noisy(eval_set, sigma))
        for checkpoint, model_id in zip(loaded, model_ids):
            rows = evaluate_model(checkpoint.params, eval_set, sigma, model_id=model_id)
            report.extend(rows)
            if eval_config.write_images:
                _write_denoised(checkpoint, model_id, eval_set, sigma, output_dir)
            if verbose:
                psnr_db = sum(r.psnr_db for r in rows) / len(rows)
                ssim = sum(r.ssim for r in rows) / len(rows)
                print(f"  {model_id:<32} {msgs['sigma']} {format_sigma(sigma):>3}  "
                      f"PSNR {psnr_db:.2f} dB  SSIM {ssim:.4f}")

    aggregates = report.aggregates()
    write_rows_csv(report, os.path.join(output_dir, PER_IMAGE_FILE))
    write_table_csv(aggregates, os.path.join(output_dir, TABLE_FILE))

    elapsed = time.perf_counter() - started
    manifest = RunManifest(
        command="eval",
        config=run_config,
        wall_clock_seconds=elapsed,
        final_metrics=metrics_entries(aggregates),
        extra={"per_image": os.path.join(output_dir, PER_IMAGE_FILE)},
    )
    manifest.write(os.path.join(output_dir, EVAL_MANIFEST_FILE))
    logger.end_session("done", rows=len(report.rows))
    if verbose:
        print(f"{msgs['output_dir']}: {output_dir}")
        print(f"{msgs['elapsed']}: {elapsed:.1f}s")
        print("=" * 50)
    return report


def _write_denoised(checkpoint, model_id, eval_set, sigma, output_dir) -> None:
    folder = os.path.join(
        output_dir, "images", _slug(model_id), f"sigma{format_sigma(sigma)}"
    )
    for item in eval_set:
        save_image(denoise(checkpoint.params, item.noisy), os.path.join(folder, f"{item.image_id}.png"))


def _slug(text: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in text).strip("_")


def _input_paths(inputs: list[str]) -> list[str]:
    paths: list[str] = []
    for item in inputs:
        if os.path.isdir(item):
            paths += list_images(item)
        elif os.path.isfile(item):
            paths.append(item)
        else:
            raise DataError(f"input not found: {item}")
    return paths


def cmd_denoise(
    checkpoint: str,
    inputs: list[str],
    output_dir: str,
    sigma: float = 0.0,
    seed: int = 0,
    verbose: bool = True,
    lang: str = "en",
) -> list[str]:
    """
    Denoise images for visual comparison.

    With sigma > 0 the inputs are treated as clean and corrupted first, and
    the clipped noisy image is saved next to the result. Returns written paths.
    """
    msgs = get_messages(lang)
    loaded = load_checkpoint(checkpoint)
    images = [(image_id(p), load_image(p)) for p in _input_paths(inputs)]
    written: list[str] = []
    eval_set = make_eval_set(images, sigma, seed)
    for item in eval_set:
        if sigma > 0:
            noisy_path = os.path.join(output_dir, f"{item.image_id}_noisy.png")
            written.append(save_image(GrayImage.clipped(item.noisy), noisy_path))
        restored = denoise(loaded.params, item.noisy)
        written.append(save_image(restored, os.path.join(output_dir, f"{item.image_id}_denoised.png")))
    if verbose:
        print(f"{msgs['denoise']}: {len(eval_set)} {msgs['images']} -> {output_dir}")
    return written


def cmd_fetch_dataset(
    base_url: str, dest: str, names: list[str] | None = None, verbose: bool = True, lang: str = "en"
) -> list[str]:
    """Download the evaluation images into `dest` and check each one decodes."""
    msgs = get_messages(lang)
    paths = fetch_dataset(base_url, dest, names=names)
    for path in paths:
        load_image(path)
    if verbose:
        print(f"{msgs['fetch']}: {len(paths)} {msgs['images']} -> {dest}")
    return paths
