"""Training loop: patches, noise schedule, Charbonnier loss, Adam, checkpoints."""

from __future__ import annotations

import csv
import math
import os
import time

import numpy as np

from additive_unet.config import get_messages
from additive_unet.data import (
    GrayImage,
    PatchBatch,
    corrupt,
    extract_patches,
    image_id,
    list_images,
    load_image,
    noise_seed,
    stack_patches,
    synth_dataset,
)
from additive_unet.errors import ConfigError, DataError, NumericError
from additive_unet.harness.config import RunConfig, SynthSpec, TrainConfig
from additive_unet.harness.manifest import MANIFEST_FILE, RunManifest, metrics_entries
from additive_unet.metrics import (
    MetricsReport,
    evaluate_model,
    make_eval_set,
    write_rows_csv,
    write_table_csv,
)
from additive_unet.model import (
    Checkpoint,
    ModelParams,
    build_params,
    forward,
    gate_values,
    load_checkpoint,
    parameter_count,
    save_checkpoint,
)
from additive_unet.optim import Adam
from additive_unet.run_logger import RunLogger
from additive_unet.tensor import Tensor, backward, charbonnier, recording

# seed-stream keys; each source of randomness draws from its own stream
PATCH_STREAM = 0x9A7C
SHUFFLE_STREAM = 0x5F1E
NOISE_STREAM = 0x7015

CHECKPOINT_FILE = "checkpoint.bin"
LOSS_LOG_FILE = "loss_log.csv"


def load_images(dataset_dir: str | None, synth: SynthSpec | None) -> list[tuple[str, GrayImage]]:
    """Images from a directory (lexicographic order) or the synthetic generator."""
    if dataset_dir is not None:
        return [(image_id(p), load_image(p)) for p in list_images(dataset_dir)]
    if synth is not None:
        return synth_dataset(synth.count, synth.height, synth.width, synth.seed)
    raise ConfigError("no image source configured (dataset_dir or synth)")


def build_patch_pool(images: list[tuple[str, GrayImage]], train: TrainConfig) -> np.ndarray:
    """Crop `crops_per_image` patches per image once; returns [N, 1, P, P]."""
    patches: list[GrayImage] = []
    for index, (name, image) in enumerate(images):
        if train.patch_size > min(image.height, image.width):
            raise DataError(
                f"image {name} ({image.height}x{image.width}) is smaller than patch_size {train.patch_size}"
            )
        patches += extract_patches(
            image,
            train.patch_size,
            train.crops_per_image,
            noise_seed(train.seed, PATCH_STREAM, index),
        )
    return stack_patches(patches)


class PatchSchedule:
    """
    Deterministic mapping from a step index to its training batch.

    The epoch list holds every (patch, realization) pair; it is shuffled per
    epoch and each pair's noise is drawn from its own stream keyed by
    (seed, epoch, patch, realization), so any step can be rebuilt without
    replaying the ones before it.
    """

    def __init__(self, pool: np.ndarray, train: TrainConfig):
        self.pool = pool
        self.train = train
        self.samples = pool.shape[0] * train.realizations
        self.steps_per_epoch = math.ceil(self.samples / train.batch_size)

    def total_steps(self) -> int:
        if self.train.steps is not None:
            return self.train.steps
        return self.train.epochs * self.steps_per_epoch

    def batch(self, step: int) -> PatchBatch:
        train = self.train
        epoch, position = divmod(step, self.steps_per_epoch)
        order = np.random.default_rng(noise_seed(train.seed, SHUFFLE_STREAM, epoch)).permutation(
            self.samples
        )
        chosen = order[position * train.batch_size : (position + 1) * train.batch_size]
        noise_epoch = epoch if train.renoise_each_epoch else 0

        clean, noisy = [], []
        for sample in chosen:
            patch, realization = divmod(int(sample), train.realizations)
            stream = noise_seed(train.seed, NOISE_STREAM, noise_epoch, patch, realization)
            pair = corrupt(self.pool[patch : patch + 1], train.sigma, 1, stream)
            clean.append(pair.clean.data)
            noisy.append(pair.noisy.data)

        return PatchBatch(
            clean=Tensor(np.concatenate(clean)),
            noisy=Tensor(np.concatenate(noisy)),
            sigma_255=train.sigma,
            seed=[train.seed, step],
        )


def _prepare_loss_log(path: str, start_step: int) -> None:
    """Keep rows of steps <= start_step (resume) or start a fresh file."""
    kept: list[list[str]] = []
    if start_step > 0 and os.path.exists(path):
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            next(reader, None)
            kept = [row for row in reader if row and int(row[0]) <= start_step]
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["step", "loss"])
        writer.writerows(kept)


def read_loss_log(path: str) -> list[tuple[int, float]]:
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        next(reader, None)
        return [(int(step), float(loss)) for step, loss in reader]


class Trainer:
    """
    Trains one model at one noise level.

    Args:
        config: Run configuration.
        resume: Checkpoint to continue from; must match `config.model`.
        verbose: Print progress lines.
        lang: Console language, 'en' or 'cn'.
    """

    def __init__(
        self,
        config: RunConfig,
        resume: Checkpoint | None = None,
        verbose: bool = True,
        lang: str = "en",
    ):
        self.config = config
        self.verbose = verbose
        self.msgs = get_messages(lang)
        self.sigma = config.train.sigma
        self.output_dir = config.output_dir
        self.checkpoint_path = os.path.join(self.output_dir, CHECKPOINT_FILE)
        self.loss_log_path = os.path.join(self.output_dir, LOSS_LOG_FILE)

        if resume is not None:
            if resume.config.to_dict() != config.model.to_dict():
                raise ConfigError(
                    f"checkpoint model {resume.config.to_dict()} does not match "
                    f"configured model {config.model.to_dict()}"
                )
            self.params: ModelParams = resume.params
            self.start_step = int(resume.extra.get("train_step", 0))
        else:
            self.params = build_params(config.model)
            self.start_step = 0

        named = self.params.named_tensors()
        if resume is not None and resume.optimizer is not None:
            self.optimizer = Adam(named, state=resume.optimizer)
        else:
            self.optimizer = Adam(named, lr=config.train.lr)

        images = load_images(config.train.dataset_dir, config.train.synth)
        self.schedule = PatchSchedule(build_patch_pool(images, config.train), config.train)
        self.logger = RunLogger(self.output_dir)

    def train_step(self, step: int) -> float:
        batch = self.schedule.batch(step)
        self.optimizer.zero_grad()
        with recording():
            prediction = forward(self.params, batch.noisy)
            loss = charbonnier(prediction, batch.clean, self.config.train.epsilon)
            backward(loss)
        value = loss.item()
        if not math.isfinite(value):
            raise NumericError(f"non-finite loss {value!r} at step {step + 1}")
        self.optimizer.step()
        return value

    def save(self, step: int) -> str:
        return save_checkpoint(
            self.checkpoint_path,
            self.params,
            self.optimizer.state,
            extra={"train_step": step, "sigma": self.sigma},
        )

    def _print(self, text: str = "") -> None:
        if self.verbose:
            print(text)

    def run(self) -> RunManifest:
        config, msgs = self.config, self.msgs
        total = self.schedule.total_steps()
        os.makedirs(self.output_dir, exist_ok=True)
        _prepare_loss_log(self.loss_log_path, self.start_step)
        self.logger.start_session("train", config.to_dict(), {"start_step": self.start_step})

        self._print("=" * 50)
        self._print(f"{msgs['train']}: {config.name}")
        self._print("=" * 50)
        self._print(f"{msgs['model']}: {config.model.label}")
        self._print(f"{msgs['parameters']}: {parameter_count(self.params)}")
        self._print(f"{msgs['sigma']}: {self.sigma:g}")
        self._print(f"{msgs['steps']}: {total} ({self.schedule.steps_per_epoch}/epoch)")
        if self.start_step:
            self._print(f"{msgs['resumed_from']}: {msgs['step']} {self.start_step}")
        self._print(f"{msgs['output_dir']}: {self.output_dir}")
        self._print("-" * 50)

        started = time.perf_counter()
        every = config.train.log_every
        with open(self.loss_log_path, "a", newline="", encoding="utf-8") as log_file:
            writer = csv.writer(log_file, lineterminator="\n")
            for step in range(self.start_step, total):
                try:
                    loss = self.train_step(step)
                except NumericError as e:
                    self.logger.end_session("aborted", error=str(e))
                    raise
                writer.writerow([step + 1, repr(loss)])
                if every and (step + 1) % every == 0:
                    log_file.flush()
                    self._print(f"{msgs['step']} {step + 1:>6}/{total}  {msgs['loss']} {loss:.6f}")
                    self.logger.log_event("step", step=step + 1, loss=loss)
                if config.train.checkpoint_every and (step + 1) % config.train.checkpoint_every == 0:
                    self.save(step + 1)

        gates = None
        if self.params.config.is_gated:
            gates = gate_values(self.params)
            if not all(math.isfinite(a) and a > 0 for a in gates):
                raise NumericError(f"gates left the positive finite range: {gates}")
            self._print(f"{msgs['gates']}: " + ", ".join(f"{a:.4f}" for a in gates))

        checkpoint = self.save(max(total, self.start_step))
        final_metrics = self._final_eval()
        elapsed = time.perf_counter() - started

        manifest = RunManifest(
            command="train",
            config=config.to_dict(),
            wall_clock_seconds=elapsed,
            final_metrics=final_metrics,
            checkpoint=checkpoint,
            loss_log=self.loss_log_path,
            gates=gates,
            steps_completed=max(total, self.start_step),
            extra={"sigma": self.sigma, "parameters": parameter_count(self.params)},
        )
        manifest.write(os.path.join(self.output_dir, MANIFEST_FILE))
        self.logger.end_session("done", steps=manifest.steps_completed, metrics=final_metrics)
        self._print(f"{msgs['checkpoint']}: {checkpoint}")
        self._print(f"{msgs['elapsed']}: {elapsed:.1f}s")
        self._print("=" * 50)
        return manifest

    def _final_eval(self) -> list[dict]:
        """Score the trained model at its own noise level, if eval images are configured."""
        eval_cfg = self.config.eval
        if not eval_cfg.has_images:
            return []
        images = load_images(eval_cfg.dataset_dir, eval_cfg.synth)
        eval_set = make_eval_set(images, self.sigma, eval_cfg.seed)
        report = MetricsReport(evaluate_model(self.params, eval_set, self.sigma))
        eval_dir = os.path.join(self.output_dir, "eval")
        write_rows_csv(report, os.path.join(eval_dir, "metrics_per_image.csv"))
        write_table_csv(report.aggregates(), os.path.join(eval_dir, "metrics_table.csv"))
        for agg in report.aggregates():
            self._print(f"PSNR {agg.psnr_db:.2f} dB / SSIM {agg.ssim:.4f}  ({agg.count} {self.msgs['images']})")
            self.logger.log_event("eval", sigma=agg.sigma, psnr_db=agg.psnr_db, ssim=agg.ssim)
        return metrics_entries(report.aggregates())


def cmd_train(
    config: RunConfig, resume: str | None = None, verbose: bool = True, lang: str = "en"
) -> RunManifest:
    """Train the configured model and write checkpoint, loss log and manifest."""
    checkpoint = load_checkpoint(resume) if resume else None
    return Trainer(config, resume=checkpoint, verbose=verbose, lang=lang).run()
